use crate::error::{LabError, Result};
use crate::profiles::Profile;
use crate::report::{ratio, IneqReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rvm_core::phase::{momentum_integral, p3_line_bound, MomentumProfile, ProfileIntegralTol};
use rvm_core::quad;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Exponent offset in the `<p3>^(5 + delta)` line bound required of full
/// momentum profiles.
pub const LINE_DELTA: f64 = 0.5;

/// Fixed part of the `|xi|` sweep.
pub const XI_SWEEP: [f64; 8] = [0.0, 0.5, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-6, 1.0 - 1e-7, 1.0 - 1e-8];

const TOL: ProfileIntegralTol = ProfileIntegralTol { abs: 1e-13, rel: 1e-9 };

/// Zero outside the cylinder `|(p1, p2)| <= radius`, `|p3| <= radius`.
struct Truncated<'a> {
    inner: &'a dyn MomentumProfile,
    radius: f64,
}

impl MomentumProfile for Truncated<'_> {
    fn dim_p(&self) -> usize {
        self.inner.dim_p()
    }
    fn density(&self, p: [f64; 3]) -> f64 {
        if p[0].hypot(p[1]) > self.radius || p[2].abs() > self.radius {
            0.0
        } else {
            self.inner.density(p)
        }
    }
    fn planar_isotropic(&self) -> bool {
        self.inner.planar_isotropic()
    }
    fn radial_breaks(&self) -> Vec<f64> {
        let mut b = self.inner.radial_breaks();
        b.extend(decades(self.radius));
        b
    }
    fn radial_support(&self) -> Option<f64> {
        Some(self.inner.radial_support().map_or(self.radius, |s| s.min(self.radius)))
    }
    fn p3_support(&self, r: f64) -> Option<f64> {
        Some(self.inner.p3_support(r).map_or(self.radius, |s| s.min(self.radius)))
    }
    fn p3_breaks(&self, r: f64) -> Vec<f64> {
        let mut b = self.inner.p3_breaks(r);
        b.extend(decades(self.radius));
        b
    }
}

/// `1, 10, 100, ...` below `top`.
fn decades(top: f64) -> impl Iterator<Item = f64> {
    (0..).map(|k| 10f64.powi(k)).take_while(move |v| *v < top)
}

fn p0(p: [f64; 3]) -> f64 {
    1f64.hypot(p[0].hypot(p[1]).hypot(p[2]))
}

/// `int p0^n g dp`, rejected as infinite when the growth between the
/// truncations at `1e3` and `1e6` exceeds the growth between `1e2` and `1e3`.
pub fn finite_moment(profile: &dyn MomentumProfile, n: f64) -> Result<f64> {
    let w = move |p: [f64; 3]| p0(p).powf(n);
    let at = |radius: f64| momentum_integral(&Truncated { inner: profile, radius }, &w, true, TOL);
    let (a, b, far) = (at(1e2)?, at(1e3)?, at(1e6)?);
    if !far.is_finite() || far - b > (b - a).max(1e-8 * far.abs()).max(10.0 * TOL.abs) {
        return Err(LabError::Precondition(format!("profile lacks a finite p0^{n} moment")));
    }
    Ok(far)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularSample {
    pub xi: [f64; 2],
    /// `int <p3>^k g / (p0 (1 + phat . xi)) dp`, `k = 0` planar, `3` full.
    pub lhs: f64,
    /// `(int p0^2 g)^(2/5) / (1 - |xi|^2)^(2/5)`.
    pub rhs_collar: f64,
    /// `(int p0^4 g)^(2/5)`.
    pub rhs_moment: f64,
    pub ratio_collar: f64,
    pub ratio_moment: f64,
}

/// A profile with its moments checked and cached, ready for `|xi|` sweeps.
pub struct SingularLemma<'a> {
    profile: &'a dyn MomentumProfile,
    weight_power: i32,
    m2: f64,
    m4: f64,
}

impl<'a> SingularLemma<'a> {
    pub fn new(profile: &'a dyn MomentumProfile) -> Result<Self> {
        let d = profile.dim_p();
        if d == 3 {
            p3_line_bound(profile, LINE_DELTA).map_err(|e| LabError::Precondition(e.to_string()))?;
            if !profile.planar_isotropic() {
                return Err(LabError::Input("full-momentum profiles must be planar isotropic".into()));
            }
        }
        let m2 = finite_moment(profile, 2.0)?;
        let m4 = finite_moment(profile, 4.0)?;
        Ok(SingularLemma { profile, weight_power: if d == 3 { 3 } else { 0 }, m2, m4 })
    }

    pub fn moments(&self) -> (f64, f64) {
        (self.m2, self.m4)
    }

    fn lhs(&self, xi: [f64; 2]) -> Result<f64> {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let k = self.weight_power;
        if self.profile.planar_isotropic() {
            // int_0^{2 pi} dtheta / (1 - a cos theta) = 2 pi / sqrt(1 - a^2), a = |p_pl| |xi| / p0,
            // with p0^2 (1 - a^2) = 1 + p3^2 + |p_pl|^2 (1 - |xi|^2)
            let gap = (-xi[0]).mul_add(xi[0], (-xi[1]).mul_add(xi[1], 1.0)).max(0.0);
            let w = move |p: [f64; 3]| {
                let pl2 = p[0] * p[0] + p[1] * p[1];
                let root = (1.0 + p[2] * p[2] + pl2 * gap).sqrt();
                (1.0 + p[2] * p[2]).powf(0.5 * k as f64) / root
            };
            return Ok(momentum_integral(self.profile, &w, true, TOL)?);
        }
        if r2 == 0.0 {
            return Ok(momentum_integral(self.profile, &|p| 1.0 / p0(p), true, TOL)?);
        }
        // planar, anisotropic: adaptive in angle with a break at the direction of -xi
        let star = (-xi[1]).atan2(-xi[0]);
        let f = self.profile;
        let mut failure = None;
        let mut ring = |r: f64| -> f64 {
            let g = |th: f64| {
                let p = [r * th.cos(), r * th.sin(), 0.0];
                let v = f.density(p);
                if v == 0.0 {
                    return 0.0;
                }
                let q = p0(p);
                v / (q + p[0] * xi[0] + p[1] * xi[1])
            };
            match quad::integrate_pieces(g, star - PI, star + PI, &[star], TOL.abs * 1e-2, TOL.rel * 1e-2) {
                Ok(v) => r * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let v = match f.radial_support() {
            Some(s) => quad::integrate_pieces(&mut ring, 0.0, s, &[], TOL.abs, TOL.rel)?,
            None => quad::integrate_semi_infinite(&mut ring, 0.0, TOL.abs, TOL.rel)?,
        };
        if let Some(e) = failure {
            return Err(e.into());
        }
        Ok(v)
    }

    pub fn eval(&self, xi: [f64; 2]) -> Result<SingularSample> {
        if !(xi[0].is_finite() && xi[1].is_finite()) || xi[0].hypot(xi[1]) > 1.0 {
            return Err(LabError::Input(format!("need |xi| <= 1, got {xi:?}")));
        }
        let lhs = self.lhs(xi)?;
        let gap = (-xi[0]).mul_add(xi[0], (-xi[1]).mul_add(xi[1], 1.0)).max(0.0);
        let rhs_collar = self.m2.powf(0.4) / gap.powf(0.4);
        let rhs_moment = self.m4.powf(0.4);
        Ok(SingularSample { xi, lhs, rhs_collar, rhs_moment, ratio_collar: ratio(lhs, rhs_collar), ratio_moment: ratio(lhs, rhs_moment) })
    }
}

/// One-shot form of [`SingularLemma::eval`].
pub fn singular_integral_lemma_check(profile: &dyn MomentumProfile, xi: [f64; 2]) -> Result<SingularSample> {
    SingularLemma::new(profile)?.eval(xi)
}

/// Scale a profile to unit sup norm (planar) or unit `<p3>^(5 + delta)` line
/// bound (full momenta), the quantities the implicit constants depend on.
pub fn normalized(p: &Profile) -> Result<Profile> {
    let s = if p.dim == 2 { p.sup() } else { p3_line_bound(p, LINE_DELTA).map_err(|e| LabError::Precondition(e.to_string()))? };
    if !(s > 0.0 && s.is_finite()) {
        return Err(LabError::Input("profile has no positive normalization".into()));
    }
    Ok(p.with_amplitude(p.amplitude / s))
}

/// The fixed sweep plus two seeded radii, each with a seeded direction.
pub fn xi_points(seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radii: Vec<f64> = XI_SWEEP.to_vec();
    radii.push(rng.gen_range(0.0..1.0));
    radii.push(1.0 - 10f64.powf(-rng.gen_range(0.0..8.0)));
    radii
        .into_iter()
        .map(|r| {
            let a = rng.gen_range(0.0..TAU);
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

/// Four reports (collar and moment forms, planar and full momenta) over the
/// normalized battery. The constants are implicit, so the reports pass when
/// every ratio is finite.
pub fn singular_suite(profiles: &[Profile], seed: u64) -> Result<Vec<IneqReport>> {
    let pts = xi_points(seed);
    let rows: Vec<Result<Vec<(usize, SingularSample)>>> = profiles
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let n = normalized(p)?;
            let lemma = SingularLemma::new(&n)?;
            pts.iter().map(|&xi| Ok((i, lemma.eval(xi)?))).collect()
        })
        .collect();
    let layout = "profile xi1 xi2";
    let mut reps: Vec<IneqReport> = ["singular_collar_2d", "singular_moment_2d", "singular_collar_2.5d", "singular_moment_2.5d"]
        .iter()
        .map(|n| IneqReport::new(*n, layout))
        .collect();
    for row in rows {
        for (i, s) in row? {
            let base = if profiles[i].dim == 2 { 0 } else { 2 };
            let w = [i as f64, s.xi[0], s.xi[1]];
            reps[base].observe(s.ratio_collar, &w);
            reps[base + 1].observe(s.ratio_moment, &w);
        }
    }
    for r in &mut reps {
        r.pass = r.max_ratio.is_finite();
        r.note = format!("empirical constant {:.6}", r.max_ratio);
    }
    Ok(reps)
}
