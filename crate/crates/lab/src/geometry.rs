use crate::error::{LabError, Result};
use crate::report::{IneqReport, SamplerConfig};
use crate::sample::{chunked, unit_circle, unit_sphere};
use rand::Rng;
use rvm_core::phase::Momentum;
use serde::Serialize;
use std::f64::consts::SQRT_2;

/// The six cone-geometry bounds as `lhs <= C * base`, where `base` is
/// `(1 + phat . xi)^(1/2)` or `1 + phat . xi`.
pub const GEOMETRY_NAMES: [&str; 6] =
    ["xi_plus_phat", "phat_cross_omega", "xi_minus_omega", "phat_dot_omega", "inverse_p0", "projected_phat"];

pub const GEOMETRY_CONSTANTS: [f64; 6] = [SQRT_2, SQRT_2, 1.0, 4.0, SQRT_2, 2.0 * SQRT_2];

/// Relative rounding allowance on `lhs <= C base`. Stress inputs put
/// `1 + phat . xi` near `1e-9` while `xi` itself carries `1e-16` absolute
/// rounding.
pub const ROUNDING_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometrySample {
    /// `1 + phat . xi`.
    pub d: f64,
    pub lhs: [f64; 6],
    pub base: [f64; 6],
    /// `lhs / base`, the empirical constant at this point.
    pub ratio: [f64; 6],
    pub holds: [bool; 6],
}

/// `1 + phat . xi` without cancellation: with `a` the planar speed and `c`
/// the cosine of the angle between `phat` and `-xi`,
/// `D = (1 - a) + a (1 - |xi|) + a |xi| (1 - c)`.
pub fn one_plus_phat_dot_xi(p: &Momentum, xi: [f64; 2]) -> f64 {
    let q = p.p3();
    let pl = q[0].hypot(q[1]);
    let p0 = p.p0();
    let r = xi[0].hypot(xi[1]);
    if pl == 0.0 || r == 0.0 {
        return 1.0;
    }
    let a = pl / p0;
    let one_minus_a = (1.0 + q[2] * q[2]) / (p0 * (p0 + pl));
    let one_minus_r2 = (-xi[0]).mul_add(xi[0], (-xi[1]).mul_add(xi[1], 1.0));
    let one_minus_r = one_minus_r2 / (1.0 + r);
    let cross = -(q[0] * xi[1] - q[1] * xi[0]);
    let dot = -(q[0] * xi[0] + q[1] * xi[1]);
    let half = 0.5 * cross.atan2(dot);
    one_minus_a + a * one_minus_r + 2.0 * a * r * half.sin().powi(2)
}

/// Evaluate the six bounds at `(p, xi)`; `omega = xi / |xi|`, or `(1, 0)`
/// at `xi = 0`.
pub fn geometry_bounds_check(p: &Momentum, xi: [f64; 2]) -> Result<GeometrySample> {
    if !(xi[0].is_finite() && xi[1].is_finite()) {
        return Err(LabError::Input("xi is not finite".into()));
    }
    let r = xi[0].hypot(xi[1]);
    if r > 1.0 {
        return Err(LabError::Input(format!("|xi| = {r} exceeds 1")));
    }
    let ph = p.phat3();
    let w = if r > 0.0 { [xi[0] / r, xi[1] / r] } else { [1.0, 0.0] };
    let d = one_plus_phat_dot_xi(p, xi);
    let sd = d.sqrt();
    let lhs0 = (xi[0] + ph[0]).hypot(xi[1] + ph[1]).hypot(ph[2]);
    // phat x (w1, w2, 0)
    let cx = [-ph[2] * w[1], ph[2] * w[0], ph[0] * w[1] - ph[1] * w[0]];
    let lhs1 = cx[0].hypot(cx[1]).hypot(cx[2]);
    let lhs2 = (xi[0] - w[0]).hypot(xi[1] - w[1]);
    let lhs3 = 1.0 + ph[0] * w[0] + ph[1] * w[1];
    let lhs4 = 1.0 / p.p0();
    let pd = ph[0] * xi[0] + ph[1] * xi[1];
    let lhs5 = (xi[0] * pd - ph[0]).abs().max((xi[1] * pd - ph[1]).abs());
    let lhs = [lhs0, lhs1, lhs2, lhs3, lhs4, lhs5];
    let base = [sd, sd, d, d, sd, sd];
    let mut ratio = [0.0; 6];
    let mut holds = [true; 6];
    for k in 0..6 {
        ratio[k] = lhs[k] / base[k];
        holds[k] = lhs[k] <= GEOMETRY_CONSTANTS[k] * base[k] * (1.0 + ROUNDING_SLACK);
    }
    Ok(GeometrySample { d, lhs, base, ratio, holds })
}

/// Sampling regime for one geometry sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Regime {
    Bulk,
    Rest,
    Collar,
    Fast,
    CollarFast,
    Antiparallel,
}

fn regimes(cfg: &SamplerConfig) -> Vec<Regime> {
    use Regime::*;
    let mut v = vec![Bulk, Rest];
    if cfg.stress_collar {
        v.push(Collar);
    }
    if cfg.stress_fast {
        v.push(Fast);
    }
    if cfg.stress_collar && cfg.stress_fast {
        v.push(CollarFast);
    }
    if cfg.stress_antiparallel {
        v.push(Antiparallel);
    }
    v
}

/// `|p|` with `1 - |p| / p0` in `[1e-9, 1e-6]`.
fn fast_speed<R: Rng>(rng: &mut R) -> f64 {
    let gap = 10f64.powf(rng.gen_range(-9.0..-6.0));
    // 1 - |p|/p0 ~ 1 / (2 |p|^2)
    (0.5 / gap).sqrt()
}

fn collar_radius<R: Rng>(rng: &mut R) -> f64 {
    1.0 - 10f64.powf(rng.gen_range(-9.0..-6.0))
}

fn draw<R: Rng>(rng: &mut R, regime: Regime, dim: usize) -> (Momentum, [f64; 2]) {
    let dir = |rng: &mut R| -> [f64; 3] {
        if dim == 2 {
            let w = unit_circle(rng);
            [w[0], w[1], 0.0]
        } else {
            unit_sphere(rng)
        }
    };
    let (mag, xr) = match regime {
        Regime::Bulk => (10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen::<f64>().sqrt()),
        Regime::Rest => (0.0, rng.gen::<f64>().sqrt()),
        Regime::Collar => (10f64.powf(rng.gen_range(-3.0..3.0)), collar_radius(rng)),
        Regime::Fast => (fast_speed(rng), rng.gen::<f64>().sqrt()),
        Regime::CollarFast | Regime::Antiparallel => (fast_speed(rng), collar_radius(rng)),
    };
    let mut u = dir(rng);
    if regime != Regime::Bulk && regime != Regime::Rest && dim == 3 {
        // keep the momentum close to the plane so the planar speed is fast too
        u[2] *= 1e-5;
        let n = u[0].hypot(u[1]).hypot(u[2]);
        u = [u[0] / n, u[1] / n, u[2] / n];
    }
    let p = Momentum::from_array_unchecked([mag * u[0], mag * u[1], mag * u[2]], dim);
    let w = if regime == Regime::Antiparallel {
        let pl = u[0].hypot(u[1]).max(1e-300);
        let tilt = 10f64.powf(rng.gen_range(-8.0..-1.0)) * if rng.gen() { 1.0 } else { -1.0 };
        let (c, s) = (tilt.cos(), tilt.sin());
        let (a, b) = (-u[0] / pl, -u[1] / pl);
        [c * a - s * b, s * a + c * b]
    } else {
        unit_circle(rng)
    };
    (p, [xr * w[0], xr * w[1]])
}

/// Six reports, one per bound, over `count` samples split evenly between
/// planar and full momenta and across the enabled sampling regimes. The
/// antiparallel regime combines the collar and fast limits.
pub fn geometry_suite(cfg: &SamplerConfig) -> Result<Vec<IneqReport>> {
    cfg.validate()?;
    let regs = regimes(cfg);
    let layout = "p1 p2 p3 xi1 xi2";
    let mut out: Vec<IneqReport> = (0..6)
        .map(|k| {
            let mut r = IneqReport::new(format!("geometry_{}", GEOMETRY_NAMES[k]), layout);
            r.constant = Some(GEOMETRY_CONSTANTS[k]);
            r.hard = true;
            r
        })
        .collect();
    let mut failures = [0usize; 6];
    for part in chunked(cfg.seed, 0x6E0, cfg.count, |rng, n| -> Result<(Vec<IneqReport>, [usize; 6])> {
        let mut reps: Vec<IneqReport> = (0..6).map(|_| IneqReport::new("", "")).collect();
        let mut fails = [0usize; 6];
        for i in 0..n {
            let regime = regs[i % regs.len()];
            let dim = if (i / regs.len()) % 2 == 0 { 2 } else { 3 };
            let (p, xi) = draw(rng, regime, dim);
            let g = geometry_bounds_check(&p, xi)?;
            let q = p.p3();
            let wit = [q[0], q[1], q[2], xi[0], xi[1]];
            for k in 0..6 {
                reps[k].observe(g.ratio[k], &wit);
                if !g.holds[k] {
                    fails[k] += 1;
                }
            }
        }
        Ok((reps, fails))
    }) {
        let (reps, fails) = part?;
        for (k, r) in reps.into_iter().enumerate() {
            out[k].merge(r);
            failures[k] += fails[k];
        }
    }
    for (k, r) in out.iter_mut().enumerate() {
        r.pass = failures[k] == 0 && r.max_ratio.is_finite();
        r.note = format!(
            "empirical constant {:.6} vs {:.6} ({:.4} of it), {} violations",
            r.max_ratio,
            GEOMETRY_CONSTANTS[k],
            r.max_ratio / GEOMETRY_CONSTANTS[k],
            failures[k]
        );
    }
    Ok(out)
}
