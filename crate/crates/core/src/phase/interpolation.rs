use super::profile::{momentum_integral, p3_integral, MomentumProfile, ProfileIntegralTol};
use crate::error::{CoreError, Result};
use serde::Serialize;
use std::sync::Arc;

/// One spatial cell of a phase-space density: its measure and momentum profile.
#[derive(Clone)]
pub struct PhaseCell {
    pub measure: f64,
    pub profile: Arc<dyn MomentumProfile>,
}

/// Which interpolation inequality to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum InterpolationVariant {
    /// Exponents with `d_p`; constant depends on the sup norm.
    General,
    /// Three-dimensional momenta with exponents built on 2; requires
    /// `S <= 5 + delta` and a finite `<p3>^{5 + delta}` line bound.
    ImprovedPlanar { delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `(S + d) / (M + d)`.
    pub theta: f64,
    /// Spatial exponent on the right side, `theta q`.
    pub q_rhs: f64,
}

/// `sup` over sampled planar momenta of `int <p3>^{5 + delta} g dp3`.
///
/// Finiteness is decided numerically from truncations at `|p3| = 1e2, 1e3,
/// 1e6`: the growth over `[1e3, 1e6]` may not exceed the growth over
/// `[1e2, 1e3]`, which holds for convergent power tails `|p3|^(-a)` with
/// `a > 0.3` and fails for logarithmic or power growth.
pub fn p3_line_bound(profile: &dyn MomentumProfile, delta: f64) -> Result<f64> {
    if profile.dim_p() != 3 {
        return Err(CoreError::Mode("line bound needs three-dimensional momenta".into()));
    }
    let tol = ProfileIntegralTol { abs: 1e-14, rel: 1e-10 };
    let radii = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0];
    let angles: Vec<f64> =
        if profile.planar_isotropic() { vec![0.0] } else { (0..8).map(|k| k as f64 * std::f64::consts::TAU / 8.0).collect() };
    let mut sup = 0.0f64;
    for &r in &radii {
        for &th in &angles {
            let (p1, p2) = (r * th.cos(), r * th.sin());
            let h = |z: f64| profile.density([p1, p2, z]) * (1.0 + z * z).powf(0.5 * (5.0 + delta));
            if profile.p3_support(r).is_some() {
                sup = sup.max(p3_integral(profile, r, h, tol)?);
                continue;
            }
            let trunc = |l: f64| -> Result<f64> {
                let br = [-1e5, -1e4, -1e3, -1e2, -10.0, -1.0, 0.0, 1.0, 10.0, 1e2, 1e3, 1e4, 1e5];
                crate::quad::integrate_pieces(h, -l, l, &br, tol.abs, tol.rel)
            };
            let a = trunc(1e2)?;
            let b = trunc(1e3)?;
            let c = trunc(1e6)?;
            if !c.is_finite() || c - b > (b - a).max(1e-8 * c.abs()).max(10.0 * tol.abs) {
                return Err(CoreError::Constraint(format!("p3 line bound int <p3>^(5+delta) g dp3 is not finite at |(p1,p2)| = {r}")));
            }
            sup = sup.max(c);
        }
    }
    Ok(sup)
}

/// Evaluate both sides of the moment interpolation inequality
/// `|| p0^S g ||_{L^q_x L^1_p} <~ || p0^M g ||^theta_{L^{theta q}_x L^1_p}`.
pub fn interpolation_check(cells: &[PhaseCell], s: f64, m: f64, q: f64, variant: InterpolationVariant) -> Result<InterpolationReport> {
    let d_p = cells.first().map(|c| c.profile.dim_p()).unwrap_or(2);
    if cells.iter().any(|c| c.profile.dim_p() != d_p) {
        return Err(CoreError::Mode("profiles disagree on d_p".into()));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(CoreError::Constraint(format!("need 1 <= q < inf, got q = {q}")));
    }
    let d = match variant {
        InterpolationVariant::General => d_p as f64,
        InterpolationVariant::ImprovedPlanar { delta } => {
            if d_p != 3 {
                return Err(CoreError::Mode("improved interpolation needs d_p = 3".into()));
            }
            if s > 5.0 + delta {
                return Err(CoreError::Constraint(format!("need S <= 5 + delta, got S = {s}, delta = {delta}")));
            }
            for c in cells {
                p3_line_bound(c.profile.as_ref(), delta)?;
            }
            2.0
        }
    };
    if !(m >= s) {
        return Err(CoreError::Constraint(format!("need M >= S, got M = {m}, S = {s}")));
    }
    if !(s > -d) {
        return Err(CoreError::Constraint(format!("need S > -{d}, got S = {s}")));
    }
    if cells.iter().any(|c| !(c.measure > 0.0)) {
        return Err(CoreError::Shape("cell measures must be positive".into()));
    }
    let theta = (s + d) / (m + d);
    let q_rhs = theta * q;
    let tol = ProfileIntegralTol::default();
    let mut lhs_sum = 0.0;
    let mut rhs_sum = 0.0;
    for c in cells {
        let a = momentum_integral(c.profile.as_ref(), &|p| p0(p).powf(s), true, tol)?;
        let b = momentum_integral(c.profile.as_ref(), &|p| p0(p).powf(m), true, tol)?;
        if !b.is_finite() {
            return Err(CoreError::Constraint("profile lacks the M-th moment".into()));
        }
        lhs_sum += c.measure * a.powf(q);
        rhs_sum += c.measure * b.powf(q_rhs);
    }
    let lhs = lhs_sum.powf(1.0 / q);
    let rhs = rhs_sum.powf(1.0 / q_rhs).powf(theta);
    let ratio = if lhs == 0.0 && rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(InterpolationReport { lhs, rhs, ratio, theta, q_rhs })
}

#[inline]
fn p0(p: [f64; 3]) -> f64 {
    1f64.hypot(p[0].hypot(p[1]).hypot(p[2]))
}
