use crate::error::{LabError, Result};
use crate::report::{ratio, IneqReport};
use rvm_core::quad;
use rvm_core::retarded::{box_inverse, RetardedQuadrature};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Rule for `int_0^t int F / ((t - s) sqrt((t-s)^2 - |y-x|^2)) dy ds` after
/// `|y - x| = (t - s) sin(phi)`, with `phi = pi/2 (1 - (1 - u)^5)` so that a
/// `(1 - |xi|^2)^(-2/5)` blow-up at the cone becomes bounded in `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeSplitQuadrature {
    pub time_panels: usize,
    pub u_panels: usize,
    pub order: usize,
    pub angle_nodes: usize,
    /// Rule for the two weighted cone integrals of `G` and `H`.
    pub retarded: RetardedQuadrature,
}

impl Default for ConeSplitQuadrature {
    fn default() -> Self {
        ConeSplitQuadrature { time_panels: 8, u_panels: 8, order: 6, angle_nodes: 48, retarded: RetardedQuadrature::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSplitReport {
    pub lhs: f64,
    /// `int int G / sqrt((t-s)^2 - |y-x|^2)`.
    pub g_integral: f64,
    pub h_integral: f64,
    /// Sampled `sup F (1 - |xi|^2)^(2/5) / G^(2/5)`.
    pub hypothesis_g: f64,
    /// Sampled `sup F / H^(2/5)`.
    pub hypothesis_h: f64,
    pub epsilons: Vec<f64>,
    pub rhs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub report: IneqReport,
}

fn composite(panels: usize, order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels).flat_map(|k| quad::gauss_legendre(order, a + k as f64 * h, a + (k + 1) as f64 * h)).collect()
}

/// Both sides of the split estimate
/// `LHS <~ eps^(-1/10) (int G)^(2/5) + eps^(3/10) (int H)^(2/5)` at the vertex
/// `(t, x)`, after checking the pointwise hypotheses on the quadrature nodes.
pub fn cone_split_check<G, H, F>(
    g: G,
    h: H,
    f: F,
    t: f64,
    x: [f64; 2],
    epsilons: &[f64],
    quadrature: &ConeSplitQuadrature,
) -> Result<ConeSplitReport>
where
    G: Fn(f64, [f64; 2]) -> f64,
    H: Fn(f64, [f64; 2]) -> f64,
    F: Fn(f64, f64, [f64; 2], [f64; 2]) -> f64,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(LabError::Input(format!("vertex time must be positive, got {t}")));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
        return Err(LabError::Input("every epsilon must lie in (0, 1]".into()));
    }
    let angles = quad::periodic_trapezoid(quadrature.angle_nodes);
    let us = composite(quadrature.u_panels, quadrature.order, 0.0, 1.0);
    let (mut lhs, mut hyp_g, mut hyp_h) = (0.0, 0.0f64, 0.0f64);
    for (s, ws) in composite(quadrature.time_panels, quadrature.order, 0.0, t) {
        let tau = t - s;
        for &(u, wu) in &us {
            let v = 1.0 - u;
            let phi = FRAC_PI_2 * (1.0 - v.powi(5));
            let jac = 5.0 * FRAC_PI_2 * v.powi(4);
            let (sp, cp) = phi.sin_cos();
            let gap = cp * cp;
            for &(a, wa) in &angles {
                let y = [x[0] + tau * sp * a.cos(), x[1] + tau * sp * a.sin()];
                let fv = f(t, s, x, y);
                if fv < 0.0 || !fv.is_finite() {
                    return Err(LabError::Input(format!("F must be finite and nonnegative, got {fv} at s = {s}, y = {y:?}")));
                }
                if fv > 0.0 {
                    let (gv, hv) = (g(s, y), h(s, y));
                    let rg = fv * gap.powf(0.4) / gv.max(0.0).powf(0.4);
                    let rh = fv / hv.max(0.0).powf(0.4);
                    if !rg.is_finite() || !rh.is_finite() {
                        return Err(LabError::Precondition(format!(
                            "F > 0 where G or H vanishes: s = {s}, y = {y:?}, F = {fv}, G = {gv}, H = {hv}"
                        )));
                    }
                    hyp_g = hyp_g.max(rg);
                    hyp_h = hyp_h.max(rh);
                }
                lhs += ws * wu * wa * jac * sp * fv;
            }
        }
    }
    let gi = box_inverse(|s, y| Ok(g(s, y)), t, x, &quadrature.retarded)?;
    let hi = box_inverse(|s, y| Ok(h(s, y)), t, x, &quadrature.retarded)?;
    let mut rep = IneqReport::new("cone_split", "epsilon");
    let mut rhs = Vec::new();
    let mut ratios = Vec::new();
    for &e in epsilons {
        let r = e.powf(-0.1) * gi.max(0.0).powf(0.4) + e.powf(0.3) * hi.max(0.0).powf(0.4);
        let q = ratio(lhs, r);
        rep.observe(q, &[e]);
        rhs.push(r);
        ratios.push(q);
    }
    rep.pass = rep.max_ratio.is_finite();
    rep.note = format!("hypothesis constants G {hyp_g:.4}, H {hyp_h:.4}");
    Ok(ConeSplitReport {
        lhs,
        g_integral: gi,
        h_integral: hi,
        hypothesis_g: hyp_g,
        hypothesis_h: hyp_h,
        epsilons: epsilons.to_vec(),
        rhs,
        ratios,
        report: rep,
    })
}

/// The exact-hypothesis family `F = min{G^(2/5) (1 - |xi|^2)^(-2/5), H^(2/5)}`
/// with smooth positive `G`, `H`, at vertex `(t, 0)`.
pub fn cone_split_family(t: f64, epsilons: &[f64], quadrature: &ConeSplitQuadrature) -> Result<ConeSplitReport> {
    let g = |s: f64, y: [f64; 2]| (1.0 + 0.5 * (y[0] + s).cos()) * (-0.1 * (y[0] * y[0] + y[1] * y[1])).exp();
    let h = |s: f64, y: [f64; 2]| 2.0 + (y[1] - 0.3 * s).sin();
    let f = |t: f64, s: f64, x: [f64; 2], y: [f64; 2]| {
        let tau = t - s;
        let gap = ((tau * tau - (y[0] - x[0]).powi(2) - (y[1] - x[1]).powi(2)) / (tau * tau)).max(0.0);
        (g(s, y).powf(0.4) / gap.powf(0.4)).min(h(s, y).powf(0.4))
    };
    cone_split_check(g, h, f, t, [0.0, 0.0], epsilons, quadrature)
}
