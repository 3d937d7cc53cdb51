use crate::error::{CoreError, Result};
use crate::quad;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Tensor rule on the backward cone after the substitution
/// `|y - x| = (t - s) sin(phi)`, which turns `dy / sqrt((t-s)^2 - |y-x|^2)`
/// into `(t - s) sin(phi) dphi dalpha`.
///
/// Time and `phi` use composite Gauss-Legendre panels of `order` nodes; the
/// `phi` range is split at `|xi| = 1 - collar` so the boundary layer gets its
/// own panels. The cone angle uses the periodic trapezoid rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetardedQuadrature {
    pub time_panels: usize,
    pub phi_panels: usize,
    pub order: usize,
    pub angle_nodes: usize,
    pub collar: f64,
}

impl Default for RetardedQuadrature {
    fn default() -> Self {
        RetardedQuadrature { time_panels: 8, phi_panels: 4, order: 4, angle_nodes: 48, collar: 0.1 }
    }
}

impl RetardedQuadrature {
    pub fn validate(&self) -> Result<()> {
        if self.time_panels == 0 || self.phi_panels == 0 || self.order == 0 || self.angle_nodes == 0 {
            return Err(CoreError::Config("retarded quadrature node counts must be positive".into()));
        }
        if !(self.collar > 0.0 && self.collar < 1.0) {
            return Err(CoreError::Config(format!("collar must lie in (0, 1), got {}", self.collar)));
        }
        Ok(())
    }

    /// Twice the panels and angle nodes.
    pub fn refined(&self) -> Self {
        RetardedQuadrature {
            time_panels: 2 * self.time_panels,
            phi_panels: 2 * self.phi_panels,
            angle_nodes: 2 * self.angle_nodes,
            ..*self
        }
    }

    /// Algebraic order of the composite rules on smooth integrands.
    pub fn expected_order(&self) -> f64 {
        2.0 * self.order as f64
    }

    pub(crate) fn composite(panels: usize, order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        (0..panels).flat_map(|k| quad::gauss_legendre(order, a + k as f64 * h, a + (k + 1) as f64 * h)).collect()
    }

    /// `(phi, weight)` nodes on `[0, pi/2]`, half the panels on each side of
    /// the collar edge.
    pub(crate) fn phi_nodes(&self) -> Vec<(f64, f64)> {
        let edge = (1.0 - self.collar).asin();
        let inner = self.phi_panels.div_ceil(2).max(1);
        let outer = (self.phi_panels / 2).max(1);
        let mut v = Self::composite(inner, self.order, 0.0, edge);
        v.extend(Self::composite(outer, self.order, edge, FRAC_PI_2));
        v
    }

    pub(crate) fn angle_nodes(&self) -> Vec<(f64, f64)> {
        quad::periodic_trapezoid(self.angle_nodes)
    }
}

/// `u(t, x) = int_0^t int_{|y - x| <= t - s} F(s, y) / sqrt((t-s)^2 - |y-x|^2) dy ds`,
/// the solution of the planar wave equation with zero data up to the
/// factor `1 / (2 pi)`.
pub fn box_inverse<F>(mut source: F, t: f64, x: [f64; 2], quadrature: &RetardedQuadrature) -> Result<f64>
where
    F: FnMut(f64, [f64; 2]) -> Result<f64>,
{
    quadrature.validate()?;
    if !(t.is_finite() && x[0].is_finite() && x[1].is_finite()) {
        return Err(CoreError::NonFinite("box_inverse vertex".into()));
    }
    if t < 0.0 {
        return Err(CoreError::Geometry(format!("vertex time {t} is negative")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let phis = quadrature.phi_nodes();
    let angles: Vec<(f64, f64, f64)> = quadrature.angle_nodes().into_iter().map(|(a, w)| (a.cos(), a.sin(), w)).collect();
    let mut total = 0.0;
    for (s, ws) in RetardedQuadrature::composite(quadrature.time_panels, quadrature.order, 0.0, t) {
        let tau = t - s;
        let mut inner = 0.0;
        for &(phi, wp) in &phis {
            let (sp, r) = (phi.sin(), tau * phi.sin());
            let mut ring = 0.0;
            for &(c, sn, wa) in &angles {
                ring += wa * source(s, [x[0] + r * c, x[1] + r * sn])?;
            }
            inner += wp * sp * ring;
        }
        total += ws * tau * inner;
    }
    if !total.is_finite() {
        return Err(CoreError::NonFinite("box_inverse result".into()));
    }
    Ok(total)
}
