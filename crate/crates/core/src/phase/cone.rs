use crate::error::{CoreError, Result};

/// Light-cone variables of a pair `(t, x)`, `(s, y)` with `s < t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeGeometry {
    /// `(y - x) / (t - s)`.
    pub xi: [f64; 2],
    /// `(y - x) / |y - x|`, or `(1, 0)` on the cone axis.
    pub omega: [f64; 2],
    /// `(t - s - |y - x|) / 2`.
    pub psi: f64,
    /// `1 - |xi|^2`, evaluated as `(tau - r)(tau + r) / tau^2`.
    pub one_minus_xi_sq: f64,
    /// `t - s`.
    pub tau: f64,
    /// `|y - x|`.
    pub r: f64,
}

impl ConeGeometry {
    /// Signed angle in `(-pi, pi]` from `-xi` to the planar part of `phat`.
    /// Zero when either vector vanishes.
    pub fn theta(&self, phat: &[f64]) -> f64 {
        let a = [-self.omega[0], -self.omega[1]];
        let b = [phat[0], phat[1]];
        if self.r == 0.0 || (b[0] == 0.0 && b[1] == 0.0) {
            return 0.0;
        }
        let th = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
        if th == -std::f64::consts::PI {
            std::f64::consts::PI
        } else {
            th
        }
    }

    /// The null-coordinate form `4 psi (tau - psi) / tau^2`.
    pub fn null_form(&self) -> f64 {
        4.0 * self.psi * (self.tau - self.psi) / (self.tau * self.tau)
    }
}

pub fn cone_coords(t: f64, s: f64, x: [f64; 2], y: [f64; 2]) -> Result<ConeGeometry> {
    if ![t, s, x[0], x[1], y[0], y[1]].iter().all(|v| v.is_finite()) {
        return Err(CoreError::NonFinite("cone coordinates".into()));
    }
    if !(s >= 0.0 && s < t) {
        return Err(CoreError::Geometry(format!("need 0 <= s < t, got s = {s}, t = {t}")));
    }
    let tau = t - s;
    let d = [y[0] - x[0], y[1] - x[1]];
    let mut r = d[0].hypot(d[1]);
    if r > tau {
        if r > tau * (1.0 + 8.0 * f64::EPSILON) {
            return Err(CoreError::Geometry(format!("point outside the backward cone: |y - x| = {r} > t - s = {tau}")));
        }
        r = tau;
    }
    let xi = [d[0] / tau, d[1] / tau];
    let omega = if r > 0.0 { [d[0] / r, d[1] / r] } else { [1.0, 0.0] };
    let psi = 0.5 * (tau - r);
    let one_minus_xi_sq = ((tau - r) * (tau + r) / (tau * tau)).clamp(0.0, 1.0);
    Ok(ConeGeometry { xi, omega, psi, one_minus_xi_sq, tau, r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis() {
        let g = cone_coords(1.0, 0.0, [0.3, 0.4], [0.3, 0.4]).unwrap();
        assert_eq!(g.xi, [0.0, 0.0]);
        assert_eq!(g.psi, 0.5);
        assert_eq!(g.one_minus_xi_sq, 1.0);
    }

    #[test]
    fn boundary() {
        let g = cone_coords(1.0, 0.0, [0.0, 0.0], [0.6, 0.8]).unwrap();
        assert!((g.xi[0].hypot(g.xi[1]) - 1.0).abs() < 1e-15);
        assert_eq!(g.psi, 0.0);
        assert_eq!(g.one_minus_xi_sq, 0.0);
    }

    #[test]
    fn interior_arithmetic() {
        let g = cone_coords(2.0, 1.0, [0.0, 0.0], [0.0, 0.6]).unwrap();
        assert!((g.xi[1] - 0.6).abs() < 1e-15);
        assert!((g.psi - 0.2).abs() < 1e-15);
        assert!((g.one_minus_xi_sq - 0.64).abs() < 1e-15);
        assert!((g.null_form() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn outside_cone_is_rejected() {
        assert!(cone_coords(1.0, 0.0, [0.0, 0.0], [1.0, 0.5]).is_err());
        assert!(cone_coords(1.0, 1.0, [0.0, 0.0], [0.0, 0.0]).is_err());
        assert!(cone_coords(1.0, -0.1, [0.0, 0.0], [0.0, 0.0]).is_err());
    }

    #[test]
    fn theta_measures_angle_from_minus_xi() {
        let g = cone_coords(1.0, 0.0, [0.0, 0.0], [0.5, 0.0]).unwrap();
        assert!((g.theta(&[-0.5, 0.0]) - 0.0).abs() < 1e-15);
        assert!((g.theta(&[0.5, 0.0]) - std::f64::consts::PI).abs() < 1e-15);
        assert!((g.theta(&[0.0, -0.5]) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
