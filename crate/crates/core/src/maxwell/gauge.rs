use super::fields::FieldState;
use super::spectral::Spectral;
use crate::error::{CoreError, Result};
use crate::phase::Mode;
use num_complex::Complex64;

/// Out-of-plane vector potential `A3` with `B1 = d2 A3`, `B2 = -d1 A3`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeState {
    pub a3: Vec<f64>,
}

impl GaugeState {
    /// Copy with the spatial mean removed.
    pub fn zero_mean(&self) -> Vec<f64> {
        let m = self.a3.iter().sum::<f64>() / self.a3.len() as f64;
        self.a3.iter().map(|v| v - m).collect()
    }
}

/// Zero-mean solution of `Lap A3 = d2 B1 - d1 B2`.
pub fn gauge_a3(fields: &FieldState) -> Result<GaugeState> {
    if fields.mode != Mode::TwoHalfD {
        return Err(CoreError::Unsupported("A3 exists only in the 2.5d mode".into()));
    }
    let sp = Spectral::new(fields.grid);
    let b1 = sp.forward(&fields.b[0]);
    let b2 = sp.forward(&fields.b[1]);
    let n1 = fields.grid.n[0];
    let out: Vec<Complex64> = (0..fields.grid.size())
        .map(|m| {
            let k = sp.k(m % n1, m / n1);
            let k2 = k[0] * k[0] + k[1] * k[1];
            if k2 == 0.0 || sp.is_nyquist(m % n1, m / n1) {
                return Complex64::new(0.0, 0.0);
            }
            let rhs = Complex64::new(0.0, 1.0) * (k[1] * b1[m] - k[0] * b2[m]);
            -rhs / k2
        })
        .collect();
    Ok(GaugeState { a3: sp.inverse(out) })
}

/// `A3 <- A3 - dt (E3_start + E3_end) / 2`.
pub fn evolve_a3(gauge: &GaugeState, e3_start: &[f64], e3_end: &[f64], dt: f64) -> Result<GaugeState> {
    if e3_start.len() != gauge.a3.len() || e3_end.len() != gauge.a3.len() {
        return Err(CoreError::Shape("E3 does not match A3".into()));
    }
    Ok(GaugeState { a3: gauge.a3.iter().zip(e3_start.iter().zip(e3_end)).map(|(a, (e0, e1))| a - 0.5 * dt * (e0 + e1)).collect() })
}
