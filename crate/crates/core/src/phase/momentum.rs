use crate::error::{CoreError, Result};

/// Momentum with derived energy `p0` and velocity `phat`.
///
/// Components are stored in three slots; in the planar case the third is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum {
    p: [f64; 3],
    dim: usize,
    p0: f64,
    phat: [f64; 3],
}

impl Momentum {
    pub fn new(p: &[f64]) -> Result<Self> {
        let dim = p.len();
        if dim != 2 && dim != 3 {
            return Err(CoreError::Shape(format!("momentum must have 2 or 3 components, got {dim}")));
        }
        let mut a = [0.0; 3];
        a[..dim].copy_from_slice(p);
        Self::from_array(a, dim)
    }

    pub fn from_array(p: [f64; 3], dim: usize) -> Result<Self> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite(format!("momentum {p:?}")));
        }
        if dim == 2 && p[2] != 0.0 {
            return Err(CoreError::Mode("planar momentum with nonzero p3".into()));
        }
        Ok(Self::from_array_unchecked(p, dim))
    }

    /// Build without validation; the caller guarantees finite components.
    #[inline]
    pub fn from_array_unchecked(p: [f64; 3], dim: usize) -> Self {
        let mag = p[0].hypot(p[1]).hypot(p[2]);
        let p0 = 1f64.hypot(mag);
        Momentum { p, dim, p0, phat: [p[0] / p0, p[1] / p0, p[2] / p0] }
    }

    pub fn p(&self) -> &[f64] {
        &self.p[..self.dim]
    }

    pub fn p3(&self) -> [f64; 3] {
        self.p
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn phat(&self) -> &[f64] {
        &self.phat[..self.dim]
    }

    pub fn phat3(&self) -> [f64; 3] {
        self.phat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|p|`.
    pub fn magnitude(&self) -> f64 {
        self.p[0].hypot(self.p[1]).hypot(self.p[2])
    }
}

pub fn momentum_derived(p: &[f64]) -> Result<Momentum> {
    Momentum::new(p)
}

/// `w_{d_p}(p) = p0^{d_p/2} log(1 + p0)`.
pub fn weight_w(p: &Momentum, d_p: usize) -> Result<f64> {
    if d_p != 2 && d_p != 3 {
        return Err(CoreError::Shape(format!("d_p must be 2 or 3, got {d_p}")));
    }
    let p0 = p.p0();
    Ok(p0.powf(d_p as f64 / 2.0) * p0.ln_1p())
}
