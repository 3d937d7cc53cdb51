use crate::error::{CoreError, Result};
use crate::phase::Mode;
use crate::vecops::V3;

/// Field values `(E, B)` at one spacetime point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EmSample {
    pub e: V3,
    pub b: V3,
}

impl EmSample {
    /// Reject values outside the planar ansatz `E = (E1, E2, 0)`, `B = (0, 0, B3)`.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if mode == Mode::TwoD && (self.e[2] != 0.0 || self.b[0] != 0.0 || self.b[1] != 0.0) {
            return Err(CoreError::Mode("field sample violates the planar ansatz".into()));
        }
        if self.e.iter().chain(self.b.iter()).any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("field sample".into()));
        }
        Ok(())
    }
}

/// Spatial derivatives `de[j] = d E / d x_j`, `db[j] = d B / d x_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EmGradient {
    pub de: [V3; 2],
    pub db: [V3; 2],
}

/// Evaluation contract `(t, x) -> (E, B)` under a fixed ansatz.
pub trait FieldSampler: Sync {
    fn mode(&self) -> Mode;

    fn sample(&self, t: f64, x: [f64; 2]) -> Result<EmSample>;

    fn gradient(&self, _t: f64, _x: [f64; 2]) -> Result<EmGradient> {
        Err(CoreError::Unsupported("field sampler provides no gradients".into()))
    }

    /// Time interval covered; `None` means unbounded.
    fn time_range(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Spatially and temporally constant fields.
#[derive(Clone, Copy, Debug)]
pub struct UniformField {
    mode: Mode,
    value: EmSample,
}

impl UniformField {
    pub fn new(mode: Mode, e: V3, b: V3) -> Result<Self> {
        let value = EmSample { e, b };
        value.check_mode(mode)?;
        Ok(UniformField { mode, value })
    }

    pub fn zero(mode: Mode) -> Self {
        UniformField { mode, value: EmSample::default() }
    }
}

impl FieldSampler for UniformField {
    fn mode(&self) -> Mode {
        self.mode
    }
    fn sample(&self, _t: f64, _x: [f64; 2]) -> Result<EmSample> {
        Ok(self.value)
    }
    fn gradient(&self, _t: f64, _x: [f64; 2]) -> Result<EmGradient> {
        Ok(EmGradient::default())
    }
}

/// Analytic fields given by closures.
pub struct FnField<F, G> {
    pub mode: Mode,
    pub field: F,
    pub grad: G,
}

impl<F, G> FieldSampler for FnField<F, G>
where
    F: Fn(f64, [f64; 2]) -> EmSample + Sync,
    G: Fn(f64, [f64; 2]) -> EmGradient + Sync,
{
    fn mode(&self) -> Mode {
        self.mode
    }
    fn sample(&self, t: f64, x: [f64; 2]) -> Result<EmSample> {
        Ok((self.field)(t, x))
    }
    fn gradient(&self, t: f64, x: [f64; 2]) -> Result<EmGradient> {
        Ok((self.grad)(t, x))
    }
}
