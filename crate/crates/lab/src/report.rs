use crate::error::{LabError, Result};
use serde::Serialize;

/// Outcome of one check: the largest observed `lhs / rhs` and where it occurred.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IneqReport {
    pub name: String,
    pub samples: usize,
    pub max_ratio: f64,
    /// Inputs at the argmax, laid out as described by `witness_layout`.
    pub witness: Vec<f64>,
    pub witness_layout: String,
    /// Constant printed in the source statement, when there is one.
    pub constant: Option<f64>,
    /// Failure of a hard-asserted check makes the suite fail.
    pub hard: bool,
    pub pass: bool,
    pub note: String,
}

impl IneqReport {
    pub fn new(name: impl Into<String>, layout: impl Into<String>) -> Self {
        IneqReport {
            name: name.into(),
            samples: 0,
            max_ratio: 0.0,
            witness: Vec::new(),
            witness_layout: layout.into(),
            constant: None,
            hard: false,
            pass: true,
            note: String::new(),
        }
    }

    /// Record one sample; NaN ratios always win so they surface.
    pub fn observe(&mut self, ratio: f64, witness: &[f64]) {
        self.samples += 1;
        if ratio.is_nan() || (!self.max_ratio.is_nan() && ratio > self.max_ratio) || self.witness.is_empty() {
            self.max_ratio = ratio;
            self.witness = witness.to_vec();
        }
    }

    /// Fold another report over the same quantity into this one.
    pub fn merge(&mut self, other: IneqReport) {
        let n = self.samples + other.samples;
        if other.max_ratio.is_nan() || other.max_ratio > self.max_ratio || self.witness.is_empty() {
            self.max_ratio = other.max_ratio;
            self.witness = other.witness;
        }
        self.samples = n;
        self.pass &= other.pass;
    }
}

/// Seed and sizes for the randomized checks, with toggles for the three
/// stress regimes: `|xi| -> 1`, `|phat| -> 1` and `1 + phat . xi -> 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    pub stress_collar: bool,
    pub stress_fast: bool,
    pub stress_antiparallel: bool,
}

impl SamplerConfig {
    pub fn new(seed: u64, count: usize) -> Result<Self> {
        let c = SamplerConfig { seed, count, stress_collar: true, stress_fast: true, stress_antiparallel: true };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(LabError::Config("sample count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn any_stress(&self) -> bool {
        self.stress_collar || self.stress_fast || self.stress_antiparallel
    }
}

/// `num / den` with `0 / 0 = 0`.
pub fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}
