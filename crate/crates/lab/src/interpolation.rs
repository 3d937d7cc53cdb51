use crate::error::{LabError, Result};
use crate::profiles::Profile;
use crate::report::IneqReport;
use crate::singular::{finite_moment, normalized, LINE_DELTA};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rvm_core::phase::{interpolation_check, InterpolationVariant, PhaseCell};
use rvm_core::CoreError;
use serde::Serialize;
use std::sync::Arc;

/// One inequality instance: exponents and which proposition it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterpolationConfig {
    pub s: f64,
    pub m: f64,
    /// `None` takes `q = (M + d) / (S + d)`, the special case.
    pub q: Option<f64>,
    pub variant: InterpolationVariant,
}

impl InterpolationConfig {
    pub fn label(&self) -> &'static str {
        match (self.variant, self.q) {
            (InterpolationVariant::General, Some(_)) => "interpolation_general",
            (InterpolationVariant::General, None) => "interpolation_special",
            (InterpolationVariant::ImprovedPlanar { .. }, _) => "interpolation_improved",
        }
    }
}

pub fn default_configs() -> Vec<InterpolationConfig> {
    use InterpolationVariant::*;
    let improved = ImprovedPlanar { delta: LINE_DELTA };
    vec![
        InterpolationConfig { s: 0.0, m: 2.0, q: Some(1.0), variant: General },
        InterpolationConfig { s: 1.0, m: 4.0, q: Some(1.5), variant: General },
        InterpolationConfig { s: -1.0, m: 3.0, q: Some(2.0), variant: General },
        InterpolationConfig { s: 2.0, m: 2.0, q: Some(1.0), variant: General },
        InterpolationConfig { s: 1.0, m: 3.0, q: None, variant: General },
        InterpolationConfig { s: 2.0, m: 6.0, q: None, variant: General },
        InterpolationConfig { s: 1.0, m: 4.0, q: None, variant: improved },
        InterpolationConfig { s: 5.0, m: 7.0, q: None, variant: improved },
    ]
}

/// Outcome for one profile and config.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum InterpolationOutcome {
    Ratio(f64),
    /// The profile does not meet the hypotheses; not a counterexample.
    Precondition(String),
    NotApplicable,
}

/// Four spatial cells holding seeded amplitudes in `(0.05, 1]` times the
/// normalized profile, with seeded measures.
pub fn cells_for(profile: &Profile, seed: u64) -> Result<Vec<PhaseCell>> {
    let base = normalized(profile)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..4)
        .map(|_| {
            let a = rng.gen_range(0.05..=1.0);
            PhaseCell { measure: rng.gen_range(0.5..2.0), profile: Arc::new(base.with_amplitude(base.amplitude * a)) }
        })
        .collect())
}

pub fn interpolation_instance(cells: &[PhaseCell], cfg: &InterpolationConfig) -> Result<InterpolationOutcome> {
    let d = cells.first().map(|c| c.profile.dim_p()).unwrap_or(2);
    let dd = match cfg.variant {
        InterpolationVariant::General => d as f64,
        InterpolationVariant::ImprovedPlanar { .. } => {
            if d != 3 {
                return Ok(InterpolationOutcome::NotApplicable);
            }
            2.0
        }
    };
    let q = cfg.q.unwrap_or((cfg.m + dd) / (cfg.s + dd));
    // screen divergent moments with truncations before the semi-infinite quadrature
    for c in cells {
        for n in [cfg.s, cfg.m] {
            match finite_moment(c.profile.as_ref(), n) {
                Ok(_) => {}
                Err(LabError::Precondition(msg)) => return Ok(InterpolationOutcome::Precondition(msg)),
                Err(e) => return Err(e),
            }
        }
    }
    match interpolation_check(cells, cfg.s, cfg.m, q, cfg.variant) {
        Ok(r) => Ok(InterpolationOutcome::Ratio(r.ratio)),
        Err(CoreError::Constraint(msg)) if msg.contains("line bound") || msg.contains("moment") => {
            Ok(InterpolationOutcome::Precondition(msg))
        }
        Err(e) => Err(e.into()),
    }
}

/// One report per proposition: the largest ratio over profiles and configs.
pub fn interpolation_suite(profiles: &[Profile], configs: &[InterpolationConfig], seed: u64) -> Result<Vec<IneqReport>> {
    let jobs: Vec<(usize, usize)> = (0..profiles.len()).flat_map(|i| (0..configs.len()).map(move |j| (i, j))).collect();
    let out: Vec<Result<(usize, usize, InterpolationOutcome)>> = jobs
        .par_iter()
        .map(|&(i, j)| match cells_for(&profiles[i], seed.wrapping_add(i as u64)) {
            Ok(cells) => Ok((i, j, interpolation_instance(&cells, &configs[j])?)),
            Err(LabError::Precondition(msg)) => Ok((i, j, InterpolationOutcome::Precondition(msg))),
            Err(e) => Err(e),
        })
        .collect();
    let mut reps: Vec<IneqReport> = Vec::new();
    let mut filtered: Vec<usize> = Vec::new();
    for r in out {
        let (i, j, o) = r?;
        let cfg = &configs[j];
        let k = match reps.iter().position(|r| r.name == cfg.label()) {
            Some(k) => k,
            None => {
                reps.push(IneqReport::new(cfg.label(), "profile S M q"));
                filtered.push(0);
                reps.len() - 1
            }
        };
        match o {
            InterpolationOutcome::Ratio(v) => reps[k].observe(v, &[i as f64, cfg.s, cfg.m, cfg.q.unwrap_or(f64::NAN)]),
            InterpolationOutcome::Precondition(_) => filtered[k] += 1,
            InterpolationOutcome::NotApplicable => {}
        }
    }
    for (r, f) in reps.iter_mut().zip(filtered) {
        r.pass = r.max_ratio.is_finite();
        r.note = format!("empirical constant {:.6}, {f} instances outside the hypotheses", r.max_ratio);
    }
    Ok(reps)
}
