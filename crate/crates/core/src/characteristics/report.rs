use super::push::{variational_push, CharState, FlowJacobian};
use super::sampler::FieldSampler;
use crate::error::{CoreError, Result};
use crate::phase::Mode;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForwardBackwardRow {
    pub t: f64,
    /// `1 + sup |grad(X, V)(s; 0) - I|` over `s <= t` and samples.
    pub forward: f64,
    /// `1 + sup |grad(X, V)(0; s) - I|` over `s <= t` and samples.
    pub backward: f64,
    /// `backward / forward^{3 + i}`, `i = 0` planar and `1` otherwise.
    pub ratio: f64,
    /// Same suprema with the full Jacobian norms `|grad X| + |grad V|`.
    pub forward_full: f64,
    pub backward_full: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardBackwardReport {
    pub mode: Mode,
    pub exponent: i32,
    pub rows: Vec<ForwardBackwardRow>,
}

/// Sampled forward and backward characteristic derivative suprema.
///
/// `samples` are phase points `(x, p)`; forward maps start from them at time
/// zero, backward maps start from them at each entry of `times`.
pub fn forward_backward_report(
    fields: &dyn FieldSampler,
    samples: &[([f64; 2], Vec<f64>)],
    times: &[f64],
    max_dt: f64,
) -> Result<ForwardBackwardReport> {
    let mode = fields.mode();
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| *t < 0.0) {
        return Err(CoreError::Constraint("sample times must be nonnegative and sorted".into()));
    }
    let exponent = if mode == Mode::TwoD { 3 } else { 4 };
    let mut fwd = vec![(0.0f64, 0.0f64); times.len()];
    let mut bwd = vec![(0.0f64, 0.0f64); times.len()];
    for (x, p) in samples {
        let mut s = CharState::new(mode, 0.0, *x, p)?;
        let mut j = FlowJacobian::identity(mode);
        let mut run = (j.deviation(), j.dx_norm() + j.dv_norm());
        for (k, &tk) in times.iter().enumerate() {
            while s.t < tk - 1e-12 {
                let h = (tk - s.t).min(max_dt);
                let (ns, nj) = variational_push(&s, &j, fields, h)?;
                s = ns;
                j = nj;
                run.0 = run.0.max(j.deviation());
                run.1 = run.1.max(j.dx_norm() + j.dv_norm());
            }
            fwd[k].0 = fwd[k].0.max(run.0);
            fwd[k].1 = fwd[k].1.max(run.1);
        }
        for (k, &tk) in times.iter().enumerate() {
            let mut s = CharState::new(mode, tk, *x, p)?;
            let mut j = FlowJacobian::identity(mode);
            while s.t > 1e-12 {
                let h = s.t.min(max_dt);
                let (ns, nj) = variational_push(&s, &j, fields, -h)?;
                s = ns;
                j = nj;
            }
            bwd[k].0 = bwd[k].0.max(j.deviation());
            bwd[k].1 = bwd[k].1.max(j.dx_norm() + j.dv_norm());
        }
    }
    let mut rows = Vec::with_capacity(times.len());
    let mut bsup = (0.0f64, 0.0f64);
    for (k, &t) in times.iter().enumerate() {
        bsup.0 = bsup.0.max(bwd[k].0);
        bsup.1 = bsup.1.max(bwd[k].1);
        let forward = 1.0 + fwd[k].0;
        let backward = 1.0 + bsup.0;
        rows.push(ForwardBackwardRow {
            t,
            forward,
            backward,
            ratio: backward / forward.powi(exponent),
            forward_full: 1.0 + fwd[k].1,
            backward_full: 1.0 + bsup.1,
        });
    }
    Ok(ForwardBackwardReport { mode, exponent, rows })
}
