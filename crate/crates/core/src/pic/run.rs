//! Leapfrog coupling of particles and the spectral field solver.
//!
//! Positions and fields live at integer steps, momenta at half steps. Step
//! `n -> n + 1`: gather `E^n, B^n` at `x^n` (cloud-in-cell), kick the
//! momenta over `dt`, drift, deposit the current at the midpoint positions
//! with the new velocities, correct its longitudinal part from the charge
//! change, and advance the fields. Diagnostics at step `n` use momenta
//! synchronized by a half kick from `p^(n-1/2)`.

use super::deposit::{check_inside, deposit_rho, deposit_with, velocity};
use super::diagnostics::{DiagnosticRecord, DiagnosticSeries};
use super::load::load_particles;
use super::scenario::{FieldInit, Scenario};
use crate::characteristics::{kick, EmSample};
use crate::error::{CoreError, Result};
use crate::history::{Frame, RunHistory};
use crate::maxwell::{
    evolve_a3, field_energy, gauge_a3, FieldState, GaugeState, Grid, MaxwellSolver, SourceDensities, SpectralInterpolator, DEFAULT_CFL,
};
use crate::phase::{moment, Mode, MomentSpec, Particle, ParticleEnsemble};
use crate::vecops::pairwise_sum_by;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub series: DiagnosticSeries,
    /// Fields and synchronized particles at `t_end`.
    pub final_frame: Frame,
    pub history: Option<RunHistory>,
}

/// A run stopped by a non-finite state; `last_good` is the last fully
/// finite diagnostic frame.
#[derive(Clone, Debug)]
pub struct RunFailure {
    pub error: CoreError,
    pub last_good: Option<Box<Frame>>,
    pub series: Option<DiagnosticSeries>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.last_good {
            Some(fr) => write!(f, "{} (last good state at t = {})", self.error, fr.time),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {}

impl From<CoreError> for RunFailure {
    fn from(error: CoreError) -> Self {
        RunFailure { error, last_good: None, series: None }
    }
}

/// Bilinear gather of all field components at `x`.
pub(crate) fn gather(f: &FieldState, x: [f64; 2]) -> EmSample {
    let (lo, hi, fr) = f.grid.cic(x);
    let n1 = f.grid.n[0];
    let w = [
        (lo[1] * n1 + lo[0], (1.0 - fr[0]) * (1.0 - fr[1])),
        (lo[1] * n1 + hi[0], fr[0] * (1.0 - fr[1])),
        (hi[1] * n1 + lo[0], (1.0 - fr[0]) * fr[1]),
        (hi[1] * n1 + hi[0], fr[0] * fr[1]),
    ];
    let at = |a: &[f64]| w.iter().map(|&(i, c)| c * a[i]).sum::<f64>();
    let mut s = EmSample { e: [0.0; 3], b: [0.0; 3] };
    for k in 0..3 {
        s.e[k] = at(&f.e[k]);
        s.b[k] = at(&f.b[k]);
    }
    if f.mode == Mode::TwoD {
        s.e[2] = 0.0;
        s.b[0] = 0.0;
        s.b[1] = 0.0;
    }
    s
}

fn initial_fields(scn: &Scenario, grid: Grid, solver: &MaxwellSolver, rho: &[f64]) -> Result<FieldState> {
    let mut f = FieldState::zeros(scn.mode, grid);
    let (poisson, e, b) = match &scn.fields {
        FieldInit::Zero => (false, [0.0; 3], [0.0; 3]),
        FieldInit::Poisson => (true, [0.0; 3], [0.0; 3]),
        FieldInit::Uniform { e, b, poisson } => (*poisson, *e, *b),
    };
    if poisson {
        let [e1, e2] = solver.poisson_field(rho)?;
        f.e[0] = e1;
        f.e[1] = e2;
    }
    for k in 0..3 {
        f.e[k].iter_mut().for_each(|v| *v += e[k]);
        f.b[k].iter_mut().for_each(|v| *v += b[k]);
    }
    f.validate()?;
    Ok(f)
}

struct Tracers {
    x: Vec<[f64; 2]>,
    p: Vec<[f64; 3]>,
    i0: Vec<f64>,
    drift: Vec<f64>,
}

fn interpolator(solver: &MaxwellSolver, f: &FieldState, a3: &[f64]) -> SpectralInterpolator {
    let arrays: Vec<&[f64]> = f.e.iter().chain(f.b.iter()).map(|a| a.as_slice()).chain(std::iter::once(a3)).collect();
    SpectralInterpolator::new(solver.spectral(), &arrays)
}

fn spectral_sample(it: &SpectralInterpolator, x: [f64; 2], mode: Mode) -> (EmSample, f64) {
    let mut v = [0.0; 7];
    it.eval(x, &mut v);
    let mut s = EmSample { e: [v[0], v[1], v[2]], b: [v[3], v[4], v[5]] };
    if mode == Mode::TwoD {
        s.e[2] = 0.0;
        s.b[0] = 0.0;
        s.b[1] = 0.0;
    }
    (s, v[6])
}

fn finite_state(xs: &[[f64; 2]], ps: &[[f64; 3]]) -> bool {
    xs.iter().all(|x| x.iter().all(|v| v.is_finite())) && ps.iter().all(|p| p.iter().all(|v| v.is_finite()))
}

struct Context<'a> {
    scn: &'a Scenario,
    grid: Grid,
    solver: MaxwellSolver,
    ws: Vec<f64>,
}

impl Context<'_> {
    fn particles(&self, xs: &[[f64; 2]], ps: &[[f64; 3]]) -> Vec<Particle> {
        xs.iter().zip(ps).zip(&self.ws).map(|((&x, &p), &w)| Particle { x, p, w }).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        step: usize,
        fields: &FieldState,
        rho: &[f64],
        particles: &[Particle],
        samples: &[EmSample],
        invariant_drift: f64,
        gauge: Option<&GaugeState>,
    ) -> Result<DiagnosticRecord> {
        let scn = self.scn;
        let d = scn.mode.dim_p();
        let ens = ParticleEnsemble::new(scn.mode, self.grid.len, particles.to_vec())?;
        let kinetic = 4.0
            * PI
            * pairwise_sum_by(particles.len(), &|i| {
                let p = particles[i].p;
                particles[i].w * 1f64.hypot(p[0].hypot(p[1]).hypot(p[2]))
            });
        let fe = field_energy(fields);
        let (gauss, divb) = self.solver.constraint_residual(fields, rho)?;
        let kmag = fields.magnitude();
        let k_linf = kmag.iter().copied().fold(0.0, f64::max);
        let area = self.grid.cell_area();
        let mut moments = Vec::new();
        let mut k_norms = Vec::new();
        let mut force_moments = Vec::new();
        let ksample: Vec<f64> = samples.iter().map(|s| (s.e.iter().chain(s.b.iter()).map(|v| v * v).sum::<f64>()).sqrt()).collect();
        for &n in &scn.diagnostics.moments {
            moments.push(moment(&ens, &MomentSpec::new(n, d)?)?);
            let q = n + d as f64;
            k_norms.push(if k_linf > 0.0 {
                k_linf * (area * pairwise_sum_by(kmag.len(), &|i| (kmag[i] / k_linf).powf(q))).powf(1.0 / q)
            } else {
                0.0
            });
            force_moments.push(pairwise_sum_by(particles.len(), &|i| {
                let p = particles[i].p;
                particles[i].w * 1f64.hypot(p[0].hypot(p[1]).hypot(p[2])).powf(n - 1.0) * ksample[i]
            }));
        }
        let (a3_sup, gauge_drift) = match gauge {
            Some(g) => {
                let exact = gauge_a3(fields)?.zero_mean();
                let ev = g.zero_mean();
                (g.a3.iter().fold(0.0f64, |m, v| m.max(v.abs())), exact.iter().zip(&ev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            }
            None => (0.0, 0.0),
        };
        let p3_line_sup = if scn.mode == Mode::TwoHalfD { self.p3_line_sup(particles) } else { 0.0 };
        let rec = DiagnosticRecord {
            step,
            time: step as f64 * scn.dt,
            field_energy: fe,
            kinetic_energy: kinetic,
            total_energy: fe + kinetic,
            gauss_residual: gauss,
            div_b_residual: divb,
            total_charge: 4.0 * PI * pairwise_sum_by(self.ws.len(), &|i| self.ws[i]),
            max_weight: self.ws.iter().copied().fold(0.0, f64::max),
            density_max: rho.iter().copied().fold(0.0, f64::max) / (4.0 * PI),
            k_linf,
            moments,
            k_norms,
            force_moments,
            invariant_drift,
            a3_sup,
            gauge_drift,
            p3_line_sup,
        };
        Ok(rec)
    }

    /// Sup over (cell, p1 bin, p2 bin) of `sum w <p3>^(5 + delta) / (cell area * bin^2)`.
    fn p3_line_sup(&self, particles: &[Particle]) -> f64 {
        let h = self.grid.h();
        let dp = self.scn.diagnostics.p_bin;
        let e = 5.0 + self.scn.diagnostics.delta;
        let mut bins: HashMap<(usize, i64, i64), f64> = HashMap::new();
        for q in particles {
            let c1 = ((q.x[0] / h[0]) as usize).min(self.grid.n[0] - 1);
            let c2 = ((q.x[1] / h[1]) as usize).min(self.grid.n[1] - 1);
            let key = (c2 * self.grid.n[0] + c1, (q.p[0] / dp).floor() as i64, (q.p[1] / dp).floor() as i64);
            *bins.entry(key).or_insert(0.0) += q.w * 1f64.hypot(q.p[2]).powf(e);
        }
        bins.values().copied().fold(0.0, f64::max) / (self.grid.cell_area() * dp * dp)
    }
}

/// Run a scenario to `t_end`.
pub fn run(scn: &Scenario) -> std::result::Result<RunOutput, RunFailure> {
    scn.validate()?;
    let grid = scn.grid()?;
    let solver = MaxwellSolver::new(grid, DEFAULT_CFL);
    let dt = scn.dt;
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let loaded = load_particles(scn, &grid, &mut rng)?;
    check_inside(&loaded, grid.len)?;
    ParticleEnsemble::new(scn.mode, grid.len, loaded.clone())?;
    let ws: Vec<f64> = loaded.iter().map(|q| q.w).collect();
    let mut xs: Vec<[f64; 2]> = loaded.iter().map(|q| q.x).collect();
    let p0: Vec<[f64; 3]> = loaded.iter().map(|q| q.p).collect();
    let ctx = Context { scn, grid, solver, ws };
    let solver = &ctx.solver;

    let mut rho = deposit_rho(&loaded, &xs, &grid);
    let mut fields = initial_fields(scn, grid, solver, &rho)?;
    if scn.feedback {
        let (r, _) = solver.constraint_residual(&fields, &rho)?;
        let scale = 1.0 + rho.iter().map(|v| v * v).sum::<f64>().sqrt() * grid.cell_area().sqrt();
        if r > 1e-8 * scale {
            return Err(CoreError::Constraint(format!(
                "initial Gauss residual {r:e} is too large; use a Poisson field init or a lattice load"
            ))
            .into());
        }
    }
    let mut gauge = if scn.mode == Mode::TwoHalfD { Some(gauge_a3(&fields)?) } else { None };

    // p^(-1/2) from a backward half kick
    let mut ph: Vec<[f64; 3]> = xs.par_iter().zip(&p0).map(|(&x, &p)| kick(p, &gather(&fields, x), -0.5 * dt)).collect();

    let nt = scn.diagnostics.tracers.min(loaded.len());
    let mut tracers = {
        let zero = vec![0.0; grid.size()];
        let it = interpolator(solver, &fields, gauge.as_ref().map(|g| g.a3.as_slice()).unwrap_or(&zero));
        let mut t = Tracers { x: xs[..nt].to_vec(), p: Vec::new(), i0: Vec::new(), drift: vec![0.0; nt] };
        for k in 0..nt {
            let (s, a3) = spectral_sample(&it, t.x[k], scn.mode);
            t.p.push(kick(p0[k], &s, -0.5 * dt));
            t.i0.push(p0[k][2] + a3);
        }
        t
    };

    let steps = scn.steps();
    let mut records = Vec::new();
    let mut frames = Vec::new();
    let every = scn.diagnostics.every;
    let hist_every = scn.diagnostics.history_every;
    let mut last_good: Option<Box<Frame>> = None;
    let fail = |error: CoreError, last_good: &Option<Box<Frame>>, records: &Vec<DiagnosticRecord>| RunFailure {
        error,
        last_good: last_good.clone(),
        series: Some(DiagnosticSeries {
            mode: scn.mode,
            moment_orders: scn.diagnostics.moments.clone(),
            records: records.clone(),
            tracer_drift: Vec::new(),
            weights_unchanged: true,
        }),
    };
    let mut final_frame = None;

    for n in 0..=steps {
        let samples: Vec<EmSample> = xs.par_iter().map(|&x| gather(&fields, x)).collect();
        let (p_new, p_sync): (Vec<[f64; 3]>, Vec<[f64; 3]>) =
            ph.par_iter().zip(&samples).map(|(&p, s)| (kick(p, s, dt), kick(p, s, 0.5 * dt))).unzip();
        if !finite_state(&xs, &p_new) || !finite_state(&xs, &p_sync) {
            return Err(fail(CoreError::NonFinite(format!("particle state at step {n}")), &last_good, &records));
        }

        // tracers: spectral fields at x^n
        let zero = vec![0.0; grid.size()];
        let a3_now: &[f64] = gauge.as_ref().map(|g| g.a3.as_slice()).unwrap_or(&zero);
        let mut inv_drift = 0.0f64;
        let mut tracer_new = Vec::with_capacity(nt);
        if nt > 0 {
            let it = interpolator(solver, &fields, a3_now);
            for k in 0..nt {
                let (s, a3) = spectral_sample(&it, tracers.x[k], scn.mode);
                let sync = kick(tracers.p[k], &s, 0.5 * dt);
                if scn.mode == Mode::TwoHalfD {
                    let d = (sync[2] + a3 - tracers.i0[k]).abs();
                    tracers.drift[k] = tracers.drift[k].max(d);
                    inv_drift = inv_drift.max(d);
                }
                tracer_new.push(kick(tracers.p[k], &s, dt));
            }
        }

        let record_now = n % every == 0 || n == steps;
        let hist_now = hist_every > 0 && n % hist_every == 0;
        if record_now || hist_now || n == steps {
            let parts = ctx.particles(&xs, &p_sync);
            if record_now {
                let rec =
                    ctx.record(n, &fields, &rho, &parts, &samples, inv_drift, gauge.as_ref()).map_err(|e| fail(e, &last_good, &records))?;
                records.push(rec);
            }
            let frame = Frame { time: n as f64 * dt, fields: fields.clone(), particles: parts };
            if hist_now {
                let mut fr = frame.clone();
                if !scn.diagnostics.history_particles {
                    fr.particles.clear();
                }
                frames.push(fr);
            }
            if n == steps {
                final_frame = Some(frame);
            } else {
                last_good = Some(Box::new(frame));
            }
        }
        if n == steps {
            break;
        }

        let v: Vec<[f64; 3]> = p_new.par_iter().map(velocity).collect();
        let x_mid: Vec<[f64; 2]> =
            xs.par_iter().zip(&v).map(|(&x, u)| grid.wrap([x[0] + 0.5 * dt * u[0], x[1] + 0.5 * dt * u[1]])).collect();
        let x_new: Vec<[f64; 2]> = xs.par_iter().zip(&v).map(|(&x, u)| grid.wrap([x[0] + dt * u[0], x[1] + dt * u[1]])).collect();
        if !finite_state(&x_new, &p_new) {
            return Err(fail(CoreError::NonFinite(format!("positions after step {n}")), &last_good, &records));
        }
        let rho_new = deposit_rho(&loaded, &x_new, &grid);
        let next = if scn.feedback {
            let mut j = deposit_with(xs.len(), &grid, 3, |i, out| {
                for k in 0..3 {
                    out[k] = ctx.ws[i] * v[i][k];
                }
                x_mid[i]
            });
            let j3 = j.pop().unwrap();
            let j2 = j.pop().unwrap();
            let j1 = j.pop().unwrap();
            let mut j = [j1, j2, j3];
            if scn.mode == Mode::TwoD {
                j[2].iter_mut().for_each(|a| *a = 0.0);
            }
            solver.conserve_charge(&mut j, &rho, &rho_new, dt).map_err(|e| fail(e, &last_good, &records))?;
            let src = SourceDensities { grid, rho: rho.clone(), j };
            solver.step(&fields, &src, dt).map_err(|e| fail(e, &last_good, &records))?
        } else {
            let mut f = fields.clone();
            f.time += dt;
            f
        };
        if let Some(g) = gauge.as_mut() {
            *g = evolve_a3(g, &fields.e[2], &next.e[2], dt).map_err(|e| fail(e, &last_good, &records))?;
        }
        for k in 0..nt {
            let u = velocity(&tracer_new[k]);
            tracers.x[k] = grid.wrap([tracers.x[k][0] + dt * u[0], tracers.x[k][1] + dt * u[1]]);
            tracers.p[k] = tracer_new[k];
        }
        fields = next;
        rho = rho_new;
        xs = x_new;
        ph = p_new;
    }

    let final_frame = final_frame.expect("loop records the last step");
    let weights_unchanged = final_frame.particles.iter().zip(&loaded).all(|(a, b)| a.w.to_bits() == b.w.to_bits());
    let series = DiagnosticSeries {
        mode: scn.mode,
        moment_orders: scn.diagnostics.moments.clone(),
        records,
        tracer_drift: tracers.drift,
        weights_unchanged,
    };
    let history = if hist_every > 0 { Some(RunHistory::new(scn.mode, grid, hist_every as f64 * dt, frames)?) } else { None };
    Ok(RunOutput { series, final_frame, history })
}
