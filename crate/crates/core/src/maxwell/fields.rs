use super::grid::Grid;
use super::spectral::Spectral;
use crate::error::{CoreError, Result};
use crate::phase::{Mode, ParticleEnsemble};
use num_complex::Complex64;

/// Default bound `dt <= DEFAULT_CFL * min(h)`.
pub const DEFAULT_CFL: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Grid values of `E` and `B` at one time. In the planar mode `E3`, `B1`
/// and `B2` are identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub mode: Mode,
    pub grid: Grid,
    pub time: f64,
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

impl FieldState {
    pub fn zeros(mode: Mode, grid: Grid) -> Self {
        let z = vec![0.0; grid.size()];
        FieldState { mode, grid, time: 0.0, e: [z.clone(), z.clone(), z.clone()], b: [z.clone(), z.clone(), z] }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.size();
        if self.e.iter().chain(self.b.iter()).any(|a| a.len() != n) {
            return Err(CoreError::Shape("field arrays do not match the grid".into()));
        }
        if self.e.iter().chain(self.b.iter()).flatten().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("field values".into()));
        }
        if self.mode == Mode::TwoD && [&self.e[2], &self.b[0], &self.b[1]].iter().any(|a| a.iter().any(|v| *v != 0.0)) {
            return Err(CoreError::Mode("planar fields carry out-of-ansatz components".into()));
        }
        Ok(())
    }

    /// `sqrt(|E|^2 + |B|^2)` at each node.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.size())
            .map(|i| {
                let mut s = 0.0;
                for c in 0..3 {
                    s += self.e[c][i] * self.e[c][i] + self.b[c][i] * self.b[c][i];
                }
                s.sqrt()
            })
            .collect()
    }
}

/// Charge and current densities on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceDensities {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub j: [Vec<f64>; 3],
}

impl SourceDensities {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![0.0; grid.size()];
        SourceDensities { grid, rho: z.clone(), j: [z.clone(), z.clone(), z] }
    }
}

/// Spectral Maxwell stepper with a fixed grid.
#[derive(Clone)]
pub struct MaxwellSolver {
    spectral: Spectral,
    cfl: f64,
}

impl MaxwellSolver {
    pub fn new(grid: Grid, cfl: f64) -> Self {
        MaxwellSolver { spectral: Spectral::new(grid), cfl }
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    pub fn dt_limit(&self) -> f64 {
        let h = self.grid().h();
        self.cfl * h[0].min(h[1])
    }

    /// Advance `fields` by `dt` with `sources.j` held constant over the step.
    ///
    /// Per mode with `k != 0`: the longitudinal field loses `dt j_L`, and the
    /// transverse pair rotates exactly at frequency `|k|` with the driven
    /// response to `j_T`. The mean mode loses `dt j`; modes on a Nyquist line
    /// are left untouched.
    pub fn step(&self, fields: &FieldState, sources: &SourceDensities, dt: f64) -> Result<FieldState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CoreError::Constraint(format!("dt must be positive, got {dt}")));
        }
        let limit = self.dt_limit();
        if dt > limit * (1.0 + 1e-12) {
            return Err(CoreError::Cfl { dt, limit });
        }
        if fields.grid != *self.grid() || sources.grid != *self.grid() {
            return Err(CoreError::Shape("fields, sources and solver grids differ".into()));
        }
        let sp = &self.spectral;
        let n1 = self.grid().n[0];
        let comps = if fields.mode == Mode::TwoD { [true, true, false] } else { [true; 3] };
        let fe: Vec<Vec<Complex64>> = (0..3).map(|c| sp.forward(&fields.e[c])).collect();
        let fb: Vec<Vec<Complex64>> = (0..3).map(|c| sp.forward(&fields.b[c])).collect();
        let fj: Vec<Vec<Complex64>> =
            (0..3).map(|c| if comps[c] { sp.forward(&sources.j[c]) } else { vec![Complex64::new(0.0, 0.0); self.grid().size()] }).collect();
        let mut ne = fe.clone();
        let mut nb = fb.clone();
        let i = Complex64::new(0.0, 1.0);
        for m in 0..self.grid().size() {
            let (i1, i2) = (m % n1, m / n1);
            if sp.is_nyquist(i1, i2) {
                continue;
            }
            let k = sp.k(i1, i2);
            let kk = k[0].hypot(k[1]);
            let e = [fe[0][m], fe[1][m], fe[2][m]];
            let b = [fb[0][m], fb[1][m], fb[2][m]];
            let j = [fj[0][m], fj[1][m], fj[2][m]];
            if kk == 0.0 {
                if i1 == 0 && i2 == 0 {
                    for c in 0..3 {
                        ne[c][m] = e[c] - dt * j[c];
                    }
                }
                continue;
            }
            let kh = [k[0] / kk, k[1] / kk];
            let el = kh[0] * e[0] + kh[1] * e[1];
            let jl = kh[0] * j[0] + kh[1] * j[1];
            let et = [e[0] - kh[0] * el, e[1] - kh[1] * el, e[2]];
            let jt = [j[0] - kh[0] * jl, j[1] - kh[1] * jl, j[2]];
            let kc = [k[0], k[1], 0.0];
            let curl = |v: [Complex64; 3]| -> [Complex64; 3] {
                [i * (kc[1] * v[2] - kc[2] * v[1]), i * (kc[2] * v[0] - kc[0] * v[2]), i * (kc[0] * v[1] - kc[1] * v[0])]
            };
            let (s, c) = (kk * dt).sin_cos();
            let cb = curl(b);
            let ce = curl(et);
            let cj = curl(jt);
            let el_new = el - dt * jl;
            for q in 0..3 {
                let et_new = c * et[q] + (s / kk) * (cb[q] - jt[q]);
                let lon = if q < 2 { kh[q] * el_new } else { Complex64::new(0.0, 0.0) };
                ne[q][m] = et_new + lon;
                nb[q][m] = c * b[q] - (s / kk) * ce[q] + ((1.0 - c) / (kk * kk)) * cj[q];
            }
        }
        let mut out = FieldState::zeros(fields.mode, *self.grid());
        out.time = fields.time + dt;
        for q in 0..3 {
            let active_e = comps[q];
            let active_b = fields.mode == Mode::TwoHalfD || q == 2;
            if active_e {
                out.e[q] = sp.inverse(std::mem::take(&mut ne[q]));
            }
            if active_b {
                out.b[q] = sp.inverse(std::mem::take(&mut nb[q]));
            }
        }
        out.validate()?;
        Ok(out)
    }

    /// `(||div E - rho||_2, ||div B||_2)`; `rho` is compared modulo the modes
    /// outside the solver's range (the neutralized mean and the Nyquist lines).
    pub fn constraint_residual(&self, fields: &FieldState, rho: &[f64]) -> Result<(f64, f64)> {
        let g = self.grid();
        if rho.len() != g.size() || fields.grid != *g {
            return Err(CoreError::Shape("constraint inputs do not match the grid".into()));
        }
        let sp = &self.spectral;
        let dive: Vec<f64> = {
            let a = sp.derivative(&fields.e[0], 0);
            let b = sp.derivative(&fields.e[1], 1);
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        };
        let target = sp.project_reachable(rho);
        let area = g.cell_area();
        let r1 = (dive.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * area).sqrt();
        let r2 = if fields.mode == Mode::TwoD {
            0.0
        } else {
            let a = sp.derivative(&fields.b[0], 0);
            let b = sp.derivative(&fields.b[1], 1);
            (a.iter().zip(&b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>() * area).sqrt()
        };
        Ok((r1, r2))
    }

    /// Replace the longitudinal part of the in-plane current by the one fixed by
    /// continuity over a step from `rho_old` to `rho_new`, so that Gauss's law
    /// is carried exactly by [`MaxwellSolver::step`].
    pub fn conserve_charge(&self, j: &mut [Vec<f64>; 3], rho_old: &[f64], rho_new: &[f64], dt: f64) -> Result<()> {
        let g = self.grid();
        let n = g.size();
        if j.iter().any(|a| a.len() != n) || rho_old.len() != n || rho_new.len() != n {
            return Err(CoreError::Shape("current or charge does not match the grid".into()));
        }
        let sp = &self.spectral;
        let drho: Vec<f64> = rho_new.iter().zip(rho_old).map(|(a, b)| a - b).collect();
        let dr = sp.forward(&drho);
        let mut j1 = sp.forward(&j[0]);
        let mut j2 = sp.forward(&j[1]);
        let n1 = g.n[0];
        for m in 0..n {
            let k = sp.k(m % n1, m / n1);
            let k2 = k[0] * k[0] + k[1] * k[1];
            if sp.is_nyquist(m % n1, m / n1) {
                j1[m] = Complex64::new(0.0, 0.0);
                j2[m] = Complex64::new(0.0, 0.0);
                continue;
            }
            if k2 == 0.0 {
                continue;
            }
            let kj = (k[0] * j1[m] + k[1] * j2[m]) / k2;
            let want = Complex64::new(0.0, 1.0) * dr[m] / (dt * k2);
            j1[m] += (want - kj) * k[0];
            j2[m] += (want - kj) * k[1];
        }
        j[0] = sp.inverse(j1);
        j[1] = sp.inverse(j2);
        j[2] = sp.drop_nyquist(&j[2]);
        Ok(())
    }

    /// Curl-free `E = -grad phi` with `-Lap phi = rho - <rho>`.
    pub fn poisson_field(&self, rho: &[f64]) -> Result<[Vec<f64>; 2]> {
        let g = self.grid();
        if rho.len() != g.size() {
            return Err(CoreError::Shape("rho does not match the grid".into()));
        }
        let sp = &self.spectral;
        let r = sp.forward(rho);
        let n1 = g.n[0];
        let mut e1 = vec![Complex64::new(0.0, 0.0); g.size()];
        let mut e2 = e1.clone();
        for m in 0..g.size() {
            let k = sp.k(m % n1, m / n1);
            let k2 = k[0] * k[0] + k[1] * k[1];
            if k2 > 0.0 && !sp.is_nyquist(m % n1, m / n1) {
                let f = r[m] * Complex64::new(0.0, -1.0 / k2);
                e1[m] = f * k[0];
                e2[m] = f * k[1];
            }
        }
        Ok([sp.inverse(e1), sp.inverse(e2)])
    }
}

/// One spectral step with a freshly planned solver and the default CFL bound.
pub fn step_maxwell(fields: &FieldState, sources: &SourceDensities, dt: f64) -> Result<FieldState> {
    MaxwellSolver::new(fields.grid, DEFAULT_CFL).step(fields, sources, dt)
}

pub fn constraint_residual(fields: &FieldState, rho: &[f64]) -> Result<(f64, f64)> {
    MaxwellSolver::new(fields.grid, DEFAULT_CFL).constraint_residual(fields, rho)
}

pub fn poisson_field(grid: Grid, rho: &[f64]) -> Result<[Vec<f64>; 2]> {
    MaxwellSolver::new(grid, DEFAULT_CFL).poisson_field(rho)
}

/// `1/2 int |E|^2 + |B|^2 dx`.
pub fn field_energy(fields: &FieldState) -> f64 {
    let area = fields.grid.cell_area();
    let n = fields.grid.size();
    0.5 * area
        * crate::vecops::pairwise_sum_by(n, &|i| {
            let mut s = 0.0;
            for c in 0..3 {
                s += fields.e[c][i] * fields.e[c][i] + fields.b[c][i] * fields.b[c][i];
            }
            s
        })
}

/// `1/2 int |E|^2 + |B|^2 dx + 4 pi sum_i w_i p0_i`.
pub fn energy(fields: &FieldState, ens: &ParticleEnsemble) -> Result<f64> {
    if fields.mode != ens.mode() {
        return Err(CoreError::Mode("fields and ensemble disagree on mode".into()));
    }
    let ps = ens.particles();
    let kinetic = crate::vecops::pairwise_sum_by(ps.len(), &|i| {
        let p = ps[i].p;
        ps[i].w * 1f64.hypot(p[0].hypot(p[1]).hypot(p[2]))
    });
    Ok(field_energy(fields) + 4.0 * std::f64::consts::PI * kinetic)
}
