use super::kernels::{boundary_weights, kernels_25d, kernels_2d, s_gradients};
use super::quadrature::RetardedQuadrature;
use crate::error::{CoreError, Result};
use crate::history::RunHistory;
use crate::maxwell::{FieldState, Spectral, SpectralInterpolator};
use crate::phase::{Mode, Particle};
use crate::pic::deposit::deposit_with;
use crate::pic::run::gather;
use crate::quad;
use crate::smoothing::SmoothedParticles;
use crate::vecops::cross;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Field components ordered `E1, E2, E3, B1, B2, B3`.
pub type Components = [f64; 6];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub t: f64,
    pub x: [f64; 2],
    pub data_term: Components,
    pub k_t: Components,
    /// S-term driven by the components of `E + phat x B` outside `K_g`.
    pub k_s1: Components,
    /// S-term driven by the good components `K_g` only.
    pub k_s2: Components,
    pub total: Components,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonSplitReport {
    pub t: f64,
    pub x: [f64; 2],
    pub epsilon: f64,
    /// Cone integral of `int f / (p0 (1 + phat . xi)) dp` against
    /// `1 / ((t-s) sqrt((t-s)^2 - |y-x|^2))` over `|xi| <= 1 - epsilon`.
    pub term_interior: f64,
    /// The same over `|xi| > 1 - epsilon`.
    pub term_collar: f64,
    pub lhs: f64,
    /// `int int (int p0^2 f dp) / sqrt((t-s)^2 - |y-x|^2)`.
    pub g_integral: f64,
    /// `int int (int p0^4 f dp) / sqrt((t-s)^2 - |y-x|^2)`.
    pub h_integral: f64,
    /// `epsilon^(-1/10) g_integral^(2/5)`.
    pub rhs_interior: f64,
    /// `epsilon^(3/10) h_integral^(2/5)`.
    pub rhs_collar: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Good and remaining parts of `E` and `B` relative to the unit direction `w`.
#[inline]
fn split_good(e: [f64; 3], b: [f64; 3], w: [f64; 2]) -> ([f64; 3], [f64; 3]) {
    let ew = e[0] * w[0] + e[1] * w[1];
    let bw = b[0] * w[0] + b[1] * w[1];
    let w_e = w[0] * e[1] - w[1] * e[0];
    let w_b = w[0] * b[1] - w[1] * b[0];
    ([ew * w[0], ew * w[1], e[2] - w_b], [bw * w[0], bw * w[1], b[2] + w_e])
}

struct PerParticle {
    t: Components,
    s1: Components,
    s2: Components,
}

#[inline]
fn particle_terms(mode: Mode, p: &Particle, xi: [f64; 2], e: [f64; 3], b: [f64; 3], w: [f64; 2]) -> PerParticle {
    let pp = p.p;
    let p0 = 1f64.hypot(pp[0].hypot(pp[1]).hypot(pp[2]));
    let ph = [pp[0] / p0, pp[1] / p0, pp[2] / p0];
    let (tk, grads) = match mode {
        Mode::TwoD => {
            let k = kernels_2d([ph[0], ph[1]], p0, xi);
            let mut g = [[0.0; 3]; 6];
            g[0] = [k.es[0][0], k.es[0][1], 0.0];
            g[1] = [k.es[1][0], k.es[1][1], 0.0];
            g[5] = [k.bs[0], k.bs[1], 0.0];
            ([k.e_t[0], k.e_t[1], 0.0, 0.0, 0.0, k.b_t], g)
        }
        Mode::TwoHalfD => {
            let k = kernels_25d(ph, xi);
            ([k.e_t[0], k.e_t[1], k.e_t[2], k.b_t[0], k.b_t[1], k.b_t[2]], s_gradients(ph, p0, xi))
        }
    };
    let (eg, bg) = split_good(e, b, w);
    let good = {
        let c = cross(&ph, &bg);
        [eg[0] + c[0], eg[1] + c[1], eg[2] + c[2]]
    };
    let all = {
        let c = cross(&ph, &b);
        [e[0] + c[0], e[1] + c[1], e[2] + c[2]]
    };
    let mut s1 = [0.0; 6];
    let mut s2 = [0.0; 6];
    for i in 0..6 {
        let g = &grads[i];
        let a = g[0] * good[0] + g[1] * good[1] + g[2] * good[2];
        let full = g[0] * all[0] + g[1] * all[1] + g[2] * all[2];
        s2[i] = a;
        s1[i] = full - a;
    }
    PerParticle { t: tk, s1, s2 }
}

/// Precomputed per-frame state for repeated evaluations on one history.
pub struct RepresentationEvaluator<'a> {
    history: &'a RunHistory,
    quadrature: RetardedQuadrature,
    smooth: Vec<SmoothedParticles<'a>>,
    spectral: Spectral,
    /// Fourier coefficients of the six components and their time derivatives at `t = 0`.
    u0: Vec<Vec<Complex64>>,
    u1: Vec<Vec<Complex64>>,
}

impl<'a> RepresentationEvaluator<'a> {
    pub fn new(history: &'a RunHistory, quadrature: &RetardedQuadrature) -> Result<Self> {
        quadrature.validate()?;
        history.validate()?;
        let first = history.frames.first().ok_or_else(|| CoreError::History("no frames stored".into()))?;
        let grid = history.grid;
        let spectral = Spectral::new(grid);
        let smooth = history.frames.iter().map(|f| SmoothedParticles::new(&f.particles, grid)).collect();
        let (u0, u1) = initial_data(&spectral, &first.fields, &first.particles)?;
        Ok(RepresentationEvaluator { history, quadrature: *quadrature, smooth, spectral, u0, u1 })
    }

    /// Source-free evolution of the initial fields, with the Nyquist lines
    /// held fixed as in the grid solver.
    fn homogeneous(&self, t: f64, x: [f64; 2]) -> Components {
        let n1 = self.spectral.grid().n[0];
        let arrays: Vec<Vec<f64>> = (0..6)
            .map(|c| {
                let d: Vec<Complex64> = self.u0[c]
                    .iter()
                    .zip(&self.u1[c])
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let (i1, i2) = (i % n1, i / n1);
                        if self.spectral.is_nyquist(i1, i2) {
                            return *a;
                        }
                        let k = self.spectral.k(i1, i2);
                        let w = k[0].hypot(k[1]);
                        if w == 0.0 {
                            a + b * t
                        } else {
                            a * (w * t).cos() + b * ((w * t).sin() / w)
                        }
                    })
                    .collect();
                self.spectral.inverse(d)
            })
            .collect();
        let refs: Vec<&[f64]> = arrays.iter().map(|a| a.as_slice()).collect();
        let interp = SpectralInterpolator::new(&self.spectral, &refs);
        let mut out = [0.0; 6];
        interp.eval(x, &mut out);
        out
    }

    /// Boundary term at `s = 0` over the disk `|y - x| <= t`.
    fn boundary(&self, t: f64, x: [f64; 2]) -> Components {
        let mut out = [0.0; 6];
        if t <= 0.0 {
            return out;
        }
        let smooth = &self.smooth[0];
        let angles = self.quadrature.angle_nodes();
        for (phi, wp) in self.quadrature.phi_nodes() {
            let sp = phi.sin();
            for &(a, wa) in &angles {
                let w = [a.cos(), a.sin()];
                let xi = [sp * w[0], sp * w[1]];
                let y = [x[0] + t * xi[0], x[1] + t * xi[1]];
                let wt = wp * wa * sp * t;
                smooth.visit(y, |p, k| {
                    let p0 = 1f64.hypot(p.p[0].hypot(p.p[1]).hypot(p.p[2]));
                    let ph = [p.p[0] / p0, p.p[1] / p0, p.p[2] / p0];
                    let bw = boundary_weights(ph, xi);
                    for c in 0..6 {
                        out[c] += wt * p.w * k * bw[c];
                    }
                });
            }
        }
        out
    }

    /// T- and S-term contributions of one frame, integrated over its cone section.
    fn frame_terms(&self, k: usize, t: f64, x: [f64; 2]) -> [Components; 3] {
        let fr = &self.history.frames[k];
        let tau = t - fr.time;
        let smooth = &self.smooth[k];
        let mode = self.history.mode;
        let angles = self.quadrature.angle_nodes();
        let mut acc = [[0.0; 6]; 3];
        for (phi, wp) in self.quadrature.phi_nodes() {
            let sp = phi.sin();
            for &(a, wa) in &angles {
                let w = [a.cos(), a.sin()];
                let xi = [sp * w[0], sp * w[1]];
                let y = self.history.grid.wrap([x[0] + tau * xi[0], x[1] + tau * xi[1]]);
                let f = gather(&fr.fields, y);
                let wt = wp * wa * sp;
                let ws = wt * tau;
                smooth.visit(y, |p, kern| {
                    let r = particle_terms(mode, p, xi, f.e, f.b, w);
                    let m = p.w * kern;
                    for c in 0..6 {
                        acc[0][c] += wt * m * r.t[c];
                        acc[1][c] += ws * m * r.s1[c];
                        acc[2][c] += ws * m * r.s2[c];
                    }
                });
            }
        }
        acc
    }

    pub fn evaluate(&self, t: f64, x: [f64; 2]) -> Result<RepresentationReport> {
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(CoreError::NonFinite("probe position".into()));
        }
        let m = self.history.frame_at(t)?;
        let weights = quad::simpson_weights(m, self.history.dt);
        let parts: Vec<[Components; 3]> = (0..=m).into_par_iter().map(|k| self.frame_terms(k, t, x)).collect();
        let mut k_t = [0.0; 6];
        let mut k_s1 = [0.0; 6];
        let mut k_s2 = [0.0; 6];
        if m > 0 {
            for (part, w) in parts.iter().zip(&weights) {
                for c in 0..6 {
                    k_t[c] += w * part[0][c];
                    k_s1[c] += w * part[1][c];
                    k_s2[c] += w * part[2][c];
                }
            }
        }
        let hom = self.homogeneous(t, x);
        let bnd = self.boundary(t, x);
        let mut data_term = [0.0; 6];
        let mut total = [0.0; 6];
        for c in 0..6 {
            data_term[c] = hom[c] + bnd[c];
            total[c] = data_term[c] + k_t[c] + k_s1[c] + k_s2[c];
        }
        if self.history.mode == Mode::TwoD {
            for c in [2, 3, 4] {
                for v in [&mut data_term, &mut k_t, &mut k_s1, &mut k_s2, &mut total] {
                    v[c] = 0.0;
                }
            }
        }
        if total.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("representation terms".into()));
        }
        Ok(RepresentationReport { t, x, data_term, k_t, k_s1, k_s2, total })
    }

    /// Probes are evaluated in order; each evaluation is parallel over frames.
    pub fn evaluate_many(&self, probes: &[(f64, [f64; 2])]) -> Result<Vec<RepresentationReport>> {
        probes.iter().map(|&(t, x)| self.evaluate(t, x)).collect()
    }

    pub fn epsilon_split(&self, t: f64, x: [f64; 2], epsilon: f64) -> Result<EpsilonSplitReport> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(CoreError::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        let m = self.history.frame_at(t)?;
        let q = &self.quadrature;
        let edge = (1.0 - epsilon).asin();
        let half = q.phi_panels.div_ceil(2).max(1);
        let inner = if edge > 0.0 { RetardedQuadrature::composite(half, q.order, 0.0, edge) } else { vec![] };
        let outer = RetardedQuadrature::composite(half, q.order, edge, std::f64::consts::FRAC_PI_2);
        let angles = q.angle_nodes();
        let weights = quad::simpson_weights(m, self.history.dt);
        let per_frame: Vec<[f64; 4]> = (0..=m)
            .into_par_iter()
            .map(|k| {
                let tau = t - self.history.frames[k].time;
                let smooth = &self.smooth[k];
                let mut acc = [0.0; 4];
                for (slot, nodes) in [(0usize, &inner), (1, &outer)] {
                    for &(phi, wp) in nodes.iter() {
                        let sp = phi.sin();
                        for &(a, wa) in &angles {
                            let xi = [sp * a.cos(), sp * a.sin()];
                            let y = [x[0] + tau * xi[0], x[1] + tau * xi[1]];
                            let wt = wp * wa * sp;
                            smooth.visit(y, |p, kern| {
                                let p0 = 1f64.hypot(p.p[0].hypot(p.p[1]).hypot(p.p[2]));
                                let d = 1.0 + (p.p[0] * xi[0] + p.p[1] * xi[1]) / p0;
                                let m = p.w * kern;
                                acc[slot] += wt * m / (p0 * d);
                                acc[2] += wt * tau * m * p0 * p0;
                                acc[3] += wt * tau * m * p0.powi(4);
                            });
                        }
                    }
                }
                acc
            })
            .collect();
        let mut sums = [0.0; 4];
        if m > 0 {
            for (a, w) in per_frame.iter().zip(&weights) {
                for c in 0..4 {
                    sums[c] += w * a[c];
                }
            }
        }
        let [term_interior, term_collar, g_integral, h_integral] = sums;
        let lhs = term_interior + term_collar;
        let rhs_interior = epsilon.powf(-0.1) * g_integral.max(0.0).powf(0.4);
        let rhs_collar = epsilon.powf(0.3) * h_integral.max(0.0).powf(0.4);
        let rhs = rhs_interior + rhs_collar;
        let ratio = if lhs == 0.0 {
            0.0
        } else if rhs > 0.0 {
            lhs / rhs
        } else {
            f64::INFINITY
        };
        Ok(EpsilonSplitReport {
            t,
            x,
            epsilon,
            term_interior,
            term_collar,
            lhs,
            g_integral,
            h_integral,
            rhs_interior,
            rhs_collar,
            rhs,
            ratio,
        })
    }
}

/// Fourier coefficients of the fields at `t = 0` and of their time
/// derivatives `dE/dt = curl B - j`, `dB/dt = -curl E`.
fn initial_data(sp: &Spectral, f: &FieldState, particles: &[Particle]) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let grid = *sp.grid();
    crate::pic::deposit::check_inside(particles, grid.len)?;
    let j = deposit_with(particles.len(), &grid, 3, |i, v| {
        let p = &particles[i];
        let p0 = 1f64.hypot(p.p[0].hypot(p.p[1]).hypot(p.p[2]));
        for k in 0..3 {
            v[k] = p.w * p.p[k] / p0;
        }
        p.x
    });
    let u0: Vec<Vec<Complex64>> = f.e.iter().chain(f.b.iter()).map(|a| sp.forward(a)).collect();
    let jh: Vec<Vec<Complex64>> = j.iter().map(|a| sp.forward(a)).collect();
    let n1 = grid.n[0];
    let size = grid.size();
    let mut u1 = vec![vec![Complex64::new(0.0, 0.0); size]; 6];
    for i in 0..size {
        let k = sp.k(i % n1, i / n1);
        let d1 = Complex64::new(0.0, k[0]);
        let d2 = Complex64::new(0.0, k[1]);
        let (e, b) = (|c: usize| u0[c][i], |c: usize| u0[3 + c][i]);
        // curl of (a1, a2, a3) with d3 = 0
        let curl = |a: &dyn Fn(usize) -> Complex64| [d2 * a(2), -d1 * a(2), d1 * a(1) - d2 * a(0)];
        let cb = curl(&b);
        let ce = curl(&e);
        for c in 0..3 {
            u1[c][i] = cb[c] - jh[c][i];
            u1[3 + c][i] = -ce[c];
        }
    }
    if f.mode == Mode::TwoD {
        for c in [2, 3, 4] {
            u1[c].iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        }
    }
    Ok((u0, u1))
}

pub fn field_from_representation(
    history: &RunHistory,
    t: f64,
    x: [f64; 2],
    quadrature: &RetardedQuadrature,
) -> Result<RepresentationReport> {
    RepresentationEvaluator::new(history, quadrature)?.evaluate(t, x)
}

pub fn epsilon_split_eval(
    history: &RunHistory,
    t: f64,
    x: [f64; 2],
    epsilon: f64,
    quadrature: &RetardedQuadrature,
) -> Result<EpsilonSplitReport> {
    RepresentationEvaluator::new(history, quadrature)?.epsilon_split(t, x, epsilon)
}
