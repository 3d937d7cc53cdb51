//! Initial particle loading.

use super::scenario::{MomentumDist, PlasmaConfig, Scenario, Shear, SpaceProfile};
use crate::error::Result;
use crate::maxwell::Grid;
use crate::phase::{Mode, Particle};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use std::f64::consts::TAU;

/// Radius `|q|` under the density `|q|^(d-1) (1 + |q|^2)^(-m)`.
///
/// `t = |q|^2 / (1 + |q|^2)` is Beta(d/2, m - d/2); for `d = 2` this is the
/// closed-form inverse CDF `t = 1 - (1 - u)^(1 / (m - 1))`.
pub fn polynomial_radius(rng: &mut ChaCha8Rng, d: usize, m: f64) -> f64 {
    let t: f64 = if d == 2 {
        let u: f64 = rng.gen();
        1.0 - (1.0 - u).powf(1.0 / (m - 1.0))
    } else {
        let half = 0.5 * d as f64;
        Beta::new(half, m - half).expect("valid beta parameters").sample(rng)
    };
    (t / (1.0 - t)).sqrt()
}

fn direction(rng: &mut ChaCha8Rng, d: usize) -> [f64; 3] {
    if d == 2 {
        let a: f64 = rng.gen::<f64>() * TAU;
        [a.cos(), a.sin(), 0.0]
    } else {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-12 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }
}

fn wave(mode: [i32; 2], len: [f64; 2], x: [f64; 2]) -> f64 {
    TAU * (mode[0] as f64 * x[0] / len[0] + mode[1] as f64 * x[1] / len[1])
}

fn sample_momentum(rng: &mut ChaCha8Rng, dist: &MomentumDist, mode: Mode) -> [f64; 3] {
    match dist {
        MomentumDist::Cold { p } => *p,
        MomentumDist::Polynomial { epsilon, scale, drift } => {
            let d = mode.dim_p();
            let r = polynomial_radius(rng, d, 0.5 * (16.0 + epsilon));
            let u = direction(rng, d);
            [drift[0] + scale * r * u[0], drift[1] + scale * r * u[1], drift[2] + scale * r * u[2]]
        }
    }
}

fn sample_position(rng: &mut ChaCha8Rng, space: &SpaceProfile, len: [f64; 2]) -> [f64; 2] {
    let uniform = |rng: &mut ChaCha8Rng| [rng.gen::<f64>() * len[0], rng.gen::<f64>() * len[1]];
    match space {
        SpaceProfile::Uniform | SpaceProfile::Lattice { .. } => uniform(rng),
        SpaceProfile::Cosine { amplitude, mode } => loop {
            let x = uniform(rng);
            let accept = (1.0 + amplitude * wave(*mode, len, x).cos()) / (1.0 + amplitude.abs());
            if rng.gen::<f64>() < accept {
                return x;
            }
        },
        SpaceProfile::Gaussian { center, width, floor } => loop {
            let x = uniform(rng);
            let mut r2 = 0.0;
            for k in 0..2 {
                let mut d = (x[k] - center[k]).abs() % len[k];
                if d > 0.5 * len[k] {
                    d = len[k] - d;
                }
                r2 += d * d;
            }
            let accept = (floor + (-0.5 * r2 / (width * width)).exp()) / (floor + 1.0);
            if rng.gen::<f64>() < accept {
                return x;
            }
        },
    }
}

fn apply_shear(p: &mut [f64; 3], shear: &Option<Shear>, len: [f64; 2], x: [f64; 2]) {
    if let Some(s) = shear {
        let a = wave(s.mode, len, x).sin();
        for k in 0..3 {
            p[k] += s.amplitude[k] * a;
        }
    }
}

/// Particles for the scenario's initial density, drawn from `rng`.
pub fn load_particles(scn: &Scenario, grid: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<Particle>> {
    let len = grid.len;
    Ok(match &scn.plasma {
        PlasmaConfig::Empty => Vec::new(),
        PlasmaConfig::Explicit { particles } => particles.iter().map(|s| Particle { x: s.x, p: s.p, w: s.w }).collect(),
        PlasmaConfig::Sampled { count, charge, space, momentum, shear } => {
            let positions: Vec<[f64; 2]> = match space {
                SpaceProfile::Lattice { per_cell } => {
                    let h = grid.h();
                    let sites = grid.size() * per_cell[0] * per_cell[1];
                    let repeat = count.map(|c| c / sites).unwrap_or(1);
                    let m = [grid.n[0] * per_cell[0], grid.n[1] * per_cell[1]];
                    let step = [h[0] / per_cell[0] as f64, h[1] / per_cell[1] as f64];
                    let mut out = Vec::with_capacity(sites * repeat);
                    for _ in 0..repeat {
                        for j2 in 0..m[1] {
                            for j1 in 0..m[0] {
                                out.push([(j1 as f64 + 0.5) * step[0], (j2 as f64 + 0.5) * step[1]]);
                            }
                        }
                    }
                    out
                }
                other => (0..count.unwrap_or(0)).map(|_| sample_position(rng, other, len)).collect(),
            };
            let w = charge / positions.len() as f64;
            positions
                .into_iter()
                .map(|x| {
                    let mut p = sample_momentum(rng, momentum, scn.mode);
                    apply_shear(&mut p, shear, len, x);
                    Particle { x, p, w }
                })
                .collect()
        }
    })
}
