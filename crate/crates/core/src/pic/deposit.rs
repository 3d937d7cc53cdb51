use crate::error::{CoreError, Result};
use crate::maxwell::{Grid, SourceDensities};
use crate::phase::{Particle, ParticleEnsemble};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Particles per deposition chunk; chunk partials are summed in chunk order,
/// so the result does not depend on the thread count.
const CHUNK: usize = 4096;

#[inline]
pub(crate) fn velocity(p: &[f64; 3]) -> [f64; 3] {
    let g = 1f64.hypot(p[0].hypot(p[1]).hypot(p[2]));
    [p[0] / g, p[1] / g, p[2] / g]
}

fn scatter(out: &mut [Vec<f64>], grid: &Grid, x: [f64; 2], vals: &[f64]) {
    let (lo, hi, f) = grid.cic(x);
    let n1 = grid.n[0];
    let cells = [
        (lo[1] * n1 + lo[0], (1.0 - f[0]) * (1.0 - f[1])),
        (lo[1] * n1 + hi[0], f[0] * (1.0 - f[1])),
        (hi[1] * n1 + lo[0], (1.0 - f[0]) * f[1]),
        (hi[1] * n1 + hi[0], f[0] * f[1]),
    ];
    for (c, v) in out.iter_mut().zip(vals) {
        for &(i, a) in &cells {
            c[i] += a * v;
        }
    }
}

/// `comps` arrays of `4 pi sum_i value_i S(y - x_i)` over node points `y`.
pub(crate) fn deposit_with<F>(n: usize, grid: &Grid, comps: usize, f: F) -> Vec<Vec<f64>>
where
    F: Fn(usize, &mut [f64]) -> [f64; 2] + Sync,
{
    let size = grid.size();
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Vec<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut out = vec![vec![0.0; size]; comps];
            let mut vals = vec![0.0; comps];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let x = f(i, &mut vals);
                scatter(&mut out, grid, x, &vals);
            }
            out
        })
        .collect();
    let scale = 4.0 * PI / grid.cell_area();
    let mut total = vec![vec![0.0; size]; comps];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            for (a, b) in t.iter_mut().zip(p) {
                *a += b;
            }
        }
    }
    for t in &mut total {
        for a in t.iter_mut() {
            *a *= scale;
        }
    }
    total
}

pub(crate) fn check_inside(particles: &[Particle], len: [f64; 2]) -> Result<()> {
    for (i, p) in particles.iter().enumerate() {
        if (0..2).any(|k| !(p.x[k] >= 0.0 && p.x[k] < len[k])) {
            return Err(CoreError::Geometry(format!("particle {i} at {:?} lies outside the box", p.x)));
        }
    }
    Ok(())
}

/// Charge density at given positions.
pub(crate) fn deposit_rho(particles: &[Particle], xs: &[[f64; 2]], grid: &Grid) -> Vec<f64> {
    deposit_with(particles.len(), grid, 1, |i, v| {
        v[0] = particles[i].w;
        xs[i]
    })
    .pop()
    .unwrap()
}

/// `rho = 4 pi sum w S(y - x)` and `j = 4 pi sum w phat S(y - x)` with the
/// cloud-in-cell kernel.
pub fn deposit(ens: &ParticleEnsemble, grid: &Grid) -> Result<SourceDensities> {
    if ens.box_len() != grid.len {
        return Err(CoreError::Shape("ensemble box and grid extents differ".into()));
    }
    let ps = ens.particles();
    check_inside(ps, grid.len)?;
    let mut out = deposit_with(ps.len(), grid, 4, |i, v| {
        let u = velocity(&ps[i].p);
        v[0] = ps[i].w;
        for k in 0..3 {
            v[k + 1] = ps[i].w * u[k];
        }
        ps[i].x
    });
    let j3 = out.pop().unwrap();
    let j2 = out.pop().unwrap();
    let j1 = out.pop().unwrap();
    let rho = out.pop().unwrap();
    Ok(SourceDensities { grid: *grid, rho, j: [j1, j2, j3] })
}
