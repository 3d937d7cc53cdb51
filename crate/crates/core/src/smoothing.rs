//! Tent-kernel reconstruction of particle densities at arbitrary points.
//!
//! The kernel `S(d) = L(d1 / h1) L(d2 / h2) / (h1 h2)` with `L(u) = max(0, 1 - |u|)`
//! is the one used by cloud-in-cell deposition, so at grid nodes the
//! reconstruction reproduces the deposited density exactly.

use crate::maxwell::Grid;
use crate::phase::Particle;

pub struct SmoothedParticles<'a> {
    grid: Grid,
    particles: &'a [Particle],
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> SmoothedParticles<'a> {
    pub fn new(particles: &'a [Particle], grid: Grid) -> Self {
        let [n1, n2] = grid.n;
        let h = grid.h();
        let cell = |x: [f64; 2]| {
            let w = grid.wrap(x);
            let c1 = ((w[0] / h[0]) as usize).min(n1 - 1);
            let c2 = ((w[1] / h[1]) as usize).min(n2 - 1);
            c2 * n1 + c1
        };
        let mut counts = vec![0usize; n1 * n2 + 1];
        let ids: Vec<usize> = particles.iter().map(|p| cell(p.x)).collect();
        for &c in &ids {
            counts[c + 1] += 1;
        }
        for i in 0..n1 * n2 {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut order = vec![0usize; particles.len()];
        for (i, &c) in ids.iter().enumerate() {
            order[fill[c]] = i;
            fill[c] += 1;
        }
        SmoothedParticles { grid, particles, starts: counts, order }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Call `f(particle, S(y - x_particle))` for every particle with nonzero kernel.
    #[inline]
    pub fn visit<F: FnMut(&Particle, f64)>(&self, y: [f64; 2], mut f: F) {
        let [n1, n2] = self.grid.n;
        let h = self.grid.h();
        let l = self.grid.len;
        let y = self.grid.wrap(y);
        let c1 = ((y[0] / h[0]) as isize).min(n1 as isize - 1);
        let c2 = ((y[1] / h[1]) as isize).min(n2 as isize - 1);
        let norm = 1.0 / (h[0] * h[1]);
        let mut cells = [0usize; 9];
        let mut nc = 0;
        for d2 in -1..=1isize {
            let j2 = (c2 + d2).rem_euclid(n2 as isize) as usize;
            for d1 in -1..=1isize {
                let j1 = (c1 + d1).rem_euclid(n1 as isize) as usize;
                let c = j2 * n1 + j1;
                // grids with fewer than three cells per axis revisit cells
                if !cells[..nc].contains(&c) {
                    cells[nc] = c;
                    nc += 1;
                }
            }
        }
        for &c in &cells[..nc] {
            for &i in &self.order[self.starts[c]..self.starts[c + 1]] {
                let p = &self.particles[i];
                let mut u = (y[0] - p.x[0]).abs();
                if u > 0.5 * l[0] {
                    u = l[0] - u;
                }
                let mut v = (y[1] - p.x[1]).abs();
                if v > 0.5 * l[1] {
                    v = l[1] - v;
                }
                let a = 1.0 - u / h[0];
                let b = 1.0 - v / h[1];
                if a > 0.0 && b > 0.0 {
                    f(p, a * b * norm);
                }
            }
        }
    }

    /// `sum_i w_i S(y - x_i) g(p_i)`.
    pub fn density<G: Fn(&Particle) -> f64>(&self, y: [f64; 2], g: G) -> f64 {
        let mut s = 0.0;
        self.visit(y, |p, k| s += p.w * k * g(p));
        s
    }
}
