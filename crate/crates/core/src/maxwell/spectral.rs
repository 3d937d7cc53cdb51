use super::grid::Grid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Planned 2D FFTs and wavenumbers for a grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    bx: Arc<dyn Fft<f64>>,
    by: Arc<dyn Fft<f64>>,
    /// Derivative wavenumbers, Nyquist entry zero.
    kx: Vec<f64>,
    ky: Vec<f64>,
}

fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let m = if 2 * i < n {
                i as f64
            } else if 2 * i == n {
                0.0
            } else {
                i as f64 - n as f64
            };
            TAU * m / l
        })
        .collect()
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut p = FftPlanner::new();
        Spectral {
            grid,
            fx: p.plan_fft_forward(grid.n[0]),
            fy: p.plan_fft_forward(grid.n[1]),
            bx: p.plan_fft_inverse(grid.n[0]),
            by: p.plan_fft_inverse(grid.n[1]),
            kx: wavenumbers(grid.n[0], grid.len[0]),
            ky: wavenumbers(grid.n[1], grid.len[1]),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Derivative wavevector of mode `(i1, i2)`.
    #[inline]
    pub fn k(&self, i1: usize, i2: usize) -> [f64; 2] {
        [self.kx[i1], self.ky[i2]]
    }

    /// True for modes on a Nyquist line.
    #[inline]
    pub fn is_nyquist(&self, i1: usize, i2: usize) -> bool {
        (2 * i1 == self.grid.n[0]) || (2 * i2 == self.grid.n[1])
    }

    fn transform(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        let [n1, n2] = self.grid.n;
        for row in data.chunks_exact_mut(n1) {
            fx.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n2];
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                col[i2] = data[i2 * n1 + i1];
            }
            fy.process(&mut col);
            for i2 in 0..n2 {
                data[i2 * n1 + i1] = col[i2];
            }
        }
    }

    pub fn forward(&self, a: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut d, &self.fx, &self.fy);
        d
    }

    pub fn inverse(&self, mut d: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut d, &self.bx, &self.by);
        let s = 1.0 / self.grid.size() as f64;
        d.iter().map(|c| c.re * s).collect()
    }

    /// `d a / d x_axis`.
    pub fn derivative(&self, a: &[f64], axis: usize) -> Vec<f64> {
        let mut d = self.forward(a);
        let n1 = self.grid.n[0];
        for (i, c) in d.iter_mut().enumerate() {
            let k = self.k(i % n1, i / n1)[axis];
            *c *= Complex64::new(0.0, k);
        }
        self.inverse(d)
    }

    /// Zero the mean and the Nyquist lines, the modes outside the range of
    /// the discrete divergence.
    pub fn project_reachable(&self, a: &[f64]) -> Vec<f64> {
        let mut d = self.forward(a);
        let n1 = self.grid.n[0];
        for (i, c) in d.iter_mut().enumerate() {
            if i == 0 || self.is_nyquist(i % n1, i / n1) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse(d)
    }

    /// Zero the Nyquist lines.
    pub fn drop_nyquist(&self, a: &[f64]) -> Vec<f64> {
        let mut d = self.forward(a);
        let n1 = self.grid.n[0];
        for (i, c) in d.iter_mut().enumerate() {
            if self.is_nyquist(i % n1, i / n1) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse(d)
    }
}

/// Trigonometric interpolant of grid arrays, exact at the nodes.
#[derive(Clone)]
pub struct SpectralInterpolator {
    grid: Grid,
    coeffs: Vec<Vec<Complex64>>,
}

impl SpectralInterpolator {
    pub fn new(spec: &Spectral, arrays: &[&[f64]]) -> Self {
        let s = 1.0 / spec.grid.size() as f64;
        let coeffs = arrays.iter().map(|a| spec.forward(a).into_iter().map(|c| c * s).collect()).collect();
        SpectralInterpolator { grid: spec.grid, coeffs }
    }

    /// Interpolants of the arrays and of their `x_1`, `x_2` derivatives,
    /// ordered `[a_0, .., a_m, d1 a_0, .., d1 a_m, d2 a_0, .., d2 a_m]`.
    pub fn with_gradients(spec: &Spectral, arrays: &[&[f64]]) -> Self {
        let base = Self::new(spec, arrays);
        let n1 = spec.grid.n[0];
        let mut coeffs = base.coeffs.clone();
        for axis in 0..2 {
            for c in &base.coeffs {
                coeffs.push(c.iter().enumerate().map(|(i, v)| v * Complex64::new(0.0, spec.k(i % n1, i / n1)[axis])).collect());
            }
        }
        SpectralInterpolator { grid: spec.grid, coeffs }
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    fn phases(n: usize, l: f64, x: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                if 2 * i == n {
                    Complex64::new((TAU * (n / 2) as f64 * x / l).cos(), 0.0)
                } else {
                    let m = if 2 * i < n { i as f64 } else { i as f64 - n as f64 };
                    Complex64::from_polar(1.0, TAU * m * x / l)
                }
            })
            .collect()
    }

    /// Evaluate every component at `x`.
    pub fn eval(&self, x: [f64; 2], out: &mut [f64]) {
        let [n1, n2] = self.grid.n;
        let ex = Self::phases(n1, self.grid.len[0], x[0]);
        let ey = Self::phases(n2, self.grid.len[1], x[1]);
        for (c, o) in self.coeffs.iter().zip(out.iter_mut()) {
            let mut acc = Complex64::new(0.0, 0.0);
            for i2 in 0..n2 {
                let row = &c[i2 * n1..(i2 + 1) * n1];
                let mut r = Complex64::new(0.0, 0.0);
                for (a, b) in row.iter().zip(&ex) {
                    r += a * b;
                }
                acc += r * ey[i2];
            }
            *o = acc.re;
        }
    }
}
