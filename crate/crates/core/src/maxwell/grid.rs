use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Periodic node grid on `[0, L1) x [0, L2)`; node `(i1, i2)` sits at
/// `(i1 h1, i2 h2)` and is stored at `i2 * n1 + i1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: [usize; 2],
    pub len: [f64; 2],
}

impl Grid {
    pub fn new(n: [usize; 2], len: [f64; 2]) -> Result<Self> {
        if n[0] < 2 || n[1] < 2 {
            return Err(CoreError::Config(format!("grid needs at least 2 points per axis, got {n:?}")));
        }
        if !(len[0] > 0.0 && len[1] > 0.0 && len[0].is_finite() && len[1].is_finite()) {
            return Err(CoreError::Config(format!("grid extents must be positive, got {len:?}")));
        }
        Ok(Grid { n, len })
    }

    pub fn h(&self) -> [f64; 2] {
        [self.len[0] / self.n[0] as f64, self.len[1] / self.n[1] as f64]
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.h();
        h[0] * h[1]
    }

    pub fn size(&self) -> usize {
        self.n[0] * self.n[1]
    }

    #[inline]
    pub fn idx(&self, i1: usize, i2: usize) -> usize {
        i2 * self.n[0] + i1
    }

    pub fn node(&self, i1: usize, i2: usize) -> [f64; 2] {
        let h = self.h();
        [i1 as f64 * h[0], i2 as f64 * h[1]]
    }

    /// Wrap a position into the box.
    #[inline]
    pub fn wrap(&self, x: [f64; 2]) -> [f64; 2] {
        let mut out = x;
        for k in 0..2 {
            let l = self.len[k];
            let mut v = x[k].rem_euclid(l);
            if v >= l {
                v = 0.0;
            }
            out[k] = v;
        }
        out
    }

    /// Lower node index and bilinear weights for a position inside the box.
    #[inline]
    pub fn cic(&self, x: [f64; 2]) -> ([usize; 2], [usize; 2], [f64; 2]) {
        let h = self.h();
        let mut lo = [0usize; 2];
        let mut hi = [0usize; 2];
        let mut frac = [0.0; 2];
        for k in 0..2 {
            let u = x[k] / h[k];
            let f = u.floor();
            let mut i = f as isize;
            let mut r = u - f;
            let n = self.n[k] as isize;
            if i >= n {
                i -= n;
            }
            if i < 0 {
                i += n;
            }
            if !(0.0..=1.0).contains(&r) {
                r = r.clamp(0.0, 1.0);
            }
            lo[k] = i as usize;
            hi[k] = ((i + 1) % n) as usize;
            frac[k] = r;
        }
        (lo, hi, frac)
    }

    /// Bilinear interpolation of a node array.
    pub fn interpolate(&self, a: &[f64], x: [f64; 2]) -> f64 {
        let (lo, hi, f) = self.cic(self.wrap(x));
        let (g1, g2) = (1.0 - f[0], 1.0 - f[1]);
        a[self.idx(lo[0], lo[1])] * g1 * g2
            + a[self.idx(hi[0], lo[1])] * f[0] * g2
            + a[self.idx(lo[0], hi[1])] * g1 * f[1]
            + a[self.idx(hi[0], hi[1])] * f[0] * f[1]
    }
}
