//! Quadrature rules: Gauss-Legendre nodes, adaptive Gauss-Kronrod and
//! composite Simpson weights.

use crate::error::{CoreError, Result};
use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("nonzero");
    let rule = GaussLegendre::new(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out: Vec<(f64, f64)> = rule.nodes().zip(rule.weights()).map(|(&x, &w)| (mid + half * x, half * w)).collect();
    out.sort_by(|l, r| l.0.total_cmp(&r.0));
    out
}

/// Periodic trapezoid nodes on `[0, 2 pi)`.
pub fn periodic_trapezoid(n: usize) -> Vec<(f64, f64)> {
    let h = std::f64::consts::TAU / n as f64;
    (0..n).map(|k| (k as f64 * h, h)).collect()
}

/// Composite Simpson weights for `n + 1` equally spaced samples with spacing `h`.
/// Falls back to Simpson 3/8 on the last three intervals when `n` is odd,
/// and to the trapezoid rule when `n == 1`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    if n == 0 {
        return w;
    }
    if n == 1 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let (m, tail) = if n % 2 == 0 { (n, 0) } else { (n - 3, 3) };
    for k in (0..m).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if tail == 3 {
        let b = m;
        w[b] += 3.0 * h / 8.0;
        w[b + 1] += 9.0 * h / 8.0;
        w[b + 2] += 9.0 * h / 8.0;
        w[b + 3] += 3.0 * h / 8.0;
    }
    w
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration with global bisection of the
/// interval carrying the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(CoreError::Quadrature("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = parts.iter().enumerate().max_by(|l, r| l.1 .3.total_cmp(&r.1 .3)).expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    let total: f64 = parts.iter().map(|p| p.2).sum();
    let err: f64 = parts.iter().map(|p| p.3).sum();
    if err <= 1e3 * abs_tol.max(rel_tol * total.abs()) {
        Ok(total)
    } else {
        Err(CoreError::Quadrature(format!("no convergence: estimate {total}, error {err}")))
    }
}

/// Adaptive integration over `[a, b]` split at the given interior breakpoints.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    let n = (pts.len() - 1) as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate(&mut f, w[0], w[1], abs_tol / n, rel_tol)?;
    }
    Ok(total)
}

/// Adaptive integration over `[a, inf)` via `r = a + u / (1 - u)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - u;
            let v = f(a + u / om) / (om * om);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let nodes = gauss_legendre(5, 0.0, 2.0);
        let v: f64 = nodes.iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn simpson_weights_sum_to_length() {
        for n in 1..12 {
            let w = simpson_weights(n, 0.1);
            let s: f64 = w.iter().sum();
            assert!((s - 0.1 * n as f64).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in 2..9 {
            let h = 1.0 / n as f64;
            let w = simpson_weights(n, h);
            let v: f64 = w.iter().enumerate().map(|(k, w)| w * (k as f64 * h).powi(3)).sum();
            assert!((v - 0.25).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let v = integrate_semi_infinite(|x| (-x * x).exp(), 0.0, 1e-12, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }
}
