use crate::error::{CoreError, Result};
use crate::phase::Momentum;
use serde::Serialize;

/// Planar kernels at one `(p, xi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelSet2D {
    pub e_t: [f64; 2],
    pub b_t: f64,
    /// `es[i][j]`, the weight of `(E + phat x B)_j` in `E_S^i`.
    pub es: [[f64; 2]; 2],
    pub bs: [f64; 2],
}

/// Kernels of the two-and-a-half dimensional problem at one `(p, xi)`.
/// The S-kernels are the scalars whose momentum gradients enter `K_S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelSet25D {
    pub e_t: [f64; 3],
    pub b_t: [f64; 3],
    pub e_s: [f64; 3],
    pub b_s: [f64; 3],
}

fn check_xi(xi: [f64; 2]) -> Result<()> {
    if !(xi[0].is_finite() && xi[1].is_finite()) {
        return Err(CoreError::NonFinite(format!("xi = {xi:?}")));
    }
    if xi[0].hypot(xi[1]) > 1.0 + 1e-12 {
        return Err(CoreError::Geometry(format!("|xi| = {} exceeds 1", xi[0].hypot(xi[1]))));
    }
    Ok(())
}

#[inline]
pub(crate) fn kernels_2d(ph: [f64; 2], p0: f64, xi: [f64; 2]) -> KernelSet2D {
    let d = 1.0 + ph[0] * xi[0] + ph[1] * xi[1];
    let q = 1.0 - ph[0] * ph[0] - ph[1] * ph[1];
    let wedge = xi[0] * ph[1] - xi[1] * ph[0];
    let xp = xi[0] * ph[0] + xi[1] * ph[1];
    let d2 = d * d;
    let mut es = [[0.0; 2]; 2];
    let mut bs = [0.0; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            es[i][j] = -2.0 * (delta - ph[i] * ph[j]) / (d * p0) + 2.0 * (xi[i] + ph[i]) * (xi[j] - xp * ph[j]) / (d2 * p0);
        }
    }
    let rot = [-xi[1], xi[0]];
    for j in 0..2 {
        bs[j] = 2.0 * rot[j] / (d * p0) - 2.0 * wedge * ph[j] / (d * p0) - 2.0 * wedge * (xi[j] - xp * ph[j]) / (d2 * p0);
    }
    KernelSet2D { e_t: [-2.0 * q * (xi[0] + ph[0]) / d2, -2.0 * q * (xi[1] + ph[1]) / d2], b_t: 2.0 * q * wedge / d2, es, bs }
}

#[inline]
pub(crate) fn kernels_25d(ph: [f64; 3], xi: [f64; 2]) -> KernelSet25D {
    let d = 1.0 + ph[0] * xi[0] + ph[1] * xi[1];
    let d2 = d * d;
    let q = 1.0 - ph[0] * ph[0] - ph[1] * ph[1];
    let s = [xi[0] + ph[0], xi[1] + ph[1]];
    let pp = ph[0] * ph[0] + ph[1] * ph[1];
    KernelSet25D {
        e_t: [-2.0 * q * s[0] / d2, -2.0 * q * s[1] / d2, 2.0 * ph[2] * (ph[0] * s[0] + ph[1] * s[1]) / d2],
        b_t: [
            2.0 * ph[2] * ((1.0 + xi[0] * ph[0]) * s[1] - xi[1] * ph[0] * s[0]) / d2,
            2.0 * ph[2] * (xi[0] * ph[1] * s[1] - (1.0 + xi[1] * ph[1]) * s[0]) / d2,
            2.0 * ((ph[1] + xi[1] * pp) * s[0] - (ph[0] + xi[0] * pp) * s[1]) / d2,
        ],
        e_s: [-2.0 * s[0] / d, -2.0 * s[1] / d, -2.0 * ph[2] / d],
        b_s: [2.0 * xi[1] * ph[2] / d, -2.0 * xi[0] * ph[2] / d, 2.0 * (xi[0] * ph[1] - xi[1] * ph[0]) / d],
    }
}

/// Momentum gradients of the six S-kernels `2 N / D`, ordered
/// `E1, E2, E3, B1, B2, B3`. Each numerator `N = n0 + n . phat` is affine in
/// `phat`, so `grad_p (N / D) = J n / D - N J xi / D^2` with
/// `J = (I - phat phat^T) / p0`.
#[inline]
pub(crate) fn s_gradients(ph: [f64; 3], p0: f64, xi: [f64; 2]) -> [[f64; 3]; 6] {
    let x3 = [xi[0], xi[1], 0.0];
    let d = 1.0 + ph[0] * xi[0] + ph[1] * xi[1];
    let jac = |v: [f64; 3]| {
        let a = ph[0] * v[0] + ph[1] * v[1] + ph[2] * v[2];
        [(v[0] - a * ph[0]) / p0, (v[1] - a * ph[1]) / p0, (v[2] - a * ph[2]) / p0]
    };
    let jx = jac(x3);
    let rows: [(f64, [f64; 3]); 6] = [
        (-xi[0], [-1.0, 0.0, 0.0]),
        (-xi[1], [0.0, -1.0, 0.0]),
        (0.0, [0.0, 0.0, -1.0]),
        (0.0, [0.0, 0.0, xi[1]]),
        (0.0, [0.0, 0.0, -xi[0]]),
        (0.0, [-xi[1], xi[0], 0.0]),
    ];
    let mut out = [[0.0; 3]; 6];
    for (o, (n0, n)) in out.iter_mut().zip(rows) {
        let num = n0 + n[0] * ph[0] + n[1] * ph[1] + n[2] * ph[2];
        let jn = jac(n);
        for k in 0..3 {
            o[k] = 2.0 * (jn[k] / d - num * jx[k] / (d * d));
        }
    }
    out
}

/// `2 a . xi` for each component, the weight of `f(0)` in the boundary
/// term left at `s = 0` by the integration by parts.
#[inline]
pub(crate) fn boundary_weights(ph: [f64; 3], xi: [f64; 2]) -> [f64; 6] {
    let d = 1.0 + ph[0] * xi[0] + ph[1] * xi[1];
    let xp = ph[0] * xi[0] + ph[1] * xi[1];
    [
        2.0 * (ph[0] * xp - xi[0]) / d,
        2.0 * (ph[1] * xp - xi[1]) / d,
        2.0 * ph[2] * xp / d,
        2.0 * xi[1] * ph[2] / d,
        -2.0 * xi[0] * ph[2] / d,
        2.0 * (xi[0] * ph[1] - xi[1] * ph[0]) / d,
    ]
}

pub fn kernel_eval_2d(p: &Momentum, xi: [f64; 2]) -> Result<KernelSet2D> {
    if p.dim() != 2 {
        return Err(CoreError::Mode("planar kernels need a planar momentum".into()));
    }
    check_xi(xi)?;
    let ph = p.phat3();
    Ok(kernels_2d([ph[0], ph[1]], p.p0(), xi))
}

pub fn kernel_eval_25d(p: &Momentum, xi: [f64; 2]) -> Result<KernelSet25D> {
    if p.dim() != 3 {
        return Err(CoreError::Mode("2.5d kernels need a three-component momentum".into()));
    }
    check_xi(xi)?;
    Ok(kernels_25d(p.phat3(), xi))
}

/// Momentum gradients of the six S-kernels, rows ordered `E1, E2, E3, B1, B2, B3`.
/// For planar momenta the rows `E1, E2, B3` are `es[0], es[1], bs` and the
/// third column vanishes.
pub fn s_kernel_gradients(p: &Momentum, xi: [f64; 2]) -> Result<[[f64; 3]; 6]> {
    check_xi(xi)?;
    Ok(s_gradients(p.phat3(), p.p0(), xi))
}

/// Largest ratio of one kernel component to its majorant over the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelBoundRow {
    pub component: String,
    pub majorant: String,
    pub sup_ratio: f64,
    pub worst_p: Vec<f64>,
    pub worst_xi: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelBoundReport {
    pub samples: usize,
    pub rows: Vec<KernelBoundRow>,
    pub all_finite: bool,
}

/// Ratios against `1 / (p0^2 D^(3/2))` (T) and `1 / (p0 D)` (S) in the
/// plane, and against `<p3>^3 / (p0 D)` (T) and `<p3>^2 / (p0 D)` (momentum
/// gradients of the S-kernels) for three-component momenta, `D = 1 + phat . xi`.
/// All samples must share one momentum dimension.
pub fn kernel_bound_check(samples: &[(Momentum, [f64; 2])]) -> Result<KernelBoundReport> {
    let first = samples.first().ok_or_else(|| CoreError::Config("kernel bound check needs at least one sample".into()))?;
    let dim = first.0.dim();
    let (names, majorants): (Vec<&str>, Vec<&str>) = if dim == 2 {
        let t = "1/(p0^2 D^1.5)";
        let s = "1/(p0 D)";
        (vec!["e_t1", "e_t2", "b_t", "es11", "es12", "es21", "es22", "bs1", "bs2"], vec![t, t, t, s, s, s, s, s, s])
    } else {
        let t = "<p3>^3/(p0 D)";
        let s = "<p3>^2/(p0 D)";
        (
            vec![
                "e_t1",
                "e_t2",
                "e_t3",
                "b_t1",
                "b_t2",
                "b_t3",
                "grad_e_s1",
                "grad_e_s2",
                "grad_e_s3",
                "grad_b_s1",
                "grad_b_s2",
                "grad_b_s3",
            ],
            vec![t, t, t, t, t, t, s, s, s, s, s, s],
        )
    };
    let mut rows: Vec<KernelBoundRow> = names
        .iter()
        .zip(&majorants)
        .map(|(n, m)| KernelBoundRow {
            component: n.to_string(),
            majorant: m.to_string(),
            sup_ratio: 0.0,
            worst_p: first.0.p().to_vec(),
            worst_xi: first.1,
        })
        .collect();
    let mut all_finite = true;
    let mut vals = vec![0.0; rows.len()];
    for (p, xi) in samples {
        if p.dim() != dim {
            return Err(CoreError::Mode("samples mix momentum dimensions".into()));
        }
        check_xi(*xi)?;
        let ph = p.phat3();
        let p0 = p.p0();
        let d = 1.0 + ph[0] * xi[0] + ph[1] * xi[1];
        if dim == 2 {
            let k = kernels_2d([ph[0], ph[1]], p0, *xi);
            let mt = 1.0 / (p0 * p0 * d.powf(1.5));
            let ms = 1.0 / (p0 * d);
            vals[0] = k.e_t[0].abs() / mt;
            vals[1] = k.e_t[1].abs() / mt;
            vals[2] = k.b_t.abs() / mt;
            vals[3] = k.es[0][0].abs() / ms;
            vals[4] = k.es[0][1].abs() / ms;
            vals[5] = k.es[1][0].abs() / ms;
            vals[6] = k.es[1][1].abs() / ms;
            vals[7] = k.bs[0].abs() / ms;
            vals[8] = k.bs[1].abs() / ms;
        } else {
            let k = kernels_25d(ph, *xi);
            let b3 = 1.0 + p.p3()[2] * p.p3()[2];
            let mt = b3.powf(1.5) / (p0 * d);
            let ms = b3 / (p0 * d);
            for i in 0..3 {
                vals[i] = k.e_t[i].abs() / mt;
                vals[3 + i] = k.b_t[i].abs() / mt;
            }
            let g = s_gradients(ph, p0, *xi);
            for i in 0..6 {
                vals[6 + i] = (g[i][0].powi(2) + g[i][1].powi(2) + g[i][2].powi(2)).sqrt() / ms;
            }
        }
        for (row, &v) in rows.iter_mut().zip(&vals) {
            if !v.is_finite() {
                all_finite = false;
                continue;
            }
            if v > row.sup_ratio {
                row.sup_ratio = v;
                row.worst_p = p.p().to_vec();
                row.worst_xi = *xi;
            }
        }
    }
    Ok(KernelBoundReport { samples: samples.len(), rows, all_finite })
}

/// Smallest `C` with `1 / (1 + phat . xi) <= C min{theta^-2, (1 - |xi|^2)^-1, p0^2}`
/// over the samples, `theta` the angle from `-xi` to the planar part of `phat`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityReport {
    pub samples: usize,
    pub constant: f64,
    pub worst_p: Vec<f64>,
    pub worst_xi: [f64; 2],
}

pub fn singularity_constant(samples: &[(Momentum, [f64; 2])]) -> Result<SingularityReport> {
    let mut rep = SingularityReport { samples: samples.len(), constant: 0.0, worst_p: vec![], worst_xi: [0.0; 2] };
    for (p, xi) in samples {
        check_xi(*xi)?;
        let r = xi[0].hypot(xi[1]).min(1.0);
        let ph = p.phat3();
        let (a, b) = ([-xi[0], -xi[1]], [ph[0], ph[1]]);
        let theta =
            if r == 0.0 || (b[0] == 0.0 && b[1] == 0.0) { 0.0 } else { (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]).abs() };
        let d = 1.0 + ph[0] * xi[0] + ph[1] * xi[1];
        let p0 = p.p0();
        let m = (theta * theta).max(1.0 - r * r).max(1.0 / (p0 * p0));
        let c = m / d;
        if c > rep.constant {
            rep.constant = c;
            rep.worst_p = p.p().to_vec();
            rep.worst_xi = *xi;
        }
    }
    Ok(rep)
}
