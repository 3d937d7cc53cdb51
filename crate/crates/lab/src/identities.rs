use crate::error::{LabError, Result};
use crate::report::IneqReport;
use crate::sample::{chunked, unit_circle};
use rand::Rng;
use rvm_core::maxwell::cone_flux_density;
use rvm_core::phase::cone_coords;

/// Identities pass at this relative tolerance.
pub const IDENTITY_TOL: f64 = 1e-12;

fn check_unit(w: [f64; 2]) -> Result<()> {
    if !(w[0].is_finite() && w[1].is_finite()) || (w[0].hypot(w[1]) - 1.0).abs() > 1e-12 {
        return Err(LabError::Input(format!("omega = {w:?} is not a unit vector")));
    }
    Ok(())
}

/// `|lhs - rhs|` for `1/2 (|E|^2 + |B|^2) + omega . (E x B)` against its
/// sum-of-squares form.
pub fn flux_identity_check(e: [f64; 3], b: [f64; 3], w: [f64; 2]) -> Result<f64> {
    check_unit(w)?;
    let exb = [e[1] * b[2] - e[2] * b[1], e[2] * b[0] - e[0] * b[2], e[0] * b[1] - e[1] * b[0]];
    let sq = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let lhs = 0.5 * (sq(e) + sq(b)) + w[0] * exb[0] + w[1] * exb[1];
    Ok((lhs - cone_flux_density(e, b, w)).abs())
}

/// The planar reduction `1/2 (E1^2 + E2^2 + B3^2) + B3 (omega ^ E)` against
/// the full sum-of-squares form on the planar ansatz.
pub fn planar_flux_reduction_check(e: [f64; 2], b3: f64, w: [f64; 2]) -> Result<f64> {
    check_unit(w)?;
    let lhs = 0.5 * (e[0] * e[0] + e[1] * e[1] + b3 * b3) + b3 * (w[0] * e[1] - w[1] * e[0]);
    Ok((lhs - cone_flux_density([e[0], e[1], 0.0], [0.0, 0.0, b3], w)).abs())
}

/// `|1 - |xi|^2 - 4 psi (t - s - psi) / (t - s)^2|` at one cone point, with
/// `xi` formed directly from the inputs.
pub fn null_coordinate_check(t: f64, s: f64, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    let g = cone_coords(t, s, x, y)?;
    let tau = t - s;
    let xi = [(y[0] - x[0]) / tau, (y[1] - x[1]) / tau];
    let direct = 1.0 - (xi[0] * xi[0] + xi[1] * xi[1]);
    Ok((direct - g.null_form()).abs())
}

fn field_component<R: Rng>(rng: &mut R) -> f64 {
    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
    scale * rng.gen_range(-1.0..1.0)
}

/// Random `(E, B, omega)`, every fourth one on the planar ansatz. The
/// reported ratio is the residual over `1 + |E|^2 + |B|^2`.
pub fn flux_identity_suite(seed: u64, count: usize) -> Result<IneqReport> {
    let mut rep = IneqReport::new("flux_identity", "E1 E2 E3 B1 B2 B3 w1 w2");
    rep.hard = true;
    rep.constant = Some(IDENTITY_TOL);
    let mut raw = 0.0f64;
    for part in chunked(seed, 0xF1, count, |rng, n| -> Result<(IneqReport, f64)> {
        let mut r = IneqReport::new("", "");
        let mut raw = 0.0f64;
        for i in 0..n {
            let mut e = [0.0; 3];
            let mut b = [0.0; 3];
            for k in 0..3 {
                e[k] = field_component(rng);
                b[k] = field_component(rng);
            }
            if i % 4 == 0 {
                e[2] = 0.0;
                b[0] = 0.0;
                b[1] = 0.0;
            }
            let w = unit_circle(rng);
            let res = flux_identity_check(e, b, w)?;
            raw = raw.max(res);
            let scale = 1.0 + e.iter().chain(&b).map(|v| v * v).sum::<f64>();
            r.observe(res / scale, &[e[0], e[1], e[2], b[0], b[1], b[2], w[0], w[1]]);
        }
        Ok((r, raw))
    }) {
        let (r, m) = part?;
        rep.merge(r);
        raw = raw.max(m);
    }
    rep.pass = rep.max_ratio < IDENTITY_TOL;
    rep.note = format!("max absolute residual {raw:.3e}");
    Ok(rep)
}

/// Planar ansatz reduction of the flux density.
pub fn planar_reduction_suite(seed: u64, count: usize) -> Result<IneqReport> {
    let mut rep = IneqReport::new("flux_planar_reduction", "E1 E2 B3 w1 w2");
    rep.hard = true;
    rep.constant = Some(IDENTITY_TOL);
    for part in chunked(seed, 0xF2, count, |rng, n| -> Result<IneqReport> {
        let mut r = IneqReport::new("", "");
        for _ in 0..n {
            let e = [field_component(rng), field_component(rng)];
            let b3 = field_component(rng);
            let w = unit_circle(rng);
            let res = planar_flux_reduction_check(e, b3, w)?;
            let scale = 1.0 + e[0] * e[0] + e[1] * e[1] + b3 * b3;
            r.observe(res / scale, &[e[0], e[1], b3, w[0], w[1]]);
        }
        Ok(r)
    }) {
        rep.merge(part?);
    }
    rep.pass = rep.max_ratio < IDENTITY_TOL;
    Ok(rep)
}

/// Cone points with a third of them in the collar `|y - x| > (1 - 1e-6)(t - s)`.
/// The residual is taken relative to `1 + |xi|^2`, the size of the terms.
pub fn null_coordinate_suite(seed: u64, count: usize) -> Result<IneqReport> {
    let mut rep = IneqReport::new("null_coordinates", "t s x1 x2 y1 y2");
    rep.hard = true;
    rep.constant = Some(IDENTITY_TOL);
    for part in chunked(seed, 0xF3, count, |rng, n| -> Result<IneqReport> {
        let mut r = IneqReport::new("", "");
        for i in 0..n {
            let t = rng.gen_range(0.01..20.0);
            let s = t * rng.gen_range(0.0..0.999);
            let tau = t - s;
            let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let frac = match i % 3 {
                0 => 1.0 - 10f64.powf(rng.gen_range(-12.0..-6.0)),
                1 => rng.gen::<f64>().sqrt(),
                _ => rng.gen_range(0.0..1e-3),
            };
            let w = unit_circle(rng);
            let y = [x[0] + frac * tau * w[0], x[1] + frac * tau * w[1]];
            let res = null_coordinate_check(t, s, x, y)?;
            let xi2 = (frac * frac).min(1.0);
            r.observe(res / (1.0 + xi2), &[t, s, x[0], x[1], y[0], y[1]]);
        }
        Ok(r)
    }) {
        rep.merge(part?);
    }
    rep.pass = rep.max_ratio < IDENTITY_TOL;
    Ok(rep)
}
