use crate::error::{CoreError, Result};
use crate::history::{frame_interpolator, RunHistory};
use crate::maxwell::Spectral;
use crate::quad;
use crate::smoothing::SmoothedParticles;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeFluxQuadrature {
    /// Periodic trapezoid nodes in the cone angle.
    pub n_theta: usize,
    /// Gauss-Legendre nodes in the radius for the base disk.
    pub n_radius: usize,
}

impl Default for ConeFluxQuadrature {
    fn default() -> Self {
        ConeFluxQuadrature { n_theta: 96, n_radius: 48 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NullConeFluxReport {
    pub t: f64,
    pub x: [f64; 2],
    /// `1/4 int_C K_g^2 dsigma`.
    pub flux_kg: f64,
    /// `4 pi int_C int p0 (1 + phat . omega) f dp dsigma`.
    pub particle_cone_term: f64,
    pub total: f64,
}

/// `1/4 K_g^2 = 1/2 (|E|^2 + |B|^2) + omega . (E x B)` in its sum-of-squares form.
#[inline]
pub fn cone_flux_density(e: [f64; 3], b: [f64; 3], w: [f64; 2]) -> f64 {
    let ew = e[0] * w[0] + e[1] * w[1];
    let bw = b[0] * w[0] + b[1] * w[1];
    // omega x B and omega x E with omega = (w1, w2, 0)
    let wxb = [w[1] * b[2], -w[0] * b[2], w[0] * b[1] - w[1] * b[0]];
    let wxe = [w[1] * e[2], -w[0] * e[2], w[0] * e[1] - w[1] * e[0]];
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for k in 0..3 {
        s1 += (e[k] - wxb[k]).powi(2);
        s2 += (b[k] + wxe[k]).powi(2);
    }
    0.25 * (ew * ew + bw * bw + s1 + s2)
}

/// Flux through the backward cone of `(t, x)` down to `s = 0`, by Simpson's
/// rule over stored frames and the trapezoid rule in the cone angle.
pub fn null_cone_flux(history: &RunHistory, t: f64, x: [f64; 2], quadrature: &ConeFluxQuadrature) -> Result<NullConeFluxReport> {
    if history.frames.is_empty() {
        return Ok(NullConeFluxReport { t, x, flux_kg: 0.0, particle_cone_term: 0.0, total: 0.0 });
    }
    history.validate()?;
    let m = history.frame_at(t)?;
    if m == 0 {
        return Ok(NullConeFluxReport { t, x, flux_kg: 0.0, particle_cone_term: 0.0, total: 0.0 });
    }
    let sp = Spectral::new(history.grid);
    let ws = quad::simpson_weights(m, history.dt);
    let thetas = quad::periodic_trapezoid(quadrature.n_theta);
    let mut flux = 0.0;
    let mut cone = 0.0;
    let mut vals = [0.0; 18];
    for k in 0..=m {
        let fr = &history.frames[k];
        let tau = t - fr.time;
        let interp = frame_interpolator(&sp, &fr.fields);
        let smooth = SmoothedParticles::new(&fr.particles, history.grid);
        let mut fk = 0.0;
        let mut ck = 0.0;
        for &(th, wt) in &thetas {
            let w = [th.cos(), th.sin()];
            let y = [x[0] + tau * w[0], x[1] + tau * w[1]];
            interp.eval(y, &mut vals);
            let e = [vals[0], vals[1], vals[2]];
            let b = [vals[3], vals[4], vals[5]];
            fk += wt * cone_flux_density(e, b, w);
            ck += wt
                * smooth.density(y, |p| {
                    let p0 = 1f64.hypot(p.p[0].hypot(p.p[1]).hypot(p.p[2]));
                    p0 + p.p[0] * w[0] + p.p[1] * w[1]
                });
        }
        flux += ws[k] * tau * fk;
        cone += ws[k] * tau * ck;
    }
    let cone = 4.0 * PI * cone;
    if !(flux.is_finite() && cone.is_finite()) {
        return Err(CoreError::NonFinite("cone flux".into()));
    }
    Ok(NullConeFluxReport { t, x, flux_kg: flux, particle_cone_term: cone, total: flux + cone })
}

/// Energy in the disk `|y - x| <= t` at time zero, over the periodic extension.
pub fn base_disk_energy(history: &RunHistory, t: f64, x: [f64; 2], quadrature: &ConeFluxQuadrature) -> Result<f64> {
    let fr = history.frames.first().ok_or_else(|| CoreError::History("no frames stored".into()))?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let sp = Spectral::new(history.grid);
    let interp = frame_interpolator(&sp, &fr.fields);
    let smooth = SmoothedParticles::new(&fr.particles, history.grid);
    let thetas = quad::periodic_trapezoid(quadrature.n_theta);
    let mut vals = [0.0; 18];
    let mut total = 0.0;
    for (r, wr) in quad::gauss_legendre(quadrature.n_radius, 0.0, t) {
        for &(th, wt) in &thetas {
            let y = [x[0] + r * th.cos(), x[1] + r * th.sin()];
            interp.eval(y, &mut vals);
            let field: f64 = vals[..6].iter().map(|v| v * v).sum::<f64>() * 0.5;
            let kin = 4.0 * PI * smooth.density(y, |p| 1f64.hypot(p.p[0].hypot(p.p[1]).hypot(p.p[2])));
            total += wr * wt * r * (field + kin);
        }
    }
    Ok(total)
}
