use crate::error::{CoreError, Result};
use crate::quad;
use std::f64::consts::TAU;

/// A momentum density `g(p) >= 0` with hints for quadrature.
pub trait MomentumProfile: Send + Sync {
    fn dim_p(&self) -> usize;

    /// Density at `p` (third slot zero in the planar case).
    fn density(&self, p: [f64; 3]) -> f64;

    /// The density depends on `p` only through `|(p1, p2)|` and `p3`.
    fn planar_isotropic(&self) -> bool {
        false
    }

    /// Planar radii where the density is not smooth.
    fn radial_breaks(&self) -> Vec<f64> {
        Vec::new()
    }

    /// The density vanishes for `|(p1, p2)|` beyond this radius.
    fn radial_support(&self) -> Option<f64> {
        None
    }

    /// At planar radius `r` the density vanishes for `|p3|` beyond this value.
    fn p3_support(&self, _r: f64) -> Option<f64> {
        None
    }

    /// Values of `|p3|` at planar radius `r` where the density is not smooth.
    fn p3_breaks(&self, _r: f64) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProfileIntegralTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for ProfileIntegralTol {
    fn default() -> Self {
        ProfileIntegralTol { abs: 1e-13, rel: 1e-9 }
    }
}

const ANGLE_NODES: usize = 64;

/// Line integral over `p3` of `h(p3)` on the support at planar radius `r`.
pub(crate) fn p3_integral<F: FnMut(f64) -> f64>(profile: &dyn MomentumProfile, r: f64, mut h: F, tol: ProfileIntegralTol) -> Result<f64> {
    let mut breaks = profile.p3_breaks(r);
    breaks.retain(|b| *b > 0.0);
    match profile.p3_support(r) {
        Some(c) if c <= 0.0 => Ok(0.0),
        Some(c) => {
            let mut br: Vec<f64> = breaks.iter().flat_map(|b| [-*b, *b]).collect();
            br.push(0.0);
            quad::integrate_pieces(&mut h, -c, c, &br, tol.abs, tol.rel)
        }
        None => {
            let top = breaks.iter().copied().fold(0.0, f64::max);
            let br: Vec<f64> = breaks.clone();
            let mut total = 0.0;
            for sign in [1.0, -1.0] {
                let mut g = |z: f64| h(sign * z);
                if top > 0.0 {
                    total += quad::integrate_pieces(&mut g, 0.0, top, &br, tol.abs, tol.rel)?;
                }
                total += quad::integrate_semi_infinite(&mut g, top, tol.abs, tol.rel)?;
            }
            Ok(total)
        }
    }
}

/// Radial integral over `[0, inf)` honoring the profile's breaks and support.
pub(crate) fn radial_integral<F: FnMut(f64) -> f64>(profile: &dyn MomentumProfile, mut h: F, tol: ProfileIntegralTol) -> Result<f64> {
    let breaks = profile.radial_breaks();
    match profile.radial_support() {
        Some(rmax) => quad::integrate_pieces(&mut h, 0.0, rmax, &breaks, tol.abs, tol.rel),
        None => {
            let top = breaks.iter().copied().fold(0.0, f64::max);
            let mut total = 0.0;
            if top > 0.0 {
                total += quad::integrate_pieces(&mut h, 0.0, top, &breaks, tol.abs, tol.rel)?;
            }
            total += quad::integrate_semi_infinite(&mut h, top, tol.abs, tol.rel)?;
            Ok(total)
        }
    }
}

/// `int g(p) weight(p) dp` over `R^{d_p}` in polar (planar) or cylindrical
/// coordinates. Set `weight_isotropic` when the weight depends only on
/// `|(p1, p2)|` and `p3`.
pub fn momentum_integral(
    profile: &dyn MomentumProfile,
    weight: &dyn Fn([f64; 3]) -> f64,
    weight_isotropic: bool,
    tol: ProfileIntegralTol,
) -> Result<f64> {
    let d = profile.dim_p();
    if d != 2 && d != 3 {
        return Err(CoreError::Shape(format!("profile dimension {d}")));
    }
    let inner = ProfileIntegralTol { abs: tol.abs * 1e-2, rel: tol.rel * 1e-2 };
    let isotropic = weight_isotropic && profile.planar_isotropic();
    let line = |r: f64, th: f64| -> Result<f64> {
        let (c, s) = (th.cos(), th.sin());
        let (p1, p2) = (r * c, r * s);
        if d == 2 {
            let p = [p1, p2, 0.0];
            return Ok(profile.density(p) * weight(p));
        }
        p3_integral(
            profile,
            r,
            |z| {
                let p = [p1, p2, z];
                let g = profile.density(p);
                if g == 0.0 {
                    0.0
                } else {
                    g * weight(p)
                }
            },
            inner,
        )
    };
    let mut failure = None;
    let v = radial_integral(
        profile,
        |r| {
            let ang = if isotropic {
                line(r, 0.0).map(|v| TAU * v)
            } else {
                let h = TAU / ANGLE_NODES as f64;
                (0..ANGLE_NODES).map(|k| line(r, k as f64 * h)).sum::<Result<f64>>().map(|v| v * h)
            };
            match ang {
                Ok(a) => r * a,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Disk;
    impl MomentumProfile for Disk {
        fn dim_p(&self) -> usize {
            2
        }
        fn density(&self, p: [f64; 3]) -> f64 {
            if p[0].hypot(p[1]) <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        fn planar_isotropic(&self) -> bool {
            true
        }
        fn radial_support(&self) -> Option<f64> {
            Some(1.0)
        }
    }

    struct Ball;
    impl MomentumProfile for Ball {
        fn dim_p(&self) -> usize {
            3
        }
        fn density(&self, p: [f64; 3]) -> f64 {
            if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        fn planar_isotropic(&self) -> bool {
            true
        }
        fn radial_support(&self) -> Option<f64> {
            Some(1.0)
        }
        fn p3_support(&self, r: f64) -> Option<f64> {
            Some((1.0 - r * r).max(0.0).sqrt())
        }
    }

    #[test]
    fn disk_area_and_energy_moment() {
        let tol = ProfileIntegralTol::default();
        let a = momentum_integral(&Disk, &|_| 1.0, true, tol).unwrap();
        assert!((a - std::f64::consts::PI).abs() < 1e-10);
        let m = momentum_integral(&Disk, &|p| 1.0 + p[0] * p[0] + p[1] * p[1], true, tol).unwrap();
        assert!((m - 1.5 * std::f64::consts::PI).abs() < 1e-10);
        let m2 = momentum_integral(&Disk, &|p| 1.0 + p[0] * p[0] + p[1] * p[1], false, tol).unwrap();
        assert!((m2 - m).abs() < 1e-10);
    }

    #[test]
    fn ball_volume() {
        let v = momentum_integral(&Ball, &|_| 1.0, true, ProfileIntegralTol::default()).unwrap();
        assert!((v - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-9);
    }
}
