use rvm_core::phase::MomentumProfile;
use serde::Serialize;

/// Radial shape in the momentum plane (or in all of `p` for `Spherical`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Radial {
    /// `1` on `|p| <= radius`.
    Indicator { radius: f64 },
    /// `1` on `inner <= |p| <= outer`.
    Shell { inner: f64, outer: f64 },
    /// `exp(-|p|^2 / (2 width^2))`.
    Gaussian { width: f64 },
    /// `p0(|p| / scale)^(-power)`.
    Power { scale: f64, power: f64 },
    /// `(1 - |p|^2 / radius^2)_+^2`.
    Bump { radius: f64 },
}

impl Radial {
    fn eval(&self, r: f64) -> f64 {
        match *self {
            Radial::Indicator { radius } => (r <= radius) as u8 as f64,
            Radial::Shell { inner, outer } => (r >= inner && r <= outer) as u8 as f64,
            Radial::Gaussian { width } => (-0.5 * (r / width).powi(2)).exp(),
            Radial::Power { scale, power } => (1.0 + (r / scale).powi(2)).powf(-0.5 * power),
            Radial::Bump { radius } => (1.0 - (r / radius).powi(2)).max(0.0).powi(2),
        }
    }

    fn support(&self) -> Option<f64> {
        match *self {
            Radial::Indicator { radius } | Radial::Bump { radius } => Some(radius),
            Radial::Shell { outer, .. } => Some(outer),
            _ => None,
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            Radial::Shell { inner, .. } => vec![inner],
            Radial::Gaussian { width } => vec![width, 3.0 * width],
            Radial::Power { scale, .. } => vec![scale, 10.0 * scale],
            _ => Vec::new(),
        }
    }
}

/// Dependence on `p3` for full momenta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Vertical {
    /// The radial shape is applied to `|p|` in three dimensions.
    Spherical,
    /// `<p3>^(-power)` times the planar radial shape.
    Tail { power: f64 },
    /// `1` on `|p3| <= half_width`.
    Slab { half_width: f64 },
}

/// Test density `amplitude * shape(p - drift)` with `d_p` momentum components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub dim: usize,
    pub amplitude: f64,
    pub radial: Radial,
    pub vertical: Vertical,
    /// Planar drift; nonzero drifts break planar isotropy.
    pub drift: [f64; 2],
}

impl Profile {
    pub fn planar(radial: Radial) -> Self {
        Profile { dim: 2, amplitude: 1.0, radial, vertical: Vertical::Spherical, drift: [0.0; 2] }
    }

    pub fn full(radial: Radial, vertical: Vertical) -> Self {
        Profile { dim: 3, amplitude: 1.0, radial, vertical, drift: [0.0; 2] }
    }

    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn with_drift(mut self, d: [f64; 2]) -> Self {
        self.drift = d;
        self
    }

    pub fn isotropic(&self) -> bool {
        self.drift == [0.0, 0.0]
    }

    /// Largest value of the density.
    pub fn sup(&self) -> f64 {
        let r0 = match self.radial {
            Radial::Shell { inner, .. } => inner,
            _ => 0.0,
        };
        self.amplitude * self.radial.eval(r0)
    }
}

impl MomentumProfile for Profile {
    fn dim_p(&self) -> usize {
        self.dim
    }

    fn density(&self, p: [f64; 3]) -> f64 {
        let q = [p[0] - self.drift[0], p[1] - self.drift[1]];
        let pl = q[0].hypot(q[1]);
        let v = if self.dim == 2 {
            self.radial.eval(pl)
        } else {
            match self.vertical {
                Vertical::Spherical => self.radial.eval(pl.hypot(p[2])),
                Vertical::Tail { power } => self.radial.eval(pl) * (1.0 + p[2] * p[2]).powf(-0.5 * power),
                Vertical::Slab { half_width } => self.radial.eval(pl) * (p[2].abs() <= half_width) as u8 as f64,
            }
        };
        self.amplitude * v
    }

    fn planar_isotropic(&self) -> bool {
        self.isotropic()
    }

    fn radial_breaks(&self) -> Vec<f64> {
        if self.isotropic() {
            self.radial.breaks()
        } else {
            Vec::new()
        }
    }

    fn radial_support(&self) -> Option<f64> {
        let shift = self.drift[0].hypot(self.drift[1]);
        self.radial.support().map(|s| s + shift)
    }

    fn p3_support(&self, r: f64) -> Option<f64> {
        if self.dim != 3 {
            return None;
        }
        match self.vertical {
            Vertical::Spherical => self.radial.support().map(|s| if self.isotropic() { (s * s - r * r).max(0.0).sqrt() } else { s }),
            Vertical::Slab { half_width } => Some(half_width),
            Vertical::Tail { .. } => None,
        }
    }

    fn p3_breaks(&self, _r: f64) -> Vec<f64> {
        match (self.dim, self.vertical) {
            (3, Vertical::Tail { .. }) => vec![1.0, 10.0],
            (3, Vertical::Spherical) => self.radial.breaks(),
            _ => Vec::new(),
        }
    }
}

/// Twenty densities: ten planar and ten with full momenta, mixing compact
/// support, Gaussian decay, polynomial tails and (planar only) drifts.
pub fn battery() -> Vec<Profile> {
    use Radial::*;
    vec![
        Profile::planar(Indicator { radius: 1.0 }),
        Profile::planar(Indicator { radius: 4.0 }),
        Profile::planar(Shell { inner: 1.0, outer: 2.0 }),
        Profile::planar(Gaussian { width: 0.5 }),
        Profile::planar(Gaussian { width: 3.0 }),
        Profile::planar(Power { scale: 1.0, power: 7.0 }),
        Profile::planar(Power { scale: 2.0, power: 9.0 }),
        Profile::planar(Bump { radius: 2.0 }),
        Profile::planar(Gaussian { width: 1.0 }).with_drift([1.5, 0.0]),
        Profile::planar(Bump { radius: 1.0 }).with_drift([0.0, -2.0]),
        Profile::full(Indicator { radius: 1.0 }, Vertical::Spherical),
        Profile::full(Gaussian { width: 1.0 }, Vertical::Spherical),
        Profile::full(Gaussian { width: 2.0 }, Vertical::Tail { power: 8.0 }),
        Profile::full(Power { scale: 1.0, power: 8.0 }, Vertical::Tail { power: 8.0 }),
        Profile::full(Power { scale: 1.0, power: 8.0 }, Vertical::Spherical),
        Profile::full(Bump { radius: 3.0 }, Vertical::Slab { half_width: 1.0 }),
        Profile::full(Shell { inner: 0.5, outer: 1.5 }, Vertical::Slab { half_width: 2.0 }),
        Profile::full(Indicator { radius: 2.0 }, Vertical::Tail { power: 10.0 }),
        Profile::full(Gaussian { width: 0.3 }, Vertical::Tail { power: 7.0 }),
        Profile::full(Bump { radius: 1.5 }, Vertical::Spherical),
    ]
}
