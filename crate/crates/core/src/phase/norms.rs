use super::ParticleEnsemble;
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Moment exponent `N` for `int int p0^N f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub n: f64,
    pub d_p: usize,
}

impl MomentSpec {
    pub fn new(n: f64, d_p: usize) -> Result<Self> {
        if !(n.is_finite() && n >= 0.0) {
            return Err(CoreError::Constraint(format!("moment exponent must be finite and >= 0, got {n}")));
        }
        if d_p != 2 && d_p != 3 {
            return Err(CoreError::Shape(format!("d_p must be 2 or 3, got {d_p}")));
        }
        Ok(MomentSpec { n, d_p })
    }
}

/// Particle estimate `sum_i w_i p0_i^N` of the moment.
pub fn moment(ens: &ParticleEnsemble, spec: &MomentSpec) -> Result<f64> {
    if ens.dim_p() != spec.d_p {
        return Err(CoreError::Mode(format!("ensemble has d_p = {}, spec has {}", ens.dim_p(), spec.d_p)));
    }
    let ps = ens.particles();
    let v = crate::vecops::pairwise_sum_by(ps.len(), &|i| {
        let p = ps[i].p;
        let p0 = 1f64.hypot(p[0].hypot(p[1]).hypot(p[2]));
        ps[i].w * p0.powf(spec.n)
    });
    if !v.is_finite() {
        return Err(CoreError::Overflow(format!("moment of order {} is not representable", spec.n)));
    }
    Ok(v)
}

/// A Lebesgue exponent in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_infinite() && v > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(v >= 1.0) {
            return Err(CoreError::Constraint(format!("exponent must be >= 1, got {v}")));
        }
        Ok(Exponent::Finite(v))
    }

    /// `1 / a + 1 / a' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(a) if a == 1.0 => Exponent::Infinity,
            Exponent::Finite(a) => Exponent::Finite(a / (a - 1.0)),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Exponent::Infinity => Ok(()),
            Exponent::Finite(v) if v >= 1.0 && v.is_finite() => Ok(()),
            Exponent::Finite(v) => Err(CoreError::Constraint(format!("exponent must be >= 1, got {v}"))),
        }
    }
}

/// Exponents for `L^s_t L^q_x L^r_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: Exponent,
    pub q: Exponent,
    pub r: Exponent,
}

impl NormSpec {
    pub fn uniform(e: Exponent) -> Self {
        NormSpec { s: e, q: e, r: e }
    }
}

/// Samples on a tensor grid `(t, x, p)` flattened with `p` fastest.
///
/// `shape` counts points per group and `measure` is the cell measure of each
/// group; a missing group has one point of measure one.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScalar {
    pub shape: [usize; 3],
    pub measure: [f64; 3],
    pub values: Vec<f64>,
}

impl GridScalar {
    pub fn new(shape: [usize; 3], measure: [f64; 3], values: Vec<f64>) -> Result<Self> {
        let g = GridScalar { shape, measure, values };
        g.validate()?;
        Ok(g)
    }

    /// Scalar over space only.
    pub fn spatial(values: Vec<f64>, cell_measure: f64) -> Result<Self> {
        Self::new([1, values.len(), 1], [1.0, cell_measure, 1.0], values)
    }

    /// Scalar over `(t, x)` with `nt` time slices.
    pub fn space_time(nt: usize, dt: f64, nx: usize, dx: f64, values: Vec<f64>) -> Result<Self> {
        Self::new([nt, nx, 1], [dt, dx, 1.0], values)
    }

    fn validate(&self) -> Result<()> {
        let n: usize = self.shape.iter().product();
        if n != self.values.len() {
            return Err(CoreError::Shape(format!("grid shape {:?} holds {n} values but {} were given", self.shape, self.values.len())));
        }
        if self.measure.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(CoreError::Shape(format!("grid spacing must be positive, got {:?}", self.measure)));
        }
        Ok(())
    }

    /// Pointwise product with another scalar on the same grid.
    pub fn product(&self, other: &GridScalar) -> Result<GridScalar> {
        if self.shape != other.shape || self.measure != other.measure {
            return Err(CoreError::Shape("grids differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(GridScalar { shape: self.shape, measure: self.measure, values })
    }
}

/// Norm value with the resolution it was computed at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub shape: [usize; 3],
    pub measure: [f64; 3],
}

/// `(sum mu |v|^a)^{1/a}`, or `max |v|` for `a = inf`, scaled against overflow.
fn lebesgue(values: &[f64], mu: f64, e: Exponent) -> f64 {
    let big = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match e {
        Exponent::Infinity => big,
        Exponent::Finite(a) => {
            if big == 0.0 {
                return 0.0;
            }
            let s = crate::vecops::pairwise_sum_by(values.len(), &|i| (values[i].abs() / big).powf(a));
            big * (s * mu).powf(1.0 / a)
        }
    }
}

/// Nested discrete norm `|| || || g ||_{L^r_p} ||_{L^q_x} ||_{L^s_t}` by midpoint sums.
pub fn mixed_norm(g: &GridScalar, spec: &NormSpec) -> Result<NormValue> {
    g.validate()?;
    spec.s.validate()?;
    spec.q.validate()?;
    spec.r.validate()?;
    let [nt, nx, np] = g.shape;
    let [mt, mx, mp] = g.measure;
    let mut inner_x = vec![0.0; nx];
    let mut inner_t = vec![0.0; nt];
    for it in 0..nt {
        for ix in 0..nx {
            let off = (it * nx + ix) * np;
            inner_x[ix] = lebesgue(&g.values[off..off + np], mp, spec.r);
        }
        inner_t[it] = lebesgue(&inner_x, mx, spec.q);
    }
    let value = lebesgue(&inner_t, mt, spec.s);
    Ok(NormValue { value, shape: g.shape, measure: g.measure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{Mode, Particle};

    #[test]
    fn empty_moment_is_zero() {
        let ens = ParticleEnsemble::empty(Mode::TwoD, [1.0, 1.0]);
        assert_eq!(moment(&ens, &MomentSpec::new(3.0, 2).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn single_particle_at_rest() {
        let ens = ParticleEnsemble::new(Mode::TwoD, [1.0, 1.0], vec![Particle { x: [0.5, 0.5], p: [0.0; 3], w: 2.0 }]).unwrap();
        assert_eq!(moment(&ens, &MomentSpec::new(5.0, 2).unwrap()).unwrap(), 2.0);
    }

    #[test]
    fn overflow_is_reported() {
        let ens = ParticleEnsemble::new(Mode::TwoD, [1.0, 1.0], vec![Particle { x: [0.5, 0.5], p: [1e10, 0.0, 0.0], w: 1.0 }]).unwrap();
        assert!(matches!(moment(&ens, &MomentSpec::new(400.0, 2).unwrap()), Err(CoreError::Overflow(_))));
    }

    #[test]
    fn constant_on_unit_box() {
        let g = GridScalar::new([4, 9, 5], [0.25, 1.0 / 9.0, 0.2], vec![1.0; 180]).unwrap();
        let v = mixed_norm(&g, &NormSpec::uniform(Exponent::Finite(1.0))).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn infinity_is_max() {
        let g = GridScalar::spatial(vec![1.0, -3.0, 2.0], 0.1).unwrap();
        let v = mixed_norm(&g, &NormSpec::uniform(Exponent::Infinity)).unwrap();
        assert_eq!(v.value, 3.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(GridScalar::new([2, 2, 2], [1.0; 3], vec![0.0; 7]).is_err());
        assert!(GridScalar::new([1, 1, 1], [0.0, 1.0, 1.0], vec![0.0]).is_err());
    }
}
