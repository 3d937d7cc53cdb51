use crate::error::{LabError, Result};
use crate::report::{ratio, IneqReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use rvm_core::phase::{mixed_norm, Exponent, GridScalar, NormSpec};
use rvm_core::retarded::{box_inverse, RetardedQuadrature};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// A positive Lebesgue exponent, exact. Values below 1 are representable so
/// the range conditions can reject them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lebesgue {
    Finite(BigRational),
    Infinite,
}

impl Lebesgue {
    pub fn int(n: i64) -> Self {
        Lebesgue::Finite(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Lebesgue::Finite(BigRational::new(n.into(), d.into()))
    }

    /// `1 / a`, zero for infinity.
    pub fn recip(&self) -> BigRational {
        match self {
            Lebesgue::Finite(v) => v.recip(),
            Lebesgue::Infinite => BigRational::zero(),
        }
    }

    /// `1 / a + 1 / a' = 1`.
    pub fn conjugate(&self) -> Lebesgue {
        let r = BigRational::one() - self.recip();
        if r.is_zero() {
            Lebesgue::Infinite
        } else {
            Lebesgue::Finite(r.recip())
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Lebesgue::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
            Lebesgue::Infinite => f64::INFINITY,
        }
    }

    fn positive(&self) -> bool {
        match self {
            Lebesgue::Finite(v) => v.is_positive(),
            Lebesgue::Infinite => true,
        }
    }
}

impl fmt::Display for Lebesgue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lebesgue::Finite(v) => write!(f, "{v}"),
            Lebesgue::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Lebesgue {
    type Err = LabError;

    /// `inf`, an integer, `a/b`, or a terminating decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Lebesgue::Infinite);
        }
        let bad = || LabError::Input(format!("cannot read exponent {s:?}"));
        let v = if let Some((n, d)) = s.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        } else if let Some((w, frac)) = s.split_once('.') {
            let digits = format!("{w}{frac}");
            let n = BigInt::from_str(&digits).map_err(|_| bad())?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(n, d)
        } else {
            BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)
        };
        if !v.is_positive() {
            return Err(LabError::Input(format!("exponent {s:?} must be positive")));
        }
        Ok(Lebesgue::Finite(v))
    }
}

/// `(q1, r1)` for the solution, `(q2, r2)` for the dual pair of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrichartzExponents {
    pub q1: Lebesgue,
    pub r1: Lebesgue,
    pub q2: Lebesgue,
    pub r2: Lebesgue,
}

impl StrichartzExponents {
    /// From `q1, r1` and the source exponents `q2', r2'`.
    pub fn from_dual(q1: Lebesgue, r1: Lebesgue, q2_dual: Lebesgue, r2_dual: Lebesgue) -> Self {
        StrichartzExponents { q1, r1, q2: q2_dual.conjugate(), r2: r2_dual.conjugate() }
    }

    pub fn q2_dual(&self) -> Lebesgue {
        self.q2.conjugate()
    }

    pub fn r2_dual(&self) -> Lebesgue {
        self.r2.conjugate()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `n / d`, infinite when `d = 0` (the reciprocal vanishes).
fn exponent(n: i64, d: i64) -> Lebesgue {
    if d == 0 {
        Lebesgue::Infinite
    } else {
        Lebesgue::Finite(rat(n, d))
    }
}

/// The exponents used for the `K_T` moment bound, in terms of `N` and `k`.
pub fn kt_exponents(n: i64, k: i64) -> StrichartzExponents {
    StrichartzExponents::from_dual(
        exponent(3 * k * (n + 2), (k - 3) * n + (2 * k - 51)),
        exponent(2 * (n + 2), 5),
        exponent(k * (n + 2), (k - 1) * n + 2 * k - 17),
        exponent(6 * (n + 2), 4 * n + 23),
    )
}

/// The exponents used for the `K_S,1` moment bound, in terms of `N` and `k`.
pub fn ks1_exponents(n: i64, k: i64) -> StrichartzExponents {
    StrichartzExponents::from_dual(
        exponent(3 * k * (n + 2), (k - 3) * n + (2 * k - 24)),
        exponent(n + 2, 1),
        exponent(k * (n + 2), (k - 1) * n + (2 * k - 8)),
        exponent(3 * (n + 2), 2 * n + 7),
    )
}

/// The displayed conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    /// `1/q1 + 2/r1 = 1/q2' + 2/r2' - 2`.
    Scaling,
    /// `1/q1 < 1/2 - 1/r1`.
    SolutionGap,
    /// `3/2 - 1/r2' < 1/q2'`.
    SourceGap,
    /// `1/3 <= 1/r1 + 1/r2`.
    SumLower,
    /// `1/r1 + 1/r2 < 1/2`, implied by the others.
    SumUpper,
    /// `1 <= q1 < inf`.
    Q1Range,
    /// `1 <= q2 < inf`.
    Q2Range,
    /// `2 <= r1 <= inf`.
    R1Range,
    /// `2 <= r2 <= inf`.
    R2Range,
}

impl Condition {
    pub fn describe(&self) -> &'static str {
        match self {
            Condition::Scaling => "1/q1 + 2/r1 = 1/q2' + 2/r2' - 2",
            Condition::SolutionGap => "1/q1 < 1/2 - 1/r1",
            Condition::SourceGap => "3/2 - 1/r2' < 1/q2'",
            Condition::SumLower => "1/3 <= 1/r1 + 1/r2",
            Condition::SumUpper => "1/r1 + 1/r2 < 1/2",
            Condition::Q1Range => "1 <= q1 < inf",
            Condition::Q2Range => "1 <= q2 < inf",
            Condition::R1Range => "2 <= r1 <= inf",
            Condition::R2Range => "2 <= r2 <= inf",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub violated: Vec<Condition>,
    /// `1/q1 + 2/r1`.
    pub scaling_lhs: BigRational,
    /// `1/q2' + 2/r2' - 2`.
    pub scaling_rhs: BigRational,
}

/// Exact check of every displayed condition. With `drop_redundant` the upper
/// bound on `1/r1 + 1/r2` is skipped.
pub fn strichartz_admissible(e: &StrichartzExponents, drop_redundant: bool) -> Admissibility {
    let half = rat(1, 2);
    let (a1, b1) = (e.q1.recip(), e.r1.recip());
    let (a2, b2) = (e.q2.recip(), e.r2.recip());
    let one = BigRational::one();
    let (a2d, b2d) = (&one - &a2, &one - &b2);
    let two = BigRational::from_integer(2.into());
    let scaling_lhs = &a1 + &two * &b1;
    let scaling_rhs = &a2d + &two * &b2d - &two;
    let mut violated = Vec::new();
    let mut need = |ok: bool, c: Condition| {
        if !ok {
            violated.push(c);
        }
    };
    need(scaling_lhs == scaling_rhs, Condition::Scaling);
    need(a1 < &half - &b1, Condition::SolutionGap);
    need(rat(3, 2) - &b2d < a2d, Condition::SourceGap);
    let sum = &b1 + &b2;
    need(rat(1, 3) <= sum, Condition::SumLower);
    if !drop_redundant {
        need(sum < half, Condition::SumUpper);
    }
    let finite_at_least_one = |l: &Lebesgue| matches!(l, Lebesgue::Finite(v) if *v >= BigRational::one());
    let at_least_two = |l: &Lebesgue| match l {
        Lebesgue::Finite(v) => *v >= BigRational::from_integer(2.into()),
        Lebesgue::Infinite => true,
    };
    need(finite_at_least_one(&e.q1) && e.q1.positive(), Condition::Q1Range);
    need(finite_at_least_one(&e.q2) && e.q2.positive(), Condition::Q2Range);
    need(at_least_two(&e.r1), Condition::R1Range);
    need(at_least_two(&e.r2), Condition::R2Range);
    Admissibility { admissible: violated.is_empty(), violated, scaling_lhs, scaling_rhs }
}

/// A smooth test source on the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianSource {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
    /// Angular frequency of a `cos(freq s)` time modulation.
    pub freq: f64,
}

impl GaussianSource {
    pub fn eval(&self, s: f64, y: [f64; 2]) -> f64 {
        let d2 = (y[0] - self.center[0]).powi(2) + (y[1] - self.center[1]).powi(2);
        self.amplitude * (self.freq * s).cos() * (-0.5 * d2 / (self.width * self.width)).exp()
    }

    pub fn scaled(&self, k: f64) -> Self {
        GaussianSource { amplitude: self.amplitude * k, ..*self }
    }
}

pub fn source_battery() -> Vec<GaussianSource> {
    vec![
        GaussianSource { amplitude: 1.0, center: [0.0, 0.0], width: 0.5, freq: 0.0 },
        GaussianSource { amplitude: 1.0, center: [0.3, -0.2], width: 0.25, freq: 0.0 },
        GaussianSource { amplitude: 1.0, center: [0.0, 0.0], width: 0.4, freq: 3.0 },
        GaussianSource { amplitude: -2.0, center: [-0.4, 0.1], width: 0.7, freq: 1.0 },
        GaussianSource { amplitude: 0.5, center: [0.2, 0.2], width: 0.15, freq: 0.0 },
        GaussianSource { amplitude: 0.0, center: [0.0, 0.0], width: 1.0, freq: 0.0 },
    ]
}

/// Truncated space-time grid for the empirical check: `nt` midpoint times
/// on `[0, T)` and an `nx x nx` midpoint grid on `[-half, half]^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrichartzGrid {
    pub t_end: f64,
    pub nt: usize,
    pub half: f64,
    pub nx: usize,
    pub quadrature: RetardedQuadrature,
}

impl Default for StrichartzGrid {
    fn default() -> Self {
        StrichartzGrid { t_end: 1.0, nt: 6, half: 2.5, nx: 20, quadrature: RetardedQuadrature::default() }
    }
}

fn lebesgue_f64(l: &Lebesgue) -> Result<Exponent> {
    Ok(Exponent::finite(l.to_f64()).map_err(LabError::Core)?)
}

/// Ratio of `||u||_{L^q1_t L^r1_x}` to `||F||_{L^q2'_t L^r2'_x}` for one source.
pub fn strichartz_ratio(src: &GaussianSource, e: &StrichartzExponents, grid: &StrichartzGrid) -> Result<(f64, f64)> {
    let (nt, nx) = (grid.nt, grid.nx);
    let dt = grid.t_end / nt as f64;
    let dx = 2.0 * grid.half / nx as f64;
    let pts: Vec<(f64, [f64; 2])> = (0..nt)
        .flat_map(|i| {
            (0..nx * nx).map(move |j| {
                let x = [-grid.half + (j / nx) as f64 * dx + 0.5 * dx, -grid.half + (j % nx) as f64 * dx + 0.5 * dx];
                ((i as f64 + 0.5) * dt, x)
            })
        })
        .collect();
    let u: Vec<f64> = pts
        .par_iter()
        .map(|&(t, x)| box_inverse(|s, y| Ok(src.eval(s, y)), t, x, &grid.quadrature))
        .collect::<std::result::Result<_, _>>()?;
    let f: Vec<f64> = pts.iter().map(|&(t, x)| src.eval(t, x)).collect();
    let gu = GridScalar::space_time(nt, dt, nx * nx, dx * dx, u)?;
    let gf = GridScalar::space_time(nt, dt, nx * nx, dx * dx, f)?;
    let one = Exponent::Finite(1.0);
    let nu = mixed_norm(&gu, &NormSpec { s: lebesgue_f64(&e.q1)?, q: lebesgue_f64(&e.r1)?, r: one })?.value;
    let nf = mixed_norm(&gf, &NormSpec { s: lebesgue_f64(&e.q2_dual())?, q: lebesgue_f64(&e.r2_dual())?, r: one })?.value;
    Ok((nu, nf))
}

/// Largest norm ratio over a source battery. Samples the inequality on a
/// truncated grid; it does not prove it.
pub fn strichartz_empirical(sources: &[GaussianSource], e: &StrichartzExponents, grid: &StrichartzGrid) -> Result<IneqReport> {
    let adm = strichartz_admissible(e, false);
    if !adm.admissible {
        let names: Vec<&str> = adm.violated.iter().map(|c| c.describe()).collect();
        return Err(LabError::Precondition(format!("exponents are not admissible: {}", names.join("; "))));
    }
    let mut rep = IneqReport::new(
        format!("strichartz_empirical[q1={},r1={},q2'={},r2'={}]", e.q1, e.r1, e.q2_dual(), e.r2_dual()),
        "amplitude c1 c2 width freq",
    );
    for s in sources {
        let (nu, nf) = strichartz_ratio(s, e, grid)?;
        rep.observe(ratio(nu, nf), &[s.amplitude, s.center[0], s.center[1], s.width, s.freq]);
    }
    rep.pass = rep.max_ratio.is_finite();
    rep.note = format!("empirical constant {:.6} on a truncated grid", rep.max_ratio);
    Ok(rep)
}

/// Admissibility of the two exponent families at the given `(N, k)` as
/// hard-asserted reports (ratio 1 for admissible, 0 otherwise).
pub fn admissibility_reports(cases: &[(&str, StrichartzExponents)]) -> Vec<IneqReport> {
    cases
        .iter()
        .map(|(label, e)| {
            let a = strichartz_admissible(e, false);
            let mut r = IneqReport::new(format!("strichartz_admissible[{label}]"), "q1 r1 q2 r2");
            r.hard = true;
            r.observe(if a.admissible { 1.0 } else { 0.0 }, &[e.q1.to_f64(), e.r1.to_f64(), e.q2.to_f64(), e.r2.to_f64()]);
            r.pass = a.admissible;
            r.note = format!(
                "scaling {} = {}; violated: [{}]",
                a.scaling_lhs,
                a.scaling_rhs,
                a.violated.iter().map(|c| c.describe()).collect::<Vec<_>>().join("; ")
            );
            r
        })
        .collect()
}
