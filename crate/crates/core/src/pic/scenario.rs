//! Scenario files (TOML).
//!
//! ```toml
//! mode = "2d"            # or "2.5d"
//! seed = 7
//! dt = 0.05
//! t_end = 5.0
//! feedback = true        # false: fields stay at their initial values
//!
//! [grid]
//! n = [64, 64]
//! len = [6.283185307179586, 6.283185307179586]
//!
//! [plasma]
//! kind = "sampled"       # "empty" | "sampled" | "explicit"
//! charge = 0.5           # sum of weights
//! space = { kind = "lattice", per_cell = [5, 5] }
//! momentum = { kind = "polynomial", epsilon = 0.5, scale = 0.1 }
//! shear = { amplitude = [0.2, 0.0, 0.0], mode = [0, 1] }
//!
//! [fields]
//! kind = "poisson"       # "zero" | "poisson" | "uniform"
//!
//! [diagnostics]
//! every = 1
//! moments = [2.0, 4.0, 8.0]
//! delta = 0.5
//! tracers = 0
//! history_every = 0
//! ```
//!
//! Unknown keys are rejected; errors carry the offending key path.

use crate::error::{CoreError, Result};
use crate::maxwell::{Grid, DEFAULT_CFL};
use crate::phase::Mode;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "yes")]
    pub feedback: bool,
    pub grid: GridConfig,
    #[serde(default)]
    pub plasma: PlasmaConfig,
    #[serde(default)]
    pub fields: FieldInit,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: [usize; 2],
    pub len: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlasmaConfig {
    #[default]
    Empty,
    Sampled {
        /// Particle count; fixed by `per_cell` for lattice loading.
        #[serde(default)]
        count: Option<usize>,
        /// Total weight `int int f dx dp`.
        charge: f64,
        space: SpaceProfile,
        momentum: MomentumDist,
        #[serde(default)]
        shear: Option<Shear>,
    },
    Explicit {
        particles: Vec<ParticleSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceProfile {
    /// Independent uniform positions.
    Uniform,
    /// Quiet start: `per_cell[0] x per_cell[1]` evenly spaced sites per cell,
    /// whose cloud-in-cell density is exactly uniform.
    Lattice { per_cell: [usize; 2] },
    /// Density `1 + amplitude cos(k . x)` with `k = 2 pi mode / len`.
    Cosine { amplitude: f64, mode: [i32; 2] },
    /// `floor + exp(-|x - center|^2 / (2 width^2))` (minimum image).
    Gaussian {
        center: [f64; 2],
        width: f64,
        #[serde(default)]
        floor: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MomentumDist {
    /// Density proportional to `(1 + |q|^2)^(-(16 + epsilon) / 2)` with
    /// `q = (p - drift) / scale`.
    Polynomial {
        epsilon: f64,
        scale: f64,
        #[serde(default)]
        drift: [f64; 3],
    },
    /// Every particle has momentum `p`.
    Cold { p: [f64; 3] },
}

/// Position-dependent drift `amplitude sin(k . x)` added to sampled momenta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shear {
    pub amplitude: [f64; 3],
    pub mode: [i32; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    pub x: [f64; 2],
    pub p: [f64; 3],
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldInit {
    #[default]
    Zero,
    /// Curl-free `E` solving Gauss's law for the initial charge, `B = 0`.
    Poisson,
    /// Constant `e`, `b`, optionally on top of the Poisson field.
    Uniform {
        e: [f64; 3],
        b: [f64; 3],
        #[serde(default)]
        poisson: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Record every `every` steps (the last step is always recorded).
    #[serde(default = "one")]
    pub every: usize,
    /// Moment orders `N` for `sum w p0^N` and field norms `L^(N + d_p)`.
    #[serde(default = "default_moments")]
    pub moments: Vec<f64>,
    /// Exponent offset in the `<p3>^(5 + delta)` line integral.
    #[serde(default = "half")]
    pub delta: f64,
    /// Momentum bin width for the line-integral proxy.
    #[serde(default = "half")]
    pub p_bin: f64,
    /// Passive tracers, taken from the first loaded particles.
    #[serde(default)]
    pub tracers: usize,
    /// Store a history frame every `history_every` steps; 0 disables.
    #[serde(default)]
    pub history_every: usize,
    /// Include particles in history frames.
    #[serde(default = "yes")]
    pub history_particles: bool,
}

fn one() -> usize {
    1
}

fn half() -> f64 {
    0.5
}

fn default_moments() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            every: 1,
            moments: default_moments(),
            delta: 0.5,
            p_bin: 0.5,
            tracers: 0,
            history_every: 0,
            history_particles: true,
        }
    }
}

fn cfg(msg: impl Into<String>) -> CoreError {
    CoreError::Config(msg.into())
}

impl Scenario {
    /// Parse TOML text; the error names the failing key path.
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let de = toml::Deserializer::new(text);
        let scn: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.message().trim().to_string();
            match inner.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    cfg(format!("{path}: {msg} (line {line})"))
                }
                None => cfg(format!("{path}: {msg}")),
            }
        })?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.len)
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid().map_err(|e| cfg(format!("grid: {e}")))?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(cfg(format!("dt: must be positive, got {}", self.dt)));
        }
        let limit = DEFAULT_CFL * grid.h()[0].min(grid.h()[1]);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(CoreError::Cfl { dt: self.dt, limit });
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(cfg(format!("t_end: must be nonnegative, got {}", self.t_end)));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(cfg(format!("t_end: {} is not a whole number of steps of {}", self.t_end, self.dt)));
        }
        let d = &self.diagnostics;
        if d.every == 0 {
            return Err(cfg("diagnostics.every: must be at least 1"));
        }
        if d.moments.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
            return Err(cfg("diagnostics.moments: orders must be finite and >= 0"));
        }
        if !(d.delta > 0.0 && d.delta.is_finite()) {
            return Err(cfg("diagnostics.delta: must be positive"));
        }
        if !(d.p_bin > 0.0 && d.p_bin.is_finite()) {
            return Err(cfg("diagnostics.p_bin: must be positive"));
        }
        let planar = self.mode == Mode::TwoD;
        match &self.plasma {
            PlasmaConfig::Empty => {}
            PlasmaConfig::Sampled { count, charge, space, momentum, shear } => {
                if !(*charge > 0.0 && charge.is_finite()) {
                    return Err(cfg("plasma.charge: must be positive"));
                }
                match space {
                    SpaceProfile::Lattice { per_cell } => {
                        if per_cell.contains(&0) {
                            return Err(cfg("plasma.space.per_cell: entries must be positive"));
                        }
                        let sites = grid.size() * per_cell[0] * per_cell[1];
                        if let Some(c) = count {
                            if *c % sites != 0 || *c == 0 {
                                return Err(cfg(format!("plasma.count: {c} is not a positive multiple of the {sites} lattice sites")));
                            }
                        }
                    }
                    other => {
                        if count.unwrap_or(0) == 0 {
                            return Err(cfg("plasma.count: required and positive for random loading"));
                        }
                        match other {
                            SpaceProfile::Cosine { amplitude, .. } if !(amplitude.abs() < 1.0) => {
                                return Err(cfg("plasma.space.amplitude: |amplitude| must be below 1"));
                            }
                            SpaceProfile::Gaussian { width, floor, .. } if !(*width > 0.0 && *floor >= 0.0) => {
                                return Err(cfg("plasma.space: width must be positive and floor nonnegative"));
                            }
                            _ => {}
                        }
                    }
                }
                match momentum {
                    MomentumDist::Polynomial { epsilon, scale, drift } => {
                        if !(*epsilon > 0.0 && *scale > 0.0) {
                            return Err(cfg("plasma.momentum: epsilon and scale must be positive"));
                        }
                        if planar && drift[2] != 0.0 {
                            return Err(cfg("plasma.momentum.drift: third component must vanish in 2d"));
                        }
                    }
                    MomentumDist::Cold { p } => {
                        if planar && p[2] != 0.0 {
                            return Err(cfg("plasma.momentum.p: third component must vanish in 2d"));
                        }
                    }
                }
                if let Some(s) = shear {
                    if planar && s.amplitude[2] != 0.0 {
                        return Err(cfg("plasma.shear.amplitude: third component must vanish in 2d"));
                    }
                }
            }
            PlasmaConfig::Explicit { particles } => {
                for (i, p) in particles.iter().enumerate() {
                    if !(p.w > 0.0 && p.w.is_finite()) {
                        return Err(cfg(format!("plasma.particles[{i}].w: must be positive")));
                    }
                    if (0..2).any(|k| !(p.x[k] >= 0.0 && p.x[k] < grid.len[k])) {
                        return Err(cfg(format!("plasma.particles[{i}].x: outside the box")));
                    }
                    if planar && p.p[2] != 0.0 {
                        return Err(cfg(format!("plasma.particles[{i}].p: third component must vanish in 2d")));
                    }
                }
            }
        }
        if let FieldInit::Uniform { e, b, .. } = &self.fields {
            if planar && (e[2] != 0.0 || b[0] != 0.0 || b[1] != 0.0) {
                return Err(cfg("fields: planar mode allows only E1, E2 and B3"));
            }
        }
        Ok(())
    }
}
