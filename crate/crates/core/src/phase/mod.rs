//! Phase-space types: momenta, particle ensembles, cone geometry, moments
//! and mixed Lebesgue norms.

mod cone;
mod ensemble;
mod interpolation;
mod momentum;
mod norms;
mod profile;
mod snapshot;
pub(crate) mod snapshot_cursor {
    pub(crate) use super::snapshot::Cursor;
}

pub use cone::{cone_coords, ConeGeometry};
pub use ensemble::{Particle, ParticleEnsemble};
pub use interpolation::{interpolation_check, p3_line_bound, InterpolationReport, InterpolationVariant, PhaseCell};
pub use momentum::{momentum_derived, weight_w, Momentum};
pub use norms::{mixed_norm, moment, Exponent, GridScalar, MomentSpec, NormSpec, NormValue};
pub use profile::{momentum_integral, MomentumProfile, ProfileIntegralTol};
pub use snapshot::{read_ensemble, write_ensemble, ENSEMBLE_MAGIC};

use serde::{Deserialize, Serialize};

/// Field ansatz and momentum dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// `E = (E1, E2, 0)`, `B = (0, 0, B3)`, `p` in the plane.
    #[serde(rename = "2d")]
    TwoD,
    /// All six field components, `p` in three dimensions.
    #[serde(rename = "2.5d")]
    TwoHalfD,
}

impl Mode {
    pub fn dim_p(self) -> usize {
        match self {
            Mode::TwoD => 2,
            Mode::TwoHalfD => 3,
        }
    }

    pub fn from_dim_p(d: usize) -> Option<Mode> {
        match d {
            2 => Some(Mode::TwoD),
            3 => Some(Mode::TwoHalfD),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::TwoD => "2d",
            Mode::TwoHalfD => "2.5d",
        }
    }
}
