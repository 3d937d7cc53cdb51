//! Particle and grid machinery for the planar relativistic Vlasov-Maxwell system.
//!
//! Units have `c = 1`. Charge and current are `rho = 4 pi int f dp` and
//! `j = 4 pi int phat f dp`, with `phat = p / p0` and `p0 = sqrt(1 + |p|^2)`.
//! The spatial domain is a periodic box carrying a uniform immobile
//! neutralizing background.

pub mod characteristics;
pub mod error;
pub mod history;
pub mod maxwell;
pub mod phase;
pub mod pic;
pub mod quad;
pub mod retarded;
pub mod smoothing;
pub mod vecops;

pub use error::{CoreError, Result};
pub use phase::Mode;
