//! Numerical checks of the identities and inequalities behind the a priori
//! estimates: flux identities on the light cone, cone geometry bounds,
//! singular momentum integrals, moment interpolation, a Gronwall-type lemma
//! and Strichartz exponent arithmetic.
//!
//! Bounds whose constants are printed explicitly are asserted. Bounds with
//! unspecified constants report the largest observed ratio for regression
//! pinning.

pub mod cone_split;
pub mod error;
pub mod geometry;
pub mod gronwall;
pub mod identities;
pub mod interpolation;
pub mod profiles;
pub mod report;
mod sample;
pub mod singular;
pub mod strichartz;
pub mod suites;

pub use error::{LabError, Result};
pub use report::{IneqReport, SamplerConfig};
pub use suites::{hard_checks_pass, run_suite, Suite};
