//! Particle-in-cell runs: scenario files, loading, deposition, the coupled
//! leapfrog loop and its diagnostics.

pub(crate) mod deposit;
mod diagnostics;
mod load;
pub(crate) mod run;
mod scenario;

pub use deposit::deposit;
pub use diagnostics::{
    conservation_report, moment_inequality_monitor, ConservationReport, DiagnosticRecord, DiagnosticSeries, MomentMonitorReport,
    MomentMonitorRow,
};
pub use load::{load_particles, polynomial_radius};
pub use run::{run, RunFailure, RunOutput};
pub use scenario::{DiagnosticsConfig, FieldInit, GridConfig, MomentumDist, ParticleSpec, PlasmaConfig, Scenario, Shear, SpaceProfile};
