//! Periodic spectral Maxwell solver, constraints, gauge potential, energy and
//! null-cone flux diagnostics.
//!
//! Each Fourier mode is advanced exactly over a step with the current held
//! constant. Derivatives use wavenumbers with the Nyquist component set to
//! zero, so every operator maps real grids to real grids; the solver, the
//! Poisson solve and the gauge solve act on the modes off the Nyquist lines.

mod fields;
mod flux;
mod gauge;
mod grid;
mod snapshot;
mod spectral;

pub use fields::{
    constraint_residual, energy, field_energy, poisson_field, step_maxwell, FieldState, MaxwellSolver, SourceDensities, DEFAULT_CFL,
};
pub use flux::{base_disk_energy, cone_flux_density, null_cone_flux, ConeFluxQuadrature, NullConeFluxReport};
pub use gauge::{evolve_a3, gauge_a3, GaugeState};
pub use grid::Grid;
pub use snapshot::{read_fields, write_fields, FIELD_MAGIC};
pub use spectral::{Spectral, SpectralInterpolator};
