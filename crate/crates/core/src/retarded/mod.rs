//! Retarded-integral representation of the fields.
//!
//! After integrating by parts along the backward light cone, each field
//! component is a data term plus cone integrals against the particle
//! density: a T-term with weight `1 / ((t-s) sqrt((t-s)^2 - |y-x|^2))` and an
//! S-term, driven by `E + phat x B`, with weight `1 / sqrt((t-s)^2 - |y-x|^2)`.
//! The S-term is split by whether the force components are good relative to
//! the cone direction. Densities on the cone are reconstructed with the
//! cloud-in-cell kernel and fields are gathered bilinearly, as in the
//! particle pusher; the time integral runs over the stored frames.

mod kernels;
mod quadrature;
mod representation;

pub use kernels::{
    kernel_bound_check, kernel_eval_25d, kernel_eval_2d, s_kernel_gradients, singularity_constant, KernelBoundReport, KernelBoundRow,
    KernelSet25D, KernelSet2D, SingularityReport,
};
pub use quadrature::{box_inverse, RetardedQuadrature};
pub use representation::{
    epsilon_split_eval, field_from_representation, Components, EpsilonSplitReport, RepresentationEvaluator, RepresentationReport,
};
