//! Characteristic ODEs `dX/ds = Vhat`, `dV/ds = E + Vhat x B`: pushes,
//! flow maps and Jacobian propagation.

mod push;
mod report;
mod sampler;

pub use push::{flow_map, kick, push, variational_push, CharState, FlowJacobian};
pub use report::{forward_backward_report, ForwardBackwardReport, ForwardBackwardRow};
pub use sampler::{EmGradient, EmSample, FieldSampler, FnField, UniformField};
