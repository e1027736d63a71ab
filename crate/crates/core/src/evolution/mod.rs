//! Time integration of the linear flow, the unified nonlinear family and the
//! gauge-conjugated linear flow.

mod linear;
mod params;
mod trajectory;
mod unified;

pub use linear::{step_linear, LinearPropagator};
pub use params::{Coefficients, DgParams, Schedule, UnifiedParams};
pub use trajectory::{
    conjugated_evolve, evolve, evolve_observed, linear_energy, Diagnostics, EvolveOptions, Method,
    Trajectory,
};
pub use unified::{rhs_unified, stability_limit, step_nonlinear, Dealias, StepOptions};
