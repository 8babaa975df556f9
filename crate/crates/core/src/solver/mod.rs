//! Time integration of the Friedrichs-projected rescaled system in the
//! `(w^h, w^3, vbar^h)` decomposition, with spectral pressure solve, coupled
//! analyticity-loss ODE, and run-level monitors.

pub mod checkpoint;
pub mod initial;
pub mod monitor;
pub mod pressure;
pub mod rhs;
pub mod state;
pub mod step;

pub use checkpoint::Checkpoint;
pub use initial::{
    build_profile, make_initial_data, rescale_to_physical, scale_to_eta, state_from_fields,
    InitialReport, PhysicalVelocity, ProfileKind, ProfileSpec,
};
pub use monitor::{
    proposition_monitor, vertical_transfer_residual, PropositionReport, PropositionSample,
};
pub use pressure::{
    component_split_residual, lemma_split_residual, pressure_solve, ProductSet,
};
pub use rhs::{nonlinear_tendency, rhs_eval, tendency_divergence_residual, Tendencies};
pub use state::{SolverConfig, StepDiagnostics, VelocityState, VerticalProfile};
pub use step::{energy_check, run_to_outcome, EnergyCheck, RnsSolver, RunClass, RunOutcome};
