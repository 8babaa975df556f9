//! Littlewood-Paley shells, `B^s` and `L~^inf_T(B^s)` norms, analytic
//! weights, the bootstrap phase and the heat-semigroup norm.

pub mod heat;
pub mod norms;
pub mod phase;
pub mod shells;
pub mod weights;

pub use heat::{hminus1_inf_norm, hminus1_inf_norm_scalar, HeatNormConfig};
pub use norms::{
    besov_from_profile, besov_norm, fl1_embedding_ratio, fl1_norm, hs_norm, shell_l2_profile,
    shell_l2_profile_weighted, vector_shell_l2_profile, NormSeries,
};
pub use phase::{
    phase_decay_slack, sample_young_bound, subadditivity_violation, young_slack, PhaseState,
};
pub use shells::{shell_index, shell_restrict, ShellMap, ShellSpec};
pub use weights::{apply_weight, SeparableWeight, MAX_WEIGHT_EXPONENT};
