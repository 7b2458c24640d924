//! The dichotomy machinery for `epsilon > 7/8`: the reversal-detectability
//! functional, good time steps, bridge distributions, the gadget walk
//! mixtures `W` and `Y`, the per-step divergence budget, and the final
//! two-branch verdict.

mod bridge;
mod budget;
mod build;
mod detect;
mod dichotomy;

pub use bridge::{bridges, BridgeEntry, BridgeFamily};
pub use budget::{divergence_budget, verify_lemma_4_1, BudgetLine, BudgetReport, Lemma41Report};
pub use build::{build_gadget_walks, GadgetWalks};
pub use detect::{good_steps, reversal_detectability, DetectabilityProfile, GoodSteps, GoodStepsOutcome};
pub use dichotomy::{main_dichotomy, DichotomyVerdict, GadgetOutcome};

/// `gamma = 1 - 8(1 - epsilon)`, positive exactly when `epsilon > 7/8`.
pub fn gamma(epsilon: f64) -> f64 {
    1.0 - 8.0 * (1.0 - epsilon)
}

/// The derived constant `delta = gamma^2 / 48 = (4/3)(epsilon - 7/8)^2`.
pub fn delta_from_epsilon(epsilon: f64) -> f64 {
    let g = gamma(epsilon);
    g * g / 48.0
}

/// Below this `t` the asymptotic budget constants are meaningless; the
/// dichotomy verdict falls back to direct moment comparison.
pub const SMALL_T_CUTOFF: usize = 8;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GadgetError {
    #[error("epsilon must exceed 7/8, got {0}")]
    EpsilonOutOfRange(f64),
    #[error(transparent)]
    Walk(#[from] walks::WalkError),
    #[error("empty good-step set")]
    EmptyGoodSteps,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GadgetError>;
