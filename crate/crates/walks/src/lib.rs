//! Reference random walks on the augmented space, the Doob-conditioned
//! walk, the reversal mixture, and numeric verifiers for the divergence
//! identities that drive the moment inequalities.
//!
//! State indexing convention for every walk in this crate: indices
//! `0..n-1` are the kernel's states, `n` is the origin `r`, and `n+1` is an
//! absorbing dump state. The dump state receives substochastic row deficits
//! and the residual exit mass `1 - nu(x)`; it never carries conditioned
//! mass, so divergences against the conditioned walk stay well-defined
//! while `Pr[endpoint = r]` remains exactly `S^t(mu, nu)`.

mod conditioned;
mod markov;
mod mixture;
mod reference;
mod verify;

pub use conditioned::ConditionedWalk;
pub use markov::{kl_factorized, MarkovWalk, TrajectoryDist, WalkMixture};
pub use mixture::reversal_mixture;
pub use reference::{backward_walk, forward_walk};
pub use verify::{
    bd_proof_chain, verify_lemma_3_3, verify_lemma_3_5, verify_lemma_3_6, BdChainReport,
    ChainLine, LemmaReport,
};

/// Trajectory-enumeration guard: refuse once the visited partial-path
/// count exceeds this, keeping the full lemma suite fast.
pub const TRAJECTORY_GUARD: f64 = 1e7;

#[derive(Debug, Clone, thiserror::Error)]
pub enum WalkError {
    #[error("S^t(mu, nu) = 0: the conditioned walk does not exist (vacuous instance)")]
    VanishingHeat,
    #[error("kernel must be substochastic (max row sum {max_row_sum} > 1)")]
    NotSubstochastic { max_row_sum: f64 },
    #[error("trajectory enumeration guard exceeded: {states}^{positions} > 1e7")]
    EnumerationGuard { states: usize, positions: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("divergence undefined at {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
