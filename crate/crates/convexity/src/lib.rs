//! Top-level inequality checkers over moment sequences: the same-parity
//! power inequality, the truncated (near) log-convexity bound, equality
//! diagnosis, the path-family tightness probe, randomized counterexample
//! search, and the continuous-time probe.

mod checks;
mod continuous;
mod equality;
mod search;
mod tightness;

pub use checks::{
    check_blakley_dixon, check_near_logconvexity, BdOutcome, CheckReport, NlcEntry, StepEntry,
};
pub use continuous::{continuous_probe, ContinuousHeatProfile};
pub use equality::{equality_conditions, EqualityDiagnosis};
pub use search::{counterexample_search, replay_slack, InstanceJson, SearchConfig, SearchSummary};
pub use tightness::{tightness_probe, TightnessReport};

/// Default pass tolerance on log-domain slack.
pub const DEFAULT_LOG_TOL: f64 = 1e-9;

/// Default epsilon for the truncated bound.
pub const DEFAULT_EPSILON: f64 = 0.95;

/// `delta(epsilon) = (4/3)(epsilon - 7/8)^2`, clamped into `(0, 1]`.
pub fn default_delta(epsilon: f64) -> f64 {
    let d = 4.0 / 3.0 * (epsilon - 0.875) * (epsilon - 0.875);
    d.clamp(f64::MIN_POSITIVE, 1.0)
}
