//! Core domain types for heat-moment computations: finite state spaces,
//! sparse symmetric nonnegative kernels, nonnegative vectors and
//! distributions, moment sequences `m_t = <v, S^t u>`, and canonical
//! instance generators (path chains, hypercube walks, seeded random
//! instances).
//!
//! All logarithms are base 2. Exact zeros map to negative infinity in the
//! log domain; downstream inequality checkers consume `log_values` so that
//! products of large powers never under- or overflow.

mod interchange;
mod kernel;
mod moments;
mod random;
mod space;
mod vector;

pub use interchange::{parse_kernel_json, parse_vector_json, KernelJson};
pub use kernel::{hypercube_kernel, normalize_substochastic, path_chain, walk_count_density, SymmetricKernel};
pub use moments::{moment_sequence, spectral_moments, MomentSequence};
pub use random::{random_instance, random_instance_stream, trial_rng};
pub use space::StateSpace;
pub use vector::{Distribution, NonnegVector};

/// Absolute threshold below which a mass value is treated as zero when
/// computing supports. Structured instances keep exact zeros; this only
/// guards against round-off dust.
pub const DEFAULT_ZERO_TOL: f64 = 1e-15;

/// Base-2 logarithm with the convention `log2(0) = -inf`.
pub fn log2_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.log2()
    } else {
        f64::NEG_INFINITY
    }
}

/// Errors produced by core constructions.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("size guard exceeded: {what} requires size <= {guard}, got {got}")]
    SizeGuard {
        what: &'static str,
        guard: usize,
        got: usize,
    },
    #[error("kernel has no nonzero entry")]
    AllZeroKernel,
    #[error("negative weight {weight} at entry ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: f64 },
    #[error("entry ({i}, {j}) out of bounds for space of size {size}")]
    EntryOutOfBounds { i: usize, j: usize, size: usize },
    #[error("kernel entries must be 0 or 1, found {weight} at ({i}, {j})")]
    NonBinaryEntry { i: usize, j: usize, weight: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
