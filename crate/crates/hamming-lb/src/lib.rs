//! Corruption-bound machinery over the Boolean cube: flip distributions,
//! separating hyperplanes, rank-one and affine-subspace vertex searches,
//! the coset-walk identity, the parity-decision-tree size bound, and the
//! padding reduction.

mod coset;
mod flip;
mod padding;
mod vertex;

pub use coset::{coset_walk_identity, pdt_size_bound, CosetReport, PdtBound};
pub use flip::{flip_distribution, FlipDistribution, FlipVariant};
pub use padding::{padding_reduction, PaddingReduction, TableRow};
pub use vertex::{
    corruption_certificate, dichotomy_audit, rank_one_value, BranchReport, CorruptionCertificate,
    CubeWalkPowers, HyperplaneKind, SearchMode,
};

#[derive(Debug, Clone, thiserror::Error)]
pub enum HammingError {
    #[error("dimension guard: {what} requires n <= {guard}, got {got}")]
    Guard {
        what: &'static str,
        guard: usize,
        got: usize,
    },
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, HammingError>;
