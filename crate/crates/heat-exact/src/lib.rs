//! Exact-rational oracle for tiny instances. Everything here exists to
//! remove tolerance questions from identity tests: kernels, moment
//! sequences, reference and conditioned walks, trajectory enumeration, and
//! formal base-2 log-sums whose vanishing is decided by prime factorization
//! rather than floating-point evaluation.
//!
//! Intended for state spaces of at most ~16 states and short walks; nothing
//! in this crate is performance-tuned.

mod factor;
mod linalg;
mod logsum;
mod parse;
mod walk;

pub use factor::factor_biguint;
pub use linalg::{moments_exact, path_chain_exact, RatKernel};
pub use logsum::LogSum;
pub use parse::parse_rational;
pub use walk::{
    backward_walk_exact, conditioned_walk_exact, forward_walk_exact, kl_factorized_logsum,
    trajectory_kl_logsum, ExactConditioned, RatWalk, TrajectoryDist,
};

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Lossy evaluation for reporting.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
