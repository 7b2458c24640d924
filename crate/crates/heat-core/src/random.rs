use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kernel::{normalize_substochastic, SymmetricKernel};
use crate::space::StateSpace;
use crate::vector::NonnegVector;
use crate::Result;

/// Counter-based stream for trial `counter` of the run seeded by `seed`.
/// ChaCha is a counter-mode generator, so parallel partitioning over trials
/// cannot reorder the streams.
pub fn trial_rng(seed: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng
}

/// Seeded random instance: a substochastic-normalized symmetric kernel where
/// each unordered pair `{i, j}` (diagonal included) carries an independent
/// uniform(0, 1] weight with probability `density`, plus two iid uniform
/// vectors normalized to unit l2.
///
/// Deterministic in `(size, density, seed)`. A kernel that comes out all
/// zero gets the single entry `(0, 0) = 1` so normalization is always
/// possible.
pub fn random_instance(
    size: usize,
    density: f64,
    seed: u64,
) -> Result<(SymmetricKernel, NonnegVector, NonnegVector)> {
    random_instance_stream(size, density, seed, 0)
}

/// `random_instance` drawn from ChaCha stream `stream` of `seed`; sweep
/// drivers hand each trial its own stream so parallel partitioning cannot
/// reorder the randomness.
pub fn random_instance_stream(
    size: usize,
    density: f64,
    seed: u64,
    stream: u64,
) -> Result<(SymmetricKernel, NonnegVector, NonnegVector)> {
    let mut rng = trial_rng(seed, stream);
    let space = StateSpace::new(size)?;
    let mut triplets = Vec::new();
    for i in 0..size {
        for j in i..size {
            if rng.gen::<f64>() < density {
                // uniform over (0, 1]
                let w = 1.0 - rng.gen::<f64>();
                triplets.push((i, j, w));
            }
        }
    }
    if triplets.is_empty() {
        triplets.push((0, 0, 1.0));
    }
    let raw = SymmetricKernel::from_triplets(space.clone(), &triplets)?;
    let (kernel, _) = normalize_substochastic(&raw)?;

    let draw_unit = |rng: &mut ChaCha8Rng| -> Result<NonnegVector> {
        let values: Vec<f64> = (0..size).map(|_| rng.gen::<f64>()).collect();
        NonnegVector::new(space.clone(), values)?.normalized_l2()
    };
    let u = draw_unit(&mut rng)?;
    let v = draw_unit(&mut rng)?;
    Ok((kernel, u, v))
}
