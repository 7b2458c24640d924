use serde::Serialize;

use crate::{HammingError, Result};

/// Which object the mass vector describes: the law of the difference
/// vector `x - y` of a uniformly-started pair (the communication side), or
/// the law of the point reached from `0` (the parity-decision-tree side).
/// Both are the same vector over `F_2^n`; the variant records the reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlipVariant {
    Pair,
    Weight,
}

/// The law of `k` uniform-with-replacement coordinate flips applied to the
/// zero vector, dense over `2^n` points.
#[derive(Debug, Clone, Serialize)]
pub struct FlipDistribution {
    pub n: usize,
    pub k: usize,
    pub variant: FlipVariant,
    pub mass: Vec<f64>,
}

/// One application of the uniform single-flip map.
pub(crate) fn flip_step(n: usize, mass: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; mass.len()];
    let w = 1.0 / n as f64;
    for (x, &p) in mass.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for bit in 0..n {
            next[x ^ (1 << bit)] += p * w;
        }
    }
    next
}

/// Computes the exact law by `k`-fold application of the single-flip
/// stochastic map to the point mass at `0`. Guarded to `n <= 20`.
pub fn flip_distribution(n: usize, k: usize, variant: FlipVariant) -> Result<FlipDistribution> {
    if n == 0 || n > 20 {
        return Err(HammingError::Guard {
            what: "flip_distribution",
            guard: 20,
            got: n,
        });
    }
    let mut mass = vec![0.0; 1 << n];
    mass[0] = 1.0;
    for _ in 0..k {
        mass = flip_step(n, &mass);
    }
    Ok(FlipDistribution {
        n,
        k,
        variant,
        mass,
    })
}

impl FlipDistribution {
    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Probability mass on points of Hamming weight exactly `w`.
    pub fn weight_class_mass(&self, w: usize) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .filter(|(x, _)| x.count_ones() as usize == w)
            .map(|(_, &p)| p)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_flips_on_two_coordinates() {
        // {00: 1/2, 11: 1/2} exactly
        let d = flip_distribution(2, 2, FlipVariant::Weight).unwrap();
        assert_eq!(d.mass, vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn zero_flips_is_point_mass() {
        let d = flip_distribution(5, 0, FlipVariant::Pair).unwrap();
        assert_eq!(d.mass[0], 1.0);
        assert_eq!(d.total(), 1.0);
    }

    #[test]
    fn collision_bound_at_16_3() {
        // mass on weight-k points >= 1 - C(k,2)/n at (n, k) = (16, 3)
        let d = flip_distribution(16, 3, FlipVariant::Weight).unwrap();
        let bound = 1.0 - 3.0 / 16.0;
        assert!(d.weight_class_mass(3) >= bound);
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_support_is_exact() {
        // mass is exactly zero off the weight-parity class of k
        for (n, k) in [(4usize, 3usize), (5, 2), (6, 5)] {
            let d = flip_distribution(n, k, FlipVariant::Weight).unwrap();
            for (x, &p) in d.mass.iter().enumerate() {
                if (x.count_ones() as usize) % 2 != k % 2 {
                    assert_eq!(p, 0.0, "n={n} k={k} x={x:b}");
                }
            }
        }
    }

    #[test]
    fn invariant_under_coordinate_permutation() {
        let n = 5;
        let d = flip_distribution(n, 3, FlipVariant::Weight).unwrap();
        // swap coordinates 0 and 3
        let permute = |x: usize| -> usize {
            let b0 = (x >> 0) & 1;
            let b3 = (x >> 3) & 1;
            (x & !(1 | (1 << 3))) | (b3 << 0) | (b0 << 3)
        };
        for x in 0..(1usize << n) {
            assert_eq!(d.mass[x], d.mass[permute(x)]);
        }
    }

    #[test]
    fn guard() {
        assert!(flip_distribution(21, 2, FlipVariant::Weight).is_err());
        assert!(flip_distribution(0, 2, FlipVariant::Weight).is_err());
    }
}
