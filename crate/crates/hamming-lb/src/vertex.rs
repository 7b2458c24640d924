use rand::Rng;
use serde::Serialize;

use heat_core::trial_rng;

use crate::flip::flip_step;
use crate::{HammingError, Result};

/// Which separating hyperplane: `H = mu_k - mu_{k+2}/(3 delta)` for the
/// distance-threshold bound, or
/// `H = mu_k - (mu_{k-2} + mu_{k+2})/(6 delta)` for the exact-distance and
/// parity-tree bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HyperplaneKind {
    KLogDelta,
    KLogK,
    Pdt,
}

/// The three relevant cube-walk powers of a 0/1 vector `u`:
/// `W^{k-2} u`, `W^k u`, `W^{k+2} u`, where `W` is the normalized
/// adjacency of the Hamming cube. `<R, mu_j> = <v, W^j u>/2^n`, so vertex
/// values never enumerate pairs.
#[derive(Debug, Clone)]
pub struct CubeWalkPowers {
    pub n: usize,
    pub k: usize,
    pub low: Option<Vec<f64>>,
    pub mid: Vec<f64>,
    pub high: Vec<f64>,
    pub u_size: usize,
}

impl CubeWalkPowers {
    pub fn build(n: usize, k: usize, u_mask: &[u64]) -> Self {
        let points = 1usize << n;
        let mut vec = vec![0.0; points];
        let mut u_size = 0;
        for x in 0..points {
            if u_mask[x >> 6] >> (x & 63) & 1 == 1 {
                vec[x] = 1.0;
                u_size += 1;
            }
        }
        let mut low = None;
        let mut walked = vec;
        for step in 0..=k {
            if step == k.saturating_sub(2) && k >= 2 && step < k {
                low = Some(walked.clone());
            }
            if step == k {
                break;
            }
            walked = flip_step(n, &walked);
        }
        let mid = walked.clone();
        let high = flip_step(n, &flip_step(n, &walked));
        Self {
            n,
            k,
            low,
            mid,
            high,
            u_size,
        }
    }

    fn dot_subset(values: &[f64], v_mask: &[u64]) -> f64 {
        let mut total = 0.0;
        for (x, &val) in values.iter().enumerate() {
            if v_mask[x >> 6] >> (x & 63) & 1 == 1 {
                total += val;
            }
        }
        total
    }

    /// `<R, mu_j>` for `j = k - 2, k, k + 2` against a `v` subset.
    pub fn pair_values(&self, v_mask: &[u64]) -> (Option<f64>, f64, f64) {
        let scale = 1.0 / (1u64 << self.n) as f64;
        let low = self
            .low
            .as_ref()
            .map(|l| Self::dot_subset(l, v_mask) * scale);
        (
            low,
            Self::dot_subset(&self.mid, v_mask) * scale,
            Self::dot_subset(&self.high, v_mask) * scale,
        )
    }
}

/// `<R, mu_k>` for the rank-one vertex `R = u v^T`, via `k` applications
/// of the cube walk.
pub fn rank_one_value(n: usize, k: usize, u_mask: &[u64], v_mask: &[u64]) -> f64 {
    let powers = CubeWalkPowers::build(n, k, u_mask);
    powers.pair_values(v_mask).1
}

fn hyperplane_value(
    kind: HyperplaneKind,
    delta: f64,
    low: Option<f64>,
    mid: f64,
    high: f64,
) -> f64 {
    match kind {
        HyperplaneKind::KLogDelta => mid - high / (3.0 * delta),
        HyperplaneKind::KLogK | HyperplaneKind::Pdt => {
            mid - (low.unwrap_or(0.0) + high) / (6.0 * delta)
        }
    }
}

fn vertex_bound(kind: HyperplaneKind, k: usize, delta: f64, alpha1: f64) -> f64 {
    match kind {
        HyperplaneKind::KLogDelta => (3.0 * delta).powf(k as f64 / 2.0),
        HyperplaneKind::KLogK | HyperplaneKind::Pdt => {
            (6.0 * delta / (k as f64).powf(alpha1)).powf(k as f64 / 2.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum SearchMode {
    Exhaustive,
    Random { trials: u64, seed: u64 },
}

/// A corruption certificate: the extremal vertex value of `<R, H>` over
/// rank-one 0/1 vertices, the theorem bound it stays below, and the implied
/// communication lower bound in bits.
#[derive(Debug, Clone, Serialize)]
pub struct CorruptionCertificate {
    pub kind: HyperplaneKind,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub max_vertex_value: f64,
    pub argmax_u: Vec<u64>,
    pub argmax_v: Vec<u64>,
    pub bound: f64,
    /// `log2(bound^{-1} / 3)`: the bits implied by `<A, H> >= 1/3`.
    pub implied_bits_lower_bound: f64,
    /// Vertices violating the two-branch vertex argument.
    pub dichotomy_violations: u64,
    pub vertices_checked: u64,
    pub search_mode: SearchMode,
}

/// Per-vertex audit of the vertex dichotomy. For the distance-threshold
/// hyperplane: `<R, mu_k> >= (3 delta)^{k/2}` forces
/// `<R, mu_{k+2}> >= 3 delta <R, mu_k>`. For the exact-distance
/// hyperplane: at least one theorem branch must hold on the vertex's
/// moment triple -- the product branch
/// `<R, mu_{k+2}><R, mu_{k-2}> >= alpha2 <R, mu_k>^2` (whose averaged
/// negative part forces `<R, H> < 0` whenever `delta < 2 sqrt(alpha2)/6`)
/// or the growth branch `<R, mu_{k+2}> >= k^{alpha1} <R, mu_k>^{1+2/k}`
/// (norm absorption included, since `|u|_2 |v|_2 <= 2^n`).
fn vertex_dichotomy_ok(
    kind: HyperplaneKind,
    k: usize,
    delta: f64,
    alpha1: f64,
    alpha2: f64,
    low: Option<f64>,
    mid: f64,
    high: f64,
    value: f64,
) -> bool {
    let rel = 1.0 - 1e-9;
    match kind {
        HyperplaneKind::KLogDelta => {
            mid < (3.0 * delta).powf(k as f64 / 2.0) * (1.0 + 1e-9)
                || high >= 3.0 * delta * mid * rel
        }
        HyperplaneKind::KLogK | HyperplaneKind::Pdt => {
            if mid <= 0.0 {
                return value <= 1e-15;
            }
            let low = low.unwrap_or(0.0);
            let product = low * high >= alpha2 * mid * mid * rel;
            let growth =
                high >= (k as f64).powf(alpha1) * mid.powf(1.0 + 2.0 / k as f64) * rel;
            let consequence = if product && delta < 2.0 * alpha2.sqrt() / 6.0 {
                value <= 1e-12
            } else {
                true
            };
            (product || growth) && consequence
        }
    }
}

/// Maximizes `<R, H>` over rank-one vertices. Exhaustive mode iterates
/// both subset sides unconditionally and is guarded to `n <= 3`
/// (`2^8 x 2^8` pairs); random mode samples subsets from a seeded stream
/// and is guarded to `n <= 6` so masks stay in one word.
pub fn corruption_certificate(
    kind: HyperplaneKind,
    n: usize,
    k: usize,
    delta: f64,
    alpha1: f64,
    alpha2: f64,
    mode: SearchMode,
) -> Result<CorruptionCertificate> {
    if k < 1 {
        return Err(HammingError::Invalid("k must be at least 1".into()));
    }
    if matches!(kind, HyperplaneKind::KLogK | HyperplaneKind::Pdt) && k < 2 {
        return Err(HammingError::Invalid(
            "the exact-distance hyperplane needs k >= 2".into(),
        ));
    }
    let points = 1usize << n;
    let bound = vertex_bound(kind, k, delta, alpha1);
    let mut best = f64::NEG_INFINITY;
    let mut argmax = (vec![0u64], vec![0u64]);
    let mut violations = 0u64;
    let mut checked = 0u64;

    let mut consider = |u_mask: &[u64], powers: &CubeWalkPowers, v_mask: &[u64]| {
        let (low, mid, high) = powers.pair_values(v_mask);
        let value = hyperplane_value(kind, delta, low, mid, high);
        checked += 1;
        if !vertex_dichotomy_ok(kind, k, delta, alpha1, alpha2, low, mid, high, value) {
            violations += 1;
        }
        if value > best {
            best = value;
            argmax = (u_mask.to_vec(), v_mask.to_vec());
        }
    };

    match mode {
        SearchMode::Exhaustive => {
            if n > 3 {
                return Err(HammingError::Guard {
                    what: "exhaustive corruption search",
                    guard: 3,
                    got: n,
                });
            }
            for u_bits in 0u64..(1 << points) {
                let u_mask = vec![u_bits];
                let powers = CubeWalkPowers::build(n, k, &u_mask);
                for v_bits in 0u64..(1 << points) {
                    consider(&u_mask, &powers, &[v_bits]);
                }
            }
        }
        SearchMode::Random { trials, seed } => {
            if n > 6 {
                return Err(HammingError::Guard {
                    what: "random corruption search",
                    guard: 6,
                    got: n,
                });
            }
            let all = if points == 64 {
                u64::MAX
            } else {
                (1u64 << points) - 1
            };
            for trial in 0..trials {
                let mut rng = trial_rng(seed, trial);
                let u_mask = vec![rng.gen::<u64>() & all];
                let v_mask = vec![rng.gen::<u64>() & all];
                let powers = CubeWalkPowers::build(n, k, &u_mask);
                consider(&u_mask, &powers, &v_mask);
            }
        }
    }

    Ok(CorruptionCertificate {
        kind,
        n,
        k,
        delta,
        alpha1,
        alpha2,
        max_vertex_value: best,
        argmax_u: argmax.0,
        argmax_v: argmax.1,
        bound,
        implied_bits_lower_bound: (1.0 / bound / 3.0).log2(),
        dichotomy_violations: violations,
        vertices_checked: checked,
        search_mode: mode,
    })
}

/// Which branch of the moment dichotomy a rank-one vertex realizes on the
/// cube-walk triple `(W, u/|u|_2, v/|v|_2)`.
#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub norm_product: f64,
    pub norm_absorbed: bool,
    pub vacuous: bool,
    pub branch1_slack: f64,
    pub branch2_slack: f64,
    pub holds: bool,
}

/// Instantiates the dichotomy on a rank-one vertex: moments
/// `m_j = <v, W^j u> / (|u|_2 |v|_2)` for `j = k-2, k, k+2`.
pub fn dichotomy_audit(
    n: usize,
    k: usize,
    u_mask: &[u64],
    v_mask: &[u64],
    epsilon: f64,
) -> Result<BranchReport> {
    if k < 2 {
        return Err(HammingError::Invalid("audit needs k >= 2".into()));
    }
    let powers = CubeWalkPowers::build(n, k, u_mask);
    let (low, mid, high) = powers.pair_values(v_mask);
    let scale = (1u64 << n) as f64;
    let mut v_size = 0usize;
    for x in 0..(1usize << n) {
        if v_mask[x >> 6] >> (x & 63) & 1 == 1 {
            v_size += 1;
        }
    }
    let norm_product = ((powers.u_size * v_size) as f64).sqrt();
    // |u|_2 |v|_2 <= 2^n iff |u| |v| <= 4^n, exactly in integers
    let norm_absorbed = (powers.u_size as u128) * (v_size as u128) <= 1u128 << (2 * n);
    // <R, mu_j> = <v, W^j u>/2^n, so m_j = <R, mu_j> * 2^n / (|u| |v|)
    let m = |val: f64| val * scale / norm_product;
    let (m_low, m_mid, m_high) = (m(low.unwrap_or(0.0)), m(mid), m(high));
    let delta = 4.0 / 3.0 * (epsilon - 0.875) * (epsilon - 0.875);
    if m_mid <= 0.0 {
        return Ok(BranchReport {
            n,
            k,
            epsilon,
            delta,
            norm_product,
            norm_absorbed,
            vacuous: true,
            branch1_slack: f64::INFINITY,
            branch2_slack: f64::INFINITY,
            holds: true,
        });
    }
    let kf = k as f64;
    let log = |x: f64| if x > 0.0 { x.log2() } else { f64::NEG_INFINITY };
    let branch1_slack =
        log(m_high) - (1.0 - epsilon) * kf.log2() - (1.0 + 2.0 / kf) * log(m_mid);
    let branch2_slack = log(m_high) + log(m_low) - delta.log2() - 2.0 * log(m_mid);
    Ok(BranchReport {
        n,
        k,
        epsilon,
        delta,
        norm_product,
        norm_absorbed,
        vacuous: false,
        branch1_slack,
        branch2_slack,
        holds: branch1_slack >= -1e-9 || branch2_slack >= -1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_mask(n: usize) -> Vec<u64> {
        let points = 1usize << n;
        vec![if points == 64 {
            u64::MAX
        } else {
            (1u64 << points) - 1
        }]
    }

    #[test]
    fn full_cube_value_is_one() {
        // R = (full, full): <R, mu_k> = total mass = 1
        for k in [1usize, 2, 3] {
            let value = rank_one_value(3, k, &full_mask(3), &full_mask(3));
            assert!((value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_return_probability() {
        // n = 2, k = 2, R = ({00},{00}): <e0, W^2 e0>/4 = (1/2)/4 = 1/8
        let value = rank_one_value(2, 2, &[1u64], &[1u64]);
        assert!((value - 0.125).abs() < 1e-15);
    }

    #[test]
    fn cross_check_against_pair_enumeration() {
        // direct sum over pairs: sum_{x in u, y in v} mu_k(x ^ y) / 2^n
        use crate::flip::flip_distribution;
        use crate::flip::FlipVariant;
        let n = 3;
        for k in [1usize, 2, 3] {
            let mu = flip_distribution(n, k, FlipVariant::Pair).unwrap();
            for (u_bits, v_bits) in [(0b1011u64, 0b0110u64), (0b1u64, 0b10000000u64)] {
                let direct: f64 = (0..8usize)
                    .flat_map(|x| (0..8usize).map(move |y| (x, y)))
                    .filter(|&(x, y)| (u_bits >> x) & 1 == 1 && (v_bits >> y) & 1 == 1)
                    .map(|(x, y)| mu.mass[x ^ y] / 8.0)
                    .sum();
                let walk = rank_one_value(n, k, &[u_bits], &[v_bits]);
                assert!(
                    (walk - direct).abs() < 1e-14,
                    "k={k} u={u_bits:b} v={v_bits:b}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_certificate_small() {
        // n = 3, k = 2, delta = 0.05: max <R, H> <= (3 delta)^{k/2} = 0.15
        let cert = corruption_certificate(
            HyperplaneKind::KLogDelta,
            3,
            2,
            0.05,
            0.05,
            0.0075,
            SearchMode::Exhaustive,
        )
        .unwrap();
        assert_eq!(cert.vertices_checked, 65536);
        assert_eq!(cert.dichotomy_violations, 0);
        assert!((cert.bound - 0.15).abs() < 1e-12);
        assert!(cert.max_vertex_value <= cert.bound + 1e-12);
        assert!(cert.implied_bits_lower_bound > 0.0);
    }

    #[test]
    fn zero_mid_value_means_nonpositive() {
        // R with <R, mu_k> = 0 has <R, H> <= 0
        // antipodal singletons at distance 3 with k = 2 (parity mismatch)
        let value_mid = rank_one_value(3, 2, &[1u64], &[1u64 << 7]);
        assert_eq!(value_mid, 0.0);
        let powers = CubeWalkPowers::build(3, 2, &[1u64]);
        let (low, mid, high) = powers.pair_values(&[1u64 << 7]);
        let h = hyperplane_value(HyperplaneKind::KLogK, 0.05, low, mid, high);
        assert!(h <= 0.0);
    }

    #[test]
    fn dichotomy_audit_cases() {
        // full cube: the uniform vector is the top eigenvector; branch 2
        let report = dichotomy_audit(3, 2, &full_mask(3), &full_mask(3), 0.95).unwrap();
        assert!(!report.vacuous);
        assert!(report.branch2_slack >= -1e-9);
        assert!(report.norm_absorbed);

        // antipodal singletons, k < n: vacuous
        let report = dichotomy_audit(3, 2, &[1u64], &[1u64 << 7], 0.95).unwrap();
        assert!(report.vacuous);

        // random subsets at n = 4: never violated
        for trial in 0..50u64 {
            let mut rng = heat_core::trial_rng(99, trial);
            let u = rng.gen::<u64>() & 0xffff;
            let v = rng.gen::<u64>() & 0xffff;
            if u == 0 || v == 0 {
                continue;
            }
            let report = dichotomy_audit(4, 2, &[u], &[v], 0.95).unwrap();
            assert!(report.holds, "trial {trial}: {report:?}");
        }
    }
}
