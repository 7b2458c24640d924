use serde::Serialize;

use crate::flip::{flip_distribution, FlipVariant};
use crate::{HammingError, Result};

/// The coset-walk identity `<V, mu_k> = <1_c, S_B^k 1_0>`: the affine
/// indicator `V(x) = [Bx = c]` paired with the flip law equals the return
/// probability of the column-convolution walk that adds a uniformly chosen
/// column of `B` per step.
#[derive(Debug, Clone, Serialize)]
pub struct CosetReport {
    pub n: usize,
    pub k: usize,
    pub walk_value: f64,
    /// Direct enumeration `sum_{x : Bx = c} mu_k(x)` (when `n <= 12`).
    pub direct_value: Option<f64>,
    pub residual: Option<f64>,
    /// With hyperplane parameters: `<V, H>` and its theorem bound.
    pub hyperplane_value: Option<f64>,
    pub hyperplane_bound: Option<f64>,
    pub hyperplane_ok: Option<bool>,
}

fn column_walk_step(n: usize, columns: &[u32], mass: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; mass.len()];
    let w = 1.0 / n as f64;
    for (x, &p) in mass.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for &col in columns {
            next[x ^ col as usize] += p * w;
        }
    }
    next
}

/// `B x` over `F_2`: XOR of the columns selected by the bits of `x`.
fn apply_matrix(columns: &[u32], x: usize) -> u32 {
    let mut out = 0u32;
    for (i, &col) in columns.iter().enumerate() {
        if (x >> i) & 1 == 1 {
            out ^= col;
        }
    }
    out
}

/// Evaluates both sides of the identity, plus optionally the hyperplane
/// value `<V, H>` against `(6 delta / k^alpha1)^{k/2}`.
pub fn coset_walk_identity(
    columns: &[u32],
    c: u32,
    k: usize,
    hyperplane: Option<(f64, f64)>, // (delta, alpha1)
) -> Result<CosetReport> {
    let n = columns.len();
    if n == 0 || n > 20 {
        return Err(HammingError::Guard {
            what: "coset_walk_identity",
            guard: 20,
            got: n,
        });
    }
    let points = 1usize << n;
    if (c as usize) >= points {
        return Err(HammingError::Invalid(format!(
            "target {c:#b} outside F_2^{n}"
        )));
    }

    let walk_at = |steps: usize| -> f64 {
        let mut mass = vec![0.0; points];
        mass[0] = 1.0;
        for _ in 0..steps {
            mass = column_walk_step(n, columns, &mass);
        }
        mass[c as usize]
    };
    let walk_value = walk_at(k);

    let (direct_value, residual) = if n <= 12 {
        let mu = flip_distribution(n, k, FlipVariant::Weight)?;
        let direct: f64 = (0..points)
            .filter(|&x| apply_matrix(columns, x) == c)
            .map(|x| mu.mass[x])
            .sum();
        (Some(direct), Some((walk_value - direct).abs()))
    } else {
        (None, None)
    };

    let (hyperplane_value, hyperplane_bound, hyperplane_ok) = match hyperplane {
        Some((delta, alpha1)) => {
            if k < 2 {
                return Err(HammingError::Invalid(
                    "hyperplane evaluation needs k >= 2".into(),
                ));
            }
            let value = walk_value - (walk_at(k - 2) + walk_at(k + 2)) / (6.0 * delta);
            let bound = (6.0 * delta / (k as f64).powf(alpha1)).powf(k as f64 / 2.0);
            (Some(value), Some(bound), Some(value <= bound + 1e-12))
        }
        None => (None, None, None),
    };

    Ok(CosetReport {
        n,
        k,
        walk_value,
        direct_value,
        residual,
        hyperplane_value,
        hyperplane_bound,
        hyperplane_ok,
    })
}

/// The certified size bound for parity decision trees:
/// `log2 s >= log2((6 delta / k^{alpha1})^{-k/2} / 3)` given the vertex
/// certificate and the premise `<A, H> >= 1/3`. The parameter window
/// `k^2 < delta n` is reported, not enforced; out-of-window calls are
/// flagged but still evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct PdtBound {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub alpha1: f64,
    pub log2_size_bound: f64,
    pub params_in_range: bool,
}

pub fn pdt_size_bound(n: usize, k: usize, delta: f64, alpha1: f64) -> PdtBound {
    let kf = k as f64;
    let vertex_bound = (6.0 * delta / kf.powf(alpha1)).powf(kf / 2.0);
    PdtBound {
        n,
        k,
        delta,
        alpha1,
        log2_size_bound: (1.0 / vertex_bound / 3.0).log2(),
        params_in_range: kf * kf < delta * n as f64,
    }
}
