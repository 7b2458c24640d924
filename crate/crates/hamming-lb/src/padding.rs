use serde::Serialize;

/// One row of the padding decision table: for input distance `d`, the
/// error-free answers of the exact-distance protocol on the two padded
/// instances (`None` marks an unconstrained answer).
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub distance: usize,
    pub first: Option<bool>,
    pub second: Option<bool>,
}

/// The padding reduction: from `(a, b)` over `n` bits, the two padded
/// instances `(00a, 00b)` and `(00a, 11b)` over `n + 2` bits, whose
/// distances are `|a-b|` and `|a-b| + 2`. A protocol answering 1 on
/// distance in `{k-2, k}` and 0 on `k+2` reports the pattern `(1, 0)`
/// exactly when `|a-b| = k`, among error-free evaluations on the promise
/// set.
#[derive(Debug, Clone, Serialize)]
pub struct PaddingReduction {
    pub n: usize,
    pub k: usize,
    pub base_distance: usize,
    pub instance1: (Vec<u8>, Vec<u8>),
    pub instance2: (Vec<u8>, Vec<u8>),
    pub distance1: usize,
    pub distance2: usize,
    pub table: Vec<TableRow>,
    /// The table's conclusion for this input: the `(1, 0)` pattern holds
    /// iff the base distance equals `k`.
    pub pattern_matches_k: bool,
}

fn to_bits(x: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((x >> i) & 1) as u8).collect()
}

fn hamming(a: u64, b: u64) -> usize {
    (a ^ b).count_ones() as usize
}

/// Emits the two padded instances and the decision table for
/// exact-distance testing at `k`.
pub fn padding_reduction(a: u64, b: u64, n: usize, k: usize) -> PaddingReduction {
    assert!(n <= 62, "padded instances need n + 2 <= 64 bits");
    let base_distance = hamming(a & mask(n), b & mask(n));
    // instance 1: (00a, 00b); instance 2: (00a, 11b)
    let pad = |x: u64, high: bool| -> Vec<u8> {
        let mut bits = to_bits(x & mask(n), n);
        bits.push(u8::from(high));
        bits.push(u8::from(high));
        bits
    };
    let instance1 = (pad(a, false), pad(b, false));
    let instance2 = (pad(a, false), pad(b, true));
    let distance1 = base_distance;
    let distance2 = base_distance + 2;

    // the protocol promises: 1 on {k-2, k}, 0 on {k+2}, otherwise free
    let answer = |d: usize| -> Option<bool> {
        if d + 2 == k || d == k {
            Some(true)
        } else if d == k + 2 {
            Some(false)
        } else {
            None
        }
    };
    let table = [k.saturating_sub(2), k, k + 2]
        .into_iter()
        .map(|d| TableRow {
            distance: d,
            first: answer(d),
            second: answer(d + 2),
        })
        .collect();

    let first = answer(distance1);
    let second = answer(distance2);
    let pattern_matches_k = first == Some(true) && second == Some(false);
    PaddingReduction {
        n,
        k,
        base_distance,
        instance1,
        instance2,
        distance1,
        distance2,
        table,
        pattern_matches_k,
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
