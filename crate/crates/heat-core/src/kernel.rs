use std::collections::BTreeMap;

use crate::space::StateSpace;
use crate::{CoreError, Result};

/// A sparse symmetric matrix with nonnegative entries, stored as compressed
/// sparse rows. Symmetry is structural: both `(i, j)` and `(j, i)` are stored
/// with the same `f64` bit pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricKernel {
    space: StateSpace,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
    max_row_sum: f64,
}

impl SymmetricKernel {
    /// Builds a kernel from upper-triangular triplets `(i, j, w)` with
    /// `i <= j`. Duplicate entries accumulate. Entries with `i > j` are
    /// rejected so that every unordered pair has one canonical source.
    pub fn from_triplets(space: StateSpace, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let n = space.size();
        let mut cells: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(i, j, w) in triplets {
            if i >= n || j >= n {
                return Err(CoreError::EntryOutOfBounds { i, j, size: n });
            }
            if i > j {
                return Err(CoreError::InvalidParameter(format!(
                    "triplet ({i}, {j}) must satisfy i <= j"
                )));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(CoreError::NegativeWeight { i, j, weight: w });
            }
            if w == 0.0 {
                continue;
            }
            *cells.entry((i, j)).or_insert(0.0) += w;
            if i != j {
                *cells.entry((j, i)).or_insert(0.0) += w;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in cells.keys() {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = Vec::with_capacity(cells.len());
        let mut weights = Vec::with_capacity(cells.len());
        for (&(_, j), &w) in cells.iter() {
            col_idx.push(j);
            weights.push(w);
        }
        let mut kernel = Self {
            space,
            row_ptr,
            col_idx,
            weights,
            max_row_sum: 0.0,
        };
        kernel.max_row_sum = (0..n).map(|i| kernel.row_sum(i)).fold(0.0, f64::max);
        Ok(kernel)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    /// Number of stored (directed) entries.
    pub fn nnz(&self) -> usize {
        self.weights.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(pos) => self.weights[lo + pos],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).map(|(_, w)| w).sum()
    }

    pub fn max_row_sum(&self) -> f64 {
        self.max_row_sum
    }

    pub fn is_substochastic(&self, tol: f64) -> bool {
        self.max_row_sum <= 1.0 + tol
    }

    /// `y = S x`. Rows are accumulated in index order, so results are
    /// deterministic for a fixed input.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.size();
        if x.len() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for (j, w) in self.row(i) {
                acc += w * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// Returns the kernel scaled by `c >= 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "scale factor must be a nonnegative real, got {c}"
            )));
        }
        let mut out = self.clone();
        for w in &mut out.weights {
            *w *= c;
        }
        out.max_row_sum = self.max_row_sum * c;
        Ok(out)
    }

    /// Upper-triangular triplets `(i, j, w)` with `i <= j`, in row order.
    pub fn triplets_upper(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.size() {
            for (j, w) in self.row(i) {
                if i <= j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for (j, w) in self.row(i) {
                dense[i][j] = w;
            }
        }
        dense
    }
}

/// Scales a kernel so that its maximum row sum is exactly 1, returning the
/// scaled kernel and the scale factor (the original maximum row sum).
pub fn normalize_substochastic(s: &SymmetricKernel) -> Result<(SymmetricKernel, f64)> {
    let scale = s.max_row_sum();
    if scale == 0.0 {
        return Err(CoreError::AllZeroKernel);
    }
    let mut out = s.scale(1.0 / scale)?;
    out.max_row_sum = 1.0;
    Ok((out, scale))
}

/// The path kernel on `t + 1` states with `S(i, i+1) = S(i+1, i) = eps`.
pub fn path_chain(t: usize, eps: f64) -> Result<SymmetricKernel> {
    if t < 1 {
        return Err(CoreError::InvalidParameter("path_chain requires t >= 1".into()));
    }
    if !(eps > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "path_chain requires eps > 0, got {eps}"
        )));
    }
    let space = StateSpace::new(t + 1)?;
    let triplets: Vec<(usize, usize, f64)> = (0..t).map(|i| (i, i + 1, eps)).collect();
    SymmetricKernel::from_triplets(space, &triplets)
}

/// Normalized adjacency of the `n`-dimensional Hamming cube:
/// `W(x, y) = 1/n` iff `x` and `y` differ in exactly one coordinate.
pub fn hypercube_kernel(n: usize) -> Result<SymmetricKernel> {
    if n < 1 || n > 20 {
        return Err(CoreError::SizeGuard {
            what: "hypercube_kernel",
            guard: 20,
            got: n,
        });
    }
    let states = 1usize << n;
    let space = StateSpace::new(states)?;
    let w = 1.0 / n as f64;
    let mut triplets = Vec::with_capacity(states * n / 2);
    for x in 0..states {
        for bit in 0..n {
            let y = x ^ (1usize << bit);
            if x < y {
                triplets.push((x, y, w));
            }
        }
    }
    SymmetricKernel::from_triplets(space, &triplets)
}

/// Walk-count density `w_k(G)`: the number of length-`k` walks of a 0/1
/// graph kernel divided by the number of vertices. Equals the moment of
/// `(G, 1/sqrt(|V|), 1/sqrt(|V|))` scaled by `|V|^... ` -- concretely
/// `<1, G^k 1> / |V|`.
pub fn walk_count_density(g: &SymmetricKernel, k: usize) -> Result<f64> {
    for i in 0..g.size() {
        for (j, w) in g.row(i) {
            if w != 0.0 && w != 1.0 {
                return Err(CoreError::NonBinaryEntry { i, j, weight: w });
            }
        }
    }
    let n = g.size();
    let mut x = vec![1.0; n];
    for _ in 0..k {
        x = g.matvec(&x)?;
    }
    Ok(x.iter().sum::<f64>() / n as f64)
}
