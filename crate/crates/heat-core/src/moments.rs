use nalgebra::DMatrix;

use crate::kernel::SymmetricKernel;
use crate::vector::NonnegVector;
use crate::{log2_or_neg_inf, CoreError, Result};

/// The sequence `m_0 .. m_tmax` with `m_t = <v, S^t u>`, kept both in the
/// linear and the base-2 log domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    t_max: usize,
    values: Vec<f64>,
    log_values: Vec<f64>,
    provenance: String,
}

impl MomentSequence {
    pub fn from_values(values: Vec<f64>, provenance: String) -> Self {
        let log_values = values.iter().map(|&m| log2_or_neg_inf(m)).collect();
        Self {
            t_max: values.len().saturating_sub(1),
            values,
            log_values,
            provenance,
        }
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn value(&self, t: usize) -> f64 {
        self.values[t]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `log2 m_t`, with exact zeros mapped to negative infinity.
    pub fn log_value(&self, t: usize) -> f64 {
        self.log_values[t]
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

fn check_triple(s: &SymmetricKernel, u: &NonnegVector, v: &NonnegVector) -> Result<()> {
    if u.len() != s.size() {
        return Err(CoreError::DimensionMismatch {
            expected: s.size(),
            got: u.len(),
        });
    }
    if v.len() != s.size() {
        return Err(CoreError::DimensionMismatch {
            expected: s.size(),
            got: v.len(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Computes `m_t = <v, S^t u>` for `t = 0 .. t_max` by iterated sparse
/// matrix-vector products.
pub fn moment_sequence(
    s: &SymmetricKernel,
    u: &NonnegVector,
    v: &NonnegVector,
    t_max: usize,
) -> Result<MomentSequence> {
    check_triple(s, u, v)?;
    let mut values = Vec::with_capacity(t_max + 1);
    let mut x = u.values().to_vec();
    values.push(dot(v.values(), &x));
    for _ in 1..=t_max {
        x = s.matvec(&x)?;
        values.push(dot(v.values(), &x));
    }
    // tiny negative round-off cannot occur: all summands are nonnegative
    Ok(MomentSequence::from_values(
        values,
        format!("power(size={}, tmax={})", s.size(), t_max),
    ))
}

/// Dense spectral cross-check: `m_t = sum_x lambda_x^t <u, q_x> <v, q_x>`.
/// Guarded to spaces of size at most 2048.
pub fn spectral_moments(
    s: &SymmetricKernel,
    u: &NonnegVector,
    v: &NonnegVector,
    t_max: usize,
) -> Result<MomentSequence> {
    check_triple(s, u, v)?;
    let n = s.size();
    if n > 2048 {
        return Err(CoreError::SizeGuard {
            what: "spectral_moments",
            guard: 2048,
            got: n,
        });
    }
    let dense = DMatrix::from_fn(n, n, |i, j| s.entry(i, j));
    let eig = dense.clone().symmetric_eigen();
    // polish the solver's output with cyclic Jacobi sweeps; the rotated
    // matrix is already near-diagonal, so a couple of passes reach machine
    // precision even where the QL iteration stopped early
    let (eigenvalues, eigenvectors) = jacobi_polish(&dense, eig.eigenvectors);
    let mut coeffs = Vec::with_capacity(n);
    for x in 0..n {
        let q = eigenvectors.column(x);
        let cu: f64 = q.iter().zip(u.values()).map(|(a, b)| a * b).sum();
        let cv: f64 = q.iter().zip(v.values()).map(|(a, b)| a * b).sum();
        coeffs.push((eigenvalues[x], cu * cv));
    }
    let mut values = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let m: f64 = coeffs
            .iter()
            .map(|&(lambda, c)| lambda.powi(t as i32) * c)
            .sum();
        // spectral sums can dip epsilon-negative where the true moment is 0
        values.push(if m < 0.0 && m > -1e-12 { 0.0 } else { m });
    }
    Ok(MomentSequence::from_values(
        values,
        format!("spectral(size={n}, tmax={t_max})"),
    ))
}

/// Diagonalizes `b = q^T a q` the rest of the way by cyclic Jacobi
/// rotations, accumulating them into `q`. Returns the refined eigenvalues
/// and eigenvectors.
fn jacobi_polish(a: &DMatrix<f64>, mut q: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut b = q.transpose() * a * &q;
    let norm = a.amax().max(f64::MIN_POSITIVE);
    let tol = f64::EPSILON * norm;
    for _sweep in 0..12 {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in p + 1..n {
                off = off.max(b[(p, r)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apq = b[(p, r)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (b[(r, r)] - b[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // B <- J^T B J on rows/columns p, r
                for k in 0..n {
                    let bkp = b[(k, p)];
                    let bkr = b[(k, r)];
                    b[(k, p)] = c * bkp - s * bkr;
                    b[(k, r)] = s * bkp + c * bkr;
                }
                for k in 0..n {
                    let bpk = b[(p, k)];
                    let brk = b[(r, k)];
                    b[(p, k)] = c * bpk - s * brk;
                    b[(r, k)] = s * bpk + c * brk;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| b[(i, i)]).collect();
    (eigenvalues, q)
}
