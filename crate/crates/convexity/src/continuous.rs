use heat_core::{NonnegVector, SymmetricKernel};
use nalgebra::DMatrix;
use serde::Serialize;

/// The continuous-time heat profile `f(x) = <v, e^{x(S-I)} u>` on a grid,
/// with the near-log-convexity residual
/// `x^2 (log2 f)''(x) - 2 log2 f(x)` per grid point. Points where `f`
/// underflows are excluded and flagged. An exploration tool for the
/// conjecture, not a certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuousHeatProfile {
    pub grid: Vec<f64>,
    pub f: Vec<f64>,
    pub log2_f: Vec<f64>,
    /// `None` marks excluded points.
    pub residual: Vec<Option<f64>>,
    pub excluded: usize,
}

/// Evaluates the profile via dense symmetric eigendecomposition (guarded to
/// 2048 states): `f(x) = sum_i e^{x (lambda_i - 1)} <u, q_i><v, q_i>`.
/// The second derivative of `log2 f` uses central differences with step `h`
/// and one Richardson refinement.
pub fn continuous_probe(
    s: &SymmetricKernel,
    u: &NonnegVector,
    v: &NonnegVector,
    grid: &[f64],
    h: f64,
) -> Result<ContinuousHeatProfile, String> {
    let n = s.size();
    if n > 2048 {
        return Err(format!("continuous probe guarded to 2048 states, got {n}"));
    }
    if u.len() != n || v.len() != n {
        return Err("vector dimensions do not match the kernel".into());
    }
    if !s.is_substochastic(1e-9) {
        return Err(format!(
            "continuous probe requires substochastic S (max row sum {})",
            s.max_row_sum()
        ));
    }
    if grid.iter().any(|&x| !(x > 0.0)) {
        return Err("grid points must be positive".into());
    }
    if !(h > 0.0) {
        return Err("finite-difference step must be positive".into());
    }

    let dense = DMatrix::from_fn(n, n, |i, j| s.entry(i, j));
    let eig = dense.symmetric_eigen();
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        let q = eig.eigenvectors.column(i);
        let cu: f64 = q.iter().zip(u.values()).map(|(a, b)| a * b).sum();
        let cv: f64 = q.iter().zip(v.values()).map(|(a, b)| a * b).sum();
        // exponent rates lambda - 1 <= 0 for substochastic S
        coeffs.push((eig.eigenvalues[i] - 1.0, cu * cv));
    }
    let f_at = |x: f64| -> f64 {
        coeffs
            .iter()
            .map(|&(rate, c)| (x * rate).exp() * c)
            .sum()
    };

    const FLOOR: f64 = 1e-300;
    let mut f_vals = Vec::with_capacity(grid.len());
    let mut log_vals = Vec::with_capacity(grid.len());
    let mut residuals = Vec::with_capacity(grid.len());
    let mut excluded = 0usize;
    for &x in grid {
        let fx = f_at(x);
        f_vals.push(fx);
        log_vals.push(if fx > 0.0 { fx.log2() } else { f64::NEG_INFINITY });
        // keep the stencil inside the positive axis
        let hx = h.min(x / 4.0);
        let stencil_ok = |step: f64| -> Option<[f64; 3]> {
            let (a, b, c) = (f_at(x - step), fx, f_at(x + step));
            if a > FLOOR && b > FLOOR && c > FLOOR {
                Some([a, b, c])
            } else {
                None
            }
        };
        let second = |vals: [f64; 3], step: f64| -> f64 {
            (vals[0].log2() - 2.0 * vals[1].log2() + vals[2].log2()) / (step * step)
        };
        match (stencil_ok(hx), stencil_ok(hx / 2.0)) {
            (Some(coarse), Some(fine)) => {
                let d_coarse = second(coarse, hx);
                let d_fine = second(fine, hx / 2.0);
                let d2 = (4.0 * d_fine - d_coarse) / 3.0; // Richardson
                residuals.push(Some(x * x * d2 - 2.0 * fx.log2()));
            }
            _ => {
                residuals.push(None);
                excluded += 1;
            }
        }
    }
    Ok(ContinuousHeatProfile {
        grid: grid.to_vec(),
        f: f_vals,
        log2_f: log_vals,
        residual: residuals,
        excluded,
    })
}
