use heat_core::{moment_sequence, NonnegVector, SymmetricKernel};
use serde::Serialize;

/// Diagnosis of the equality conditions of the power inequality: for odd
/// `t`, `Su = lambda v` and `Sv = lambda u`; for even `t`, `u = v` an
/// eigenvector of `S^2`; plus the degenerate `m = 0` branch. Cross-checked
/// against the observed equality `m_{t+2}^t = m_t^{t+2}`.
#[derive(Debug, Clone, Serialize)]
pub struct EqualityDiagnosis {
    pub t: usize,
    pub observed_equality: bool,
    pub degenerate_zero: bool,
    /// For odd `t`: the fitted `lambda` and the worst residual of
    /// `Su - lambda v` and `Sv - lambda u`.
    pub odd_lambda: Option<f64>,
    pub odd_residual: Option<f64>,
    /// For even `t`: whether `u = v` within tolerance, the fitted
    /// eigenvalue of `S^2`, and the eigen-residual.
    pub even_u_eq_v: Option<bool>,
    pub even_lambda_sq: Option<f64>,
    pub even_residual: Option<f64>,
    pub condition_holds: bool,
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Tests the stated equality conditions within `tol` and compares against
/// the observed equality of the moment inequality at `(t+2, t)`.
pub fn equality_conditions(
    s: &SymmetricKernel,
    u: &NonnegVector,
    v: &NonnegVector,
    t: usize,
    tol: f64,
) -> EqualityDiagnosis {
    let m = moment_sequence(s, u, v, t + 2).expect("matching spaces");
    let (log_next, log_cur) = (m.log_value(t + 2), m.log_value(t));
    let degenerate_zero = !log_next.is_finite();
    let observed_equality = if degenerate_zero {
        // m_{t+2} = 0 forces m_t = 0 and the inequality is an equality
        !log_cur.is_finite()
    } else {
        (t as f64 * log_next - (t + 2) as f64 * log_cur).abs() <= tol * ((t * t) as f64 + 1.0)
    };

    let su = s.matvec(u.values()).expect("sized");
    let sv = s.matvec(v.values()).expect("sized");
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let mut diagnosis = EqualityDiagnosis {
        t,
        observed_equality,
        degenerate_zero,
        odd_lambda: None,
        odd_residual: None,
        even_u_eq_v: None,
        even_lambda_sq: None,
        even_residual: None,
        condition_holds: false,
    };

    if t % 2 == 1 {
        // least-squares lambda for Su = lambda v and Sv = lambda u jointly
        let denom = dot(v.values(), v.values()) + dot(u.values(), u.values());
        let lambda = (dot(&su, v.values()) + dot(&sv, u.values())) / denom;
        let scaled_v: Vec<f64> = v.values().iter().map(|x| lambda * x).collect();
        let scaled_u: Vec<f64> = u.values().iter().map(|x| lambda * x).collect();
        let residual = linf(&su, &scaled_v).max(linf(&sv, &scaled_u));
        diagnosis.odd_lambda = Some(lambda);
        diagnosis.odd_residual = Some(residual);
        diagnosis.condition_holds = lambda >= -tol && residual <= tol.max(1e-9);
    } else {
        let u_eq_v = linf(u.values(), v.values()) <= tol.max(1e-9);
        let s2u = s.matvec(&su).expect("sized");
        let lambda_sq = dot(&s2u, u.values()) / dot(u.values(), u.values());
        let scaled: Vec<f64> = u.values().iter().map(|x| lambda_sq * x).collect();
        let residual = linf(&s2u, &scaled);
        diagnosis.even_u_eq_v = Some(u_eq_v);
        diagnosis.even_lambda_sq = Some(lambda_sq);
        diagnosis.even_residual = Some(residual);
        diagnosis.condition_holds = u_eq_v && residual <= tol.max(1e-9);
    }
    if degenerate_zero {
        diagnosis.condition_holds = true;
    }
    diagnosis
}
