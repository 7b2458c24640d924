use divergence::{kl_slices, DivergenceValue};
use heat_core::DEFAULT_ZERO_TOL;
use serde::Serialize;
use walks::ConditionedWalk;

use crate::{GadgetError, Result};

/// The per-step reversal-detectability terms
/// `E_{x ~ X_i} D(mu_i^x || lambda_i mu_i^x + (1 - lambda_i) nu_i^x)` with
/// `lambda_i = 1/(t - i + 1)`, and their average over `i ~ J`. The average
/// lower-bounds `I(J; Z)`.
#[derive(Debug, Clone, Serialize)]
pub struct DetectabilityProfile {
    pub t: usize,
    pub lambda: Vec<f64>,
    pub per_step: Vec<f64>,
    pub average: f64,
}

fn mix_rows(lambda: f64, mu_row: &[f64], nu_row: &[f64]) -> Vec<f64> {
    mu_row
        .iter()
        .zip(nu_row)
        .map(|(m, n)| lambda * m + (1.0 - lambda) * n)
        .collect()
}

/// Per-state detectability term `D(mu_i^x || lambda mu_i^x + (1-lambda) nu_i^x)`.
pub(crate) fn detect_term(x: &ConditionedWalk, i: usize, state: usize) -> Result<f64> {
    let t = x.t();
    let lambda = 1.0 / (t - i + 1) as f64;
    let mu_row = x
        .mu_row(i, state)
        .ok_or_else(|| GadgetError::Invalid(format!("mu kernel undefined at ({i}, {state})")))?;
    let nu_row = x
        .nu_row(i, state)
        .ok_or_else(|| GadgetError::Invalid(format!("nu kernel undefined at ({i}, {state})")))?;
    match kl_slices(&mu_row, &mix_rows(lambda, &mu_row, &nu_row), DEFAULT_ZERO_TOL) {
        DivergenceValue::Finite(v) => Ok(v),
        DivergenceValue::Undefined => Err(GadgetError::Invalid(format!(
            "detectability divergence undefined at ({i}, {state})"
        ))),
    }
}

/// Computes the detectability profile of a conditioned walk.
pub fn reversal_detectability(x: &ConditionedWalk) -> Result<DetectabilityProfile> {
    let t = x.t();
    let mut lambda = Vec::with_capacity(t);
    let mut per_step = Vec::with_capacity(t);
    for i in 1..=t {
        lambda.push(1.0 / (t - i + 1) as f64);
        let marginal = x.marginal(i as i64);
        let mut term = 0.0;
        for (state, &w) in marginal.iter().enumerate().take(x.base_size()) {
            if w <= DEFAULT_ZERO_TOL {
                continue;
            }
            term += w * detect_term(x, i, state)?;
        }
        per_step.push(term);
    }
    let average = per_step.iter().sum::<f64>() / t as f64;
    Ok(DetectabilityProfile {
        t,
        lambda,
        per_step,
        average,
    })
}

/// The set `T` of good time steps in the first half, with the conditioned
/// laws `X'_k` and the kept masses.
#[derive(Debug, Clone, Serialize)]
pub struct GoodSteps {
    pub epsilon: f64,
    /// `8 (1 - epsilon) log2 t`.
    pub threshold: f64,
    pub gamma: f64,
    /// Good steps `k` in `1..=ceil(t/2)`, increasing.
    pub set: Vec<usize>,
    /// Per `k` in `set`: the law `X'_k` over the augmented space.
    pub conditioned: Vec<Vec<f64>>,
    /// Per `k`: the kept mass `Pr_{x ~ X_k}[term < threshold]` (> 1/2).
    pub kept_mass: Vec<f64>,
}

impl GoodSteps {
    pub fn size(&self) -> usize {
        self.set.len()
    }

    /// Position of `k` among `set` sorted decreasing (largest -> 1).
    pub fn rank(&self, k: usize) -> usize {
        self.set.iter().filter(|&&j| j >= k).count()
    }

    /// `eta_k = 1 / rank(k)`.
    pub fn eta(&self, k: usize) -> f64 {
        1.0 / self.rank(k) as f64
    }

    /// `lambda_k = 1/(t - k + 1)`.
    pub fn lambda(&self, k: usize, t: usize) -> f64 {
        1.0 / (t - k + 1) as f64
    }

    /// `D(X'_k || X_k) = -log2 kept_mass[k]`, at most 1 bit.
    pub fn conditioning_cost(&self, idx: usize) -> f64 {
        -self.kept_mass[idx].log2()
    }
}

/// Outcome of the good-step construction: either the detectability average
/// already certifies the first branch, or the set `T` for the second.
#[derive(Debug, Clone, Serialize)]
pub enum GoodStepsOutcome {
    /// `average >= (1 - epsilon) log2 t`: the mixture's mutual information
    /// is large and the first branch applies.
    FirstBranch { average: f64, threshold: f64 },
    SecondBranch(GoodSteps),
}

/// Builds the good-step set by direct evaluation of the per-state terms
/// (not by the existence argument): `k` qualifies when
/// `Pr_{x ~ X_k}[term >= 8(1-eps) log2 t] < 1/2`.
pub fn good_steps(
    x: &ConditionedWalk,
    epsilon: f64,
    profile: &DetectabilityProfile,
) -> Result<GoodStepsOutcome> {
    if epsilon <= 7.0 / 8.0 {
        return Err(GadgetError::EpsilonOutOfRange(epsilon));
    }
    let t = x.t();
    let gate = (1.0 - epsilon) * (t as f64).log2();
    if profile.average >= gate {
        return Ok(GoodStepsOutcome::FirstBranch {
            average: profile.average,
            threshold: gate,
        });
    }
    let threshold = 8.0 * (1.0 - epsilon) * (t as f64).log2();
    let half = t.div_ceil(2);
    let mut set = Vec::new();
    let mut conditioned = Vec::new();
    let mut kept_mass = Vec::new();
    for k in 1..=half {
        let marginal = x.marginal(k as i64);
        let mut bad = 0.0;
        let mut kept = vec![0.0; x.states()];
        let mut kept_total = 0.0;
        for (state, &w) in marginal.iter().enumerate().take(x.base_size()) {
            if w <= DEFAULT_ZERO_TOL {
                continue;
            }
            if detect_term(x, k, state)? >= threshold {
                bad += w;
            } else {
                kept[state] = w;
                kept_total += w;
            }
        }
        if bad < 0.5 && kept_total > 0.0 {
            kept.iter_mut().for_each(|v| *v /= kept_total);
            set.push(k);
            conditioned.push(kept);
            kept_mass.push(kept_total);
        }
    }
    if set.is_empty() {
        return Err(GadgetError::EmptyGoodSteps);
    }
    Ok(GoodStepsOutcome::SecondBranch(GoodSteps {
        epsilon,
        threshold,
        gamma: crate::gamma(epsilon),
        set,
        conditioned,
        kept_mass,
    }))
}
