use heat_core::{
    log2_or_neg_inf, moment_sequence, normalize_substochastic, NonnegVector, SymmetricKernel,
};
use serde::Serialize;
use walks::ConditionedWalk;

use crate::bridge::bridges;
use crate::budget::{divergence_budget, BudgetReport};
use crate::build::build_gadget_walks;
use crate::detect::{good_steps, reversal_detectability, GoodStepsOutcome};
use crate::{delta_from_epsilon, GadgetError, Result, SMALL_T_CUTOFF};

/// What the gadget pipeline concluded, beyond the direct moment comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GadgetOutcome {
    /// 1 when the detectability average certifies the first branch, else 2.
    pub branch_gate: u8,
    pub detectability_average: f64,
    pub gate_threshold: f64,
    /// `|T|` when the second branch ran.
    pub good_steps: Option<usize>,
    pub budget: Option<BudgetReport>,
}

/// The two-branch verdict: `m_{t+2} >= t^{1-eps} m_t^{1+2/t}` unless
/// `m_{t+2} m_{t-2} >= delta m_t^2`, with both margins computed directly
/// from the moment sequence (log domain).
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyVerdict {
    pub t: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub vacuous: bool,
    pub branch1_slack: f64,
    pub branch2_slack: f64,
    pub holds_branch1: bool,
    pub holds_branch2: bool,
    pub holds: bool,
    pub gadget: Option<GadgetOutcome>,
}

/// Runs the full dichotomy: direct moment margins always; the gadget
/// pipeline (detectability gate, good steps, bridges, budget) when
/// `t >= 8`, where the chain's constants are meaningful.
pub fn main_dichotomy(
    s: &SymmetricKernel,
    u: &NonnegVector,
    v: &NonnegVector,
    t: usize,
    epsilon: f64,
    tol: f64,
) -> Result<DichotomyVerdict> {
    if epsilon <= 7.0 / 8.0 {
        return Err(GadgetError::EpsilonOutOfRange(epsilon));
    }
    if t < 2 {
        return Err(GadgetError::Invalid("dichotomy requires t >= 2".into()));
    }
    let delta = delta_from_epsilon(epsilon);
    let (s_norm, _) = normalize_substochastic(s)
        .map_err(|e| GadgetError::Invalid(e.to_string()))?;
    let moments = moment_sequence(&s_norm, u, v, t + 2)
        .map_err(|e| GadgetError::Invalid(e.to_string()))?;
    let log_m = |i: usize| log2_or_neg_inf(moments.value(i));
    if moments.value(t) <= 0.0 {
        return Ok(DichotomyVerdict {
            t,
            epsilon,
            delta,
            vacuous: true,
            branch1_slack: f64::INFINITY,
            branch2_slack: f64::INFINITY,
            holds_branch1: true,
            holds_branch2: true,
            holds: true,
            gadget: None,
        });
    }

    let tf = t as f64;
    let branch1_slack = log_m(t + 2) - (1.0 - epsilon) * tf.log2() - (1.0 + 2.0 / tf) * log_m(t);
    let branch2_slack = log_m(t + 2) + log_m(t - 2) - delta.log2() - 2.0 * log_m(t);
    let holds_branch1 = branch1_slack >= -tol;
    let holds_branch2 = branch2_slack >= -tol;

    let gadget = if t >= SMALL_T_CUTOFF {
        let mu = u
            .normalized_l1()
            .map_err(|e| GadgetError::Invalid(e.to_string()))?;
        let nu = v
            .normalized_l1()
            .map_err(|e| GadgetError::Invalid(e.to_string()))?;
        let x = ConditionedWalk::build(&s_norm, &mu, &nu, t)?;
        let profile = reversal_detectability(&x)?;
        match good_steps(&x, epsilon, &profile)? {
            GoodStepsOutcome::FirstBranch { average, threshold } => Some(GadgetOutcome {
                branch_gate: 1,
                detectability_average: average,
                gate_threshold: threshold,
                good_steps: None,
                budget: None,
            }),
            GoodStepsOutcome::SecondBranch(good) => {
                let family = bridges(&x, &good)?;
                let gw = build_gadget_walks(&x, &good, &family)?;
                let budget = divergence_budget(&s_norm, &mu, &nu, &x, &good, &family, &gw, tol)?;
                Some(GadgetOutcome {
                    branch_gate: 2,
                    detectability_average: profile.average,
                    gate_threshold: (1.0 - epsilon) * tf.log2(),
                    good_steps: Some(good.set.len()),
                    budget: Some(budget),
                })
            }
        }
    } else {
        None
    };

    Ok(DichotomyVerdict {
        t,
        epsilon,
        delta,
        vacuous: false,
        branch1_slack,
        branch2_slack,
        holds_branch1,
        holds_branch2,
        holds: holds_branch1 || holds_branch2,
        gadget,
    })
}
