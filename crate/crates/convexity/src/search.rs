use heat_core::{
    moment_sequence, random_instance_stream, KernelJson, NonnegVector, SymmetricKernel,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{check_blakley_dixon, check_near_logconvexity, BdOutcome};
use crate::default_delta;

/// Randomized counterexample search over seeded instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub sizes: Vec<usize>,
    pub t_max: usize,
    pub epsilon: f64,
    /// Defaults to `(4/3)(epsilon - 7/8)^2` when absent.
    pub delta: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub density: f64,
}

/// A replayable instance: the kernel in interchange format plus the two
/// vectors as decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub kernel: KernelJson,
    pub u: Vec<String>,
    pub v: Vec<String>,
    pub seed: u64,
    pub trial: u64,
    /// "power" or "truncated".
    pub check: String,
    /// `(k, t)` for the power check, `(t+2, t)` for the truncated bound.
    pub pair: (usize, usize),
}

fn instance_json(
    s: &SymmetricKernel,
    u: &NonnegVector,
    v: &NonnegVector,
    seed: u64,
    trial: u64,
    check: &str,
    pair: (usize, usize),
) -> InstanceJson {
    let fmt = |x: &f64| serde_json::to_string(x).expect("f64");
    InstanceJson {
        kernel: KernelJson::from_kernel(s),
        u: u.values().iter().map(fmt).collect(),
        v: v.values().iter().map(fmt).collect(),
        seed,
        trial,
        check: check.into(),
        pair,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub config: SearchConfig,
    pub trials_run: u64,
    pub bd_min_slack: f64,
    pub bd_argmin: Option<InstanceJson>,
    pub bd_checks: u64,
    pub nlc_min_slack: f64,
    pub nlc_argmin: Option<InstanceJson>,
    pub nlc_checks: u64,
    /// Untruncated log-convexity does fail; a path-family witness with
    /// `m_{t-2} m_{t+2} < m_t^2`.
    pub logconvexity_witness: LogConvexityWitness,
}

#[derive(Debug, Clone, Serialize)]
pub struct LogConvexityWitness {
    pub description: String,
    pub t: usize,
    pub product: f64,
    pub square: f64,
    pub is_log_convex: bool,
}

struct TrialResult {
    trial: u64,
    bd: Option<(f64, (usize, usize))>,
    nlc: Option<(f64, (usize, usize))>,
}

/// Sweeps seeded random instances, runs both checkers over every admissible
/// index pair, and returns the minimum observed slacks with replayable
/// arg-min instances. Deterministic in the seed: trials map to ChaCha
/// streams, and the reduction is ordered by trial index.
pub fn counterexample_search(config: &SearchConfig) -> SearchSummary {
    let delta = config.delta.unwrap_or_else(|| default_delta(config.epsilon));
    let results: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let size = config.sizes[(trial % config.sizes.len() as u64) as usize];
            let (s, u, v) = random_instance_stream(size, config.density, config.seed, trial)
                .expect("valid instance");
            let m = moment_sequence(&s, &u, &v, config.t_max + 2).expect("sized");
            let mut bd: Option<(f64, (usize, usize))> = None;
            for t in 1..config.t_max {
                for k in ((t + 2)..=config.t_max).step_by(2) {
                    if let BdOutcome::Checked(entry) = check_blakley_dixon(&m, k, t, 1e-9) {
                        if entry.degenerate || !entry.slack_log.is_finite() {
                            continue;
                        }
                        if bd.is_none() || entry.slack_log < bd.unwrap().0 {
                            bd = Some((entry.slack_log, (k, t)));
                        }
                    }
                }
            }
            let mut nlc: Option<(f64, (usize, usize))> = None;
            for t in 2..=config.t_max.saturating_sub(2) {
                let entry = check_near_logconvexity(&m, t, config.epsilon, delta, 1e-9);
                if entry.vacuous || !entry.slack_log.is_finite() {
                    continue;
                }
                if nlc.is_none() || entry.slack_log < nlc.unwrap().0 {
                    nlc = Some((entry.slack_log, (t + 2, t)));
                }
            }
            TrialResult { trial, bd, nlc }
        })
        .collect();

    // ordered min-reduction: ties break toward the earliest trial
    let mut bd_best: Option<(f64, u64, (usize, usize))> = None;
    let mut nlc_best: Option<(f64, u64, (usize, usize))> = None;
    let mut bd_checks = 0u64;
    let mut nlc_checks = 0u64;
    for result in &results {
        if let Some((slack, pair)) = result.bd {
            bd_checks += 1;
            if bd_best.is_none() || slack < bd_best.unwrap().0 {
                bd_best = Some((slack, result.trial, pair));
            }
        }
        if let Some((slack, pair)) = result.nlc {
            nlc_checks += 1;
            if nlc_best.is_none() || slack < nlc_best.unwrap().0 {
                nlc_best = Some((slack, result.trial, pair));
            }
        }
    }

    let rebuild = |trial: u64, check: &str, pair: (usize, usize)| -> InstanceJson {
        let size = config.sizes[(trial % config.sizes.len() as u64) as usize];
        let (s, u, v) =
            random_instance_stream(size, config.density, config.seed, trial).expect("replay");
        instance_json(&s, &u, &v, config.seed, trial, check, pair)
    };

    // the path family witnesses that untruncated log-convexity fails
    let witness = {
        let t = 4usize;
        let s = heat_core::path_chain(t, 1.0).expect("path");
        let u = NonnegVector::point_mass(s.space().clone(), 0).expect("index");
        let v = NonnegVector::point_mass(s.space().clone(), t).expect("index");
        let m = moment_sequence(&s, &u, &v, t + 2).expect("sized");
        let product = m.value(t - 2) * m.value(t + 2);
        let square = m.value(t) * m.value(t);
        LogConvexityWitness {
            description: format!("path chain, {} states, endpoint masses", t + 1),
            t,
            product,
            square,
            is_log_convex: product >= square,
        }
    };

    SearchSummary {
        config: config.clone(),
        trials_run: config.trials,
        bd_min_slack: bd_best.map_or(f64::INFINITY, |b| b.0),
        bd_argmin: bd_best.map(|(_, trial, pair)| rebuild(trial, "power", pair)),
        bd_checks,
        nlc_min_slack: nlc_best.map_or(f64::INFINITY, |b| b.0),
        nlc_argmin: nlc_best.map(|(_, trial, pair)| rebuild(trial, "truncated", pair)),
        nlc_checks,
        logconvexity_witness: witness,
    }
}

/// Replays an embedded instance and recomputes the slack of its pair.
pub fn replay_slack(instance: &InstanceJson, epsilon: f64, delta: f64) -> f64 {
    let s = instance.kernel.to_kernel().expect("valid kernel");
    let parse = |vals: &[String]| -> NonnegVector {
        // std's parser is correctly rounded; the strings round-trip exactly
        let values: Vec<f64> = vals.iter().map(|x| x.parse::<f64>().expect("f64")).collect();
        NonnegVector::new(s.space().clone(), values).expect("nonneg")
    };
    let u = parse(&instance.u);
    let v = parse(&instance.v);
    let (k, t) = instance.pair;
    let m = moment_sequence(&s, &u, &v, k.max(t + 2)).expect("sized");
    if instance.check == "power" {
        match check_blakley_dixon(&m, k, t, 1e-9) {
            BdOutcome::Checked(entry) => entry.slack_log,
            BdOutcome::ParityRefusal { .. } => f64::NAN,
        }
    } else {
        check_near_logconvexity(&m, t, epsilon, delta, 1e-9).slack_log
    }
}
