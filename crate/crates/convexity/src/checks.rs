use heat_core::MomentSequence;
use serde::Serialize;

/// One checked `(k, t)` pair of the power inequality
/// `m_k^t >= m_t^k` in the log domain.
#[derive(Debug, Clone, Serialize)]
pub struct StepEntry {
    pub k: usize,
    pub t: usize,
    pub lhs_log: f64,
    pub rhs_log: f64,
    pub slack_log: f64,
    pub verdict: bool,
    /// Both moments vanished: the inequality holds degenerately.
    pub degenerate: bool,
}

/// Outcome of a power-inequality check; mixed parity is refused rather
/// than evaluated, since the inequality genuinely fails across parities.
#[derive(Debug, Clone, Serialize)]
pub enum BdOutcome {
    Checked(StepEntry),
    ParityRefusal { k: usize, t: usize },
}

impl BdOutcome {
    pub fn entry(&self) -> Option<&StepEntry> {
        match self {
            BdOutcome::Checked(e) => Some(e),
            BdOutcome::ParityRefusal { .. } => None,
        }
    }
}

/// Checks `t log2 m_k >= k log2 m_t` for same-parity `k >= t >= 1`.
pub fn check_blakley_dixon(m: &MomentSequence, k: usize, t: usize, tol: f64) -> BdOutcome {
    assert!(t >= 1 && k >= t && k <= m.t_max(), "need 1 <= t <= k <= t_max");
    if (k - t) % 2 != 0 {
        return BdOutcome::ParityRefusal { k, t };
    }
    let log_mk = m.log_value(k);
    let log_mt = m.log_value(t);
    let (lhs_log, rhs_log) = (t as f64 * log_mk, k as f64 * log_mt);
    let (slack_log, verdict, degenerate) = match (log_mk.is_finite(), log_mt.is_finite()) {
        (true, true) => {
            let slack = lhs_log - rhs_log;
            // scale tolerance by k t: the comparison multiplies k*t logs
            (slack, slack >= -tol * (k * t) as f64, false)
        }
        // m_k = 0 forces m_t = 0; both zero passes degenerately
        (false, false) => (0.0, true, true),
        (false, true) => (f64::NEG_INFINITY, false, false),
        (true, false) => (f64::INFINITY, true, false),
    };
    BdOutcome::Checked(StepEntry {
        k,
        t,
        lhs_log,
        rhs_log,
        slack_log,
        verdict,
        degenerate,
    })
}

/// One checked step of the truncated log-convexity bound
/// `m_{t+2}/m_t^{1+2/t} >= min{t^{1-eps}, delta m_t^{1-2/t}/m_{t-2}}`.
#[derive(Debug, Clone, Serialize)]
pub struct NlcEntry {
    pub t: usize,
    pub lhs_log: f64,
    pub rhs_log: f64,
    pub slack_log: f64,
    pub verdict: bool,
    /// Which branch realized the min: 1 = `t^{1-eps}`, 2 = the ratio.
    pub branch: u8,
    /// The ratio branch with its alternative ceiling reading, reported but
    /// not asserted (the two displays of the bound differ on this).
    pub branch2_ceiled_log: Option<f64>,
    /// `m_t = 0`: nothing to check.
    pub vacuous: bool,
}

/// Evaluates the truncated bound at one `t >= 2`, entirely in the log
/// domain; `m_{t-2} = 0` sends the second branch to `+inf`.
pub fn check_near_logconvexity(
    m: &MomentSequence,
    t: usize,
    epsilon: f64,
    delta: f64,
    tol: f64,
) -> NlcEntry {
    assert!(t >= 2 && t + 2 <= m.t_max(), "need 2 <= t <= t_max - 2");
    let log_mt = m.log_value(t);
    if !log_mt.is_finite() {
        return NlcEntry {
            t,
            lhs_log: f64::NAN,
            rhs_log: f64::NAN,
            slack_log: f64::INFINITY,
            verdict: true,
            branch: 0,
            branch2_ceiled_log: None,
            vacuous: true,
        };
    }
    let tf = t as f64;
    let lhs_log = m.log_value(t + 2) - (1.0 + 2.0 / tf) * log_mt;
    let branch1 = (1.0 - epsilon) * tf.log2();
    let (branch2, branch2_ceiled_log) = if m.log_value(t - 2).is_finite() {
        let raw = delta.log2() + (1.0 - 2.0 / tf) * log_mt - m.log_value(t - 2);
        (raw, Some(raw.exp2().ceil().log2()))
    } else {
        (f64::INFINITY, None)
    };
    let (rhs_log, branch) = if branch1 <= branch2 {
        (branch1, 1)
    } else {
        (branch2, 2)
    };
    let slack_log = lhs_log - rhs_log;
    NlcEntry {
        t,
        lhs_log,
        rhs_log,
        slack_log,
        verdict: slack_log >= -tol,
        branch,
        branch2_ceiled_log,
        vacuous: false,
    }
}

/// A report over many per-step checks.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub theorem: String,
    pub instance: String,
    pub per_step: Vec<serde_json::Value>,
    pub worst_slack: f64,
    pub all_pass: bool,
}

impl CheckReport {
    pub fn from_bd(instance: &str, entries: &[StepEntry]) -> Self {
        let worst = entries
            .iter()
            .map(|e| e.slack_log)
            .fold(f64::INFINITY, f64::min);
        Self {
            theorem: "same-parity-power".into(),
            instance: instance.into(),
            per_step: entries
                .iter()
                .map(|e| serde_json::to_value(e).expect("serializable"))
                .collect(),
            worst_slack: worst,
            all_pass: entries.iter().all(|e| e.verdict),
        }
    }

    pub fn from_nlc(instance: &str, entries: &[NlcEntry]) -> Self {
        let worst = entries
            .iter()
            .filter(|e| !e.vacuous)
            .map(|e| e.slack_log)
            .fold(f64::INFINITY, f64::min);
        Self {
            theorem: "near-log-convexity".into(),
            instance: instance.into(),
            per_step: entries
                .iter()
                .map(|e| serde_json::to_value(e).expect("serializable"))
                .collect(),
            worst_slack: worst,
            all_pass: entries.iter().all(|e| e.verdict),
        }
    }
}
