use heat_core::{moment_sequence, path_chain, NonnegVector};
use serde::Serialize;

/// Non-improvability probe: evaluates the candidate strengthened bound
/// `m_{tau+2} >= m_tau^{1+2/tau} min{tau^{1-2/tau}, ((1+eta)/2) m_tau^{1-2/tau}/m_{tau-2}}`
/// on the path instance at time steps `t, t+2, t+4` (so `tau = t+2`) and
/// reports the violation margin. A positive margin means the strengthened
/// bound fails there, supporting the claim that the constant `1/2` cannot
/// be improved.
#[derive(Debug, Clone, Serialize)]
pub struct TightnessReport {
    pub t: usize,
    pub eta: f64,
    pub m_t: f64,
    pub m_t2: f64,
    pub m_t4: f64,
    pub lhs_log: f64,
    pub rhs_log: f64,
    /// `rhs_log - lhs_log`; positive means the candidate bound is violated.
    pub violation_margin: f64,
    pub violated: bool,
}

pub fn tightness_probe(t: usize, eta: f64) -> TightnessReport {
    assert!(t >= 2, "probe needs t >= 2");
    let s = path_chain(t, 1.0).expect("valid path");
    let u = NonnegVector::point_mass(s.space().clone(), 0).expect("index");
    let v = NonnegVector::point_mass(s.space().clone(), t).expect("index");
    let m = moment_sequence(&s, &u, &v, t + 4).expect("sized");
    let tau = (t + 2) as f64;
    let (m_t, m_t2, m_t4) = (m.value(t), m.value(t + 2), m.value(t + 4));
    let lhs_log = m.log_value(t + 4);
    let branch1 = (1.0 - 2.0 / tau) * tau.log2();
    let branch2 = ((1.0 + eta) / 2.0).log2() + (1.0 - 2.0 / tau) * m.log_value(t + 2)
        - m.log_value(t);
    let rhs_log = (1.0 + 2.0 / tau) * m.log_value(t + 2) + branch1.min(branch2);
    let violation_margin = rhs_log - lhs_log;
    TightnessReport {
        t,
        eta,
        m_t,
        m_t2,
        m_t4,
        lhs_log,
        rhs_log,
        violation_margin,
        violated: violation_margin > 0.0,
    }
}
