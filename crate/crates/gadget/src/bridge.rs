use heat_core::DEFAULT_ZERO_TOL;
use serde::Serialize;
use walks::ConditionedWalk;

use crate::detect::GoodSteps;
use crate::{GadgetError, Result};

/// The bridge at one `(k, x)`: the threshold set
/// `Psi = {y : nu_k^x(y) >= lambda_k/(1-lambda_k) mu_k^x(y)}`, the
/// conditioned distribution `pi = mu_k^x | Psi`, and the retained mass.
#[derive(Debug, Clone, Serialize)]
pub struct BridgeEntry {
    pub k: usize,
    pub x: usize,
    pub psi: Vec<usize>,
    pub pi: Vec<f64>,
    pub mass: f64,
}

/// All bridges of a branch-2 instance, with the `(k, x)` pairs whose mass
/// fell below `gamma` flagged rather than assumed away.
#[derive(Debug, Clone, Serialize)]
pub struct BridgeFamily {
    pub gamma: f64,
    pub entries: Vec<BridgeEntry>,
    /// Indices into `entries` where `mass < gamma - 1e-9`.
    pub mass_flags: Vec<usize>,
}

impl BridgeFamily {
    pub fn get(&self, k: usize, x: usize) -> Option<&BridgeEntry> {
        self.entries.iter().find(|e| e.k == k && e.x == x)
    }

    pub fn min_mass(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.mass)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_mass_ok(&self) -> bool {
        self.mass_flags.is_empty()
    }
}

/// Materializes every `Psi_k^x` and `pi_k^x` over the support of `X'_k`.
pub fn bridges(x: &ConditionedWalk, good: &GoodSteps) -> Result<BridgeFamily> {
    let t = x.t();
    let mut entries = Vec::new();
    let mut mass_flags = Vec::new();
    for (idx, &k) in good.set.iter().enumerate() {
        let lambda = good.lambda(k, t);
        let ratio = lambda / (1.0 - lambda);
        let law = &good.conditioned[idx];
        for state in 0..x.base_size() {
            if law[state] <= DEFAULT_ZERO_TOL {
                continue;
            }
            let mu_row = x.mu_row(k, state).ok_or_else(|| {
                GadgetError::Invalid(format!("mu kernel undefined at ({k}, {state})"))
            })?;
            let nu_row = x.nu_row(k, state).ok_or_else(|| {
                GadgetError::Invalid(format!("nu kernel undefined at ({k}, {state})"))
            })?;
            let mut psi = Vec::new();
            let mut mass = 0.0;
            for y in 0..x.base_size() {
                if nu_row[y] >= ratio * mu_row[y] {
                    psi.push(y);
                    mass += mu_row[y];
                }
            }
            let mut pi = vec![0.0; x.states()];
            if mass > 0.0 {
                for &y in &psi {
                    pi[y] = mu_row[y] / mass;
                }
            }
            let entry_index = entries.len();
            if mass < good.gamma - 1e-9 {
                mass_flags.push(entry_index);
            }
            entries.push(BridgeEntry {
                k,
                x: state,
                psi,
                pi,
                mass,
            });
        }
    }
    Ok(BridgeFamily {
        gamma: good.gamma,
        entries,
        mass_flags,
    })
}
