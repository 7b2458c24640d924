use heat_core::{Distribution, SymmetricKernel};

use crate::markov::{absorbing_row, Kernel, MarkovWalk};
use crate::{Result, WalkError};

fn pad(v: &[f64], states: usize) -> Vec<f64> {
    let mut out = vec![0.0; states];
    out[..v.len()].copy_from_slice(v);
    out
}

/// Interior reference step: the substochastic row with its deficit routed to
/// the dump state; `r` and dump are absorbing.
pub(crate) fn reference_step(s: &SymmetricKernel, states: usize) -> Kernel {
    let n = s.size();
    let mut kernel = Vec::with_capacity(states);
    for x in 0..n {
        let mut row = vec![0.0; states];
        let mut row_sum = 0.0;
        for (y, w) in s.row(x) {
            row[y] = w;
            row_sum += w;
        }
        row[n + 1] = (1.0 - row_sum).max(0.0);
        kernel.push(row);
    }
    kernel.push(absorbing_row(states, n));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

pub(crate) fn entry_step(w: &[f64], states: usize) -> Kernel {
    let n = w.len();
    let mut kernel: Kernel = (0..n).map(|x| absorbing_row(states, x)).collect();
    kernel.push(pad(w, states));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

pub(crate) fn exit_step(w: &[f64], states: usize) -> Kernel {
    let n = w.len();
    let mut kernel = Vec::with_capacity(states);
    for x in 0..n {
        let mut row = vec![0.0; states];
        row[n] = w[x];
        row[n + 1] = 1.0 - w[x];
        kernel.push(row);
    }
    kernel.push(absorbing_row(states, n));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

fn check_inputs(s: &SymmetricKernel, mu: &Distribution, nu: &Distribution) -> Result<()> {
    if !s.is_substochastic(1e-9) {
        return Err(WalkError::NotSubstochastic {
            max_row_sum: s.max_row_sum(),
        });
    }
    if mu.len() != s.size() || nu.len() != s.size() {
        return Err(WalkError::Dimension(format!(
            "kernel size {} vs mu {} / nu {}",
            s.size(),
            mu.len(),
            nu.len()
        )));
    }
    Ok(())
}

/// The forward reference walk `F^t`: starts at `r`, scatters to `mu`,
/// diffuses by `S` for `t` steps, then exits to `r` with probability
/// `nu(x)`. Time steps `-1 .. t+1`.
pub fn forward_walk(
    s: &SymmetricKernel,
    mu: &Distribution,
    nu: &Distribution,
    t: usize,
) -> Result<MarkovWalk> {
    check_inputs(s, mu, nu)?;
    let n = s.size();
    let states = n + 2;
    let mut initial = vec![0.0; states];
    initial[n] = 1.0;
    let mut kernels = Vec::with_capacity(t + 2);
    kernels.push(entry_step(mu.mass(), states));
    let interior = reference_step(s, states);
    for _ in 0..t {
        kernels.push(interior.clone());
    }
    kernels.push(exit_step(nu.mass(), states));
    Ok(MarkovWalk::new(-1, true, initial, kernels))
}

/// The backward reference walk `B^t`: starts at `r` at time `t+1`, scatters
/// to `nu`, diffuses by `S` down to time 0, then exits to `r` with
/// probability `mu(x)`. Stored in its generative (reverse-time) direction.
pub fn backward_walk(
    s: &SymmetricKernel,
    mu: &Distribution,
    nu: &Distribution,
    t: usize,
) -> Result<MarkovWalk> {
    check_inputs(s, mu, nu)?;
    let n = s.size();
    let states = n + 2;
    let mut initial = vec![0.0; states];
    initial[n] = 1.0;
    let mut kernels = Vec::with_capacity(t + 2);
    kernels.push(entry_step(nu.mass(), states));
    let interior = reference_step(s, states);
    for _ in 0..t {
        kernels.push(interior.clone());
    }
    kernels.push(exit_step(mu.mass(), states));
    Ok(MarkovWalk::new(-1, false, initial, kernels))
}
