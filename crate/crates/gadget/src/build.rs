use heat_core::DEFAULT_ZERO_TOL;
use walks::{kl_factorized, ConditionedWalk, MarkovWalk, WalkMixture};

use crate::bridge::BridgeFamily;
use crate::detect::GoodSteps;
use crate::{GadgetError, Result};

type Kernel = Vec<Vec<f64>>;

fn absorbing(states: usize, x: usize) -> Vec<f64> {
    let mut row = vec![0.0; states];
    row[x] = 1.0;
    row
}

fn exit_to_r(n: usize, states: usize) -> Kernel {
    let mut delta_r = vec![0.0; states];
    delta_r[n] = 1.0;
    let mut kernel: Kernel = (0..n).map(|_| delta_r.clone()).collect();
    kernel.push(absorbing(states, n));
    kernel.push(absorbing(states, n + 1));
    kernel
}

/// A tilted bridge: the conditioned walk run backwards from `start_law` at
/// time `end_time` down to the origin, as a backward-generated walk over
/// times `-1..=end_time`. Reversing it yields the forward kernels of the
/// first segment of the gadget walks.
fn backward_bridge(x: &ConditionedWalk, end_time: usize, start_law: Vec<f64>) -> MarkovWalk {
    let states = x.states();
    let n = x.base_size();
    let mut kernels = Vec::with_capacity(end_time + 1);
    for step in 0..end_time {
        let i = end_time - step; // source time of this generative step
        let mut kernel = Vec::with_capacity(states);
        for state in 0..n {
            match x.mu_row(i, state) {
                Some(row) => kernel.push(row),
                None => kernel.push(absorbing(states, state)),
            }
        }
        kernel.push(absorbing(states, n));
        kernel.push(absorbing(states, n + 1));
        kernels.push(kernel);
    }
    kernels.push(exit_to_r(n, states));
    MarkovWalk::new(-1, false, start_law, kernels)
}

fn forward_kernels(walk: &MarkovWalk) -> Vec<Kernel> {
    (0..walk.n_steps()).map(|s| walk.kernel(s).clone()).collect()
}

/// The walk mixtures of the second branch. `W | K=k` inserts a bridge
/// `x -> p -> x'` at time `k` into two tilted copies of the conditioned
/// walk (length `t+2` paths); `Y | K=k` splices the two halves at `p`
/// (length `t-2` paths); the check walks tilt only the time-`k` marginal.
#[derive(Debug, Clone)]
pub struct GadgetWalks {
    pub t: usize,
    pub states: usize,
    pub w: WalkMixture,
    pub y: WalkMixture,
    /// Per good step `k`: the analysis walk with `dist(X'_k)` at time `k`.
    pub check_walks: Vec<MarkovWalk>,
    /// Per good step `k`: the bridge-point law `P_k`.
    pub p_laws: Vec<Vec<f64>>,
    /// Per good step `k`: `D(check walk || X)`, equal to `D(X'_k || X_k)`.
    pub check_costs: Vec<f64>,
}

pub fn build_gadget_walks(
    x: &ConditionedWalk,
    good: &GoodSteps,
    family: &BridgeFamily,
) -> Result<GadgetWalks> {
    if good.set.is_empty() {
        return Err(GadgetError::EmptyGoodSteps);
    }
    let t = x.t();
    let states = x.states();
    let n = x.base_size();
    let weight = 1.0 / good.set.len() as f64;
    let mut delta_r = vec![0.0; states];
    delta_r[n] = 1.0;

    let mut w_components = Vec::with_capacity(good.set.len());
    let mut y_components = Vec::with_capacity(good.set.len());
    let mut check_walks = Vec::with_capacity(good.set.len());
    let mut p_laws = Vec::with_capacity(good.set.len());
    let mut check_costs = Vec::with_capacity(good.set.len());

    for (idx, &k) in good.set.iter().enumerate() {
        let x_prime = &good.conditioned[idx];

        // check walk: tilted to X'_k at time k, X's own kernels elsewhere
        let spine = backward_bridge(x, k, x_prime.clone()).reverse();
        let mut check_kernels = forward_kernels(&spine);
        for index in k + 1..=t + 1 {
            check_kernels.push(x.forward_view().kernel(index).clone());
        }
        let check = MarkovWalk::new(-1, true, delta_r.clone(), check_kernels);
        let cost = kl_factorized(&check, x.forward_view())
            .finite()
            .ok_or_else(|| GadgetError::Invalid(format!("D(check^{k} || X) undefined")))?;
        check_costs.push(cost);

        // P_k(p) = sum_x X'_k(x) pi_k^x(p)
        let mut p_law = vec![0.0; states];
        for state in 0..n {
            if x_prime[state] <= DEFAULT_ZERO_TOL {
                continue;
            }
            let entry = family.get(k, state).ok_or_else(|| {
                GadgetError::Invalid(format!("missing bridge at ({k}, {state})"))
            })?;
            if entry.mass <= 0.0 {
                return Err(GadgetError::Invalid(format!(
                    "bridge at ({k}, {state}) has empty support"
                )));
            }
            for y in 0..n {
                p_law[y] += x_prime[state] * entry.pi[y];
            }
        }
        p_laws.push(p_law.clone());

        // W | K=k
        let mut w_kernels = forward_kernels(&spine);
        // time k -> k+1: x -> p ~ pi_k^x
        let mut pi_step: Kernel = Vec::with_capacity(states);
        for state in 0..n {
            if x_prime[state] > DEFAULT_ZERO_TOL {
                pi_step.push(family.get(k, state).unwrap().pi.clone());
            } else {
                pi_step.push(absorbing(states, state));
            }
        }
        pi_step.push(absorbing(states, n));
        pi_step.push(absorbing(states, n + 1));
        w_kernels.push(pi_step);
        // time k+1 -> k+2: p -> x' ~ dist(X'_k | P_k = p)
        let mut posterior_step: Kernel = Vec::with_capacity(states);
        for p in 0..n {
            if p_law[p] > DEFAULT_ZERO_TOL {
                let mut row = vec![0.0; states];
                for state in 0..n {
                    if x_prime[state] > DEFAULT_ZERO_TOL {
                        let pi_val = family.get(k, state).unwrap().pi[p];
                        if pi_val > 0.0 {
                            row[state] = x_prime[state] * pi_val / p_law[p];
                        }
                    }
                }
                posterior_step.push(row);
            } else {
                posterior_step.push(absorbing(states, p));
            }
        }
        posterior_step.push(absorbing(states, n));
        posterior_step.push(absorbing(states, n + 1));
        w_kernels.push(posterior_step);
        // times k+2..t+3 follow X from time k
        for index in k + 1..=t + 1 {
            w_kernels.push(x.forward_view().kernel(index).clone());
        }
        w_components.push((weight, MarkovWalk::new(-1, true, delta_r.clone(), w_kernels)));

        // Y | K=k: bridge to P_k at time k-1, then X from time k+1
        let y_spine = backward_bridge(x, k - 1, p_law.clone()).reverse();
        let mut y_kernels = forward_kernels(&y_spine);
        for index in k + 2..=t + 1 {
            y_kernels.push(x.forward_view().kernel(index).clone());
        }
        y_components.push((weight, MarkovWalk::new(-1, true, delta_r.clone(), y_kernels)));

        check_walks.push(check);
    }

    Ok(GadgetWalks {
        t,
        states,
        w: WalkMixture::new("K", w_components),
        y: WalkMixture::new("K", y_components),
        check_walks,
        p_laws,
        check_costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::bridges;
    use crate::detect::{good_steps, reversal_detectability, GoodStepsOutcome};
    use heat_core::random_instance;

    fn branch2_fixture(
        seed: u64,
        size: usize,
        t: usize,
    ) -> (ConditionedWalk, GoodSteps, BridgeFamily) {
        let (s, u, v) = random_instance(size, 0.8, seed).unwrap();
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        let x = ConditionedWalk::build(&s, &mu, &nu, t).unwrap();
        let profile = reversal_detectability(&x).unwrap();
        let good = match good_steps(&x, 0.95, &profile).unwrap() {
            GoodStepsOutcome::SecondBranch(g) => g,
            GoodStepsOutcome::FirstBranch { .. } => panic!("expected branch 2"),
        };
        let family = bridges(&x, &good).unwrap();
        (x, good, family)
    }

    #[test]
    fn shapes_and_endpoints() {
        let (x, good, family) = branch2_fixture(1234, 4, 8);
        let gw = build_gadget_walks(&x, &good, &family).unwrap();
        let t = x.t() as i64;
        let r = x.base_size();
        for (_, comp) in &gw.w.components {
            assert_eq!(comp.time_lo(), -1);
            assert_eq!(comp.time_hi(), t + 3);
            comp.validate_stochastic(1e-9).unwrap();
            assert!((comp.marginal_at(t + 3)[r] - 1.0).abs() < 1e-9);
        }
        for (_, comp) in &gw.y.components {
            assert_eq!(comp.time_hi(), t - 1);
            comp.validate_stochastic(1e-9).unwrap();
            // Y component endpoint mass at r is 1
            assert!((comp.marginal_at(t - 1)[r] - 1.0).abs() < 1e-9);
        }
        for check in &gw.check_walks {
            assert_eq!(check.time_hi(), t + 1);
            check.validate_stochastic(1e-9).unwrap();
        }
    }

    #[test]
    fn check_walk_cost_is_conditioning_cost() {
        // D(check^k || X) = D(X'_k || X_k) = -log2 kept_mass, and <= 1
        let (x, good, family) = branch2_fixture(77, 4, 8);
        let gw = build_gadget_walks(&x, &good, &family).unwrap();
        for (idx, cost) in gw.check_costs.iter().enumerate() {
            let expect = good.conditioning_cost(idx);
            assert!(
                (cost - expect).abs() < 1e-9,
                "k = {}: {cost} vs {expect}",
                good.set[idx]
            );
            assert!(*cost <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn check_walk_marginal_is_tilted() {
        let (x, good, family) = branch2_fixture(31, 3, 8);
        let gw = build_gadget_walks(&x, &good, &family).unwrap();
        for (idx, &k) in good.set.iter().enumerate() {
            let got = gw.check_walks[idx].marginal_at(k as i64);
            for state in 0..x.states() {
                assert!(
                    (got[state] - good.conditioned[idx][state]).abs() < 1e-10,
                    "k={k} state={state}"
                );
            }
        }
    }
}
