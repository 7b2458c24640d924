use heat_core::{Distribution, SymmetricKernel, DEFAULT_ZERO_TOL};

use crate::markov::{absorbing_row, Kernel, MarkovWalk};
use crate::reference::{exit_step, entry_step};
use crate::{Result, WalkError};

/// The Doob-conditioned walk `X = (F^t | F^t_{t+1} = r)`, built directly
/// from its closed-form marginals and kernels rather than by conditioning
/// trajectories. Both generative views are materialized: the forward view
/// uses `Pr[X_{i+1} = y | X_i = x] = S(x,y) S^{t-i-1}(y,nu) / S^{t-i}(x,nu)`
/// and the backward view uses
/// `Pr[X_{i-1} = y | X_i = x] = S(x,y) S^{i-1}(y,mu) / S^i(x,mu)`.
#[derive(Debug, Clone)]
pub struct ConditionedWalk {
    t: usize,
    states: usize,
    heat: f64,
    /// `S^i mu` over the base space, `i = 0..t`.
    fwd_pows: Vec<Vec<f64>>,
    /// `S^i nu` over the base space.
    bwd_pows: Vec<Vec<f64>>,
    forward: MarkovWalk,
    backward: MarkovWalk,
    s_dense: Vec<Vec<f64>>,
    mu: Vec<f64>,
    nu: Vec<f64>,
}

impl ConditionedWalk {
    pub fn build(
        s: &SymmetricKernel,
        mu: &Distribution,
        nu: &Distribution,
        t: usize,
    ) -> Result<Self> {
        if t < 1 {
            return Err(WalkError::Dimension("conditioned walk requires t >= 1".into()));
        }
        if !s.is_substochastic(1e-9) {
            return Err(WalkError::NotSubstochastic {
                max_row_sum: s.max_row_sum(),
            });
        }
        let n = s.size();
        if mu.len() != n || nu.len() != n {
            return Err(WalkError::Dimension(format!(
                "kernel size {n} vs mu {} / nu {}",
                mu.len(),
                nu.len()
            )));
        }
        let states = n + 2;
        let mut fwd_pows = vec![mu.mass().to_vec()];
        let mut bwd_pows = vec![nu.mass().to_vec()];
        for _ in 0..t {
            fwd_pows.push(s.matvec(fwd_pows.last().unwrap()).expect("sized"));
            bwd_pows.push(s.matvec(bwd_pows.last().unwrap()).expect("sized"));
        }
        let heat: f64 = fwd_pows[t]
            .iter()
            .zip(nu.mass())
            .map(|(a, b)| a * b)
            .sum();
        if heat <= 0.0 {
            return Err(WalkError::VanishingHeat);
        }

        let x_marginal = |i: usize| -> Vec<f64> {
            let mut m = vec![0.0; states];
            for x in 0..n {
                let val = fwd_pows[i][x] * bwd_pows[t - i][x];
                if val != 0.0 {
                    m[x] = val / heat;
                }
            }
            m
        };

        let mut delta_r = vec![0.0; states];
        delta_r[n] = 1.0;

        // forward view
        let mut fwd_kernels: Vec<Kernel> = Vec::with_capacity(t + 2);
        fwd_kernels.push(entry_step(&x_marginal(0)[..n], states));
        for i in 0..t {
            let mut kernel = Vec::with_capacity(states);
            for x in 0..n {
                let denom = bwd_pows[t - i][x];
                if denom <= 0.0 {
                    kernel.push(absorbing_row(states, x));
                    continue;
                }
                let mut row = vec![0.0; states];
                for (y, w) in s.row(x) {
                    let num = w * bwd_pows[t - i - 1][y];
                    if num != 0.0 {
                        row[y] = num / denom;
                    }
                }
                kernel.push(row);
            }
            kernel.push(absorbing_row(states, n));
            kernel.push(absorbing_row(states, n + 1));
            fwd_kernels.push(kernel);
        }
        fwd_kernels.push(exit_step(&vec![1.0; n], states));
        let forward = MarkovWalk::new(-1, true, delta_r.clone(), fwd_kernels);

        // backward view
        let mut bwd_kernels: Vec<Kernel> = Vec::with_capacity(t + 2);
        bwd_kernels.push(entry_step(&x_marginal(t)[..n], states));
        for step in 1..=t {
            let i = t + 1 - step; // source time of this generative step
            let mut kernel = Vec::with_capacity(states);
            for x in 0..n {
                let denom = fwd_pows[i][x];
                if denom <= 0.0 {
                    kernel.push(absorbing_row(states, x));
                    continue;
                }
                let mut row = vec![0.0; states];
                for (y, w) in s.row(x) {
                    let num = w * fwd_pows[i - 1][y];
                    if num != 0.0 {
                        row[y] = num / denom;
                    }
                }
                kernel.push(row);
            }
            kernel.push(absorbing_row(states, n));
            kernel.push(absorbing_row(states, n + 1));
            bwd_kernels.push(kernel);
        }
        bwd_kernels.push(exit_step(&vec![1.0; n], states));
        let backward = MarkovWalk::new(-1, false, delta_r, bwd_kernels);

        Ok(Self {
            t,
            states,
            heat,
            fwd_pows,
            bwd_pows,
            forward,
            backward,
            s_dense: s.to_dense(),
            mu: mu.mass().to_vec(),
            nu: nu.mass().to_vec(),
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn base_size(&self) -> usize {
        self.states - 2
    }

    pub fn r_index(&self) -> usize {
        self.states - 2
    }

    /// `S^t(mu, nu)`, the heat of the normalized triple.
    pub fn heat(&self) -> f64 {
        self.heat
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Forward-generated view over times `-1..t+1`.
    pub fn forward_view(&self) -> &MarkovWalk {
        &self.forward
    }

    /// Backward-generated view of the same law.
    pub fn backward_view(&self) -> &MarkovWalk {
        &self.backward
    }

    /// `dist(X_i)` over the augmented space.
    pub fn marginal(&self, i: i64) -> &[f64] {
        self.forward.marginal_at(i)
    }

    /// `S^i(x, mu)` table access.
    pub fn fwd_pow(&self, i: usize) -> &[f64] {
        &self.fwd_pows[i]
    }

    /// `S^i(x, nu)` table access.
    pub fn bwd_pow(&self, i: usize) -> &[f64] {
        &self.bwd_pows[i]
    }

    /// Backward kernel `mu_i^x = dist(X_{i-1} | X_i = x)`, `1 <= i <= t`.
    /// `None` when `S^i(x, mu) = 0` (x unreachable at time i).
    pub fn mu_row(&self, i: usize, x: usize) -> Option<Vec<f64>> {
        assert!((1..=self.t).contains(&i), "mu_row index {i} out of 1..={}", self.t);
        let n = self.base_size();
        let denom = self.fwd_pows[i][x];
        if denom <= 0.0 {
            return None;
        }
        let mut row = vec![0.0; self.states];
        for y in 0..n {
            let num = self.s_dense[x][y] * self.fwd_pows[i - 1][y];
            if num != 0.0 {
                row[y] = num / denom;
            }
        }
        Some(row)
    }

    /// Forward kernel `nu_i^x = dist(X_{i+1} | X_i = x)`, `1 <= i <= t`;
    /// `nu_t^x` is the deterministic exit to `r`.
    pub fn nu_row(&self, i: usize, x: usize) -> Option<Vec<f64>> {
        assert!((1..=self.t).contains(&i), "nu_row index {i} out of 1..={}", self.t);
        let n = self.base_size();
        if i == self.t {
            let mut row = vec![0.0; self.states];
            row[n] = 1.0;
            return Some(row);
        }
        let denom = self.bwd_pows[self.t - i][x];
        if denom <= 0.0 {
            return None;
        }
        let mut row = vec![0.0; self.states];
        for y in 0..n {
            let num = self.s_dense[x][y] * self.bwd_pows[self.t - i - 1][y];
            if num != 0.0 {
                row[y] = num / denom;
            }
        }
        Some(row)
    }

    /// Support of `dist(X_i)` under the default zero threshold.
    pub fn support(&self, i: i64) -> Vec<usize> {
        self.marginal(i)
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > DEFAULT_ZERO_TOL)
            .map(|(x, _)| x)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward_walk;
    use heat_core::path_chain;

    fn path2() -> (SymmetricKernel, Distribution, Distribution) {
        let s = path_chain(2, 0.5).unwrap();
        (
            s,
            Distribution::point_mass(3, 0).unwrap(),
            Distribution::point_mass(3, 2).unwrap(),
        )
    }

    #[test]
    fn marginals_sum_to_one() {
        let (s, mu, nu) = path2();
        let x = ConditionedWalk::build(&s, &mu, &nu, 2).unwrap();
        for i in -1..=3i64 {
            let total: f64 = x.marginal(i).iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "time {i}: {total}");
        }
        x.forward_view().validate_stochastic(1e-12).unwrap();
        x.backward_view().validate_stochastic(1e-12).unwrap();
    }

    #[test]
    fn x0_marginal_proportional_to_mu_times_heat_kernel() {
        // dist(X_0)(x) = mu(x) S^t(x, nu) / S^t(mu, nu)
        let s = path_chain(3, 0.5).unwrap();
        let mu = Distribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let nu = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let x = ConditionedWalk::build(&s, &mu, &nu, 3).unwrap();
        let m0 = x.marginal(0);
        for state in 0..4 {
            let expect = mu.mass()[state] * x.bwd_pow(3)[state] / x.heat();
            assert!((m0[state] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn trajectory_law_matches_brute_force_conditioning() {
        let (s, mu, nu) = path2();
        let x = ConditionedWalk::build(&s, &mu, &nu, 2).unwrap();
        let f = forward_walk(&s, &mu, &nu, 2).unwrap();
        let brute = f.trajectories().unwrap().condition_on_endpoint(3);
        let direct = x.forward_view().trajectories().unwrap();
        assert!(direct.max_abs_diff(&brute) < 1e-14);
        // exactly one positive-probability trajectory on the path geodesic
        assert_eq!(direct.probs.len(), 1);
        // backward view carries the same trajectory law
        let via_backward = x.backward_view().trajectories().unwrap();
        assert!(via_backward.max_abs_diff(&brute) < 1e-14);
    }

    #[test]
    fn vanishing_heat_is_refused() {
        let s = path_chain(3, 0.5).unwrap();
        let mu = Distribution::point_mass(4, 0).unwrap();
        let nu = Distribution::point_mass(4, 3).unwrap();
        // t = 2 < distance 3: S^2(0, 3) = 0
        assert!(matches!(
            ConditionedWalk::build(&s, &mu, &nu, 2),
            Err(WalkError::VanishingHeat)
        ));
    }
}
