//! Exact reference walks on the augmented space `Omega + {r} + {dump}`,
//! the Doob-conditioned walk built from its closed-form kernels, exact
//! trajectory enumeration, and divergence evaluation as formal log-sums.
//!
//! State indexing: `0..n-1` are the kernel's states, `n` is the origin `r`,
//! `n+1` is the absorbing dump state that receives substochastic deficits
//! and the residual exit mass `1 - nu(x)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::linalg::RatKernel;
use crate::logsum::LogSum;
use crate::Rat;

type Kernel = Vec<Vec<Rat>>;

/// A time-inhomogeneous Markov walk stored in its generative direction.
/// `marginals` are always indexed by ascending time (`time_lo + p`),
/// regardless of orientation.
#[derive(Debug, Clone)]
pub struct RatWalk {
    pub states: usize,
    pub time_lo: i64,
    pub forward: bool,
    pub initial: Vec<Rat>,
    pub kernels: Vec<Kernel>,
    pub marginals: Vec<Vec<Rat>>,
}

fn push_through(law: &[Rat], kernel: &Kernel) -> Vec<Rat> {
    let n = law.len();
    let mut out = vec![Rat::zero(); n];
    for (x, p) in law.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (y, w) in kernel[x].iter().enumerate() {
            if !w.is_zero() {
                out[y] += p * w;
            }
        }
    }
    out
}

fn absorbing_row(states: usize, x: usize) -> Vec<Rat> {
    let mut row = vec![Rat::zero(); states];
    row[x] = Rat::one();
    row
}

impl RatWalk {
    pub fn new(time_lo: i64, forward: bool, initial: Vec<Rat>, kernels: Vec<Kernel>) -> Self {
        let states = initial.len();
        let steps = kernels.len();
        let mut generative = Vec::with_capacity(steps + 1);
        generative.push(initial.clone());
        for kernel in &kernels {
            let next = push_through(generative.last().unwrap(), kernel);
            generative.push(next);
        }
        let marginals = if forward {
            generative
        } else {
            generative.into_iter().rev().collect()
        };
        Self {
            states,
            time_lo,
            forward,
            initial,
            kernels,
            marginals,
        }
    }

    pub fn len_steps(&self) -> usize {
        self.kernels.len()
    }

    pub fn time_hi(&self) -> i64 {
        self.time_lo + self.kernels.len() as i64
    }

    /// Law at absolute time label.
    pub fn marginal_at(&self, time: i64) -> &[Rat] {
        &self.marginals[(time - self.time_lo) as usize]
    }

    /// Law at the source of generative step `s`.
    fn generative_marginal(&self, s: usize) -> &[Rat] {
        if self.forward {
            &self.marginals[s]
        } else {
            &self.marginals[self.marginals.len() - 1 - s]
        }
    }

    /// Exhaustive trajectory distribution over positive-probability paths,
    /// stored in ascending time order.
    pub fn trajectories(&self) -> TrajectoryDist {
        let mut probs = BTreeMap::new();
        let mut path = Vec::with_capacity(self.kernels.len() + 1);
        for (x, p) in self.initial.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            path.push(x);
            self.extend(&mut probs, &mut path, p.clone(), 0);
            path.pop();
        }
        TrajectoryDist {
            time_lo: self.time_lo,
            len: self.kernels.len() + 1,
            probs,
        }
    }

    fn extend(
        &self,
        probs: &mut BTreeMap<Vec<usize>, Rat>,
        path: &mut Vec<usize>,
        prob: Rat,
        step: usize,
    ) {
        if step == self.kernels.len() {
            let stored: Vec<usize> = if self.forward {
                path.clone()
            } else {
                path.iter().rev().copied().collect()
            };
            *probs.entry(stored).or_insert_with(Rat::zero) += prob;
            return;
        }
        let x = *path.last().unwrap();
        for (y, w) in self.kernels[step][x].iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            path.push(y);
            self.extend(probs, path, prob.clone() * w, step + 1);
            path.pop();
        }
    }
}

/// Exact distribution over full trajectories, keyed by time-ascending paths.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDist {
    pub time_lo: i64,
    pub len: usize,
    pub probs: BTreeMap<Vec<usize>, Rat>,
}

impl TrajectoryDist {
    pub fn total(&self) -> Rat {
        self.probs.values().sum()
    }

    /// Conditions on the path ending at `state`, renormalizing.
    pub fn condition_on_endpoint(&self, state: usize) -> TrajectoryDist {
        let kept: BTreeMap<Vec<usize>, Rat> = self
            .probs
            .iter()
            .filter(|(path, _)| *path.last().unwrap() == state)
            .map(|(path, p)| (path.clone(), p.clone()))
            .collect();
        let total: Rat = kept.values().sum();
        assert!(!total.is_zero(), "conditioning event has zero probability");
        let probs = kept
            .into_iter()
            .map(|(path, p)| (path, p / &total))
            .collect();
        TrajectoryDist {
            time_lo: self.time_lo,
            len: self.len,
            probs,
        }
    }

    /// Marginal law at position `pos` (0-based from `time_lo`).
    pub fn marginal(&self, pos: usize, states: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); states];
        for (path, p) in &self.probs {
            out[path[pos]] += p;
        }
        out
    }

    /// Weighted mixture of trajectory distributions over a shared time range.
    pub fn mixture(components: &[(Rat, TrajectoryDist)]) -> TrajectoryDist {
        assert!(!components.is_empty());
        let time_lo = components[0].1.time_lo;
        let len = components[0].1.len;
        let mut probs: BTreeMap<Vec<usize>, Rat> = BTreeMap::new();
        for (w, dist) in components {
            assert_eq!(dist.time_lo, time_lo);
            assert_eq!(dist.len, len);
            for (path, p) in &dist.probs {
                *probs.entry(path.clone()).or_insert_with(Rat::zero) += w.clone() * p;
            }
        }
        TrajectoryDist { time_lo, len, probs }
    }
}

/// KL divergence `D(p || q)` between trajectory distributions as a formal
/// log-sum; `None` when some `p`-path carries no `q`-mass.
pub fn trajectory_kl_logsum(p: &TrajectoryDist, q: &TrajectoryDist) -> Option<LogSum> {
    assert_eq!(p.time_lo, q.time_lo);
    assert_eq!(p.len, q.len);
    let mut out = LogSum::zero();
    for (path, pp) in &p.probs {
        if pp.is_zero() {
            continue;
        }
        let qq = q.probs.get(path)?;
        if qq.is_zero() {
            return None;
        }
        out.add_term(pp.clone(), pp / qq);
    }
    Some(out)
}

/// Chain-rule factorized divergence between two walks sharing orientation
/// and time range. Rows are visited only on the `p`-walk's support.
pub fn kl_factorized_logsum(p: &RatWalk, q: &RatWalk) -> Option<LogSum> {
    assert_eq!(p.states, q.states);
    assert_eq!(p.time_lo, q.time_lo);
    assert_eq!(p.forward, q.forward);
    assert_eq!(p.kernels.len(), q.kernels.len());
    let mut out = LogSum::zero();
    for (x, pp) in p.initial.iter().enumerate() {
        if pp.is_zero() {
            continue;
        }
        let qq = &q.initial[x];
        if qq.is_zero() {
            return None;
        }
        out.add_term(pp.clone(), pp / qq);
    }
    for s in 0..p.kernels.len() {
        let marg = p.generative_marginal(s).to_vec();
        for (x, w) in marg.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (y, pk) in p.kernels[s][x].iter().enumerate() {
                if pk.is_zero() {
                    continue;
                }
                let qk = &q.kernels[s][x][y];
                if qk.is_zero() {
                    return None;
                }
                out.add_term(w.clone() * pk, pk / qk);
            }
        }
    }
    Some(out)
}

fn pad_augmented(v: &[Rat], states: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); states];
    out[..v.len()].clone_from_slice(v);
    out
}

/// Interior step of the reference walks: the substochastic kernel row with
/// its deficit routed to the dump state; `r` and dump are absorbing.
fn reference_step(s: &RatKernel, states: usize) -> Kernel {
    let n = s.size();
    let mut kernel = Vec::with_capacity(states);
    for x in 0..n {
        let mut row = pad_augmented(s.row(x), states);
        let row_sum: Rat = row.iter().sum();
        row[n + 1] = Rat::one() - row_sum;
        kernel.push(row);
    }
    kernel.push(absorbing_row(states, n));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

/// Exit step: each `x` moves to `r` with probability `w(x)`, otherwise to
/// the dump state.
fn exit_step(w: &[Rat], states: usize) -> Kernel {
    let n = w.len();
    let mut kernel = Vec::with_capacity(states);
    for x in 0..n {
        let mut row = vec![Rat::zero(); states];
        row[n] = w[x].clone();
        row[n + 1] = Rat::one() - &w[x];
        kernel.push(row);
    }
    kernel.push(absorbing_row(states, n));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

/// Entry step: `r` scatters into the base space according to `w`.
fn entry_step(w: &[Rat], states: usize) -> Kernel {
    let n = w.len();
    let mut kernel: Kernel = (0..n).map(|x| absorbing_row(states, x)).collect();
    kernel.push(pad_augmented(w, states));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

fn exit_to_r(n: usize, states: usize) -> Kernel {
    let mut delta_r = vec![Rat::zero(); states];
    delta_r[n] = Rat::one();
    let mut kernel: Kernel = (0..n).map(|_| delta_r.clone()).collect();
    kernel.push(absorbing_row(states, n));
    kernel.push(absorbing_row(states, n + 1));
    kernel
}

/// The forward reference walk `F^t` over time steps `-1 .. t+1`.
pub fn forward_walk_exact(s: &RatKernel, mu: &[Rat], nu: &[Rat], t: usize) -> RatWalk {
    let n = s.size();
    let states = n + 2;
    let mut initial = vec![Rat::zero(); states];
    initial[n] = Rat::one();
    let mut kernels = Vec::with_capacity(t + 2);
    kernels.push(entry_step(mu, states));
    for _ in 0..t {
        kernels.push(reference_step(s, states));
    }
    kernels.push(exit_step(nu, states));
    RatWalk::new(-1, true, initial, kernels)
}

/// The backward reference walk `B^t`, generated from time `t+1` down to
/// `-1`.
pub fn backward_walk_exact(s: &RatKernel, mu: &[Rat], nu: &[Rat], t: usize) -> RatWalk {
    let n = s.size();
    let states = n + 2;
    let mut initial = vec![Rat::zero(); states];
    initial[n] = Rat::one();
    let mut kernels = Vec::with_capacity(t + 2);
    kernels.push(entry_step(nu, states));
    for _ in 0..t {
        kernels.push(reference_step(s, states));
    }
    kernels.push(exit_step(mu, states));
    RatWalk::new(-1, false, initial, kernels)
}

/// The conditioned walk `X` with both generative views and its closed-form
/// ingredients.
#[derive(Debug, Clone)]
pub struct ExactConditioned {
    pub t: usize,
    pub states: usize,
    /// `S^i mu` for `i = 0..t` over the base space.
    pub fwd_pows: Vec<Vec<Rat>>,
    /// `S^i nu` for `i = 0..t`.
    pub bwd_pows: Vec<Vec<Rat>>,
    /// `S^t(mu, nu)`.
    pub heat: Rat,
    /// Forward-generated view over times `-1..t+1`.
    pub forward: RatWalk,
    /// Backward-generated view of the same law.
    pub backward: RatWalk,
    s: RatKernel,
}

impl ExactConditioned {
    /// `dist(X_i)` over the augmented space, `0 <= i <= t`.
    pub fn marginal(&self, i: usize) -> Vec<Rat> {
        self.forward.marginal_at(i as i64).to_vec()
    }

    /// Backward kernel `mu_i^x = dist(X_{i-1} | X_i = x)` for `1 <= i <= t`,
    /// defined when `S^i(x, mu) > 0`.
    pub fn mu_row(&self, i: usize, x: usize) -> Option<Vec<Rat>> {
        assert!((1..=self.t).contains(&i));
        let denom = self.fwd_pows[i][x].clone();
        if denom.is_zero() {
            return None;
        }
        let n = self.states - 2;
        let mut row = vec![Rat::zero(); self.states];
        for y in 0..n {
            let s_xy = self.s.entry(x, y);
            if !s_xy.is_zero() && !self.fwd_pows[i - 1][y].is_zero() {
                row[y] = s_xy.clone() * &self.fwd_pows[i - 1][y] / &denom;
            }
        }
        Some(row)
    }

    /// Forward kernel `nu_i^x = dist(X_{i+1} | X_i = x)` for `1 <= i <= t`;
    /// for `i = t` this is the deterministic exit to `r`.
    pub fn nu_row(&self, i: usize, x: usize) -> Option<Vec<Rat>> {
        assert!((1..=self.t).contains(&i));
        let n = self.states - 2;
        if i == self.t {
            let mut row = vec![Rat::zero(); self.states];
            row[n] = Rat::one();
            return Some(row);
        }
        let denom = self.bwd_pows[self.t - i][x].clone();
        if denom.is_zero() {
            return None;
        }
        let mut row = vec![Rat::zero(); self.states];
        for y in 0..n {
            let s_xy = self.s.entry(x, y);
            if !s_xy.is_zero() && !self.bwd_pows[self.t - i - 1][y].is_zero() {
                row[y] = s_xy.clone() * &self.bwd_pows[self.t - i - 1][y] / &denom;
            }
        }
        Some(row)
    }
}

/// Builds the conditioned walk `X = (F^t | F^t_{t+1} = r)` directly from the
/// closed-form marginals and kernels. Panics if `S^t(mu, nu) = 0`.
pub fn conditioned_walk_exact(
    s: &RatKernel,
    mu: &[Rat],
    nu: &[Rat],
    t: usize,
) -> ExactConditioned {
    assert!(t >= 1);
    let n = s.size();
    let states = n + 2;
    let mut fwd_pows = vec![mu.to_vec()];
    let mut bwd_pows = vec![nu.to_vec()];
    for _ in 0..t {
        fwd_pows.push(s.matvec(fwd_pows.last().unwrap()));
        bwd_pows.push(s.matvec(bwd_pows.last().unwrap()));
    }
    let heat: Rat = crate::linalg::dot(&fwd_pows[t], nu);
    assert!(!heat.is_zero(), "conditioned walk requires S^t(mu, nu) > 0");

    let x_marginal = |i: usize| -> Vec<Rat> {
        let mut m = vec![Rat::zero(); states];
        for x in 0..n {
            let val = fwd_pows[i][x].clone() * &bwd_pows[t - i][x];
            if !val.is_zero() {
                m[x] = val / &heat;
            }
        }
        m
    };

    let mut delta_r = vec![Rat::zero(); states];
    delta_r[n] = Rat::one();

    // forward view: entry to dist(X_0), tilted interior steps, exit to r
    let mut fwd_kernels: Vec<Kernel> = Vec::with_capacity(t + 2);
    {
        let mut entry: Kernel = (0..n).map(|x| absorbing_row(states, x)).collect();
        entry.push(x_marginal(0));
        entry.push(absorbing_row(states, n + 1));
        fwd_kernels.push(entry);
    }
    for i in 0..t {
        // time i -> i+1: S(x, y) S^{t-i-1}(y, nu) / S^{t-i}(x, nu)
        let mut kernel = Vec::with_capacity(states);
        for x in 0..n {
            let denom = bwd_pows[t - i][x].clone();
            if denom.is_zero() {
                kernel.push(absorbing_row(states, x));
                continue;
            }
            let mut row = vec![Rat::zero(); states];
            for y in 0..n {
                let s_xy = s.entry(x, y);
                if !s_xy.is_zero() && !bwd_pows[t - i - 1][y].is_zero() {
                    row[y] = s_xy.clone() * &bwd_pows[t - i - 1][y] / &denom;
                }
            }
            kernel.push(row);
        }
        kernel.push(absorbing_row(states, n));
        kernel.push(absorbing_row(states, n + 1));
        fwd_kernels.push(kernel);
    }
    fwd_kernels.push(exit_to_r(n, states));
    let forward = RatWalk::new(-1, true, delta_r.clone(), fwd_kernels);

    // backward view: entry to dist(X_t), reversed tilted steps, exit to r
    let mut bwd_kernels: Vec<Kernel> = Vec::with_capacity(t + 2);
    {
        let mut entry: Kernel = (0..n).map(|x| absorbing_row(states, x)).collect();
        entry.push(x_marginal(t));
        entry.push(absorbing_row(states, n + 1));
        bwd_kernels.push(entry);
    }
    for step in 1..=t {
        // time i = t+1-step down to i-1: S(x, y) S^{i-1}(y, mu) / S^i(x, mu)
        let i = t + 1 - step;
        let mut kernel = Vec::with_capacity(states);
        for x in 0..n {
            let denom = fwd_pows[i][x].clone();
            if denom.is_zero() {
                kernel.push(absorbing_row(states, x));
                continue;
            }
            let mut row = vec![Rat::zero(); states];
            for y in 0..n {
                let s_xy = s.entry(x, y);
                if !s_xy.is_zero() && !fwd_pows[i - 1][y].is_zero() {
                    row[y] = s_xy.clone() * &fwd_pows[i - 1][y] / &denom;
                }
            }
            kernel.push(row);
        }
        kernel.push(absorbing_row(states, n));
        kernel.push(absorbing_row(states, n + 1));
        bwd_kernels.push(kernel);
    }
    bwd_kernels.push(exit_to_r(n, states));
    let backward = RatWalk::new(-1, false, delta_r, bwd_kernels);

    ExactConditioned {
        t,
        states,
        fwd_pows,
        bwd_pows,
        heat,
        forward,
        backward,
        s: s.clone(),
    }
}
