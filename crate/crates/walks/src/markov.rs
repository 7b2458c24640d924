use std::collections::HashMap;

use divergence::{kl_slices, DivergenceValue};
use heat_core::DEFAULT_ZERO_TOL;

use crate::{Result, WalkError, TRAJECTORY_GUARD};

pub type Kernel = Vec<Vec<f64>>;

/// A time-inhomogeneous Markov walk stored in its generative direction.
///
/// `forward` walks generate from `time_lo` upward; backward walks generate
/// from `time_hi` downward (the reverse-time reference walk). Marginals are cached by
/// ascending time regardless of orientation, so `marginal_at(i)` always
/// means "the law of the walk's position at time step `i`".
#[derive(Debug, Clone)]
pub struct MarkovWalk {
    states: usize,
    time_lo: i64,
    forward: bool,
    initial: Vec<f64>,
    kernels: Vec<Kernel>,
    marginals: Vec<Vec<f64>>,
}

pub(crate) fn absorbing_row(states: usize, x: usize) -> Vec<f64> {
    let mut row = vec![0.0; states];
    row[x] = 1.0;
    row
}

fn push_through(law: &[f64], kernel: &Kernel) -> Vec<f64> {
    let mut out = vec![0.0; law.len()];
    for (x, &p) in law.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (y, &w) in kernel[x].iter().enumerate() {
            if w != 0.0 {
                out[y] += p * w;
            }
        }
    }
    out
}

impl MarkovWalk {
    pub fn new(time_lo: i64, forward: bool, initial: Vec<f64>, kernels: Vec<Kernel>) -> Self {
        let states = initial.len();
        let mut generative = Vec::with_capacity(kernels.len() + 1);
        generative.push(initial.clone());
        for kernel in &kernels {
            debug_assert_eq!(kernel.len(), states);
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

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn time_lo(&self) -> i64 {
        self.time_lo
    }

    pub fn time_hi(&self) -> i64 {
        self.time_lo + self.kernels.len() as i64
    }

    pub fn is_forward(&self) -> bool {
        self.forward
    }

    pub fn n_steps(&self) -> usize {
        self.kernels.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Law of the walk's position at absolute time `time`.
    pub fn marginal_at(&self, time: i64) -> &[f64] {
        &self.marginals[(time - self.time_lo) as usize]
    }

    /// Generative kernel of step `s` (0-based from the generative start).
    pub fn kernel(&self, s: usize) -> &Kernel {
        &self.kernels[s]
    }

    /// Law at the source position of generative step `s`.
    pub fn generative_marginal(&self, s: usize) -> &[f64] {
        if self.forward {
            &self.marginals[s]
        } else {
            &self.marginals[self.marginals.len() - 1 - s]
        }
    }

    /// Checks that every reachable row of every step kernel is a
    /// distribution within `tol`.
    pub fn validate_stochastic(&self, tol: f64) -> Result<()> {
        for s in 0..self.kernels.len() {
            let marg = self.generative_marginal(s);
            for (x, &w) in marg.iter().enumerate() {
                if w <= DEFAULT_ZERO_TOL {
                    continue;
                }
                let row_sum: f64 = self.kernels[s][x].iter().sum();
                if (row_sum - 1.0).abs() > tol {
                    return Err(WalkError::Dimension(format!(
                        "step {s} row {x} sums to {row_sum}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same walk generated in the opposite direction, obtained by
    /// Bayes-reversing each step kernel against the cached marginals.
    pub fn reverse(&self) -> MarkovWalk {
        let positions = self.marginals.len();
        let initial = if self.forward {
            self.marginals[positions - 1].clone()
        } else {
            self.marginals[0].clone()
        };
        let mut kernels = Vec::with_capacity(self.kernels.len());
        for s in 0..self.kernels.len() {
            // reversed step s undoes original step (last - s)
            let orig = self.kernels.len() - 1 - s;
            // src: the original step's source law (the reversed step's
            // destination); dst: the original step's destination law (the
            // reversed step's source)
            let src = self.generative_marginal(orig).to_vec();
            let dst = if self.forward {
                &self.marginals[positions - 1 - s]
            } else {
                &self.marginals[s]
            };
            let mut kernel = Vec::with_capacity(self.states);
            for y in 0..self.states {
                if dst[y] <= DEFAULT_ZERO_TOL {
                    kernel.push(absorbing_row(self.states, y));
                    continue;
                }
                let mut row = vec![0.0; self.states];
                for x in 0..self.states {
                    let w = self.kernels[orig][x][y];
                    if w != 0.0 && src[x] > 0.0 {
                        row[x] = src[x] * w / dst[y];
                    }
                }
                kernel.push(row);
            }
            kernels.push(kernel);
        }
        MarkovWalk::new(self.time_lo, !self.forward, initial, kernels)
    }

    /// Upper bound on the enumeration's node count: per-level widths from
    /// the maximum row support among reachable states.
    fn enumeration_work_bound(&self) -> f64 {
        let mut width = self.initial.iter().filter(|&&p| p > 0.0).count() as f64;
        let mut total = width;
        for s in 0..self.kernels.len() {
            let marg = self.generative_marginal(s);
            let mut max_branch = 1usize;
            for (x, &w) in marg.iter().enumerate() {
                if w > 0.0 {
                    let support = self.kernels[s][x].iter().filter(|&&v| v > 0.0).count();
                    max_branch = max_branch.max(support);
                }
            }
            width *= max_branch as f64;
            total += width;
            if total > 64.0 * TRAJECTORY_GUARD {
                break;
            }
        }
        total
    }

    /// Exhaustive distribution over positive-probability trajectories. The
    /// guard caps the actual enumeration work (visited partial paths), not
    /// the worst-case `states^positions`, so sparse walks on larger spaces
    /// still enumerate.
    pub fn trajectories(&self) -> Result<TrajectoryDist> {
        self.trajectories_capped(TRAJECTORY_GUARD)
    }

    /// `trajectories` with a caller-chosen work cap (sweeps use a small cap
    /// so optional oracle cross-checks never dominate the runtime).
    pub fn trajectories_capped(&self, cap: f64) -> Result<TrajectoryDist> {
        let positions = self.kernels.len() + 1;
        if self.enumeration_work_bound() > cap {
            return Err(WalkError::EnumerationGuard {
                states: self.states,
                positions,
            });
        }
        let mut probs = HashMap::new();
        let mut path: Vec<u16> = Vec::with_capacity(positions);
        let mut work = 0usize;
        let hard_cap = cap.min(TRAJECTORY_GUARD);
        for (x, &p) in self.initial.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            path.push(x as u16);
            self.extend(&mut probs, &mut path, p, 0, &mut work, hard_cap)?;
            path.pop();
        }
        Ok(TrajectoryDist {
            time_lo: self.time_lo,
            positions,
            probs,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        probs: &mut HashMap<Vec<u16>, f64>,
        path: &mut Vec<u16>,
        prob: f64,
        step: usize,
        work: &mut usize,
        cap: f64,
    ) -> Result<()> {
        *work += 1;
        if *work as f64 > cap {
            return Err(WalkError::EnumerationGuard {
                states: self.states,
                positions: self.kernels.len() + 1,
            });
        }
        if step == self.kernels.len() {
            let stored: Vec<u16> = if self.forward {
                path.clone()
            } else {
                path.iter().rev().copied().collect()
            };
            *probs.entry(stored).or_insert(0.0) += prob;
            return Ok(());
        }
        let x = *path.last().unwrap() as usize;
        for (y, &w) in self.kernels[step][x].iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            path.push(y as u16);
            self.extend(probs, path, prob * w, step + 1, work, cap)?;
            path.pop();
        }
        Ok(())
    }
}

/// Chain-rule factorized divergence between two walks of equal orientation
/// and time range. Respects the reachable-rows-only convention: only rows
/// carrying `p`-mass above the zero threshold contribute.
pub fn kl_factorized(p: &MarkovWalk, q: &MarkovWalk) -> DivergenceValue {
    assert_eq!(p.states, q.states, "state space mismatch");
    assert_eq!(p.time_lo, q.time_lo, "time range mismatch");
    assert_eq!(p.forward, q.forward, "orientation mismatch");
    assert_eq!(p.kernels.len(), q.kernels.len(), "step count mismatch");
    let mut total = match kl_slices(&p.initial, &q.initial, DEFAULT_ZERO_TOL) {
        DivergenceValue::Finite(v) => v,
        DivergenceValue::Undefined => return DivergenceValue::Undefined,
    };
    for s in 0..p.kernels.len() {
        let marg = p.generative_marginal(s);
        for (x, &w) in marg.iter().enumerate() {
            if w <= DEFAULT_ZERO_TOL {
                continue;
            }
            match kl_slices(&p.kernels[s][x], &q.kernels[s][x], DEFAULT_ZERO_TOL) {
                DivergenceValue::Finite(v) => total += w * v,
                DivergenceValue::Undefined => return DivergenceValue::Undefined,
            }
        }
    }
    DivergenceValue::Finite(total)
}

/// Exhaustive distribution over full trajectories, keyed by time-ascending
/// paths of state indices.
#[derive(Debug, Clone)]
pub struct TrajectoryDist {
    pub time_lo: i64,
    pub positions: usize,
    pub probs: HashMap<Vec<u16>, f64>,
}

impl TrajectoryDist {
    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn condition_on_endpoint(&self, state: u16) -> TrajectoryDist {
        let kept: HashMap<Vec<u16>, f64> = self
            .probs
            .iter()
            .filter(|(path, _)| *path.last().unwrap() == state)
            .map(|(path, &p)| (path.clone(), p))
            .collect();
        let total: f64 = kept.values().sum();
        let probs = kept
            .into_iter()
            .map(|(path, p)| (path, p / total))
            .collect();
        TrajectoryDist {
            time_lo: self.time_lo,
            positions: self.positions,
            probs,
        }
    }

    pub fn marginal(&self, pos: usize, states: usize) -> Vec<f64> {
        let mut out = vec![0.0; states];
        for (path, &p) in &self.probs {
            out[path[pos] as usize] += p;
        }
        out
    }

    /// `D(self || other)` over trajectories. Zero means exact zero here:
    /// legitimate trajectory probabilities are products that fall far below
    /// any fixed mass threshold.
    pub fn kl_vs(&self, other: &TrajectoryDist) -> DivergenceValue {
        assert_eq!(self.time_lo, other.time_lo);
        assert_eq!(self.positions, other.positions);
        let mut total = 0.0;
        for (path, &p) in &self.probs {
            if p == 0.0 {
                continue;
            }
            match other.probs.get(path) {
                Some(&q) if q > 0.0 => total += p * (p / q).log2(),
                _ => return DivergenceValue::Undefined,
            }
        }
        DivergenceValue::Finite(total)
    }

    /// Largest absolute difference over the union of supports.
    pub fn max_abs_diff(&self, other: &TrajectoryDist) -> f64 {
        let mut worst: f64 = 0.0;
        for (path, &p) in &self.probs {
            let q = other.probs.get(path).copied().unwrap_or(0.0);
            worst = worst.max((p - q).abs());
        }
        for (path, &q) in &other.probs {
            if !self.probs.contains_key(path) {
                worst = worst.max(q.abs());
            }
        }
        worst
    }
}

/// A finite mixture of Markov walks sharing a time range, labeled by the
/// mixing variable.
#[derive(Debug, Clone)]
pub struct WalkMixture {
    pub label: String,
    pub components: Vec<(f64, MarkovWalk)>,
}

impl WalkMixture {
    pub fn new(label: impl Into<String>, components: Vec<(f64, MarkovWalk)>) -> Self {
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        debug_assert!((total - 1.0).abs() < 1e-12, "mixture weights sum to {total}");
        Self {
            label: label.into(),
            components,
        }
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// `D(mixture | label || reference) = E_label D(component || reference)`.
    pub fn conditional_kl_vs(&self, reference: &MarkovWalk) -> DivergenceValue {
        self.components
            .iter()
            .map(|(w, comp)| match kl_factorized(comp, reference) {
                DivergenceValue::Finite(v) => DivergenceValue::Finite(w * v),
                DivergenceValue::Undefined => DivergenceValue::Undefined,
            })
            .sum()
    }

    /// Trajectory distribution of the mixture (oracle scale only).
    pub fn trajectories(&self) -> Result<TrajectoryDist> {
        self.trajectories_capped(crate::TRAJECTORY_GUARD)
    }

    pub fn trajectories_capped(&self, cap: f64) -> Result<TrajectoryDist> {
        let mut parts = Vec::with_capacity(self.components.len());
        for (w, comp) in &self.components {
            parts.push((*w, comp.trajectories_capped(cap)?));
        }
        let time_lo = parts[0].1.time_lo;
        let positions = parts[0].1.positions;
        let mut probs: HashMap<Vec<u16>, f64> = HashMap::new();
        for (w, dist) in &parts {
            assert_eq!(dist.time_lo, time_lo);
            assert_eq!(dist.positions, positions);
            for (path, &p) in &dist.probs {
                *probs.entry(path.clone()).or_insert(0.0) += w * p;
            }
        }
        Ok(TrajectoryDist {
            time_lo,
            positions,
            probs,
        })
    }

    /// Mutual information between the mixing label and the walk, by
    /// enumeration: `I(L; walk) = E_l D(traj | L=l || traj)`.
    pub fn label_mutual_information(&self) -> Result<f64> {
        self.label_mutual_information_capped(crate::TRAJECTORY_GUARD)
    }

    pub fn label_mutual_information_capped(&self, cap: f64) -> Result<f64> {
        let mix = self.trajectories_capped(cap)?;
        let mut total = 0.0;
        for (w, comp) in &self.components {
            if *w == 0.0 {
                continue;
            }
            let d = comp
                .trajectories_capped(cap)?
                .kl_vs(&mix)
                .expect_finite("component dominated by mixture");
            total += w * d;
        }
        Ok(total)
    }

    /// Marginal of the mixture at a time step.
    pub fn marginal_at(&self, time: i64) -> Vec<f64> {
        let states = self.components[0].1.states();
        let mut out = vec![0.0; states];
        for (w, comp) in &self.components {
            for (x, &p) in comp.marginal_at(time).iter().enumerate() {
                out[x] += w * p;
            }
        }
        out
    }
}
