//! Joint distributions over a product space, the divergence chain rule, and
//! mutual information.

use crate::{kl_slices, DivergenceValue};
use heat_core::DEFAULT_ZERO_TOL;

/// A normalized joint distribution over `rows x cols`, dense.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    mass: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, mass: Vec<f64>) -> Result<Self, String> {
        if mass.len() != rows * cols {
            return Err(format!(
                "joint mass has {} cells, expected {}",
                mass.len(),
                rows * cols
            ));
        }
        if mass.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err("joint mass must be nonnegative".into());
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(format!("joint mass sums to {total}, expected 1"));
        }
        Ok(Self { rows, cols, mass })
    }

    /// Product of two marginals.
    pub fn product(row_marginal: &[f64], col_marginal: &[f64]) -> Result<Self, String> {
        let mass = row_marginal
            .iter()
            .flat_map(|&a| col_marginal.iter().map(move |&b| a * b))
            .collect();
        Self::new(row_marginal.len(), col_marginal.len(), mass)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self, x: usize, y: usize) -> f64 {
        self.mass[x * self.cols + y]
    }

    pub fn flat(&self) -> &[f64] {
        &self.mass
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|x| (0..self.cols).map(|y| self.cell(x, y)).sum())
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.cell(x, y)).sum())
            .collect()
    }

    fn row_conditional(&self, x: usize, row_mass: f64) -> Vec<f64> {
        (0..self.cols).map(|y| self.cell(x, y) / row_mass).collect()
    }
}

/// Both sides of the chain rule
/// `D(X1 X2 || Y1 Y2) = D(X1 || Y1) + D(X2 | X1 || Y2 | Y1)`,
/// computed independently.
#[derive(Debug, Clone, Copy)]
pub struct ChainRuleReport {
    pub lhs: DivergenceValue,
    pub rhs: DivergenceValue,
    pub residual: Option<f64>,
}

pub fn kl_chain_rule_check(p: &JointDistribution, q: &JointDistribution) -> ChainRuleReport {
    assert_eq!(p.rows(), q.rows());
    assert_eq!(p.cols(), q.cols());
    let lhs = kl_slices(p.flat(), q.flat(), DEFAULT_ZERO_TOL);

    let p1 = p.row_marginal();
    let q1 = q.row_marginal();
    let head = kl_slices(&p1, &q1, DEFAULT_ZERO_TOL);
    let mut tail = DivergenceValue::Finite(0.0);
    for (x, &w) in p1.iter().enumerate() {
        if w <= DEFAULT_ZERO_TOL {
            continue;
        }
        let q_row = q1[x];
        if q_row <= DEFAULT_ZERO_TOL {
            tail = DivergenceValue::Undefined;
            break;
        }
        let step = kl_slices(
            &p.row_conditional(x, w),
            &q.row_conditional(x, q_row),
            DEFAULT_ZERO_TOL,
        );
        tail = tail.map2(step, |a, b| a + w * b);
        if tail.is_undefined() {
            break;
        }
    }
    let rhs = head + tail;
    let residual = match (lhs, rhs) {
        (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => Some((a - b).abs()),
        _ => None,
    };
    ChainRuleReport { lhs, rhs, residual }
}

/// `I(X; Y) = D(dist(X, Y) || dist(X) dist(Y))`. The product of marginals
/// always dominates the joint, so the value is a plain real.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let rows = joint.row_marginal();
    let cols = joint.col_marginal();
    let mut total = 0.0;
    for x in 0..joint.rows() {
        for y in 0..joint.cols() {
            let p = joint.cell(x, y);
            if p <= DEFAULT_ZERO_TOL {
                continue;
            }
            total += p * (p / (rows[x] * cols[y])).log2();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_on_product_is_zero() {
        let p = JointDistribution::product(&[0.25, 0.75], &[0.5, 0.5]).unwrap();
        let q = JointDistribution::product(&[0.25, 0.75], &[0.5, 0.5]).unwrap();
        let report = kl_chain_rule_check(&p, &q);
        assert_eq!(report.lhs.finite(), Some(0.0));
        assert_eq!(report.rhs.finite(), Some(0.0));
    }

    #[test]
    fn chain_rule_small_residual_on_random_joints() {
        // deterministic pseudo-random joints over sizes 2..=8
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for size in 2..=8usize {
            let draw = |next: &mut dyn FnMut() -> f64| {
                let mut mass: Vec<f64> = (0..size * size).map(|_| next() + 1e-3).collect();
                let total: f64 = mass.iter().sum();
                mass.iter_mut().for_each(|v| *v /= total);
                JointDistribution::new(size, size, mass).unwrap()
            };
            let p = draw(&mut next);
            let q = draw(&mut next);
            let report = kl_chain_rule_check(&p, &q);
            assert!(report.residual.unwrap() < 1e-10, "size {size}");
        }
    }

    #[test]
    fn undefined_propagates() {
        let p = JointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let q = JointDistribution::new(2, 2, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        let report = kl_chain_rule_check(&p, &q);
        assert!(report.lhs.is_undefined());
        assert!(report.rhs.is_undefined());
        assert!(report.residual.is_none());
    }

    #[test]
    fn mutual_information_examples() {
        let indep = JointDistribution::product(&[0.3, 0.7], &[0.6, 0.4]).unwrap();
        assert!(mutual_information(&indep).abs() < 1e-12);

        // perfectly correlated fair bit: 1 bit
        let corr = JointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&corr) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_information_is_shannon_entropy() {
        let p = [0.5, 0.3, 0.2];
        let mut mass = vec![0.0; 9];
        for (i, &v) in p.iter().enumerate() {
            mass[i * 3 + i] = v;
        }
        let joint = JointDistribution::new(3, 3, mass).unwrap();
        let entropy: f64 = p.iter().map(|&v| -v * v.log2()).sum();
        assert!((mutual_information(&joint) - entropy).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_symmetry() {
        let joint =
            JointDistribution::new(2, 3, vec![0.1, 0.2, 0.1, 0.25, 0.05, 0.3]).unwrap();
        let flipped_mass: Vec<f64> = (0..3)
            .flat_map(|y| (0..2).map(move |x| (x, y)))
            .map(|(x, y)| joint.cell(x, y))
            .collect();
        let flipped = JointDistribution::new(3, 2, flipped_mass).unwrap();
        assert!((mutual_information(&joint) - mutual_information(&flipped)).abs() < 1e-12);
    }
}
