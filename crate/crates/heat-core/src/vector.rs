use crate::space::StateSpace;
use crate::{CoreError, Result, DEFAULT_ZERO_TOL};

/// A dense nonnegative vector over a state space, with cached l1 and l2
/// norms.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegVector {
    space: StateSpace,
    values: Vec<f64>,
    l1: f64,
    l2: f64,
}

impl NonnegVector {
    pub fn new(space: StateSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(CoreError::DimensionMismatch {
                expected: space.size(),
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CoreError::NegativeWeight {
                    i,
                    j: i,
                    weight: v,
                });
            }
        }
        let l1 = values.iter().sum();
        let l2 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Self {
            space,
            values,
            l1,
            l2,
        })
    }

    /// Point mass `e_i`.
    pub fn point_mass(space: StateSpace, i: usize) -> Result<Self> {
        if i >= space.size() {
            return Err(CoreError::EntryOutOfBounds {
                i,
                j: i,
                size: space.size(),
            });
        }
        let mut values = vec![0.0; space.size()];
        values[i] = 1.0;
        Self::new(space, values)
    }

    /// The all-ones vector scaled to unit l2 norm.
    pub fn uniform_unit(space: StateSpace) -> Result<Self> {
        let n = space.size();
        Self::new(space, vec![1.0 / (n as f64).sqrt(); n])
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    /// Rescaled copy with unit l2 norm.
    pub fn normalized_l2(&self) -> Result<Self> {
        if self.l2 == 0.0 {
            return Err(CoreError::InvalidParameter(
                "cannot l2-normalize the zero vector".into(),
            ));
        }
        let values = self.values.iter().map(|v| v / self.l2).collect();
        Self::new(self.space.clone(), values)
    }

    /// The probability distribution `self / l1` (the walk-side normalization).
    pub fn normalized_l1(&self) -> Result<Distribution> {
        if self.l1 == 0.0 {
            return Err(CoreError::InvalidParameter(
                "cannot l1-normalize the zero vector".into(),
            ));
        }
        let mass: Vec<f64> = self.values.iter().map(|v| v / self.l1).collect();
        Distribution::new(mass)
    }
}

/// A nonnegative measure over state indices; `normalized` holds within 1e-9
/// of total mass 1 when the measure is meant to be a probability
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: Vec<f64>,
    total: f64,
}

impl Distribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        for (i, &v) in mass.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CoreError::NegativeWeight {
                    i,
                    j: i,
                    weight: v,
                });
            }
        }
        let total = mass.iter().sum();
        Ok(Self { mass, total })
    }

    pub fn point_mass(size: usize, i: usize) -> Result<Self> {
        let mut mass = vec![0.0; size];
        mass[i] = 1.0;
        Self::new(mass)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(vec![1.0 / size as f64; size])
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total - 1.0).abs() <= tol
    }

    /// Indices with mass above the zero threshold.
    pub fn support(&self, zero_tol: f64) -> Vec<usize> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > zero_tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_default(&self) -> Vec<usize> {
        self.support(DEFAULT_ZERO_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_match_recomputation() {
        let space = StateSpace::new(3).unwrap();
        let v = NonnegVector::new(space, vec![3.0, 4.0, 0.0]).unwrap();
        assert!((v.l1() - 7.0).abs() < 1e-12);
        assert!((v.l2() - 5.0).abs() < 1e-12);
        let unit = v.normalized_l2().unwrap();
        assert!((unit.l2() - 1.0).abs() < 1e-12);
        let mu = v.normalized_l1().unwrap();
        assert!(mu.is_normalized(1e-12));
        assert_eq!(mu.support_default(), vec![0, 1]);
    }

    #[test]
    fn rejects_negative_values() {
        let space = StateSpace::new(2).unwrap();
        assert!(NonnegVector::new(space, vec![1.0, -0.1]).is_err());
        assert!(Distribution::new(vec![0.5, f64::NAN]).is_err());
    }
}
