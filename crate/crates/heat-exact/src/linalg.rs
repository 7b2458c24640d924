use num_traits::Zero;

use crate::Rat;

/// Dense symmetric rational kernel for oracle-scale instances.
#[derive(Debug, Clone, PartialEq)]
pub struct RatKernel {
    n: usize,
    rows: Vec<Vec<Rat>>,
}

impl RatKernel {
    /// Builds from upper-triangular triplets, mirroring each off-diagonal
    /// entry.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, Rat)]) -> Self {
        let mut rows = vec![vec![Rat::zero(); n]; n];
        for (i, j, w) in triplets {
            assert!(i <= j && *j < n, "triplets must satisfy i <= j < n");
            rows[*i][*j] += w.clone();
            if i != j {
                rows[*j][*i] += w.clone();
            }
        }
        Self { n, rows }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.rows[i]
    }

    pub fn matvec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.n);
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_row_sum(&self) -> Rat {
        self.rows
            .iter()
            .map(|row| row.iter().sum::<Rat>())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|w| w * c).collect())
            .collect();
        Self { n: self.n, rows }
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact moment sequence `m_0 .. m_tmax`.
pub fn moments_exact(s: &RatKernel, u: &[Rat], v: &[Rat], t_max: usize) -> Vec<Rat> {
    let mut x = u.to_vec();
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(dot(v, &x));
    for _ in 1..=t_max {
        x = s.matvec(&x);
        out.push(dot(v, &x));
    }
    out
}

/// Exact path kernel matching `path_chain`.
pub fn path_chain_exact(t: usize, eps: Rat) -> RatKernel {
    let triplets: Vec<(usize, usize, Rat)> = (0..t).map(|i| (i, i + 1, eps.clone())).collect();
    RatKernel::from_triplets(t + 1, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    #[test]
    fn fig_closed_form_exact() {
        for t in 2..=12usize {
            for eps in [rat_int(1), rat(1, 2)] {
                let s = path_chain_exact(t, eps.clone());
                let mut u = vec![Rat::zero(); t + 1];
                u[0] = rat_int(1);
                let mut v = vec![Rat::zero(); t + 1];
                v[t] = rat_int(1);
                let m = moments_exact(&s, &u, &v, t + 2);
                assert!(m[t - 2].is_zero());
                let eps_t = num_traits::pow::pow(eps.clone(), t);
                assert_eq!(m[t], eps_t);
                let expected = num_traits::pow::pow(eps.clone(), t + 2) * rat_int(t as i64);
                assert_eq!(m[t + 2], expected);
            }
        }
    }
}
