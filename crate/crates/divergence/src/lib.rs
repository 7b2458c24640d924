//! Base-2 information-theoretic primitives with the exact conventions the
//! verifiers downstream rely on: KL divergence against possibly
//! non-normalized reference measures, the `0 * log(0/.)` contribution rule,
//! Undefined as a first-class value, conditional divergence, the chain
//! rule, mutual information, and second-order Renyi entropy.

use heat_core::{Distribution, DEFAULT_ZERO_TOL};

mod joint;

pub use joint::{kl_chain_rule_check, mutual_information, ChainRuleReport, JointDistribution};

/// A base-2 KL divergence value. `Undefined` arises exactly when the first
/// argument puts mass where the reference has none. Finite values can be
/// negative when the reference measure has total mass above 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceValue {
    Finite(f64),
    Undefined,
}

impl DivergenceValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            DivergenceValue::Finite(v) => Some(v),
            DivergenceValue::Undefined => None,
        }
    }

    pub fn is_undefined(self) -> bool {
        matches!(self, DivergenceValue::Undefined)
    }

    pub fn expect_finite(self, context: &str) -> f64 {
        match self {
            DivergenceValue::Finite(v) => v,
            DivergenceValue::Undefined => panic!("divergence undefined: {context}"),
        }
    }

    pub fn map2(self, other: Self, f: impl FnOnce(f64, f64) -> f64) -> Self {
        match (self, other) {
            (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => {
                DivergenceValue::Finite(f(a, b))
            }
            _ => DivergenceValue::Undefined,
        }
    }
}

impl std::ops::Add for DivergenceValue {
    type Output = DivergenceValue;
    fn add(self, rhs: Self) -> Self {
        self.map2(rhs, |a, b| a + b)
    }
}

impl std::iter::Sum for DivergenceValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(DivergenceValue::Finite(0.0), |acc, v| acc + v)
    }
}

/// `D(mu || nu) = sum_x mu(x) log2(mu(x) / nu(x))` over slices of equal
/// length. Entries of `mu` at or below `zero_tol` contribute nothing; a
/// `mu`-entry above the threshold facing a `nu`-entry at or below it makes
/// the divergence Undefined.
pub fn kl_slices(mu: &[f64], nu: &[f64], zero_tol: f64) -> DivergenceValue {
    assert_eq!(mu.len(), nu.len(), "kl over mismatched supports");
    let mut total = 0.0;
    for (&p, &q) in mu.iter().zip(nu) {
        if p <= zero_tol {
            continue;
        }
        if q <= zero_tol {
            return DivergenceValue::Undefined;
        }
        total += p * (p / q).log2();
    }
    DivergenceValue::Finite(total)
}

/// KL divergence of a normalized distribution from a nonnegative reference
/// measure, with the default zero threshold.
pub fn kl(mu: &Distribution, nu: &Distribution) -> DivergenceValue {
    kl_slices(mu.mass(), nu.mass(), DEFAULT_ZERO_TOL)
}

/// Conditional divergence `D(P(.|x) || Q(.|x))` averaged over the
/// conditioning marginal, visiting only rows with marginal mass above the
/// threshold.
pub fn conditional_kl(
    marginal: &[f64],
    p_row: impl Fn(usize) -> Vec<f64>,
    q_row: impl Fn(usize) -> Vec<f64>,
    zero_tol: f64,
) -> DivergenceValue {
    let mut total = 0.0;
    for (x, &w) in marginal.iter().enumerate() {
        if w <= zero_tol {
            continue;
        }
        match kl_slices(&p_row(x), &q_row(x), zero_tol) {
            DivergenceValue::Finite(v) => total += w * v,
            DivergenceValue::Undefined => return DivergenceValue::Undefined,
        }
    }
    DivergenceValue::Finite(total)
}

/// The lower bound `D(mu || nu) >= -log2 nu(Psi)` for `supp(mu) = Psi`,
/// together with whether equality holds (mu is nu conditioned on Psi).
pub fn kl_conditioned_bound(
    mu: &Distribution,
    nu: &Distribution,
    psi: &[usize],
    tol: f64,
) -> Result<(DivergenceValue, bool), String> {
    let support = mu.support(DEFAULT_ZERO_TOL);
    if support != psi {
        return Err(format!(
            "support mismatch: supp(mu) = {support:?}, expected psi = {psi:?}"
        ));
    }
    let value = kl(mu, nu);
    let nu_psi: f64 = psi.iter().map(|&x| nu.mass()[x]).sum();
    if nu_psi <= 0.0 {
        return Ok((DivergenceValue::Undefined, false));
    }
    let equality = psi
        .iter()
        .all(|&x| (mu.mass()[x] - nu.mass()[x] / nu_psi).abs() <= tol);
    Ok((value, equality))
}

/// Second-order Renyi entropy `H_2(mu) = -log2 ||mu||_2^2` of a normalized
/// distribution.
pub fn renyi2(mu: &Distribution) -> f64 {
    let collision: f64 = mu.mass().iter().map(|p| p * p).sum();
    -collision.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(mass: &[f64]) -> Distribution {
        Distribution::new(mass.to_vec()).unwrap()
    }

    #[test]
    fn kl_identical_is_zero() {
        let mu = dist(&[0.3, 0.7]);
        assert_eq!(kl(&mu, &mu), DivergenceValue::Finite(0.0));
    }

    #[test]
    fn kl_two_point_example() {
        let mu = dist(&[0.5, 0.5]);
        let nu = dist(&[0.25, 0.75]);
        let expect = (1.0 + (2.0f64 / 3.0).log2()) / 2.0;
        let got = kl(&mu, &nu).finite().unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.20752).abs() < 1e-5);
    }

    #[test]
    fn kl_support_violation_is_undefined() {
        let mu = dist(&[1.0, 0.0]);
        let nu = dist(&[0.0, 1.0]);
        assert!(kl(&mu, &nu).is_undefined());
    }

    #[test]
    fn kl_against_subdistribution_nonnegative() {
        let mu = dist(&[0.5, 0.5]);
        let nu = dist(&[0.25, 0.25]);
        // reference with total 1/2: divergence is 1 bit
        assert!((kl(&mu, &nu).finite().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioned_bound_equality_cases() {
        // mu = nu restricted to {0, 1} and renormalized
        let nu = dist(&[0.2, 0.2, 0.6]);
        let mu = dist(&[0.5, 0.5, 0.0]);
        let (value, eq) = kl_conditioned_bound(&mu, &nu, &[0, 1], 1e-9).unwrap();
        assert!(eq);
        let expect = -(0.4f64).log2();
        assert!((value.finite().unwrap() - expect).abs() < 1e-12);

        // non-uniform reference on psi: strict inequality
        let nu2 = dist(&[0.1, 0.3, 0.6]);
        let (value2, eq2) = kl_conditioned_bound(&mu, &nu2, &[0, 1], 1e-9).unwrap();
        assert!(!eq2);
        assert!(value2.finite().unwrap() > -(0.4f64).log2() + 1e-6);

        // psi = full space, normalized nu: bound is 0 (Gibbs)
        let (value3, _) =
            kl_conditioned_bound(&mu, &dist(&[0.5, 0.5, 0.0]), &[0, 1], 1e-9).unwrap();
        assert!(value3.finite().unwrap().abs() < 1e-12);

        // support mismatch is an error
        assert!(kl_conditioned_bound(&mu, &nu, &[0, 1, 2], 1e-9).is_err());
    }

    #[test]
    fn renyi2_examples() {
        assert!((renyi2(&dist(&[0.25; 4])) - 2.0).abs() < 1e-12);
        assert!(renyi2(&dist(&[1.0, 0.0])).abs() < 1e-12);
        let h = renyi2(&dist(&[0.5, 0.25, 0.25]));
        assert!((h - -(3.0f64 / 8.0).log2()).abs() < 1e-12);
        assert!((h - 1.415).abs() < 1e-3);
    }
}
