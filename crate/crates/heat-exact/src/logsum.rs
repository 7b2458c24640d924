//! Formal sums `sum_i c_i * log2(q_i)` with rational coefficients and
//! positive rational arguments. Used to verify divergence identities
//! exactly: the sum is zero iff, after collecting the prime factorization
//! of `prod q_i^{c_i}`, every prime carries total exponent zero.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::factor::factor_biguint;
use crate::{rat_to_f64, Rat};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogSum {
    /// argument -> coefficient; arguments are strictly positive rationals
    terms: BTreeMap<Rat, Rat>,
}

impl LogSum {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The value `-log2 q`.
    pub fn neg_log2(q: Rat) -> Self {
        let mut s = Self::zero();
        s.add_term(-Rat::one(), q);
        s
    }

    /// The value `log2 q`.
    pub fn log2(q: Rat) -> Self {
        let mut s = Self::zero();
        s.add_term(Rat::one(), q);
        s
    }

    /// Adds `coeff * log2(arg)`. Terms with `arg == 1` or `coeff == 0`
    /// vanish; equal arguments merge.
    pub fn add_term(&mut self, coeff: Rat, arg: Rat) {
        assert!(arg.is_positive(), "log argument must be positive, got {arg}");
        if coeff.is_zero() || arg.is_one() {
            return;
        }
        let entry = self.terms.entry(arg.clone()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&arg);
        }
    }

    pub fn add(&mut self, other: &LogSum) {
        for (arg, coeff) in &other.terms {
            self.add_term(coeff.clone(), arg.clone());
        }
    }

    pub fn sub(&mut self, other: &LogSum) {
        for (arg, coeff) in &other.terms {
            self.add_term(-coeff.clone(), arg.clone());
        }
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for coeff in self.terms.values_mut() {
            *coeff *= c;
        }
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exact zero test: collects `sum_i c_i * e_{p,i}` for every prime `p`
    /// dividing any argument; the sum vanishes iff every collected exponent
    /// is zero.
    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        let mut exponents: BTreeMap<BigUint, Rat> = BTreeMap::new();
        for (arg, coeff) in &self.terms {
            let numer = arg.numer().magnitude().clone();
            let denom = arg.denom().magnitude().clone();
            for (base, sign) in [(numer, 1i64), (denom, -1i64)] {
                if base.is_one() {
                    continue;
                }
                for (p, e) in factor_biguint(&base) {
                    let delta = coeff.clone() * Rat::from_integer((sign * e as i64).into());
                    let entry = exponents.entry(p.clone()).or_insert_with(Rat::zero);
                    *entry += delta;
                    if entry.is_zero() {
                        exponents.remove(&p);
                    }
                }
            }
        }
        exponents.is_empty()
    }

    /// Floating-point evaluation for reporting.
    pub fn eval_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(arg, coeff)| rat_to_f64(coeff) * rat_to_f64(arg).log2())
            .sum()
    }
}
