//! Polynomials `sum_e c_e rho^e` with non-negative rational coefficients.
//!
//! Exponential-mechanism probabilities are ratios of such polynomials in
//! `rho = exp(-unit)`, so privacy inequalities can be checked on exponents
//! and rational coefficients without evaluating any exponential.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Mul};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpSum {
    terms: BTreeMap<i64, BigRational>,
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum::default()
    }

    pub fn one() -> Self {
        ExpSum::monomial(BigRational::one(), 0)
    }

    /// `coeff * rho^exp`; the coefficient must be non-negative.
    pub fn monomial(coeff: BigRational, exp: i64) -> Self {
        assert!(!coeff.is_negative(), "negative coefficient");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        ExpSum { terms }
    }

    pub fn power(exp: i64) -> Self {
        ExpSum::monomial(BigRational::one(), exp)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn scale(&self, c: &BigRational) -> ExpSum {
        assert!(!c.is_negative(), "negative scale");
        if c.is_zero() {
            return ExpSum::zero();
        }
        ExpSum { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// Multiplies by `rho^shift`.
    pub fn shift(&self, shift: i64) -> ExpSum {
        ExpSum { terms: self.terms.iter().map(|(e, v)| (e + shift, v.clone())).collect() }
    }

    pub fn add_assign(&mut self, other: &ExpSum) {
        for (e, c) in &other.terms {
            *self.terms.entry(*e).or_insert_with(BigRational::zero) += c;
        }
    }

    pub fn mul(&self, other: &ExpSum) -> ExpSum {
        let mut out = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                *out.entry(e1 + e2).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        ExpSum { terms: out }
    }

    /// Value at `rho` in `(0, 1]`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::INFINITY) * rho.powi(*e as i32))
            .sum()
    }

    /// Value at `rho`, divided by `rho^offset` to keep magnitudes near one.
    pub fn eval_scaled(&self, rho: f64, offset: i64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::INFINITY) * rho.powi((*e - offset) as i32))
            .sum()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Whether `self(rho) <= other(rho)` for every `rho` in `(0, 1]`, via
    /// prefix sums: if every prefix (by increasing exponent) of `other`'s
    /// coefficients dominates `self`'s, summation by parts gives the
    /// inequality. The test is sufficient, not necessary.
    pub fn dominated_by(&self, other: &ExpSum) -> bool {
        let mut exps: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        exps.sort_unstable();
        exps.dedup();
        let mut acc = BigRational::zero();
        for e in exps {
            if let Some(c) = other.terms.get(&e) {
                acc += c;
            }
            if let Some(c) = self.terms.get(&e) {
                acc -= c;
            }
            if acc.is_negative() {
                return false;
            }
        }
        true
    }
}

impl Add for &ExpSum {
    type Output = ExpSum;
    fn add(self, rhs: &ExpSum) -> ExpSum {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Mul for &ExpSum {
    type Output = ExpSum;
    fn mul(self, rhs: &ExpSum) -> ExpSum {
        ExpSum::mul(self, rhs)
    }
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
