//! Scalar abstraction for probability bookkeeping.
//!
//! Finite distributions, accuracy evaluation and the game solver are written
//! once over [`Scalar`] and instantiated with `f32`, `f64` or exact
//! [`BigRational`](num_rational::BigRational).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + FromPrimitive
    + ToPrimitive
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("numerator") / Self::from_i64(den).expect("denominator")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
}

impl Scalar for f64 {
    const EXACT: bool = false;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Parses `"num/den"` or an integer string into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Formats a rational as `"num/den"` (always with a denominator).
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// A finite probability distribution over outcomes of type `O`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<O, S> {
    support: Vec<O>,
    probs: Vec<S>,
}

impl<O: Clone + PartialEq, S: Scalar> Distribution<O, S> {
    /// Builds a distribution, checking non-negativity and normalization.
    ///
    /// Exact scalars must sum to one exactly; floating scalars within `1e-9`.
    pub fn new(support: Vec<O>, probs: Vec<S>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::InvalidParameter("support and probabilities differ in length".into()));
        }
        if support.is_empty() {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        if probs.iter().any(|p| p.is_negative_value()) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        let total = probs.iter().cloned().fold(S::zero(), |a, b| a + b);
        let ok = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64_lossy() - 1.0).abs() <= 1e-9
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {:?}, not 1",
                total
            )));
        }
        Ok(Distribution { support, probs })
    }

    pub fn point_mass(outcome: O) -> Self {
        Distribution { support: vec![outcome], probs: vec![S::one()] }
    }

    pub fn uniform(support: Vec<O>) -> Result<Self> {
        let n = support.len() as i64;
        if n == 0 {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        let probs = vec![S::from_ratio(1, n); support.len()];
        Ok(Distribution { support, probs })
    }

    pub fn support(&self) -> &[O] {
        &self.support
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, &S)> {
        self.support.iter().zip(self.probs.iter())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Probability of one outcome (zero when absent).
    pub fn prob(&self, outcome: &O) -> S {
        self.iter()
            .filter(|(o, _)| *o == outcome)
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Probability of the event `{o : pred(o)}`.
    pub fn prob_of(&self, pred: impl Fn(&O) -> bool) -> S {
        self.iter()
            .filter(|(o, _)| pred(o))
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Expectation of `f` under the distribution.
    pub fn expect(&self, f: impl Fn(&O) -> S) -> S {
        self.iter().fold(S::zero(), |acc, (o, p)| acc + f(o) * p.clone())
    }

    /// Pushes the distribution forward through `f`, merging equal images.
    pub fn map<P: Clone + PartialEq>(&self, f: impl Fn(&O) -> P) -> Distribution<P, S> {
        let mut support: Vec<P> = Vec::new();
        let mut probs: Vec<S> = Vec::new();
        for (o, p) in self.iter() {
            let image = f(o);
            match support.iter().position(|q| *q == image) {
                Some(i) => probs[i] = probs[i].clone() + p.clone(),
                None => {
                    support.push(image);
                    probs.push(p.clone());
                }
            }
        }
        Distribution { support, probs }
    }

    /// Converts probabilities to `f64`.
    pub fn to_f64(&self) -> Distribution<O, f64> {
        Distribution {
            support: self.support.clone(),
            probs: self.probs.iter().map(|p| p.to_f64_lossy()).collect(),
        }
    }
}

impl<O: Clone + PartialEq> Distribution<O, f64> {
    /// Builds a floating distribution from non-negative weights, normalizing them.
    pub fn from_weights(support: Vec<O>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be non-negative with positive sum".into()));
        }
        let probs = weights.iter().map(|w| w / total).collect();
        Distribution::new(support, probs)
    }

    /// Draws one outcome by inverse-CDF sampling from a uniform in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> &O {
        let mut acc = 0.0;
        for (o, p) in self.iter() {
            acc += p;
            if u < acc {
                return o;
            }
        }
        // Rounding can leave `acc` marginally below one.
        let last = self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(self.len() - 1);
        &self.support[last]
    }
}

/// Absolute value helper that works for every scalar instantiation.
pub fn abs<S: Scalar>(x: S) -> S {
    if x.is_negative_value() {
        S::zero() - x
    } else {
        x
    }
}
