//! Exponential-mechanism learners and exact differential-privacy checks.

pub mod expsum;
mod reduction;

pub use expsum::ExpSum;
pub use reduction::{
    composite_hypothesis, parallel_composition_check, reduction_distribution, reduction_learner,
    CompositionReport, ReductionOutput, ReductionPlan,
};

use crate::class::{HypothesisClass, Label, LabeledSample};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Distribution;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Privacy budget `(epsilon, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta must lie in [0, 1], got {delta}")));
        }
        Ok(PrivacyParams { epsilon, delta })
    }

    /// `rho = exp(-epsilon / 2)`, the base of the exponential mechanism's weights.
    pub fn rho(&self) -> f64 {
        (-self.epsilon / 2.0).exp()
    }
}

/// Accuracy target `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyParams {
    pub alpha: f64,
    pub beta: f64,
}

impl AccuracyParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha and beta must lie in (0, 1), got {alpha}, {beta}"
            )));
        }
        Ok(AccuracyParams { alpha, beta })
    }
}

/// A finite output distribution whose probabilities are `N_o(rho) / D(rho)`
/// for polynomials in `rho = exp(-unit)`.
///
/// For the exponential mechanism the unit is `epsilon / 2`, so a budget of
/// `epsilon` is two units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution<O> {
    outcomes: Vec<O>,
    numerators: Vec<ExpSum>,
    denominator: ExpSum,
}

impl<O: Clone + PartialEq> ExactDistribution<O> {
    /// Builds a distribution from numerators; the denominator is their sum.
    pub fn from_weights(outcomes: Vec<O>, numerators: Vec<ExpSum>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != numerators.len() {
            return Err(Error::InvalidParameter("outcomes and weights must be nonempty and aligned".into()));
        }
        let mut denominator = ExpSum::zero();
        for n in &numerators {
            denominator.add_assign(n);
        }
        if denominator.is_zero() {
            return Err(Error::InvalidParameter("all weights are zero".into()));
        }
        Ok(ExactDistribution { outcomes, numerators, denominator })
    }

    pub fn point_mass(o: O) -> Self {
        ExactDistribution { outcomes: vec![o], numerators: vec![ExpSum::one()], denominator: ExpSum::one() }
    }

    /// A rational-weighted distribution (no dependence on `rho`).
    pub fn from_rational(d: &Distribution<O, BigRational>) -> Self {
        let numerators = d.probs().iter().map(|p| ExpSum::monomial(p.clone(), 0)).collect();
        ExactDistribution { outcomes: d.support().to_vec(), numerators, denominator: ExpSum::one() }
    }

    pub fn outcomes(&self) -> &[O] {
        &self.outcomes
    }

    pub fn numerators(&self) -> &[ExpSum] {
        &self.numerators
    }

    pub fn denominator(&self) -> &ExpSum {
        &self.denominator
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn index_of(&self, o: &O) -> Option<usize> {
        self.outcomes.iter().position(|p| p == o)
    }

    /// Probabilities at `rho`.
    pub fn probs(&self, rho: f64) -> Vec<f64> {
        let offset = self.denominator.min_exponent().unwrap_or(0);
        let d = self.denominator.eval_scaled(rho, offset);
        self.numerators.iter().map(|n| n.eval_scaled(rho, offset) / d).collect()
    }

    pub fn prob(&self, o: &O, rho: f64) -> f64 {
        match self.index_of(o) {
            Some(i) => {
                let offset = self.denominator.min_exponent().unwrap_or(0);
                self.numerators[i].eval_scaled(rho, offset) / self.denominator.eval_scaled(rho, offset)
            }
            None => 0.0,
        }
    }

    pub fn to_distribution(&self, rho: f64) -> Result<Distribution<O, f64>> {
        Distribution::from_weights(self.outcomes.clone(), self.probs(rho))
    }

    pub fn sample(&self, rho: f64, rng: &mut SeededRng) -> O {
        let probs = self.probs(rho);
        let u = rng.uniform01();
        let mut acc = 0.0;
        for (o, p) in self.outcomes.iter().zip(&probs) {
            acc += p;
            if u < acc {
                return o.clone();
            }
        }
        let last = probs.iter().rposition(|p| *p > 0.0).unwrap_or(self.outcomes.len() - 1);
        self.outcomes[last].clone()
    }

    /// Pushforward through `f`, merging outcomes with equal images.
    pub fn map<P: Clone + PartialEq>(&self, f: impl Fn(&O) -> P) -> ExactDistribution<P> {
        let mut outcomes: Vec<P> = Vec::new();
        let mut numerators: Vec<ExpSum> = Vec::new();
        for (o, n) in self.outcomes.iter().zip(&self.numerators) {
            let p = f(o);
            match outcomes.iter().position(|q| *q == p) {
                Some(i) => numerators[i].add_assign(n),
                None => {
                    outcomes.push(p);
                    numerators.push(n.clone());
                }
            }
        }
        ExactDistribution { outcomes, numerators, denominator: self.denominator.clone() }
    }

    /// Independent product of two distributions over the same `rho`.
    pub fn product<P: Clone + PartialEq>(&self, other: &ExactDistribution<P>) -> ExactDistribution<(O, P)> {
        let mut outcomes = Vec::with_capacity(self.len() * other.len());
        let mut numerators = Vec::with_capacity(self.len() * other.len());
        for (a, na) in self.outcomes.iter().zip(&self.numerators) {
            for (b, nb) in other.outcomes.iter().zip(&other.numerators) {
                outcomes.push((a.clone(), b.clone()));
                numerators.push(na.mul(nb));
            }
        }
        ExactDistribution { outcomes, numerators, denominator: self.denominator.mul(&other.denominator) }
    }

    /// Draws `o` from `self`, then an outcome from `next(o)`.
    pub fn bind<P: Clone + PartialEq>(
        &self,
        next: impl Fn(&O) -> Result<ExactDistribution<P>>,
    ) -> Result<ExactDistribution<P>> {
        let parts: Vec<(ExpSum, ExactDistribution<P>)> = self
            .outcomes
            .iter()
            .zip(&self.numerators)
            .map(|(o, n)| Ok((n.clone(), next(o)?)))
            .collect::<Result<_>>()?;
        combine(parts, self.denominator.clone())
    }
}

/// Mixture with data-independent rational weights.
pub fn mixture<O: Clone + PartialEq>(
    weights: &[BigRational],
    parts: &[ExactDistribution<O>],
) -> Result<ExactDistribution<O>> {
    if weights.len() != parts.len() || parts.is_empty() {
        return Err(Error::InvalidParameter("mixture weights and parts must be nonempty and aligned".into()));
    }
    let total: BigRational = weights.iter().sum();
    if weights.iter().any(|w| w.is_negative()) || total != BigRational::one() {
        return Err(Error::InvalidParameter("mixture weights must form a distribution".into()));
    }
    let items = weights
        .iter()
        .zip(parts)
        .map(|(w, d)| (ExpSum::monomial(w.clone(), 0), d.clone()))
        .collect();
    combine(items, ExpSum::one())
}

/// `sum_i (w_i / outer) * parts_i`, brought over one common denominator
/// (the product of the distinct part denominators times `outer`).
fn combine<P: Clone + PartialEq>(
    parts: Vec<(ExpSum, ExactDistribution<P>)>,
    outer: ExpSum,
) -> Result<ExactDistribution<P>> {
    let mut dens: Vec<ExpSum> = Vec::new();
    for (_, d) in &parts {
        if !dens.contains(&d.denominator) {
            dens.push(d.denominator.clone());
        }
    }
    let mut common = outer;
    for d in &dens {
        common = common.mul(d);
    }
    let mut outcomes: Vec<P> = Vec::new();
    let mut numerators: Vec<ExpSum> = Vec::new();
    for (w, d) in &parts {
        if w.is_zero() {
            continue;
        }
        let mut mult = w.clone();
        for other in dens.iter().filter(|o| **o != d.denominator) {
            mult = mult.mul(other);
        }
        for (o, n) in d.outcomes.iter().zip(&d.numerators) {
            let term = n.mul(&mult);
            match outcomes.iter().position(|q| q == o) {
                Some(i) => numerators[i].add_assign(&term),
                None => {
                    outcomes.push(o.clone());
                    numerators.push(term);
                }
            }
        }
    }
    Ok(ExactDistribution { outcomes, numerators, denominator: common })
}

/// Exponential mechanism over candidates with integer scores (lower is
/// better): `Pr[i] ∝ rho^(steps * score_i)`.
pub fn exp_mech_select(scores: &[u32], steps: i64) -> Result<ExactDistribution<usize>> {
    let outcomes = (0..scores.len()).collect();
    let numerators = scores.iter().map(|&s| ExpSum::power(steps * s as i64)).collect();
    ExactDistribution::from_weights(outcomes, numerators)
}

/// Exponential-mechanism learner over a binary class: `Pr[h] ∝ exp(-epsilon
/// errs(h) / 2)`, one `rho` step per error. Outcomes are row indices of `h`.
pub fn exp_mech_learner(h: &HypothesisClass, sample: &LabeledSample) -> Result<ExactDistribution<usize>> {
    exp_mech_learner_scaled(h, sample, 1)
}

/// As [`exp_mech_learner`] with `steps` units of `rho` per error; `steps = 2`
/// is the mechanism run at twice the budget.
pub fn exp_mech_learner_scaled(
    h: &HypothesisClass,
    sample: &LabeledSample,
    steps: i64,
) -> Result<ExactDistribution<usize>> {
    if !h.is_binary() {
        return Err(Error::NotBinary(h.k()));
    }
    for &(x, y) in sample.points() {
        h.check_point(x)?;
        if y > 1 {
            return Err(Error::LabelOutOfRange { label: y as u32, k: 1 });
        }
    }
    let scores: Vec<u32> = h.rows().iter().map(|f| sample.errors(f)).collect();
    exp_mech_select(&scores, steps)
}

/// Outcome of comparing output distributions on neighboring datasets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpReport {
    pub epsilon: f64,
    pub delta: f64,
    pub pairs_checked: usize,
    /// Every pair and direction has a per-outcome certificate in exponent arithmetic.
    pub certified: bool,
    /// Largest `max_S Pr[S] - e^eps Pr'[S] - delta` over pairs and directions, at `rho`.
    pub worst_slack: f64,
    pub passes: bool,
}

/// Exact check for `(epsilon, delta)`-DP across `pairs` of distributions.
///
/// `budget_units` is epsilon measured in units of `-ln rho` (two for the
/// exponential mechanism). With `delta = 0` the pair passes when, for every
/// outcome, `rho^budget N_o D' <= N'_o D` on all of `(0, 1]`; the numeric
/// slack at the actual `rho` is always reported too.
pub fn dp_verify<O: Clone + PartialEq>(
    pairs: &[(ExactDistribution<O>, ExactDistribution<O>)],
    budget_units: i64,
    rho: f64,
    delta: f64,
) -> DpReport {
    let epsilon = -(budget_units as f64) * rho.ln();
    let mut certified = true;
    let mut worst = f64::NEG_INFINITY;
    for (p, q) in pairs {
        for (a, b) in [(p, q), (q, p)] {
            certified &= certificate(a, b, budget_units);
            worst = worst.max(numeric_slack(a, b, epsilon, rho) - delta);
        }
    }
    if pairs.is_empty() {
        worst = 0.0;
    }
    let passes = if delta == 0.0 { certified || worst <= 0.0 } else { worst <= 0.0 };
    DpReport { epsilon, delta, pairs_checked: pairs.len(), certified, worst_slack: worst, passes }
}

fn certificate<O: Clone + PartialEq>(a: &ExactDistribution<O>, b: &ExactDistribution<O>, budget: i64) -> bool {
    a.outcomes.iter().zip(&a.numerators).all(|(o, na)| {
        let nb = match b.index_of(o) {
            Some(j) => b.numerators[j].clone(),
            None => ExpSum::zero(),
        };
        let lhs = na.mul(&b.denominator).shift(budget);
        let rhs = nb.mul(&a.denominator);
        lhs.dominated_by(&rhs)
    })
}

/// `max_S Pr_a[S] - e^eps Pr_b[S]`, attained by the outcomes where `a` exceeds `e^eps b`.
fn numeric_slack<O: Clone + PartialEq>(a: &ExactDistribution<O>, b: &ExactDistribution<O>, epsilon: f64, rho: f64) -> f64 {
    let pa = a.probs(rho);
    let pb = b.probs(rho);
    let e = epsilon.exp();
    a.outcomes
        .iter()
        .zip(&pa)
        .map(|(o, p)| {
            let q = b.index_of(o).map_or(0.0, |j| pb[j]);
            (p - e * q).max(0.0)
        })
        .sum()
}

/// Slack of `(epsilon, delta)`-DP between two numeric distributions over
/// aligned outcome indices, both directions.
pub fn numeric_dp_slack(p: &[f64], q: &[f64], epsilon: f64, delta: f64) -> f64 {
    let e = epsilon.exp();
    let one = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - e * y).max(0.0)).sum() };
    one(p, q).max(one(q, p)) - delta
}

/// Repeats a base learner `reps` times and selects one candidate by the
/// exponential mechanism scored on `fresh`.
///
/// `base` is the base learner's output distribution and `errors(o)` counts
/// the mistakes of outcome `o` on the fresh sample. The result is the exact
/// distribution of the selected outcome.
pub fn confidence_boost<O: Clone + PartialEq>(
    base: &ExactDistribution<O>,
    reps: usize,
    errors: impl Fn(&O) -> u32,
    max_outcomes: usize,
) -> Result<ExactDistribution<O>> {
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one repetition".into()));
    }
    let total = (base.len() as u128).checked_pow(reps as u32).unwrap_or(u128::MAX);
    if total > max_outcomes as u128 {
        return Err(Error::cap("boosting product outcomes", total, max_outcomes as u128));
    }
    let mut tuples: ExactDistribution<Vec<O>> = base.map(|o| vec![o.clone()]);
    for _ in 1..reps {
        tuples = tuples.product(base).map(|(t, o)| {
            let mut t = t.clone();
            t.push(o.clone());
            t
        });
    }
    tuples.bind(|cands| {
        let scores: Vec<u32> = cands.iter().map(&errors).collect();
        Ok(exp_mech_select(&scores, 1)?.map(|&i| cands[i].clone()))
    })
}

/// An exact distribution over domain points.
pub type EmpiricalDistribution = Distribution<usize, BigRational>;

/// Distribution putting mass `count / n` on every point of `points`.
pub fn empirical_distribution(points: &[usize]) -> Result<EmpiricalDistribution> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let mut support: Vec<usize> = points.to_vec();
    support.sort_unstable();
    support.dedup();
    let n = BigRational::from_integer(points.len().into());
    let probs = support
        .iter()
        .map(|x| BigRational::from_integer(points.iter().filter(|p| *p == x).count().into()) / &n)
        .collect();
    Distribution::new(support, probs)
}

/// `Pr_{x ~ d}[h(x) != f(x)]`, exactly.
pub fn accuracy_eval(h: &[Label], d: &EmpiricalDistribution, f: &[Label]) -> Result<BigRational> {
    if h.len() != f.len() {
        return Err(Error::DomainMismatch(format!("hypothesis on {} points, target on {}", h.len(), f.len())));
    }
    let mut err = BigRational::zero();
    for (&x, p) in d.iter() {
        if x >= h.len() {
            return Err(Error::DomainOutOfRange { index: x, size: h.len() });
        }
        if h[x] != f[x] {
            err += p;
        }
    }
    Ok(err)
}
