//! The multiclass-to-binary reduction: one binary learner per label bit,
//! each on its own slice of the sample.

use super::{dp_verify, exp_mech_learner, DpReport, ExactDistribution};
use crate::caps::Caps;
use crate::class::{bin2dec, label_bit, BitIndex, HypothesisClass, Label, LabeledSample};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use serde::Serialize;
use std::ops::Range;

/// Sizes of the `B` consecutive, data-independent sample slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionPlan {
    sizes: Vec<usize>,
}

impl ReductionPlan {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidParameter("partition sizes must be positive".into()));
        }
        Ok(ReductionPlan { sizes })
    }

    /// `n` split into `parts` near-equal slices, earlier slices taking the remainder.
    pub fn equal_split(n: usize, parts: usize) -> Result<Self> {
        if parts == 0 || n < parts {
            return Err(Error::InvalidParameter(format!(
                "sample of size {n} is too small for {parts} partitions"
            )));
        }
        let (q, r) = (n / parts, n % parts);
        ReductionPlan::new((0..parts).map(|i| q + usize::from(i < r)).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.sizes
            .iter()
            .map(|s| {
                let r = start..start + s;
                start += s;
                r
            })
            .collect()
    }

    /// Index of the slice holding sample position `i`.
    pub fn partition_of(&self, i: usize) -> Option<usize> {
        self.ranges().iter().position(|r| r.contains(&i))
    }

    fn check(&self, h: &HypothesisClass, sample: &LabeledSample) -> Result<()> {
        if self.sizes.len() != h.bits() {
            return Err(Error::InvalidParameter(format!(
                "plan has {} partitions, class needs {}",
                self.sizes.len(),
                h.bits()
            )));
        }
        if self.total() != sample.len() {
            return Err(Error::InvalidParameter(format!(
                "plan covers {} points, sample has {}",
                self.total(),
                sample.len()
            )));
        }
        Ok(())
    }
}

/// Slice `i` of the sample with labels replaced by their bit `i`.
fn bit_slice(sample: &LabeledSample, range: Range<usize>, index: BitIndex, bits: usize) -> LabeledSample {
    LabeledSample::new(
        sample.points()[range].iter().map(|&(x, y)| (x, label_bit(y, index, bits) as Label)).collect(),
    )
}

/// Exact joint distribution of the per-bit outputs, as row indices into the
/// binary restrictions (in bit order).
///
/// No realizability is required here, since neighbors of a realizable sample
/// often are not.
pub fn reduction_distribution(
    h: &HypothesisClass,
    sample: &LabeledSample,
    plan: &ReductionPlan,
    caps: &Caps,
) -> Result<ExactDistribution<Vec<usize>>> {
    plan.check(h, sample)?;
    let restrictions = h.binary_restrictions();
    let total: u128 = restrictions.iter().map(|r| r.len() as u128).product();
    if total > caps.max_outcomes as u128 {
        return Err(Error::cap("reduction outcomes", total, caps.max_outcomes as u128));
    }
    let bits = h.bits();
    let mut joint: ExactDistribution<Vec<usize>> = ExactDistribution::point_mass(Vec::new());
    for ((index, range), r) in BitIndex::all(bits).zip(plan.ranges()).zip(&restrictions) {
        let part = exp_mech_learner(r, &bit_slice(sample, range, index, bits))?;
        joint = joint.product(&part).map(|(t, o)| {
            let mut t = t.clone();
            t.push(*o);
            t
        });
    }
    Ok(joint)
}

/// `g(x) = bin2dec(g_1(x), .., g_B(x))` for the chosen rows of the restrictions.
pub fn composite_hypothesis(restrictions: &[HypothesisClass], rows: &[usize], k: Label) -> Vec<Label> {
    let m = restrictions[0].domain_size();
    (0..m)
        .map(|x| {
            let bits: Vec<u8> = restrictions.iter().zip(rows).map(|(r, &i)| r.row(i)[x] as u8).collect();
            bin2dec(&bits, k)
        })
        .collect()
}

/// One run of the reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionOutput {
    /// Selected row of each binary restriction.
    pub part_rows: Vec<usize>,
    /// The selected binary functions `g_1..g_B`.
    pub part_functions: Vec<Vec<Label>>,
    /// The decoded multiclass hypothesis.
    pub hypothesis: Vec<Label>,
}

/// Runs the reduction on a realizable sample, drawing each binary learner's
/// output with the exponential mechanism at `rho = exp(-epsilon / 2)`.
pub fn reduction_learner(
    h: &HypothesisClass,
    sample: &LabeledSample,
    plan: &ReductionPlan,
    epsilon: f64,
    rng: &mut SeededRng,
) -> Result<ReductionOutput> {
    plan.check(h, sample)?;
    for &(x, y) in sample.points() {
        h.check_point(x)?;
        h.check_label(y)?;
    }
    if h.consistent_row(sample).is_none() {
        return Err(Error::InvalidParameter("sample is not realizable by the class".into()));
    }
    let rho = (-epsilon / 2.0).exp();
    let restrictions = h.binary_restrictions();
    let bits = h.bits();
    let mut part_rows = Vec::with_capacity(bits);
    for ((index, range), r) in BitIndex::all(bits).zip(plan.ranges()).zip(&restrictions) {
        let d = exp_mech_learner(r, &bit_slice(sample, range, index, bits))?;
        part_rows.push(d.sample(rho, rng));
    }
    let part_functions = restrictions.iter().zip(&part_rows).map(|(r, &i)| r.row(i).to_vec()).collect();
    let hypothesis = composite_hypothesis(&restrictions, &part_rows, h.k());
    Ok(ReductionOutput { part_rows, part_functions, hypothesis })
}

/// Privacy of the whole reduction on every neighbor of `sample`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    pub neighbors: usize,
    /// Check on the joint distribution of `(g_1, .., g_B)`.
    pub joint: DpReport,
    /// Check on the decoded hypothesis `g`.
    pub decoded: DpReport,
}

impl CompositionReport {
    pub fn passes(&self) -> bool {
        self.joint.passes && self.decoded.passes
    }
}

pub fn parallel_composition_check(
    h: &HypothesisClass,
    sample: &LabeledSample,
    plan: &ReductionPlan,
    epsilon: f64,
    caps: &Caps,
) -> Result<CompositionReport> {
    let rho = (-epsilon / 2.0).exp();
    let restrictions = h.binary_restrictions();
    let base = reduction_distribution(h, sample, plan, caps)?;
    let base_decoded = base.map(|rows| composite_hypothesis(&restrictions, rows, h.k()));
    let mut joint_pairs = Vec::new();
    let mut decoded_pairs = Vec::new();
    for (_, neighbor) in sample.neighbors(h.domain_size(), h.k()) {
        let d = reduction_distribution(h, &neighbor, plan, caps)?;
        decoded_pairs.push((base_decoded.clone(), d.map(|rows| composite_hypothesis(&restrictions, rows, h.k()))));
        joint_pairs.push((base.clone(), d));
    }
    Ok(CompositionReport {
        neighbors: joint_pairs.len(),
        joint: dp_verify(&joint_pairs, 2, rho, 0.0),
        decoded: dp_verify(&decoded_pairs, 2, rho, 0.0),
    })
}
