//! Verification recipes: whole-class sweeps, the tightness constructions and
//! the end-to-end private learning pipeline.

use crate::config::RunConfig;
use crate::report::Report;
use mcld::class::{bits_for, label_bit, BitIndex};
use mcld::construct::{amplify, point_function_product, random_class, threshold_pair, RandomShape};
use mcld::covers::{build_cover, cover_chain_check, lower_bound_witness, min_cover_size, sauer_bound};
use mcld::dims::family::{family_psi_b, family_psi_bin};
use mcld::dims::{binary_dims, compute_dimension_report, find_shattered_psi_tree, mld};
use mcld::online::{adversary_search, BitwiseLearner, Soa};
use mcld::privacy::{accuracy_eval, parallel_composition_check, reduction_learner, CompositionReport, ReductionPlan};
use mcld::scalar::format_rational;
use mcld::trees::InputLabeledTree;
use mcld::{Caps, Distribution, Error, HypothesisClass, Label, LabeledSample, Rational, Result, SeededRng};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::time::Instant;

pub const ANCHOR_DIMS: &str = "dimension chain";
pub const ANCHOR_COVER_UPPER: &str = "0-cover size upper bound";
pub const ANCHOR_COVER_LOWER: &str = "0-cover lower bound from a shattered tree";
pub const ANCHOR_COVER_CHAIN: &str = "cover sandwich implies binary dimension bound";
pub const ANCHOR_SOA: &str = "SOA mistake bound";
pub const ANCHOR_BITWISE: &str = "bit-wise learner mistake bound";
pub const ANCHOR_THRESHOLD: &str = "threshold-pair lower bound";
pub const ANCHOR_AMPLIFY: &str = "gap amplification";
pub const ANCHOR_PRODUCT: &str = "point-function product dimension";
pub const ANCHOR_UNION: &str = "per-point union bound of the reduction";
pub const ANCHOR_DP: &str = "parallel composition privacy";

/// Depth of the canonical input tree used for cover checks.
const MAX_COVER_DEPTH: usize = 3;

/// Input-labeled tree of depth `n` whose node `i` (heap order) holds point `i mod m`.
pub fn canonical_tree(n: usize, m: usize) -> Result<InputLabeledTree> {
    InputLabeledTree::new(n, (0..(1usize << n) - 1).map(|i| i % m).collect())
}

/// Runs the dimension chain, cover sandwich and learner bounds for one class,
/// prefixing each check name with `tag`.
pub fn verify_class(report: &mut Report, tag: &str, h: &HypothesisClass, caps: &Caps) {
    let name = |s: &str| format!("{tag}: {s}");
    let dims = match compute_dimension_report(h, caps) {
        Ok(d) => d,
        Err(e) => {
            report.error(name("dimension report"), ANCHOR_DIMS, &e);
            return;
        }
    };
    for b in &dims.bounds_checked {
        report.check(name(&b.name), b.lhs, b.rhs, b.holds, ANCHOR_DIMS);
    }
    let d = dims.mld;
    let k = h.k();
    let d_b = dims.psi_b.unwrap_or(dims.psi_bin);
    let chain = cover_chain_check(d, d_b, k);
    report.check(
        name("cover chain implication"),
        format!("premise {}", chain.premise),
        format!("conclusion {}", chain.conclusion),
        chain.holds(),
        ANCHOR_COVER_CHAIN,
    );

    // cover sandwich on a canonical tree
    let n = (d as usize).clamp(1, MAX_COVER_DEPTH);
    let sandwich = canonical_tree(n, h.domain_size()).and_then(|z| {
        let built = build_cover(h, &z, caps)?;
        let min = min_cover_size(h, &z, caps)?;
        Ok((built, min))
    });
    match sandwich {
        Ok((built, min)) => {
            report.check(name("built cover is a 0-cover"), built.verified, true, built.verified, ANCHOR_COVER_UPPER);
            report.check(name("minimum cover <= built cover"), min, built.size(), min <= built.size(), ANCHOR_COVER_UPPER);
            if n >= d as usize {
                match sauer_bound(d as u64, k as u64, n as u64) {
                    Ok(bound) => {
                        let ok = num_bigint::BigUint::from(built.size()) <= bound;
                        report.check(name("built cover <= Sauer bound"), built.size(), bound, ok, ANCHOR_COVER_UPPER);
                    }
                    Err(e) => report.error(name("built cover <= Sauer bound"), ANCHOR_COVER_UPPER, &e),
                }
            }
        }
        Err(e) => report.error(name("cover sandwich"), ANCHOR_COVER_UPPER, &e),
    }

    // lower bound on the stripped witness
    if (1..=2).contains(&d_b) && k > 0 {
        let lower = (|| {
            let fam = match dims.psi_b {
                Some(_) => family_psi_b(k, caps)?,
                None => family_psi_bin(k)?,
            };
            let t = find_shattered_psi_tree(h, &fam, d_b as usize, caps)?
                .ok_or_else(|| Error::InvalidParameter("no shattered tree at the computed dimension".into()))?;
            let w = lower_bound_witness(h, &t)?;
            let z = w.tree.expect("depth >= 1");
            Ok::<_, Error>((min_cover_size(h, &z, caps)?, w.pairwise_conflicting))
        })();
        match lower {
            Ok((min, conflicting)) => {
                let need = 1usize << d_b;
                report.check(name("stripped witness needs 2^dB trees"), min, need, min >= need, ANCHOR_COVER_LOWER);
                report.check(name("witness requirements pairwise conflict"), conflicting, true, conflicting, ANCHOR_COVER_LOWER);
            }
            Err(e) => report.error(name("stripped witness needs 2^dB trees"), ANCHOR_COVER_LOWER, &e),
        }
    }

    // learner bounds against the exhaustive adversary
    let horizon = d as usize + 1;
    match Soa::new(h, caps).and_then(|soa| adversary_search(h, &soa, horizon, caps)) {
        Ok(r) => report.check(name("SOA mistakes <= MLD"), r.mistakes, d, r.mistakes <= d as f64, ANCHOR_SOA),
        Err(e) => report.error(name("SOA mistakes <= MLD"), ANCHOR_SOA, &e),
    }
    let sum_d: u32 = dims.binary_dims.iter().sum();
    match BitwiseLearner::new(h, caps).and_then(|l| adversary_search(h, &l, horizon, caps)) {
        Ok(r) => report.check(
            name("bit-wise mistakes <= sum of binary LDs"),
            r.mistakes,
            sum_d,
            r.mistakes <= sum_d as f64,
            ANCHOR_BITWISE,
        ),
        Err(e) => report.error(name("bit-wise mistakes <= sum of binary LDs"), ANCHOR_BITWISE, &e),
    }
}

/// Shape of the classes drawn by `verify-all --random`.
pub const RANDOM_SHAPE: RandomShape = RandomShape { max_domain: 4, max_k: 6, max_size: 30 };

pub fn random_classes(count: usize, seed: u64) -> Result<Vec<HypothesisClass>> {
    let mut rng = SeededRng::new(seed);
    (0..count).map(|_| random_class(&mut rng, RANDOM_SHAPE)).collect()
}

/// Verifies every class in `classes`; check names are prefixed by `name:index`.
pub fn cmd_verify_all(config: RunConfig, classes: &[(String, HypothesisClass)]) -> Report {
    let caps = config.caps;
    let mut report = Report::new(config);
    let started = Instant::now();
    for (i, (label, h)) in classes.iter().enumerate() {
        verify_class(&mut report, &format!("{label}#{i:03}"), h, &caps);
    }
    report.put("classes", classes.len());
    report.time("verify", started);
    report.finish()
}

/// `ceil(log2(k + 1) / 10)` scaled by `d`: the binary-dimension lower bound.
pub fn tightness_floor(d: u32, k: Label) -> u32 {
    (d as f64 * ((k as f64) + 1.0).log2() / 10.0).ceil() as u32
}

/// Threshold-pair values for `k` labels (needs `k >= 5`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdValues {
    pub mld: u32,
    pub binary_dims: Vec<u32>,
    pub amplified_mld: u32,
    pub amplified_binary_dims: Vec<u32>,
}

/// Point-function product values. The product is built over
/// `k_full = 2^B - 1` labels so that no label is clamped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductValues {
    pub k_full: Label,
    pub points: usize,
    pub mld: u32,
    pub binary_dims: Vec<u32>,
}

/// Domain size for the point-function product: `d (B + 1)` points leave
/// room for every bit to be played out separately.
pub fn product_points(d: u32, k: Label) -> usize {
    d as usize * (bits_for(k) + 1)
}

/// `amplify(threshold-pair(k), d)`; `d = 0` stands for a single function.
pub fn threshold_values(k: Label, d: u32, caps: &Caps) -> Result<ThresholdValues> {
    let tp = threshold_pair(k)?;
    let amp = if d == 0 { HypothesisClass::new(k, 1, vec![vec![0]])? } else { amplify(&tp, d as usize, caps.max_class_size)? };
    Ok(ThresholdValues {
        mld: mld(&tp, caps)?,
        binary_dims: binary_dims(&tp, caps)?,
        amplified_mld: mld(&amp, caps)?,
        amplified_binary_dims: binary_dims(&amp, caps)?,
    })
}

/// Product of `B` copies of the `d`-point functions; `d = 0` is a single function.
pub fn product_values(k: Label, d: u32, caps: &Caps) -> Result<ProductValues> {
    let b = bits_for(k);
    let k_full = ((1u32 << b) - 1) as Label;
    let points = product_points(d, k);
    let prod = if d == 0 {
        HypothesisClass::new(k_full, 1, vec![vec![0]])?
    } else {
        point_function_product(d as usize, k_full, points, caps.max_class_size)?
    };
    Ok(ProductValues { k_full, points, mld: mld(&prod, caps)?, binary_dims: binary_dims(&prod, caps)? })
}

fn max_of(v: &[u32]) -> u32 {
    v.iter().copied().max().unwrap_or(0)
}

/// Checks both tightness statements for `k` labels and dimension `d`:
/// the amplified threshold-pair class has MLD `d` and a binary restriction
/// of dimension at least `ceil(d log2(k+1) / 10)`, and the point-function
/// product has MLD `d B` with every binary restriction at `d`.
pub fn cmd_tightness(config: RunConfig, k: Label, d: u32) -> Report {
    let caps = config.caps;
    let mut report = Report::new(config);
    let started = Instant::now();
    if k < 5 {
        report.put("threshold_pair", "not defined for k < 5");
    } else {
        match threshold_values(k, d, &caps) {
            Ok(v) => {
                report.check("threshold-pair MLD = 1", v.mld, 1, v.mld == 1, ANCHOR_THRESHOLD);
                let floor = tightness_floor(1, k);
                let tb = max_of(&v.binary_dims);
                report.check("threshold-pair max binary LD >= ceil(log2(k+1)/10)", tb, floor, tb >= floor, ANCHOR_THRESHOLD);
                report.check("amplified MLD = d", v.amplified_mld, d, v.amplified_mld == d, ANCHOR_AMPLIFY);
                let floor = tightness_floor(d, k);
                let ab = max_of(&v.amplified_binary_dims);
                report.check("amplified max binary LD >= ceil(d log2(k+1)/10)", ab, floor, ab >= floor, ANCHOR_AMPLIFY);
                report.put("threshold_pair", &v);
            }
            Err(e) => report.error("threshold-pair constructions", ANCHOR_THRESHOLD, &e),
        }
    }
    match product_values(k, d, &caps) {
        Ok(v) => {
            let b = bits_for(k) as u32;
            report.check("product MLD = d B", v.mld, d * b, v.mld == d * b, ANCHOR_PRODUCT);
            let ok = v.binary_dims.iter().all(|&x| x == d);
            report.check("product binary LDs all = d", format!("{:?}", v.binary_dims), d, ok, ANCHOR_PRODUCT);
            report.put("product", &v);
        }
        Err(e) => report.error("point-function product", ANCHOR_PRODUCT, &e),
    }
    report.time("tightness", started);
    report.finish()
}

/// One row of the union-bound ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerRow {
    pub x: usize,
    /// `1[g(x) != f(x)]`.
    pub composite_wrong: u32,
    /// `sum_i 1[g_i(x) != f_i(x)]`.
    pub bits_wrong: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndToEndRun {
    pub concept: usize,
    pub n: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub hypothesis: Vec<Label>,
    /// Error under the input distribution, exact.
    pub error: String,
    pub error_f64: f64,
    /// Error on the training sample, exact.
    pub empirical_error: String,
    pub ledger: Vec<LedgerRow>,
    pub union_bound_holds: bool,
    pub dp: Option<CompositionReport>,
}

/// Samples `n` points from `dist` (uniform over the domain when `None`),
/// labels them by the concept, runs the reduction learner and, when
/// `check_dp` is set, verifies privacy exactly over all neighbors of the sample.
#[allow(clippy::too_many_arguments)]
pub fn end_to_end_run(
    h: &HypothesisClass,
    concept: usize,
    n: usize,
    epsilon: f64,
    seed: u64,
    dist: Option<&Distribution<usize, Rational>>,
    check_dp: bool,
    caps: &Caps,
) -> Result<EndToEndRun> {
    if concept >= h.len() {
        return Err(Error::InvalidParameter(format!(
            "concept index {concept} out of range for a class of {} functions",
            h.len()
        )));
    }
    let m = h.domain_size();
    let uniform = Distribution::uniform((0..m).collect())?;
    let dist = dist.unwrap_or(&uniform);
    for &x in dist.support() {
        h.check_point(x)?;
    }
    let f = h.row(concept).to_vec();
    let mut rng = SeededRng::new(seed);
    let weights: Vec<f64> = dist.probs().iter().map(|p| p.to_f64().unwrap_or(0.0)).collect();
    let xs: Vec<usize> = (0..n)
        .map(|_| {
            let u = rng.uniform01();
            let mut acc = 0.0;
            for (x, w) in dist.support().iter().zip(&weights) {
                acc += w;
                if u < acc {
                    return *x;
                }
            }
            *dist.support().last().expect("nonempty")
        })
        .collect();
    let sample = LabeledSample::labeled_by(&xs, &f);
    let bits = h.bits();
    let plan = ReductionPlan::equal_split(n, bits)?;
    let out = reduction_learner(h, &sample, &plan, epsilon, &mut rng)?;

    let ledger: Vec<LedgerRow> = (0..m)
        .map(|x| LedgerRow {
            x,
            composite_wrong: u32::from(out.hypothesis[x] != f[x]),
            bits_wrong: BitIndex::all(bits)
                .zip(&out.part_functions)
                .map(|(i, g)| u32::from(g[x] as u8 != label_bit(f[x], i, bits)))
                .sum(),
        })
        .collect();
    let union_bound_holds = ledger.iter().all(|r| r.composite_wrong <= r.bits_wrong);
    let error = accuracy_eval(&out.hypothesis, dist, &f)?;
    let wrong = xs.iter().filter(|&&x| out.hypothesis[x] != f[x]).count();
    let empirical = if n == 0 { Rational::zero() } else { Rational::new(wrong.into(), n.into()) };
    let dp = if check_dp { Some(parallel_composition_check(h, &sample, &plan, epsilon, caps)?) } else { None };
    Ok(EndToEndRun {
        concept,
        n,
        epsilon,
        seed,
        hypothesis: out.hypothesis,
        error: format_rational(&error),
        error_f64: error.to_f64().unwrap_or(f64::NAN),
        empirical_error: format_rational(&empirical),
        ledger,
        union_bound_holds,
        dp,
    })
}

pub fn cmd_end_to_end(
    config: RunConfig,
    h: &HypothesisClass,
    concept: usize,
    n: usize,
    epsilon: f64,
    dist: Option<&Distribution<usize, Rational>>,
) -> Report {
    let caps = config.caps;
    let seed = config.seed;
    let mut report = Report::new(config);
    let started = Instant::now();
    match end_to_end_run(h, concept, n, epsilon, seed, dist, true, &caps) {
        Ok(run) => {
            let worst = run.ledger.iter().map(|r| r.bits_wrong as i64 - r.composite_wrong as i64).min().unwrap_or(0);
            report.check("union bound holds at every point", worst, 0, run.union_bound_holds, ANCHOR_UNION);
            if let Some(dp) = &run.dp {
                report.check(
                    "composite mechanism passes (eps, 0)",
                    dp.joint.worst_slack,
                    0,
                    dp.joint.passes,
                    ANCHOR_DP,
                );
                report.check(
                    "decoded hypothesis passes (eps, 0)",
                    dp.decoded.worst_slack,
                    0,
                    dp.decoded.passes,
                    ANCHOR_DP,
                );
            }
            report.put("run", &run);
        }
        Err(e) => report.error("end-to-end run", ANCHOR_UNION, &e),
    }
    report.time("end-to-end", started);
    report.finish()
}
