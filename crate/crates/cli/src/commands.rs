//! The per-module subcommands. Each returns a finished [`Report`].

use crate::config::RunConfig;
use crate::recipes::{canonical_tree, ANCHOR_BITWISE, ANCHOR_COVER_UPPER, ANCHOR_DIMS, ANCHOR_DP, ANCHOR_SOA};
use crate::report::{Report, Verdict};
use mcld::covers::{build_cover, is_zero_cover, min_cover_size, sauer_bound};
use mcld::dims::family::{family_psi_b, family_psi_bin, family_psi_n};
use mcld::dims::{binary_dims, compute_dimension_report, mld, psi_ld, psi_ld_uniform};
use mcld::online::{
    adversary_search, random_realizable_sequence, run_sequence, BitwiseLearner, ExpertSet, OnlineLearner, Soa,
    WeightedMajority,
};
use mcld::privacy::{
    empirical_distribution, exp_mech_learner, exp_mech_learner_scaled, numeric_dp_slack, parallel_composition_check,
    reduction_learner, dp_verify, accuracy_eval, ReductionPlan,
};
use mcld::repdim::{
    is_probabilistic_representation, repdim_bruteforce, wm_repdim_experiment, ProbabilisticRepresentation, RepVerdict,
};
use mcld::scalar::format_rational;
use mcld::trees::InputLabeledTree;
use mcld::{HypothesisClass, Label, LabeledSample, Result, SeededRng};
use serde_json::Value;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiChoice {
    N,
    Bin,
    B,
    All,
}

pub fn cmd_dims(config: RunConfig, h: &HypothesisClass, psi: PsiChoice, uniform: bool) -> Result<Report> {
    let caps = config.caps;
    let mut report = Report::new(config);
    let started = Instant::now();
    if psi == PsiChoice::All {
        let dims = compute_dimension_report(h, &caps)?;
        for b in &dims.bounds_checked {
            report.check(b.name.clone(), b.lhs, b.rhs, b.holds, ANCHOR_DIMS);
        }
        if dims.psi_b.is_none() {
            report.record("full-family dimension", Verdict::SkippedCap, ANCHOR_DIMS, "3^(k+1) exceeds the family cap");
        }
        report.put("dimensions", &dims);
    } else {
        report.put("mld", mld(h, &caps)?);
        report.put("binary_dims", binary_dims(h, &caps)?);
        if h.k() > 0 {
            let family = match psi {
                PsiChoice::N => family_psi_n(h.k())?,
                PsiChoice::Bin => family_psi_bin(h.k())?,
                _ => family_psi_b(h.k(), &caps)?,
            };
            let v = if uniform { psi_ld_uniform(h, &family, &caps)? } else { psi_ld(h, &family, &caps)? };
            report.put(if uniform { "psi_ld_uniform" } else { "psi_ld" }, v);
        }
    }
    report.time("dims", started);
    Ok(report.finish())
}

pub fn cmd_covers(config: RunConfig, h: &HypothesisClass, tree: Option<InputLabeledTree>, depth: usize, exact: bool) -> Result<(Report, Value)> {
    let caps = config.caps;
    let mut report = Report::new(config);
    let started = Instant::now();
    let z = match tree {
        Some(t) => t,
        None => canonical_tree(depth, h.domain_size())?,
    };
    let n = z.depth();
    let cert = build_cover(h, &z, &caps)?;
    let verified = is_zero_cover(&cert.cover, h, &z)?;
    report.check("built cover is a 0-cover", verified, true, verified, ANCHOR_COVER_UPPER);
    let d = mld(h, &caps)?;
    if n >= d as usize {
        let bound = sauer_bound(d as u64, h.k() as u64, n as u64)?;
        let ok = num_bigint::BigUint::from(cert.size()) <= bound;
        report.check("built cover <= Sauer bound", cert.size(), bound, ok, ANCHOR_COVER_UPPER);
    } else {
        report.record("built cover <= Sauer bound", Verdict::Pass, ANCHOR_COVER_UPPER, "bound needs depth >= MLD; not applicable");
    }
    if exact {
        let min = min_cover_size(h, &z, &caps)?;
        report.check("minimum cover <= built cover", min, cert.size(), min <= cert.size(), ANCHOR_COVER_UPPER);
        report.put("min_cover_size", min);
    }
    report.put("mld", d);
    report.put("depth", n);
    report.put("cover_size", cert.size());
    report.time("covers", started);
    Ok((report.finish(), cert.to_json()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerChoice {
    Soa,
    Bitwise,
    Wm,
}

pub fn cmd_online(config: RunConfig, h: &HypothesisClass, learner: LearnerChoice, horizon: usize, adversary: bool) -> Result<Report> {
    let caps = config.caps;
    let seed = config.seed;
    let mut report = Report::new(config);
    let started = Instant::now();
    let d = mld(h, &caps)?;
    let dims = binary_dims(h, &caps)?;
    let (mistakes, trace) = match learner {
        LearnerChoice::Soa => play(h, Soa::new(h, &caps)?, horizon, adversary, seed, &caps)?,
        LearnerChoice::Bitwise => play(h, BitwiseLearner::new(h, &caps)?, horizon, adversary, seed, &caps)?,
        LearnerChoice::Wm => {
            let wm = WeightedMajority::new(ExpertSet::from_class(h), horizon.max(1), None)?;
            play(h, wm, horizon, adversary, seed, &caps)?
        }
    };
    match learner {
        LearnerChoice::Soa => report.check("SOA mistakes <= MLD", mistakes, d, mistakes <= d as f64, ANCHOR_SOA),
        LearnerChoice::Bitwise => {
            let s: u32 = dims.iter().sum();
            report.check("bit-wise mistakes <= sum of binary LDs", mistakes, s, mistakes <= s as f64, ANCHOR_BITWISE)
        }
        LearnerChoice::Wm => {
            // the target is an expert, so regret equals expected mistakes
            let bound = (0.5 * (h.len() as f64).ln() * horizon as f64).sqrt();
            report.check(
                "weighted majority expected mistakes <= sqrt(ln N T / 2)",
                mistakes,
                bound,
                mistakes <= bound + 1e-9,
                "weighted majority regret",
            )
        }
    }
    report.put("mld", d);
    report.put("binary_dims", dims);
    report.put("trace", trace);
    report.time("online", started);
    Ok(report.finish())
}

fn play<L: OnlineLearner>(
    h: &HypothesisClass,
    learner: L,
    horizon: usize,
    adversary: bool,
    seed: u64,
    caps: &mcld::Caps,
) -> Result<(f64, Value)> {
    let sequence = if adversary {
        adversary_search(h, &learner, horizon, caps)?.sequence
    } else {
        random_realizable_sequence(h, horizon, &mut SeededRng::new(seed)).1
    };
    let mut l = learner;
    let trace = run_sequence(&mut l, &sequence)?;
    Ok((trace.mistakes, serde_json::to_value(&trace).expect("serializable")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    /// Exponential mechanism over a binary class.
    Exp,
    /// The bit-wise reduction over a multiclass class.
    Reduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpMode {
    Exact,
    MonteCarlo { draws: usize },
}

/// Checks privacy over every neighbor of `sample`.
pub fn cmd_dp_verify(
    config: RunConfig,
    h: &HypothesisClass,
    sample: &LabeledSample,
    mechanism: Mechanism,
    epsilon: f64,
    delta: f64,
    mode: DpMode,
) -> Result<Report> {
    let caps = config.caps;
    let seed = config.seed;
    let mut report = Report::new(config);
    let started = Instant::now();
    let rho = (-epsilon / 2.0).exp();
    match (mechanism, mode) {
        (Mechanism::Exp, DpMode::Exact) => {
            let base = exp_mech_learner(h, sample)?;
            let pairs: Vec<_> = sample
                .neighbors(h.domain_size(), h.k())
                .into_iter()
                .map(|(_, s)| Ok((base.clone(), exp_mech_learner(h, &s)?)))
                .collect::<Result<_>>()?;
            let r = dp_verify(&pairs, 2, rho, delta);
            report.check("exponential mechanism passes (eps, delta)", r.worst_slack, 0, r.passes, ANCHOR_DP);
            let doubled = exp_mech_learner_scaled(h, sample, 2)?;
            let neg: Vec<_> = sample
                .neighbors(h.domain_size(), h.k())
                .into_iter()
                .map(|(_, s)| Ok((doubled.clone(), exp_mech_learner_scaled(h, &s, 2)?)))
                .collect::<Result<_>>()?;
            if !neg.is_empty() && h.len() > 1 {
                let r2 = dp_verify(&neg, 2, rho, delta);
                report.check("doubled-eps control fails at eps", r2.worst_slack, 0, !r2.passes, ANCHOR_DP);
            }
            report.put("report", &r);
        }
        (Mechanism::Reduction, DpMode::Exact) => {
            let plan = ReductionPlan::equal_split(sample.len(), h.bits())?;
            let r = parallel_composition_check(h, sample, &plan, epsilon, &caps)?;
            report.check("composite mechanism passes (eps, 0)", r.joint.worst_slack, 0, r.joint.passes, ANCHOR_DP);
            report.check("decoded hypothesis passes (eps, 0)", r.decoded.worst_slack, 0, r.decoded.passes, ANCHOR_DP);
            report.put("report", &r);
        }
        (Mechanism::Exp, DpMode::MonteCarlo { draws }) => {
            let mut rng = SeededRng::new(seed);
            let base = exp_mech_learner(h, sample)?;
            let freq = |d: &mcld::privacy::ExactDistribution<usize>, rng: &mut SeededRng| {
                let mut c = vec![0f64; h.len()];
                for _ in 0..draws {
                    c[d.sample(rho, rng)] += 1.0;
                }
                c.iter().map(|v| v / draws as f64).collect::<Vec<_>>()
            };
            let p = freq(&base, &mut rng);
            let mut worst = f64::NEG_INFINITY;
            for (_, s) in sample.neighbors(h.domain_size(), h.k()) {
                let q = freq(&exp_mech_learner(h, &s)?, &mut rng);
                worst = worst.max(numeric_dp_slack(&p, &q, epsilon, delta));
            }
            let verdict = if worst <= 0.0 { Verdict::Pass } else { Verdict::Indeterminate };
            report.record(
                "exponential mechanism passes (eps, delta), sampled",
                verdict,
                ANCHOR_DP,
                format!("estimated worst slack {worst} from {draws} draws per dataset"),
            );
        }
        (Mechanism::Reduction, DpMode::MonteCarlo { .. }) => {
            return Err(mcld::Error::InvalidParameter("sampled mode supports only the exponential mechanism".into()))
        }
    }
    report.time("dp-verify", started);
    Ok(report.finish())
}

/// Runs the reduction learner on a sample and reports its accuracy on the
/// sample's empirical distribution (and against `concept` when given).
pub fn cmd_learn(
    config: RunConfig,
    h: &HypothesisClass,
    sample: &LabeledSample,
    epsilon: f64,
    concept: Option<usize>,
) -> Result<Report> {
    let seed = config.seed;
    let mut report = Report::new(config);
    let plan = ReductionPlan::equal_split(sample.len(), h.bits())?;
    let out = reduction_learner(h, sample, &plan, epsilon, &mut SeededRng::new(seed))?;
    let xs: Vec<usize> = sample.points().iter().map(|p| p.0).collect();
    let d = empirical_distribution(&xs)?;
    let wrong = sample.errors(&out.hypothesis);
    report.put("plan", plan.sizes());
    report.put("sample_errors", wrong);
    report.put("empirical_error", format_rational(&mcld::Rational::new(wrong.into(), sample.len().into())));
    if let Some(c) = concept {
        let f = h.rows().get(c).ok_or_else(|| mcld::Error::InvalidParameter(format!("no concept {c}")))?;
        report.put("error_on_sample_distribution", format_rational(&accuracy_eval(&out.hypothesis, &d, f)?));
    }
    report.put("output", &out);
    Ok(report.finish())
}

pub struct RepdimOptions {
    pub check: Option<(ProbabilisticRepresentation, f64, f64)>,
    pub bruteforce: bool,
    pub wm_trials: Option<usize>,
}

pub fn cmd_repdim(config: RunConfig, h: &HypothesisClass, opts: RepdimOptions) -> Result<Report> {
    let caps = config.caps;
    let seed = config.seed;
    let mut report = Report::new(config);
    let started = Instant::now();
    let anchor = "probabilistic representation";
    if let Some((rep, alpha, beta)) = &opts.check {
        let c = is_probabilistic_representation(rep, h, *alpha, *beta, 1e-6, &caps)?;
        let verdict = match c.verdict {
            RepVerdict::Valid => Verdict::Pass,
            RepVerdict::Invalid => Verdict::Fail,
            RepVerdict::Indeterminate => Verdict::Indeterminate,
        };
        report.record("representation is valid", verdict, anchor, format!("size {}", rep.size()));
        report.put("check", &c);
    }
    if opts.bruteforce {
        let b = repdim_bruteforce(h, 0.25, 0.125, &caps)?;
        report.check("MLD/32 <= upper bound over searched space", b.lower, b.upper, b.lower <= b.upper + 1e-12, anchor);
        report.put("bruteforce", &b);
        if let Some(best) = &b.best {
            report.put("best_representation", serde_json::from_str::<Value>(&best.to_json()).expect("json"));
        }
    }
    if let Some(trials) = opts.wm_trials {
        let rep = match &opts.check {
            Some((r, _, _)) => r.clone(),
            None => ProbabilisticRepresentation::point_mass(h.clone()),
        };
        let w = wm_repdim_experiment(h, &rep, trials, seed, &caps)?;
        if w.vacuous {
            report.record("MLD/32 <= size", Verdict::Pass, anchor, "vacuously true: MLD = 0");
        } else {
            report.check("expected mistakes >= MLD/2", w.expected_mistakes, w.lower_chain, w.lower_holds, anchor);
            report.check("MLD/32 <= size", w.mld as f64 / 32.0, w.size, w.implication_holds, anchor);
        }
        report.put("wm_experiment", &w);
    }
    report.time("repdim", started);
    Ok(report.finish())
}

/// Parses a JSON list of domain points or labeled pairs into a sample.
pub fn parse_sample(s: &str, h: &HypothesisClass) -> Result<LabeledSample> {
    let v: Value = serde_json::from_str(s).map_err(|e| mcld::Error::Parse(e.to_string()))?;
    let points = v.get("points").unwrap_or(&v);
    let pts: Vec<(usize, Label)> =
        serde_json::from_value(points.clone()).map_err(|e| mcld::Error::Parse(format!("sample: {e}")))?;
    LabeledSample::for_class(pts, h)
}
