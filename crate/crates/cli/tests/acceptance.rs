//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false`; the process exits nonzero when any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use common::*;
use mcld::construct::{all_functions, point_function_product, random_class, threshold_pair, thresholds, RandomShape};
use mcld::covers::{build_cover, lower_bound_witness, min_cover_size, sauer_bound};
use mcld::dims::family::{family_psi_b, family_psi_bin, family_psi_n};
use mcld::dims::{binary_dims, compute_dimension_report, find_shattered_psi_tree, mld, psi_ld, psi_ld_uniform};
use mcld::online::{adversary_search, default_rate, wm_exact_worst_regret, BitwiseLearner, Soa};
use mcld::privacy::{dp_verify, exp_mech_learner, exp_mech_learner_scaled, parallel_composition_check, ReductionPlan};
use mcld::repdim::game::{solve_game, Finish};
use mcld::repdim::{
    is_probabilistic_representation, repdim_bruteforce, wm_repdim_experiment, ProbabilisticRepresentation, RepVerdict,
};
use mcld::{Caps, HypothesisClass, LabeledSample, SeededRng};
use mcld_cli::commands::{cmd_dp_verify, DpMode, Mechanism};
use mcld_cli::recipes::{end_to_end_run, product_values, random_classes, threshold_values, tightness_floor};
use mcld_cli::RunConfig;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn constructed() -> Vec<HypothesisClass> {
    let mut out = vec![
        HypothesisClass::new(1, 1, vec![vec![0]]).unwrap(),
        thresholds(6).unwrap(),
        all_functions(2, 2, 100).unwrap(),
        all_functions(3, 2, 100).unwrap(),
        point_function_product(1, 3, 4, 4096).unwrap(),
    ];
    for k in [5, 7, 9, 15] {
        out.push(threshold_pair(k).unwrap());
    }
    out
}

fn dimension_bounds() -> Outcome {
    let caps = Caps::default();
    let mut classes = ok(random_classes(200, 2024))?;
    classes.extend(constructed());
    let mut checks = 0;
    for (i, h) in classes.iter().enumerate() {
        let r = ok(compute_dimension_report(h, &caps))?;
        ensure!(r.all_hold(), "class {i}: {:?}", r.violations().collect::<Vec<_>>());
        checks += r.bounds_checked.len();
    }
    Ok(format!("{} classes, {checks} inequalities", classes.len()))
}

fn engine_matches_explicit_trees() -> Outcome {
    let caps = Caps::default();
    let mut rng = SeededRng::new(77);
    let shape = RandomShape { max_domain: 3, max_k: 3, max_size: 12 };
    let mut compared = 0;
    for i in 0..120 {
        let h = ok(random_class(&mut rng, shape))?;
        let k = h.k();
        let d = ok(mld(&h, &caps))?;
        ensure!(d == oracle_mld(&h), "class {i}: MLD {d} vs oracle {}", oracle_mld(&h));
        if d > 3 {
            continue;
        }
        let pairs = ok(psi_ld(&h, &ok(family_psi_n(k))?, &caps))?;
        ensure!(pairs == oracle_psi_ld(&h, &family_pairs(k)), "class {i}: pair family");
        let bin = ok(family_psi_bin(k))?;
        ensure!(ok(psi_ld(&h, &bin, &caps))? == oracle_psi_ld(&h, &family_bits(k)), "class {i}: bit family");
        ensure!(
            ok(psi_ld_uniform(&h, &bin, &caps))? == oracle_psi_ld_uniform(&h, &family_bits(k)),
            "class {i}: uniform bit family"
        );
        let full = ok(family_psi_b(k, &caps))?;
        ensure!(ok(psi_ld(&h, &full, &caps))? == oracle_psi_ld(&h, &family_all(k)), "class {i}: full family");
        for (j, dj) in ok(binary_dims(&h, &caps))?.into_iter().enumerate() {
            ensure!(dj == oracle_mld(&bit_restriction(&h, j + 1)), "class {i}: binary restriction {}", j + 1);
        }
        compared += 1;
    }
    Ok(format!("{compared} classes agree on MLD, all three families and every restriction"))
}

fn cover_sandwich() -> Outcome {
    let caps = Caps::default();
    let mut rng = SeededRng::new(5);
    let shape = RandomShape { max_domain: 3, max_k: 3, max_size: 8 };
    let mut witnesses = 0;
    for i in 0..120 {
        let h = ok(random_class(&mut rng, shape))?;
        let d = ok(mld(&h, &caps))?;
        let n = (d as usize).clamp(1, 3);
        let labels: Vec<usize> = (0..(1 << n) - 1).map(|_| rng.below(h.domain_size())).collect();
        let z = ok(mcld::trees::InputLabeledTree::new(n, labels))?;
        let cert = ok(build_cover(&h, &z, &caps))?;
        let cover: Vec<Vec<u16>> = cert.cover.iter().map(|t| t.labels().to_vec()).collect();
        ensure!(cert.verified && oracle_is_cover(&h, z.labels(), n, &cover), "class {i}: built set is not a cover");
        let min = ok(min_cover_size(&h, &z, &caps))?;
        ensure!(min == oracle_min_cover(&h, z.labels(), n), "class {i}: minimum cover differs from oracle");
        let sauer = ok(sauer_bound(d as u64, h.k() as u64, n as u64))?;
        ensure!(min <= cert.size(), "class {i}: min above built");
        ensure!(BigInt::from(cert.size()) <= BigInt::from(sauer), "class {i}: built above the Sauer bound");

        let fam = ok(family_psi_b(h.k(), &caps))?;
        let db = ok(psi_ld(&h, &fam, &caps))? as usize;
        if (1..=2).contains(&db) {
            let t = ok(find_shattered_psi_tree(&h, &fam, db, &caps))?.ok_or("no tree at the dimension")?;
            let w = ok(lower_bound_witness(&h, &t))?;
            let z = w.tree.clone().ok_or("empty witness")?;
            let min = ok(min_cover_size(&h, &z, &caps))?;
            ensure!(w.pairwise_conflicting && min >= 1 << db, "class {i}: witness cover {min} < 2^{db}");
            witnesses += 1;
        }
    }
    Ok(format!("120 sandwiches, {witnesses} shattered-tree witnesses"))
}

fn tightness() -> Outcome {
    let caps = Caps::default();
    let mut rows = Vec::new();
    for k in [5u16, 7, 9, 15] {
        let tp = ok(threshold_pair(k))?;
        ensure!(oracle_mld(&tp) == 1, "k={k}: oracle MLD of threshold pair");
        for l in 1..=3u32 {
            let v = ok(threshold_values(k, l, &caps))?;
            ensure!(v.mld == 1, "k={k}: threshold-pair MLD {}", v.mld);
            let floor = tightness_floor(l, k);
            let top = v.amplified_binary_dims.iter().copied().max().unwrap_or(0);
            ensure!(v.amplified_mld == l, "k={k} l={l}: amplified MLD {}", v.amplified_mld);
            ensure!(top >= floor, "k={k} l={l}: binary LD {top} < {floor}");
            rows.push(format!("k={k},l={l}:{top}>={floor}"));
        }
    }
    for (d, k) in [(1u32, 1u16), (1, 3), (2, 1), (2, 3)] {
        let v = ok(product_values(k, d, &caps))?;
        let b = bits(k) as u32;
        ensure!(v.mld == d * b, "d={d} B={b}: product MLD {}", v.mld);
        ensure!(v.binary_dims.iter().all(|&x| x == d), "d={d} B={b}: binary LDs {:?}", v.binary_dims);
        if d == 1 {
            let h = ok(point_function_product(d as usize, v.k_full, v.points, caps.max_class_size))?;
            ensure!(oracle_mld(&h) == d * b, "d={d} B={b}: oracle disagrees");
        }
        rows.push(format!("d={d},B={b}:MLD {}", v.mld));
    }
    Ok(rows.join(" "))
}

fn online_bounds() -> Outcome {
    let caps = Caps::default();
    let mut rng = SeededRng::new(31);
    let shape = RandomShape { max_domain: 3, max_k: 3, max_size: 10 };
    for i in 0..80 {
        let h = ok(random_class(&mut rng, shape))?;
        let d = ok(mld(&h, &caps))?;
        let dims = ok(binary_dims(&h, &caps))?;
        let soa = ok(adversary_search(&h, &ok(Soa::new(&h, &caps))?, d as usize + 1, &caps))?;
        ensure!(soa.mistakes <= d as f64, "class {i}: SOA made {} > {d}", soa.mistakes);
        let bw = ok(adversary_search(&h, &ok(BitwiseLearner::new(&h, &caps))?, d as usize + 1, &caps))?;
        let sum: u32 = dims.iter().sum();
        ensure!(bw.mistakes <= sum as f64, "class {i}: bit-wise made {} > {sum}", bw.mistakes);
    }
    let mut worst_margin = f64::INFINITY;
    for n in 1..=4usize {
        for t in 1..=6usize {
            let eta = default_rate(n, t);
            let r = ok(wm_exact_worst_regret(n, t, eta))?;
            let brute = oracle_wm_regret(n, t, eta);
            ensure!((r - brute).abs() < 1e-9, "N={n} T={t}: {r} vs enumeration {brute}");
            let bound = (0.5 * (n as f64).ln() * t as f64).sqrt();
            ensure!(r <= bound + 1e-9, "N={n} T={t}: regret {r} > {bound}");
            worst_margin = worst_margin.min(bound - r);
        }
    }
    Ok(format!("80 classes under the adversary; WM smallest margin {worst_margin:.3e}"))
}

fn exact_privacy() -> Outcome {
    let caps = Caps::default();
    let mut rng = SeededRng::new(8);
    let binary = RandomShape { max_domain: 3, max_k: 1, max_size: 6 };
    let mut controls = 0;
    for i in 0..40 {
        let h = ok(random_class(&mut rng, binary))?;
        let n = 1 + rng.below(8);
        let s = LabeledSample::new((0..n).map(|_| (rng.below(h.domain_size()), rng.below(2) as u16)).collect());
        let base = ok(exp_mech_learner(&h, &s))?;
        let rho = (-0.5f64).exp();
        let pairs: Vec<_> = s
            .neighbors(h.domain_size(), 1)
            .into_iter()
            .map(|(_, t)| exp_mech_learner(&h, &t).map(|d| (base.clone(), d)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let r = dp_verify(&pairs, 2, rho, 0.0);
        ensure!(r.certified && r.passes, "class {i}: exponential mechanism not certified");
        if h.len() > 1 {
            let doubled = ok(exp_mech_learner_scaled(&h, &s, 2))?;
            let neg: Vec<_> = s
                .neighbors(h.domain_size(), 1)
                .into_iter()
                .map(|(_, t)| exp_mech_learner_scaled(&h, &t, 2).map(|d| (doubled.clone(), d)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            // the control must fail exactly when the true privacy loss of
            // the doubled mechanism, computed directly, exceeds the budget
            let loss = |t: &LabeledSample| -> Vec<f64> {
                let w: Vec<f64> = h.rows().iter().map(|f| (-(t.errors(f) as f64)).exp()).collect();
                let z: f64 = w.iter().sum();
                w.into_iter().map(|v| v / z).collect()
            };
            let p = loss(&s);
            let separable = s.neighbors(h.domain_size(), 1).iter().any(|(_, t)| {
                p.iter().zip(loss(t)).any(|(a, b)| (a / b).ln().abs() > 1.0 + 1e-9)
            });
            ensure!(dp_verify(&neg, 2, rho, 0.0).passes != separable, "class {i}: doubled control");
            controls += usize::from(separable);
        }
    }
    let h = ok(point_function_product(1, 3, 4, caps.max_class_size))?;
    for n in [2usize, 4, 6, 8] {
        let f = h.row(rng.below(h.len())).to_vec();
        let xs: Vec<usize> = (0..n).map(|_| rng.below(4)).collect();
        let s = LabeledSample::labeled_by(&xs, &f);
        let plan = ok(ReductionPlan::equal_split(n, 2))?;
        let r = ok(parallel_composition_check(&h, &s, &plan, 1.0, &caps))?;
        ensure!(r.passes() && r.joint.certified, "reduction on {n} points not certified");
    }
    let t = thresholds(3).unwrap();
    let s = LabeledSample::new(vec![(0, 1), (2, 0)]);
    let report = ok(cmd_dp_verify(RunConfig::new("dp-verify", 0, caps), &t, &s, Mechanism::Exp, 1.0, 0.0, DpMode::Exact))?;
    ensure!(report.passed() && report.count(mcld_cli::Verdict::Pass) == 2, "dp-verify command");
    Ok(format!("40 exp-mech datasets ({controls} doubled controls rejected), 4 reduction datasets"))
}

fn end_to_end() -> Outcome {
    let caps = Caps::default();
    let h = ok(point_function_product(1, 3, 4, caps.max_class_size))?;
    for seed in 0..100u64 {
        let concept = (seed as usize * 7) % h.len();
        let run = ok(end_to_end_run(&h, concept, 40, 1.0, seed, None, false, &caps))?;
        ensure!(run.union_bound_holds, "seed {seed}: union bound violated");
    }
    let snap = ok(end_to_end_run(&h, 0, 200, 2.0, 1, None, true, &caps))?;
    ensure!(snap.error == "0/1", "snapshot error {}", snap.error);
    ensure!(snap.hypothesis == vec![0, 0, 0, 3], "snapshot hypothesis {:?}", snap.hypothesis);
    let dp = snap.dp.ok_or("missing privacy check")?;
    ensure!(dp.passes(), "snapshot privacy check failed");
    Ok("100 seeded runs; seed 1 snapshot error 0/1, hypothesis [0,0,0,3], privacy certified".into())
}

fn representations() -> Outcome {
    let caps = Caps::default();
    let mut rng = SeededRng::new(19);
    for i in 0..60 {
        let r = 1 + rng.below(4);
        let c = 1 + rng.below(4);
        let m: Vec<Vec<_>> = (0..r).map(|_| (0..c).map(|_| q(rng.below(5) as i64, 4)).collect()).collect();
        let value = oracle_game_value(&m);
        let v = value.to_f64().unwrap();
        if let Ok(b) = solve_game::<f64>(&m, 1e-3, 20_000, Finish::SelfPlayOnly) {
            ensure!(b.contains(v, 1e-9), "game {i}: bracket [{}, {}] misses {v}", b.lower, b.upper);
        }
        let e = ok(solve_game::<f64>(&m, 1e-6, 2_000, Finish::Exact))?;
        ensure!(e.exact.as_ref() == Some(&value), "game {i}: exact value differs");
    }
    let tiny = RandomShape { max_domain: 3, max_k: 2, max_size: 5 };
    for i in 0..25 {
        let h = ok(random_class(&mut rng, tiny))?;
        let rep = ProbabilisticRepresentation::point_mass(h.clone());
        let check = ok(is_probabilistic_representation(&rep, &h, 0.25, 0.125, 1e-9, &caps))?;
        ensure!(check.verdict == RepVerdict::Valid, "class {i}: self-representation rejected");
        let b = ok(repdim_bruteforce(&h, 0.25, 0.125, &caps))?;
        ensure!(b.lower <= b.upper + 1e-12, "class {i}: MLD/32 = {} > {}", b.lower, b.upper);
        let best = b.best.ok_or("no representation")?;
        let wm = ok(wm_repdim_experiment(&h, &best, 20, i as u64, &caps))?;
        ensure!(wm.implication_holds, "class {i}: MLD/32 > size in the online chain");
    }
    Ok("60 games, 25 classes represented".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("dimension inequalities on random and constructed classes", dimension_bounds),
        ("engine dimensions equal explicit-tree search", engine_matches_explicit_trees),
        ("0-cover sandwich and shattered-tree lower bound", cover_sandwich),
        ("threshold-pair and point-product tightness values", tightness),
        ("online mistake bounds and weighted-majority regret", online_bounds),
        ("exact privacy certificates and doubled-budget control", exact_privacy),
        ("end-to-end reduction runs and frozen snapshot", end_to_end),
        ("game brackets, self-representation and MLD/32 <= size", representations),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
