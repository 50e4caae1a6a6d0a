use mcld::class::{label_bit, BitIndex};
use mcld::privacy::{
    accuracy_eval, dp_verify, empirical_distribution, exp_mech_learner, exp_mech_learner_scaled,
    parallel_composition_check, reduction_distribution, reduction_learner, ReductionPlan,
};
use mcld::{Caps, HypothesisClass, LabeledSample, SeededRng};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn binary_class_and_sample() -> impl Strategy<Value = (HypothesisClass, LabeledSample)> {
    (1usize..=3).prop_flat_map(|m| {
        (
            prop::collection::vec(prop::collection::vec(0u16..=1, m), 1..=6),
            prop::collection::vec((0..m, 0u16..=1), 1..=4),
        )
            .prop_map(move |(rows, pts)| (HypothesisClass::new(1, m, rows).unwrap(), LabeledSample::new(pts)))
    })
}

/// Output probabilities of the mechanism, computed directly in floating point.
fn direct_probs(h: &HypothesisClass, s: &LabeledSample, eps: f64) -> Vec<f64> {
    let w: Vec<f64> = h
        .rows()
        .iter()
        .map(|f| {
            let errs = s.points().iter().filter(|&&(x, y)| f[x] != y).count();
            (-eps * errs as f64 / 2.0).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

fn max_log_ratio(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a / b).ln().abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exp_mech_is_private((h, s) in binary_class_and_sample(), eps in 0.1f64..3.0) {
        let rho = (-eps / 2.0).exp();
        let base = exp_mech_learner(&h, &s).unwrap();
        let direct = direct_probs(&h, &s, eps);
        for (a, b) in base.probs(rho).iter().zip(&direct) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let mut pairs = Vec::new();
        for (_, n) in s.neighbors(h.domain_size(), 1) {
            prop_assert!(max_log_ratio(&direct, &direct_probs(&h, &n, eps)) <= eps + 1e-9);
            pairs.push((base.clone(), exp_mech_learner(&h, &n).unwrap()));
        }
        let report = dp_verify(&pairs, 2, rho, 0.0);
        prop_assert!(report.certified && report.passes);
        // post-processing: any map of the output keeps the guarantee
        let mapped: Vec<_> = pairs.iter().map(|(p, q)| (p.map(|i| h.row(*i)[0]), q.map(|i| h.row(*i)[0]))).collect();
        prop_assert!(dp_verify(&mapped, 2, rho, 0.0).passes);
    }

    #[test]
    fn doubled_budget_is_caught_when_scores_differ((h, s) in binary_class_and_sample()) {
        let rho = (-1.0f64 / 2.0).exp();
        let base = exp_mech_learner_scaled(&h, &s, 2).unwrap();
        let pairs: Vec<_> = s
            .neighbors(h.domain_size(), 1)
            .into_iter()
            .map(|(_, n)| (base.clone(), exp_mech_learner_scaled(&h, &n, 2).unwrap()))
            .collect();
        let report = dp_verify(&pairs, 2, rho, 0.0);
        // the true ratio reaches e^(2 eps) whenever one neighbour moves one
        // function's error count and leaves another's fixed
        let direct = direct_probs(&h, &s, 2.0);
        let worst = s
            .neighbors(h.domain_size(), 1)
            .iter()
            .map(|(_, n)| max_log_ratio(&direct, &direct_probs(&h, n, 2.0)))
            .fold(0.0, f64::max);
        prop_assert_eq!(report.passes, worst <= 1.0 + 1e-9);
    }
}

fn product_class_small() -> HypothesisClass {
    // two label bits over two points
    HypothesisClass::new(3, 2, vec![vec![0, 1], vec![2, 3], vec![3, 3], vec![1, 0]]).unwrap()
}

#[test]
fn reduction_matches_independent_product() {
    let h = product_class_small();
    let caps = Caps::default();
    let s = LabeledSample::labeled_by(&[0, 1, 1, 0], h.row(1));
    let plan = ReductionPlan::equal_split(4, 2).unwrap();
    let eps = 1.0;
    let rho = (-eps / 2.0f64).exp();
    let joint = reduction_distribution(&h, &s, &plan, &caps).unwrap();
    let restrictions = h.binary_restrictions();
    for (outcome, p) in joint.outcomes().iter().zip(joint.probs(rho)) {
        let mut expected = 1.0;
        for (bit, (range, r)) in plan.ranges().into_iter().zip(&restrictions).enumerate() {
            let index = BitIndex::new(bit + 1, 2).unwrap();
            let part = LabeledSample::new(
                s.points()[range].iter().map(|&(x, y)| (x, label_bit(y, index, 2) as u16)).collect(),
            );
            expected *= direct_probs(r, &part, eps)[outcome[bit]];
        }
        assert!((p - expected).abs() < 1e-12);
    }
    let report = parallel_composition_check(&h, &s, &plan, eps, &caps).unwrap();
    assert!(report.passes());
    assert!(report.joint.certified);
}

#[test]
fn union_bound_over_bits() {
    let h = product_class_small();
    let mut rng = SeededRng::new(5);
    for trial in 0..200 {
        let f = h.row(trial % h.len()).to_vec();
        let xs: Vec<usize> = (0..6).map(|_| rng.below(2)).collect();
        let s = LabeledSample::labeled_by(&xs, &f);
        let plan = ReductionPlan::equal_split(6, 2).unwrap();
        let out = reduction_learner(&h, &s, &plan, 0.5, &mut rng).unwrap();
        let d = empirical_distribution(&[0, 1]).unwrap();
        let err = accuracy_eval(&out.hypothesis, &d, &f).unwrap();
        let mut bits_err = BigRational::zero();
        for (i, g) in out.part_functions.iter().enumerate() {
            let index = BitIndex::new(i + 1, 2).unwrap();
            let fi: Vec<u16> = f.iter().map(|&y| label_bit(y, index, 2) as u16).collect();
            bits_err += accuracy_eval(g, &d, &fi).unwrap();
        }
        assert!(err <= bits_err, "trial {trial}");
    }
}
