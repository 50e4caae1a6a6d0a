mod common;

use common::*;
use mcld::dims::mld;
use mcld::repdim::game::{solve_game, Finish};
use mcld::repdim::{
    is_probabilistic_representation, repdim_bruteforce, repr_to_private_learner, worst_case_repr_error,
    wm_repdim_experiment, ProbabilisticRepresentation, RepVerdict,
};
use mcld::{Caps, HypothesisClass, LabeledSample};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Vec<Vec<BigRational>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0i64..=4, c), r)
            .prop_map(|m| m.into_iter().map(|row| row.into_iter().map(|v| q(v, 4)).collect()).collect())
    })
}

fn tiny_class() -> impl Strategy<Value = HypothesisClass> {
    (1u16..=2, 1usize..=3).prop_flat_map(|(k, m)| {
        prop::collection::vec(prop::collection::vec(0..=k, m), 1..=4)
            .prop_map(move |rows| HypothesisClass::new(k, m, rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn game_values_match_vertex_enumeration(m in matrix()) {
        let oracle = oracle_game_value(&m);
        let exact = solve_game::<f64>(&m, 1e-9, 20_000, Finish::Exact).unwrap();
        prop_assert_eq!(exact.exact.clone().unwrap(), oracle.clone());
        let v = oracle.to_f64().unwrap();
        // self-play brackets always contain the value, converged or not
        if let Ok(b) = solve_game::<f64>(&m, 0.05, 5_000, Finish::SelfPlayOnly) {
            prop_assert!(b.contains(v, 1e-9));
        }
        let b32 = solve_game::<f32>(&m, 1e-3, 5_000, Finish::Exact).unwrap();
        prop_assert!((f64::from(b32.lower) - v).abs() < 1e-6);
    }

    #[test]
    fn repr_error_is_the_disagreement_game(f_class in tiny_class(), g_class in tiny_class()) {
        prop_assume!(f_class.domain_size() == g_class.domain_size());
        let caps = Caps::default();
        let f = f_class.row(0);
        let m: Vec<Vec<BigRational>> = (0..f.len())
            .map(|x| g_class.rows().iter().map(|h| q(i64::from(h[x] != f[x]), 1)).collect())
            .collect();
        let v = worst_case_repr_error(f, &g_class, 1e-9, &caps).unwrap();
        prop_assert_eq!(v.exact.unwrap(), oracle_game_value(&m));
    }

    #[test]
    fn classes_represent_themselves(h in tiny_class()) {
        let caps = Caps::default();
        let rep = ProbabilisticRepresentation::point_mass(h.clone());
        let check = is_probabilistic_representation(&rep, &h, 0.25, 0.125, 1e-9, &caps).unwrap();
        prop_assert_eq!(check.verdict, RepVerdict::Valid);
        let b = repdim_bruteforce(&h, 0.25, 0.125, &caps).unwrap();
        prop_assert!(b.upper <= rep.size() + 1e-12);
        prop_assert!(b.lower <= b.upper + 1e-12);
        prop_assert_eq!(b.mld, mld(&h, &caps).unwrap());
    }
}

#[test]
fn one_member_subclass_misses_targets() {
    let caps = Caps::default();
    let h = HypothesisClass::new(1, 2, vec![vec![0, 0], vec![1, 1]]).unwrap();
    let only_zero = HypothesisClass::new(1, 2, vec![vec![0, 0]]).unwrap();
    let rep = ProbabilisticRepresentation::point_mass(only_zero);
    let check = is_probabilistic_representation(&rep, &h, 0.25, 0.125, 1e-9, &caps).unwrap();
    assert_eq!(check.verdict, RepVerdict::Invalid);
}

#[test]
fn representation_learner_and_wm_chain() {
    let caps = Caps::default();
    let h = HypothesisClass::new(1, 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
    let rep = ProbabilisticRepresentation::new(
        vec![h.clone(), HypothesisClass::new(1, 2, vec![vec![0, 1]]).unwrap()],
        vec![q(3, 4), q(1, 4)],
    )
    .unwrap();
    let s = LabeledSample::labeled_by(&[0, 1], h.row(1));
    let d = repr_to_private_learner(&rep, &s).unwrap();
    let rho = (-0.5f64).exp();
    let total: f64 = d.probs(rho).iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(d.prob(&vec![0, 1], rho) >= 0.25);

    let report = wm_repdim_experiment(&h, &rep, 200, 3, &caps).unwrap();
    assert_eq!(report.mld, 1);
    assert!(report.implication_holds);
    assert!(report.expected_mistakes >= 0.0);
    assert!(!report.vacuous);
    let whole = ProbabilisticRepresentation::new(vec![h.clone()], vec![q(1, 1)]).unwrap();
    assert_eq!(whole.size(), (3f64).ln());
}
