mod common;

use common::*;
use mcld::covers::{build_cover, lower_bound_witness, min_cover_size, sauer_bound, sauer_bound_closed};
use mcld::dims::family::family_psi_b;
use mcld::dims::{find_shattered_psi_tree, mld, psi_ld};
use mcld::trees::InputLabeledTree;
use mcld::{Caps, HypothesisClass};
use num_bigint::BigInt;
use proptest::prelude::*;

fn class_and_tree() -> impl Strategy<Value = (HypothesisClass, InputLabeledTree)> {
    (1u16..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(k, m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0..=k, m), 1..=8),
            prop::collection::vec(0..m, (1 << n) - 1),
        )
            .prop_map(move |(rows, labels)| {
                (HypothesisClass::new(k, m, rows).unwrap(), InputLabeledTree::new(n, labels).unwrap())
            })
    })
}

#[test]
fn sauer_matches_direct_sum() {
    for d in 0..5u64 {
        for k in 1..6u64 {
            for n in d..9 {
                let ours = sauer_bound(d, k, n).unwrap();
                assert_eq!(BigInt::from(ours), oracle_sauer(d, k, n));
                if d > 0 {
                    let closed: f64 = sauer_bound_closed(d, k, n).unwrap();
                    assert!(oracle_sauer(d, k, n) <= BigInt::from(closed.ceil() as u64));
                }
            }
        }
    }
    assert!(sauer_bound(3, 2, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn built_cover_is_a_cover_and_sandwiched((h, z) in class_and_tree()) {
        let caps = Caps::default();
        let cert = build_cover(&h, &z, &caps).unwrap();
        prop_assert!(cert.verified);
        let cover: Vec<Vec<u16>> = cert.cover.iter().map(|t| t.labels().to_vec()).collect();
        prop_assert!(oracle_is_cover(&h, z.labels(), z.depth(), &cover));
        let min = min_cover_size(&h, &z, &caps).unwrap();
        prop_assert_eq!(min, oracle_min_cover(&h, z.labels(), z.depth()));
        prop_assert!(min <= cert.size());
        let d = mld(&h, &caps).unwrap() as u64;
        let n = z.depth() as u64;
        if n >= d {
            let s = sauer_bound(d, h.k() as u64, n).unwrap();
            prop_assert!(BigInt::from(cert.size()) <= BigInt::from(s));
        }
    }

    #[test]
    fn shattered_trees_force_large_covers(
        rows in (1u16..=3, 1usize..=3).prop_flat_map(|(k, m)| {
            prop::collection::vec(prop::collection::vec(0..=k, m), 1..=8)
                .prop_map(move |r| HypothesisClass::new(k, m, r).unwrap())
        })
    ) {
        let h = rows;
        let caps = Caps::default();
        let fam = family_psi_b(h.k(), &caps).unwrap();
        let db = psi_ld(&h, &fam, &caps).unwrap() as usize;
        prop_assume!(db >= 1);
        let t = find_shattered_psi_tree(&h, &fam, db, &caps).unwrap().unwrap();
        let w = lower_bound_witness(&h, &t).unwrap();
        prop_assert!(w.pairwise_conflicting);
        prop_assert_eq!(w.required_size(), 1 << db);
        let z = w.tree.unwrap();
        let min = min_cover_size(&h, &z, &caps).unwrap();
        prop_assert!(min >= 1 << db);
        prop_assert_eq!(min, oracle_min_cover(&h, z.labels(), z.depth()));
    }
}

#[test]
fn constant_tree_cover_counts_labels() {
    let caps = Caps::default();
    let h = HypothesisClass::new(2, 2, vec![vec![0, 0], vec![1, 0], vec![2, 1]]).unwrap();
    let z = InputLabeledTree::constant(2, 0).unwrap();
    assert_eq!(min_cover_size(&h, &z, &caps).unwrap(), 3);
    assert_eq!(build_cover(&h, &z, &caps).unwrap().size(), 3);
}
