mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use z4ap::cosets::{build_b_and_c, coset_profile, replay_proposition, rich_coset_report};
use z4ap::{Epsilon, GroupVector, PointSet};

use common::{b_and_c_oracle, digits_of};

fn free_set(n: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(0u8..4, n), 0..=max).prop_map(move |vs| {
        let mut kept: Vec<GroupVector> = Vec::new();
        for v in vs {
            kept.push(GroupVector::new(&v).unwrap());
            if !PointSet::new(n, kept.clone()).unwrap().is_progression_free() {
                kept.pop();
            }
        }
        PointSet::new(n, kept).unwrap()
    })
}

fn masks(vs: &BTreeSet<Vec<u8>>) -> Vec<u64> {
    let mut out: Vec<u64> = vs.iter().map(|v| GroupVector::new(v).unwrap().to_binary().unwrap()).collect();
    out.sort_unstable();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn b_and_c_match_digit_oracle(a in free_set(4, 60), picks in prop::collection::vec(any::<bool>(), 16)) {
        let decomp = a.coset_decompose();
        let selection: Vec<usize> = (0..decomp.parts.len()).filter(|&i| picks[i % 16]).collect();
        let bc = build_b_and_c(&decomp, &selection);
        let keys: BTreeSet<Vec<u8>> = selection.iter().map(|&i| decomp.parts[i].0.digits()).collect();
        let (b, c) = b_and_c_oracle(&digits_of(&a), &keys);
        prop_assert_eq!(&bc.b, &masks(&b));
        prop_assert_eq!(&bc.c, &masks(&c));
        prop_assert_eq!(bc.c.len(), selection.len());
        prop_assert!(bc.is_disjoint());
        prop_assert_eq!(bc.complement_of_c().len() + bc.c.len(), 1usize << 4);
    }

    #[test]
    fn profile_is_a_nonincreasing_step_function(a in free_set(4, 60)) {
        let prof = coset_profile(&a);
        prop_assert!(prof.counts.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(prof.step_integral(), a.len() as u64);
        prop_assert_eq!(prof.survival(16.5), 0);
        prop_assert_eq!(prof.survival(0.5), prof.counts.len());
        let xs = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 7.5, 16.0];
        for w in xs.windows(2) {
            prop_assert!(prof.survival(w[0]) >= prof.survival(w[1]));
        }
        prop_assert!((prof.integral(0.0, 17.0) - a.len() as f64).abs() < 1e-9);
    }

    #[test]
    fn rich_cosets_are_few_on_the_grid(a in free_set(3, 40)) {
        for eps in Epsilon::grid() {
            let r = rich_coset_report(&a, eps);
            prop_assert!(r.holds, "{:?}", r);
            if r.vacuous {
                prop_assert_eq!(r.rich_count, 0);
            }
        }
    }

    #[test]
    fn replay_is_clean_on_free_sets(a in free_set(3, 40), k in 0usize..24) {
        let eps = Epsilon::grid()[k];
        let t = replay_proposition(&a, eps).unwrap();
        prop_assert!(t.all_ok, "{:?}", t);
    }
}

#[test]
fn replay_refuses_sets_with_progressions() {
    let a = PointSet::from_strs(&["00", "02", "01"]).unwrap();
    assert!(!a.is_progression_free());
    assert!(replay_proposition(&a, Epsilon::new(1, 5).unwrap()).is_err());
}

#[test]
fn full_coset_is_rich_in_dimension_six() {
    // the smallest case where a coset can reach the threshold
    let f6: Vec<GroupVector> = (0..64u64).map(|m| GroupVector::from_binary(6, m).unwrap()).collect();
    let a = PointSet::new(6, f6).unwrap();
    assert!(a.is_progression_free());
    let eps = Epsilon::new(24, 100).unwrap();
    let r = rich_coset_report(&a, eps);
    assert!(!r.vacuous);
    assert_eq!(r.rich_count, 1);
    assert!(r.holds);
    assert!(replay_proposition(&a, eps).unwrap().all_ok);
}
