mod common;

use proptest::prelude::*;
use z4ap::search::{exact_r3, exhaustive_r3, heuristic_r3, search, Method, DEFAULT_BUDGET};

use common::{digits_of, naive_progression};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn heuristic_witnesses_are_free(n in 1usize..=4, seed in any::<u64>(), restart in any::<bool>()) {
        let method = if restart { Method::RandomRestart } else { Method::Greedy };
        let r = search(n, method, Some(seed), 40).unwrap();
        prop_assert_eq!(r.best_size, r.witness.len());
        prop_assert!(r.best_size <= 1 << (2 * n));
        prop_assert!(naive_progression(&digits_of(&r.witness)).is_none());
        prop_assert_eq!(r.seed, Some(seed));
        prop_assert_eq!(&r, &heuristic_r3(n, method, seed, 40).unwrap());
    }

    #[test]
    fn greedy_on_the_line_is_optimal(seed in any::<u64>()) {
        prop_assert_eq!(heuristic_r3(1, Method::Greedy, seed, 1).unwrap().best_size, 2);
    }

    #[test]
    fn truncated_search_stays_valid(budget in 0u64..2_000) {
        let r = exact_r3(2, budget).unwrap();
        prop_assert!(r.nodes_explored <= budget.max(1));
        prop_assert!(r.witness.is_progression_free());
        prop_assert!(r.best_size <= 6);
    }
}

#[test]
fn branch_and_bound_is_thread_count_independent() {
    for budget in [DEFAULT_BUDGET, 777, 20_000] {
        let one = in_pool(1, || exact_r3(3, budget).unwrap());
        let four = in_pool(4, || exact_r3(3, budget).unwrap());
        assert_eq!(one, four, "budget {budget}");
    }
}

#[test]
fn exact_methods_agree_in_dimension_two() {
    let a = exact_r3(2, DEFAULT_BUDGET).unwrap();
    let b = exhaustive_r3(2, DEFAULT_BUDGET).unwrap();
    assert!(a.exact && b.exact);
    assert_eq!(a.best_size, common::r3_canonical(2));
    assert_eq!(b.best_size, a.best_size);
}

#[test]
fn tensor_square_of_optimum_is_free() {
    let best = exact_r3(2, DEFAULT_BUDGET).unwrap();
    let sq = best.witness.tensor_power(2, 1 << 16).unwrap();
    assert_eq!(sq.dim(), 4);
    assert_eq!(sq.len(), best.best_size * best.best_size);
    assert!(sq.is_progression_free());
}

#[test]
fn unsupported_dimensions_are_rejected() {
    assert!(exact_r3(0, 10).is_err());
    assert!(exact_r3(9, 10).is_err());
    assert!(search(2, Method::Greedy, None, 1).is_err());
}
