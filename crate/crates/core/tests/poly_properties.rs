mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use z4ap::bounds::binom_sum;
use z4ap::field::{FieldPointSet, Fp};
use z4ap::linalg::Matrix;
use z4ap::poly::{evaluation_matrix, monomial_count_fdelta, vanishing_poly, Monomial, MultilinearPoly};

use common::{fdelta_brute, naive_rank};

fn bits(n: usize, x: u64) -> Vec<u32> {
    (0..n).map(|i| ((x >> i) & 1) as u32).collect()
}

fn random_poly(p: u32, n: usize, d: usize, seed: u64) -> MultilinearPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MultilinearPoly::random(Fp::new(p).unwrap(), n, d, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_matches_substitution(seed in any::<u64>(), n in 1usize..=8, c in any::<u64>()) {
        let p = random_poly(2, n, n, seed);
        let c = bits(n, c);
        let q = p.shift(&c).unwrap();
        prop_assert!(q.is_zero() || q.degree() <= p.degree());
        for x in 0..1u64 << n {
            let xs = bits(n, x);
            let sum: Vec<u32> = xs.iter().zip(&c).map(|(a, b)| (a + b) % 2).collect();
            prop_assert_eq!(q.evaluate(&xs).unwrap(), p.evaluate(&sum).unwrap());
        }
    }

    #[test]
    fn shift_is_an_action(seed in any::<u64>(), n in 1usize..=5, c1 in prop::collection::vec(0u32..3, 5), c2 in prop::collection::vec(0u32..3, 5)) {
        let f = Fp::new(3).unwrap();
        let p = random_poly(3, n, n, seed);
        let (c1, c2) = (&c1[..n], &c2[..n]);
        let both: Vec<u32> = c1.iter().zip(c2).map(|(a, b)| f.add(*a, *b)).collect();
        prop_assert_eq!(p.shift(c1).unwrap().shift(c2).unwrap(), p.shift(&both).unwrap());
    }

    #[test]
    fn rank_matches_plain_elimination(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u32>> = (0..20).map(|_| (0..30).map(|_| rng.gen_range(0..p)).collect()).collect();
        let m = Matrix::from_rows(Fp::new(p).unwrap(), 30, &rows);
        let want = naive_rank(rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect(), p as i64);
        prop_assert_eq!(m.rank(), want);
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.len(), 30 - want);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn full_degree_evaluation_has_full_row_rank(n in 1usize..=4, mask in any::<u64>()) {
        let pts: Vec<u64> = (0..1u64 << n).filter(|x| mask >> x & 1 == 1).collect();
        let s = FieldPointSet::from_masks(n, pts.iter().copied());
        let em = evaluation_matrix(&s, n).unwrap();
        prop_assert_eq!(em.matrix.rank(), s.len());
    }

    #[test]
    fn vanishing_polynomial_exists_above_threshold(seed in any::<u64>(), n in 1usize..=6, d in 0usize..=6) {
        let d = d.min(n);
        let dim = usize::try_from(binom_sum(n, d)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.gen_range(0..dim);
        let pts = rand::seq::index::sample(&mut rng, 1 << n, size.min(1 << n));
        let s = FieldPointSet::from_masks(n, pts.into_iter().map(|x| x as u64));
        let p = vanishing_poly(&s, d).unwrap();
        prop_assert!(p.is_some());
        let p = p.unwrap();
        prop_assert!(!p.is_zero() && p.degree() <= d);
        for x in s.points() {
            prop_assert_eq!(p.evaluate(x).unwrap(), 0);
        }
    }
}

#[test]
fn every_function_has_exactly_one_multilinear_form() {
    // n <= 3 exhaustively, n = 4 on a sample of truth tables
    for n in 1..=4usize {
        let size = 1usize << n;
        let tables: Vec<u64> = if n <= 3 {
            (0..1u64 << size).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            (0..2000).map(|_| rng.gen_range(0..1u64 << size)).collect()
        };
        let full = FieldPointSet::full(Fp::TWO, n).unwrap();
        let em = evaluation_matrix(&full, n).unwrap();
        assert_eq!(em.matrix.rank(), size);
        for t in tables {
            // Möbius inversion gives the coefficients
            let coeffs = (0..size as u32).map(|m| {
                let c = Monomial(m).submonomials().fold(0u32, |acc, s| acc ^ ((t >> s.0) & 1) as u32);
                (Monomial(m), c)
            });
            let p = MultilinearPoly::from_terms(Fp::TWO, n, coeffs).unwrap();
            for x in 0..size as u64 {
                assert_eq!(p.evaluate_mask(x) as u64, (t >> x) & 1);
            }
        }
    }
}

#[test]
fn vanishing_off_a_point_gives_its_indicator() {
    for n in 1..=4usize {
        for pt in 0..1u64 << n {
            let s = FieldPointSet::from_masks(n, (0..1u64 << n).filter(|&x| x != pt));
            let p = vanishing_poly(&s, n).unwrap().unwrap();
            for x in 0..1u64 << n {
                assert_eq!(p.evaluate_mask(x), u32::from(x == pt), "n={n} pt={pt} x={x}");
            }
        }
        let everything = FieldPointSet::full(Fp::TWO, n).unwrap();
        assert!(vanishing_poly(&everything, n).unwrap().is_none());
    }
}

#[test]
fn fdelta_matches_enumeration() {
    for n in 1..=6 {
        for d in 0..=6 {
            for delta in 0..=4 {
                assert_eq!(monomial_count_fdelta(n, d, delta), fdelta_brute(n, d, delta).into(), "n={n} d={d} delta={delta}");
            }
            assert_eq!(monomial_count_fdelta(n, d, 1), binom_sum(n, d.min(n)));
            assert_eq!(monomial_count_fdelta(n, d, d), fdelta_brute(n, d, d).into());
        }
    }
}
