mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use z4ap::field::{FieldPointSet, Fp};
use z4ap::lemma::{
    check_lemma, difference_expansion, independence_witness, largest_vanishing_difference_set, tightness_probe,
    LemmaCertificate,
};
use z4ap::poly::{vanishing_poly, Monomial, MultilinearPoly};

use common::expand_difference;

fn random_poly(p: u32, n: usize, d: usize, rng: &mut ChaCha8Rng) -> MultilinearPoly {
    MultilinearPoly::random(Fp::new(p).unwrap(), n, d, rng).unwrap()
}

fn random_points(p: u32, n: usize, k: usize, rng: &mut ChaCha8Rng) -> FieldPointSet {
    let pts: Vec<Vec<u32>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect()).collect();
    FieldPointSet::new(Fp::new(p).unwrap(), n, pts).unwrap()
}

fn dot(f: Fp, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_matches_product_expansion(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5]), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_poly(p, n, n, &mut rng);
        let exp = difference_expansion(&poly);
        let want = expand_difference(&poly);
        let got: std::collections::BTreeMap<(u32, u32), u32> =
            exp.coeffs.iter().map(|(&(i, j), &c)| ((i.0, j.0), c)).filter(|&(_, c)| c != 0).collect();
        prop_assert_eq!(got, want);
        for (&(i, j), _) in &exp.coeffs {
            prop_assert!(i.is_disjoint(j));
        }
    }

    #[test]
    fn expansion_evaluates_to_difference(seed in any::<u64>(), n in 1usize..=4) {
        let f = Fp::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_poly(3, n, n, &mut rng);
        let exp = difference_expansion(&poly);
        for _ in 0..50 {
            let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let y: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let diff: Vec<u32> = x.iter().zip(&y).map(|(a, b)| f.sub(*a, *b)).collect();
            prop_assert_eq!(exp.evaluate(&x, &y), poly.evaluate(&diff).unwrap());
        }
    }

    #[test]
    fn gram_entries_are_difference_values(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), n in 1usize..=6, d in 0usize..=6, k in 1usize..=24) {
        let d = d.min(n);
        let f = Fp::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_poly(p, n, d, &mut rng);
        let pts = random_points(p, n, k, &mut rng);
        let cert = LemmaCertificate::build(&poly, &pts, d).unwrap();
        prop_assert_eq!(cert.u[0].len(), 2 * cert.m);
        for (a, x) in pts.points().iter().enumerate() {
            prop_assert_eq!(cert.gram[a][a], poly.coeff(Monomial::ONE));
            for (b, y) in pts.points().iter().enumerate() {
                let diff: Vec<u32> = x.iter().zip(y).map(|(s, t)| f.sub(*s, *t)).collect();
                let want = poly.evaluate(&diff).unwrap();
                prop_assert_eq!(dot(f, &cert.u[a], &cert.v[b]), want);
                prop_assert_eq!(cert.gram[a][b], want);
            }
        }
        prop_assert!(cert.u_rank() <= 2 * cert.m);
    }

    #[test]
    fn lemma_never_fails(seed in any::<u64>(), n in 1usize..=5, d in 0usize..=4) {
        let d = d.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_poly(2, n, d, &mut rng);
        // the largest set satisfying the hypothesis is the hardest case
        let clique = largest_vanishing_difference_set(&poly).unwrap();
        let pts = FieldPointSet::from_masks(n, clique);
        let r = check_lemma(&poly, &pts, d).unwrap();
        prop_assert!(r.hypothesis_ok);
        prop_assert!(r.consistent, "{:?}", r);
        let probe = tightness_probe(&poly, d).unwrap();
        prop_assert!(probe.within_bound);
    }
}

#[test]
fn diagonal_gram_instances_have_full_rank() {
    // P vanishes on (A - A) \ {0} and is 1 at 0
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut built = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=5usize);
        let d = rng.gen_range(1..=n);
        let k = rng.gen_range(1..=4usize);
        let a: Vec<u64> = (0..k).map(|_| rng.gen_range(0..1u64 << n)).collect();
        let mut diffs: Vec<u64> = a.iter().flat_map(|x| a.iter().map(move |y| x ^ y)).filter(|&z| z != 0).collect();
        diffs.sort_unstable();
        diffs.dedup();
        let Some(q) = vanishing_poly(&FieldPointSet::from_masks(n, diffs), d).unwrap() else { continue };
        if q.evaluate_mask(0) == 0 {
            continue;
        }
        let pts = FieldPointSet::from_masks(n, a);
        let cert = LemmaCertificate::build(&q, &pts, d).unwrap();
        let w = independence_witness(&cert).unwrap();
        assert_eq!(w.rank, pts.len());
        assert!(w.size <= w.two_m);
        built += 1;
    }
    assert!(built >= 20, "only {built} instances");
}

#[test]
fn independence_witness_rejects_bad_gram() {
    let f = Fp::TWO;
    let one = MultilinearPoly::constant(f, 2, 1);
    let pts = FieldPointSet::from_masks(2, [0, 1]);
    let cert = LemmaCertificate::build(&one, &pts, 0).unwrap();
    assert!(independence_witness(&cert).is_err());
    let single = FieldPointSet::from_masks(2, [3]);
    let cert = LemmaCertificate::build(&one, &single, 0).unwrap();
    let w = independence_witness(&cert).unwrap();
    assert_eq!((w.rank, w.size, w.two_m), (1, 1, 2));
}
