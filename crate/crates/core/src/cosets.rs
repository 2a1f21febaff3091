//! Rich-coset counting for progression-free sets and an executable replay
//! of the argument bounding how many `F_n`-cosets can be rich.
//!
//! Sets inside `F_n` are handed to the polynomial code as subsets of
//! `F_2^n`, digit 2 mapping to 1.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bounds::{binom_sum, entropy, log2_big};
use crate::epsilon::Epsilon;
use crate::error::{Error, Result};
use crate::field::FieldPointSet;
use crate::group::{CosetDecomposition, GroupVector, PointSet};
use crate::lemma::check_lemma;
use crate::poly::vanishing_poly;
use crate::precision::certify_less;

/// Relative guard band for comparing a coset count with a real threshold.
pub const THRESHOLD_GUARD: f64 = 1e-12;

/// The multiset of `|A ∩ R|` over cosets `R` meeting `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetProfile {
    pub n: usize,
    /// Nonincreasing.
    pub counts: Vec<usize>,
    pub total: usize,
}

impl CosetProfile {
    pub fn from_decomposition(d: &CosetDecomposition) -> Self {
        let mut counts = d.sizes();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        CosetProfile { n: d.n, total: counts.iter().sum(), counts }
    }

    /// `N(x)`: the number of cosets holding at least `x` elements.
    pub fn survival(&self, x: f64) -> usize {
        self.counts.iter().take_while(|&&c| c as f64 >= x).count()
    }

    pub fn distinct_counts(&self) -> Vec<usize> {
        let mut cs = self.counts.clone();
        cs.dedup();
        cs
    }

    /// `∫_0^∞ N(x) dx` walked step by step: on `(c_{k+1}, c_k]` between
    /// consecutive distinct counts, `N` equals the number of counts `>= c_k`.
    pub fn step_integral(&self) -> u64 {
        let distinct = self.distinct_counts();
        let mut acc = 0u64;
        for (k, &c) in distinct.iter().enumerate() {
            let below = distinct.get(k + 1).copied().unwrap_or(0);
            let level = self.counts.iter().filter(|&&x| x >= c).count() as u64;
            acc += level * (c - below) as u64;
        }
        acc
    }

    /// `∫_lo^hi N(x) dx` for `0 <= lo <= hi`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.counts.iter().map(|&c| (c as f64).min(hi).max(lo) - lo).sum()
    }
}

pub fn coset_profile(a: &PointSet) -> CosetProfile {
    CosetProfile::from_decomposition(&a.coset_decompose())
}

/// Whether `count >= 2^{log2_threshold}`, certified near ties.
fn reaches(count: usize, log2_threshold: f64, exact: impl Fn(&mut crate::precision::HighPrecision) -> astro_float::BigFloat) -> (bool, bool) {
    if count == 0 {
        return (false, false);
    }
    let lc = (count as f64).log2();
    // count >= 2^t  ⇔  not (log2 count < t)
    let c = certify_less(lc, log2_threshold, THRESHOLD_GUARD * (1.0 + log2_threshold.abs()), |hp| {
        let l = hp.int(count as i64);
        (hp.log2(&l), exact(hp))
    });
    (!c.holds, c.high_precision)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichCosetReport {
    pub n: usize,
    pub epsilon: Epsilon,
    /// `n H(1/2 - ε) + 1`.
    pub threshold_log2: f64,
    pub threshold: f64,
    pub rich_count: usize,
    /// `n H(2ε)`.
    pub bound_log2: f64,
    pub bound: f64,
    /// `threshold > 2^n`: no coset can be rich.
    pub vacuous: bool,
    /// `rich_count < bound`.
    pub holds: bool,
    pub high_precision: bool,
}

fn hp_threshold(hp: &mut crate::precision::HighPrecision, n: usize, eps: Epsilon) -> astro_float::BigFloat {
    let (num, den) = eps.half_minus();
    let x = hp.ratio(num, den);
    let e = hp.entropy(&x);
    let ne = hp.mul(&hp.int(n as i64), &e);
    hp.add(&ne, &hp.int(1))
}

fn hp_bound(hp: &mut crate::precision::HighPrecision, n: usize, eps: Epsilon) -> astro_float::BigFloat {
    let (num, den) = eps.doubled();
    let x = hp.ratio(num, den);
    let e = hp.entropy(&x);
    hp.mul(&hp.int(n as i64), &e)
}

/// Indices (into `decomp.parts`) of the rich cosets, plus whether any
/// classification needed the high-precision path.
pub fn rich_cosets(decomp: &CosetDecomposition, eps: Epsilon) -> (Vec<usize>, bool) {
    let n = decomp.n;
    let t = n as f64 * entropy(eps.half_minus().0 as f64 / eps.half_minus().1 as f64).unwrap_or(f64::NAN) + 1.0;
    let mut hp_used = false;
    let rich = decomp
        .parts
        .iter()
        .enumerate()
        .filter_map(|(i, (_, part))| {
            let (ok, used) = reaches(part.len(), t, |hp| hp_threshold(hp, n, eps));
            hp_used |= used;
            ok.then_some(i)
        })
        .collect();
    (rich, hp_used)
}

pub fn rich_coset_report(a: &PointSet, eps: Epsilon) -> RichCosetReport {
    let decomp = a.coset_decompose();
    let n = a.dim();
    let (hm_num, hm_den) = eps.half_minus();
    let threshold_log2 = n as f64 * entropy(hm_num as f64 / hm_den as f64).unwrap_or(f64::NAN) + 1.0;
    let bound_log2 = n as f64 * entropy(eps.value() * 2.0).unwrap_or(f64::NAN);
    let (rich, mut hp_used) = rich_cosets(&decomp, eps);
    let rich_count = rich.len();
    let holds = if rich_count == 0 {
        true
    } else {
        let c = certify_less(
            (rich_count as f64).log2(),
            bound_log2,
            crate::bounds::LOG_GUARD,
            |hp| {
                let l = hp.int(rich_count as i64);
                (hp.log2(&l), hp_bound(hp, n, eps))
            },
        );
        hp_used |= c.high_precision;
        c.holds
    };
    RichCosetReport {
        n,
        epsilon: eps,
        threshold_log2,
        threshold: threshold_log2.exp2(),
        rich_count,
        bound_log2,
        bound: bound_log2.exp2(),
        vacuous: threshold_log2 > n as f64,
        holds,
        high_precision: hp_used,
    }
}

/// `B = ∪ 2·A_R` and `C = ∪ 2∗R` over a selection of cosets, as subsets of
/// `F_2^n` (bitmasks, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BcSets {
    pub n: usize,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
}

impl BcSets {
    pub fn is_disjoint(&self) -> bool {
        let c: BTreeSet<u64> = self.c.iter().copied().collect();
        !self.b.iter().any(|x| c.contains(x))
    }

    /// `F_2^n ∖ C`.
    pub fn complement_of_c(&self) -> Vec<u64> {
        let c: BTreeSet<u64> = self.c.iter().copied().collect();
        (0..(1u64 << self.n)).filter(|x| !c.contains(x)).collect()
    }
}

fn binary_of(g: &GroupVector) -> u64 {
    g.to_binary().expect("element of F_n")
}

/// `selection` indexes `decomp.parts`; out-of-range indices are ignored.
pub fn build_b_and_c(decomp: &CosetDecomposition, selection: &[usize]) -> BcSets {
    let mut b = BTreeSet::new();
    let mut c = BTreeSet::new();
    for &i in selection {
        let Some((rep, part)) = decomp.parts.get(i) else { continue };
        for s in part.two_dot().iter() {
            b.insert(binary_of(s));
        }
        c.insert(binary_of(&rep.double()));
    }
    BcSets { n: decomp.n, b: b.into_iter().collect(), c: c.into_iter().collect() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofTrace {
    pub epsilon: Epsilon,
    pub vacuous: bool,
    /// Whether `|R| >= 2^{nH(2ε)}` held, i.e. the argument had something to refute.
    pub contradiction_hypothesis: bool,
    /// Name of the step at which the contradiction appeared, if it did.
    pub contradiction_at: Option<String>,
    pub steps: Vec<TraceStep>,
    /// Every checked step passed.
    pub all_ok: bool,
}

fn push(steps: &mut Vec<TraceStep>, step: &str, ok: bool, detail: String) {
    steps.push(TraceStep { step: step.to_string(), ok, detail });
}

/// Runs the rich-coset argument on concrete data.
///
/// When there are too few rich cosets to argue against (the normal case for
/// a progression-free set) each step that can be checked on its own is
/// still exercised: disjointness of `B` and `C`, distinctness of the
/// singletons `2∗R`, the size condition for the lemma on each rich coset,
/// and, when a low-degree polynomial vanishing on `F_2^n ∖ C` exists, its
/// vanishing on `B` together with the lemma check on each rich coset.
pub fn replay_proposition(a: &PointSet, eps: Epsilon) -> Result<ProofTrace> {
    if let Some(p) = a.find_progression() {
        return Err(Error::NotProgressionFree(p.a, p.b, p.c));
    }
    let n = a.dim();
    let report = rich_coset_report(a, eps);
    let mut steps = Vec::new();
    if report.vacuous || n == 0 {
        push(
            &mut steps,
            "vacuous",
            true,
            format!("threshold 2^{:.6} exceeds coset size 2^{n}", report.threshold_log2),
        );
        return Ok(ProofTrace {
            epsilon: eps,
            vacuous: true,
            contradiction_hypothesis: false,
            contradiction_at: None,
            steps,
            all_ok: true,
        });
    }

    let decomp = a.coset_decompose();
    let (rich, _) = rich_cosets(&decomp, eps);
    push(
        &mut steps,
        "rich_cosets",
        true,
        format!("{} of {} cosets reach 2^{:.6}", rich.len(), decomp.parts.len(), report.threshold_log2),
    );

    let d = n - eps.ceil_two_eps_n(n).min(n);
    push(&mut steps, "degree", true, format!("d = n - ceil(2 eps n) = {d}"));

    let bc = build_b_and_c(&decomp, &rich);
    let disjoint = bc.is_disjoint();
    push(&mut steps, "b_c_disjoint", disjoint, format!("|B| = {}, |C| = {}", bc.b.len(), bc.c.len()));
    let singletons = rich.iter().all(|&i| decomp.parts[i].1.two_star().len() == 1);
    let distinct = bc.c.len() == rich.len();
    push(
        &mut steps,
        "c_singletons",
        singletons && distinct,
        format!("2*R singletons: {singletons}, pairwise distinct: {distinct}"),
    );

    // 2 Σ_{i ≤ d/2} C(n,i) < 2^{nH(1/2-ε)+1} ≤ |A_R|
    let two_m = binom_sum(n, d / 2) * 2u32;
    let size_ok = log2_big(&two_m) < report.threshold_log2
        && rich.iter().all(|&i| decomp.parts[i].1.len() > usize::try_from(&two_m).unwrap_or(usize::MAX));
    push(&mut steps, "lemma_sizes", size_ok, format!("2m = {two_m} for every rich coset"));

    let hypothesis = !report.holds;
    let complement = FieldPointSet::from_masks(n, bc.complement_of_c());
    let poly = vanishing_poly(&complement, d)?;
    let mut contradiction_at = None;
    match &poly {
        None => {
            let full = hypothesis;
            push(
                &mut steps,
                "vanishing_poly",
                !full,
                format!("no nonzero polynomial of degree <= {d} vanishes on the {} points off C", complement.len()),
            );
        }
        Some(p) => {
            push(&mut steps, "vanishing_poly", true, format!("P = {p}"));
            let on_b = bc.b.iter().all(|&x| p.evaluate_mask(x) == 0);
            push(&mut steps, "vanishes_on_b", on_b, "B lies off C".into());

            let mut all_forced = true;
            let mut lemma_ok = true;
            for &i in &rich {
                let (rep, part) = &decomp.parts[i];
                let center = binary_of(&rep.double());
                let shifted =
                    p.shift(&(0..n).map(|k| ((center >> k) & 1) as u32).collect::<Vec<_>>())?;
                let offsets = part
                    .iter()
                    .map(|e| e.sub(rep).map(|x| binary_of(&x)))
                    .collect::<Result<Vec<_>>>()?;
                let pts = FieldPointSet::from_masks(n, offsets);
                let r = check_lemma(&shifted, &pts, d)?;
                lemma_ok &= r.consistent;
                all_forced &= r.size_ok && r.hypothesis_ok;
                if r.size_ok && r.hypothesis_ok && !r.p0_zero {
                    lemma_ok = false;
                }
            }
            push(&mut steps, "lemma_per_coset", lemma_ok, format!("{} rich cosets checked", rich.len()));
            let on_c = bc.c.iter().all(|&x| p.evaluate_mask(x) == 0);
            if hypothesis {
                // P vanishes off C by construction and on C by the lemma,
                // so it vanishes on all of F_2^n while being nonzero.
                push(&mut steps, "vanishes_on_c", on_c, "forced by the lemma".into());
                if all_forced && on_c {
                    contradiction_at = Some("vanishes_everywhere".to_string());
                    push(&mut steps, "vanishes_everywhere", true, "nonzero multilinear P is zero on F_2^n".into());
                }
            } else {
                push(&mut steps, "vanishes_on_c", true, format!("P vanishes on C: {on_c}"));
            }
        }
    }
    if !hypothesis {
        push(
            &mut steps,
            "hypothesis_of_contradiction",
            true,
            format!(
                "not satisfiable: {} rich cosets < 2^{:.6}",
                report.rich_count, report.bound_log2
            ),
        );
    }
    let all_ok = steps.iter().all(|s| s.ok) && (!hypothesis || contradiction_at.is_some());
    Ok(ProofTrace { epsilon: eps, vacuous: false, contradiction_hypothesis: hypothesis, contradiction_at, steps, all_ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> PointSet {
        PointSet::from_strs(items).unwrap()
    }

    fn full_coset(n: usize, key: u64) -> Vec<GroupVector> {
        let r = GroupVector::from_binary(n, key).unwrap();
        // shift from F_n into the coset with mod-2 key `key`
        let odd = GroupVector::from_packed(n, r.packed() >> 1).unwrap();
        (0..(1u64 << n)).map(|f| odd.add(&GroupVector::from_binary(n, f).unwrap()).unwrap()).collect()
    }

    #[test]
    fn profile_of_full_coset() {
        let a = PointSet::new(3, full_coset(3, 0b101)).unwrap();
        let p = coset_profile(&a);
        assert_eq!(p.counts, vec![8]);
        assert_eq!(p.survival(8.0), 1);
        assert_eq!(p.survival(8.5), 0);
        assert_eq!(p.step_integral(), 8);
    }

    #[test]
    fn profile_of_empty_set() {
        let p = coset_profile(&PointSet::empty(2));
        assert_eq!(p.total, 0);
        assert_eq!(p.survival(0.5), 0);
        assert_eq!(p.step_integral(), 0);
    }

    #[test]
    fn b_and_c_examples() {
        let a = set(&["1"]);
        let d = a.coset_decompose();
        let bc = build_b_and_c(&d, &[0]);
        assert!(bc.b.is_empty());
        assert_eq!(bc.c, vec![1]);

        // A = {0, 1} in Z_4: A_{R0} = {0}, A_{R1} = {1}
        let a = set(&["0", "1"]);
        let d = a.coset_decompose();
        let bc = build_b_and_c(&d, &[0, 1]);
        assert!(bc.b.is_empty());
        assert_eq!(bc.c, vec![0, 1]);
        assert!(bc.is_disjoint());
    }

    #[test]
    fn empty_set_is_never_rich() {
        for eps in Epsilon::grid() {
            let r = rich_coset_report(&PointSet::empty(3), eps);
            assert_eq!(r.rich_count, 0);
            assert!(r.holds);
        }
    }

    #[test]
    fn endpoint_behaviour() {
        let eps = Epsilon::new(249, 1000).unwrap();
        let r = rich_coset_report(&set(&["00"]), eps);
        assert!(r.threshold_log2 >= 2.0 * entropy(0.25).unwrap() + 1.0);
        assert!((r.bound_log2 - 2.0 * entropy(0.498).unwrap()).abs() < 1e-12);
        assert!(r.bound < 4.0);
    }

    #[test]
    fn replay_vacuous() {
        let a = set(&["00", "02", "20"]);
        let t = replay_proposition(&a, Epsilon::new(1, 100).unwrap()).unwrap();
        assert!(t.vacuous);
        assert_eq!(t.steps.len(), 1);
        assert!(replay_proposition(&set(&["0", "1", "3"]), Epsilon::new(1, 5).unwrap()).is_err());
    }

    #[test]
    fn replay_on_a_rich_full_coset() {
        // at n = 6, eps = 0.24 a full coset clears the threshold 2^5.96
        let a = PointSet::new(6, full_coset(6, 0b100101)).unwrap();
        assert!(a.is_progression_free());
        let eps = Epsilon::new(24, 100).unwrap();
        let r = rich_coset_report(&a, eps);
        assert!(!r.vacuous);
        assert_eq!(r.rich_count, 1);
        assert!(r.holds);
        let t = replay_proposition(&a, eps).unwrap();
        assert!(!t.vacuous && !t.contradiction_hypothesis);
        assert!(t.all_ok, "{t:#?}");
    }

    #[test]
    fn doubled_cosets_are_distinct_singletons() {
        let all = PointSet::full(3).unwrap();
        let d = all.coset_decompose();
        assert_eq!(d.parts.len(), 8);
        for (_, part) in &d.parts {
            assert_eq!(part.two_star().len(), 1);
        }
        let sel: Vec<usize> = (0..8).collect();
        let bc = build_b_and_c(&d, &sel);
        assert_eq!(bc.c, (0..8).collect::<Vec<u64>>());
    }
}
