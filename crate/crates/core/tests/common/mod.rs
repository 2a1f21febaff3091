//! Independent reference implementations used by the integration tests.
//! None of these call into the code they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use z4ap::poly::MultilinearPoly;
use z4ap::PointSet;

pub fn digits_of(set: &PointSet) -> Vec<Vec<u8>> {
    set.iter().map(|g| g.digits()).collect()
}

fn is_midpoint(a: &[u8], b: &[u8], c: &[u8]) -> bool {
    a.iter().zip(b).zip(c).all(|((&x, &y), &z)| (x + y) % 4 == (2 * z) % 4)
}

/// Pairwise-distinct `a, b, c` with `a + b = 2c`, by triple loop.
pub fn naive_progression(elems: &[Vec<u8>]) -> Option<(usize, usize, usize)> {
    for i in 0..elems.len() {
        for j in 0..elems.len() {
            for k in 0..elems.len() {
                if i != j && j != k && i != k && is_midpoint(&elems[i], &elems[j], &elems[k]) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Does adding `x` to the progression-free `set` create a progression?
fn closes_progression(set: &[Vec<u8>], x: &[u8]) -> bool {
    for a in set {
        for b in set {
            if a != b && (is_midpoint(a, b, x) || is_midpoint(a, x, b)) {
                return true;
            }
        }
    }
    false
}

/// All of `Z_4^n` in lexicographic order.
pub fn all_vectors(n: usize) -> Vec<Vec<u8>> {
    (0..1usize << (2 * n))
        .map(|r| (0..n).map(|i| ((r >> (2 * (n - 1 - i))) & 3) as u8).collect())
        .collect()
}

/// Largest progression-free subset of `Z_4^n`, trying every subset of the
/// whole group. Only for `n = 1`.
pub fn r3_all_subsets(n: usize) -> usize {
    let g = all_vectors(n);
    assert!(g.len() <= 16);
    (0u32..1 << g.len())
        .filter_map(|mask| {
            let s: Vec<Vec<u8>> = (0..g.len()).filter(|i| mask >> i & 1 == 1).map(|i| g[i].clone()).collect();
            naive_progression(&s).is_none().then_some(s.len())
        })
        .max()
        .unwrap()
}

/// Largest progression-free subset containing 0, by include/exclude
/// recursion over the remaining elements in order.
pub fn r3_canonical(n: usize) -> usize {
    fn rec(g: &[Vec<u8>], i: usize, set: &mut Vec<Vec<u8>>, best: &mut usize) {
        if set.len() + (g.len() - i) <= *best {
            return;
        }
        if i == g.len() {
            *best = set.len();
            return;
        }
        if !closes_progression(set, &g[i]) {
            set.push(g[i].clone());
            rec(g, i + 1, set, best);
            set.pop();
        }
        rec(g, i + 1, set, best);
    }
    let g = all_vectors(n);
    let mut best = 0;
    rec(&g, 1, &mut vec![g[0].clone()], &mut best);
    best
}

/// Rank over `F_p` by plain Gaussian elimination on `i64` rows.
pub fn naive_rank(mut rows: Vec<Vec<i64>>, p: i64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let modp = |x: i64| x.rem_euclid(p);
    let inv = |a: i64| (1..p).find(|&b| modp(a * b) == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| modp(rows[r][c]) != 0) else { continue };
        rows.swap(rank, piv);
        let iv = inv(modp(rows[rank][c]));
        for r in 0..rows.len() {
            if r != rank && modp(rows[r][c]) != 0 {
                let f = modp(rows[r][c] * iv);
                for k in 0..cols {
                    rows[r][k] = modp(rows[r][k] - f * rows[rank][k]);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Number of exponent vectors in `[0, delta]^n` with sum at most `d`.
pub fn fdelta_brute(n: usize, d: usize, delta: usize) -> u64 {
    let mut count = 0;
    let mut e = vec![0usize; n];
    loop {
        if e.iter().sum::<usize>() <= d {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            if e[i] < delta {
                e[i] += 1;
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

pub fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// `Σ_{i ≤ d} C(n, i)` from Pascal's triangle.
pub fn binom_sum_pascal(n: usize, d: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row.iter().take(d + 1).sum()
}

/// Coefficients of `P(x - y)` as a polynomial in `2n` variables, keyed by
/// `(x-support, y-support)`, obtained by multiplying out `∏ (x_i - y_i)`
/// for every monomial of `P`.
pub fn expand_difference(poly: &MultilinearPoly) -> BTreeMap<(u32, u32), u32> {
    let p = poly.field().modulus() as i64;
    let mut total: BTreeMap<(u32, u32), i64> = BTreeMap::new();
    for (m, c) in poly.terms() {
        let mut prod: BTreeMap<(u32, u32), i64> = BTreeMap::from([((0, 0), c as i64)]);
        for i in m.vars() {
            let mut next = BTreeMap::new();
            for (&(xs, ys), &v) in &prod {
                *next.entry((xs | 1 << i, ys)).or_insert(0) += v;
                *next.entry((xs, ys | 1 << i)).or_insert(0) -= v;
            }
            prod = next;
        }
        for (k, v) in prod {
            *total.entry(k).or_insert(0) += v;
        }
    }
    total
        .into_iter()
        .map(|(k, v)| (k, v.rem_euclid(p) as u32))
        .filter(|&(_, v)| v != 0)
        .collect()
}

/// `B` and `C` over the cosets with the given mod-2 keys, computed from
/// digits: `B` collects `a + a'` for distinct `a, a'` in one selected
/// coset, `C` collects `2a`; both are reported as `{0,2}`-digit vectors.
pub fn b_and_c_oracle(elems: &[Vec<u8>], keys: &BTreeSet<Vec<u8>>) -> (BTreeSet<Vec<u8>>, BTreeSet<Vec<u8>>) {
    let key = |v: &Vec<u8>| v.iter().map(|d| d % 2).collect::<Vec<u8>>();
    let mut b = BTreeSet::new();
    let mut c = BTreeSet::new();
    for a in elems.iter().filter(|a| keys.contains(&key(a))) {
        c.insert(a.iter().map(|d| (2 * d) % 4).collect());
        for a2 in elems.iter().filter(|x| *x != a && key(x) == key(a)) {
            b.insert(a.iter().zip(a2).map(|(x, y)| (x + y) % 4).collect());
        }
    }
    (b, c)
}
