//! The rank certificate behind the vanishing-differences lemma.
//!
//! For a multilinear `P` of degree at most `d`, `P(x - y)` splits as
//! `Σ C_{I,J} x^I y^J` over disjoint `I, J`. Grouping each term by whichever
//! of `I`, `J` has size at most `d/2` turns `P(x - y)` into a scalar product
//! `⟨u(x), v(y)⟩` of vectors of length `2m`, `m = Σ_{i ≤ ⌊d/2⌋} C(n, i)`.
//! If `P` vanishes on all nonzero differences of `A` but `P(0) ≠ 0`, the
//! Gram matrix `⟨u(a), v(b)⟩` is diagonal and nonsingular, so the `u(a)` are
//! independent and `|A| <= 2m`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldPointSet, Fp};
use crate::linalg::Matrix;
use crate::poly::{monomials_in_degree_range, monomials_up_to, Monomial, MultilinearPoly};

/// Coefficients `C_{I,J}` with `P(x - y) = Σ C_{I,J} x^I y^J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceExpansion {
    pub n: usize,
    pub field: Fp,
    pub coeffs: BTreeMap<(Monomial, Monomial), u32>,
}

impl DifferenceExpansion {
    pub fn coeff(&self, i: Monomial, j: Monomial) -> u32 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = self.field;
        self.coeffs.iter().fold(0, |acc, (&(i, j), &c)| {
            f.add(acc, f.mul(c, f.mul(i.eval(f, x), j.eval(f, y))))
        })
    }
}

/// Expands `P(x - y)`. Each `p_K x^K` contributes `(-1)^{|J|} p_K` to
/// `C_{I,J}` for every split `K = I ⊔ J`.
pub fn difference_expansion(p: &MultilinearPoly) -> DifferenceExpansion {
    let f = p.field();
    let mut coeffs = BTreeMap::new();
    for (k, pk) in p.terms() {
        for i in k.submonomials() {
            let j = Monomial(k.0 & !i.0);
            coeffs.insert((i, j), f.mul(f.sign(j.degree()), pk));
        }
    }
    DifferenceExpansion { n: p.num_vars(), field: f, coeffs }
}

/// `Σ_{0 ≤ i ≤ ⌊d/2⌋} C(n, i)`.
pub fn half_degree_dimension(n: usize, d: usize) -> BigUint {
    crate::bounds::binom_sum(n, (d / 2).min(n))
}

#[derive(Clone, Debug)]
pub struct LemmaCertificate {
    pub n: usize,
    pub field: Fp,
    /// Declared degree bound.
    pub d: usize,
    pub m: usize,
    /// `K_1, …, K_m`: supports of size at most `d/2`, canonical order.
    pub kappa: Vec<Monomial>,
    pub points: Vec<Vec<u32>>,
    pub u: Vec<Vec<u32>>,
    pub v: Vec<Vec<u32>>,
    /// `gram[a][b] = ⟨u(a), v(b)⟩`.
    pub gram: Vec<Vec<u32>>,
    pub p_at_zero: u32,
}

/// The second-block polynomials of `u` and the first-block polynomials of
/// `v`, one per `K_i`, built by direct summation over the expansion map.
struct BlockPolys {
    kappa: Vec<Monomial>,
    u_high: Vec<Vec<(Monomial, u32)>>,
    v_low: Vec<Vec<(Monomial, u32)>>,
}

fn block_polys(exp: &DifferenceExpansion, d: usize) -> BlockPolys {
    let n = exp.n;
    let half = d / 2;
    let kappa = monomials_up_to(n, half);
    let mut u_high = Vec::with_capacity(kappa.len());
    let mut v_low = Vec::with_capacity(kappa.len());
    for &k in &kappa {
        let room = d - k.degree();
        // u_{m+i}(x) = Σ_{I ⊆ [n]∖K_i, d/2 < |I| ≤ d - |K_i|} C_{I,K_i} x^I
        let high: Vec<(Monomial, u32)> = if room > half {
            monomials_in_degree_range(n, half + 1, room)
                .into_iter()
                .filter(|i| i.is_disjoint(k))
                .map(|i| (i, exp.coeff(i, k)))
                .filter(|&(_, c)| c != 0)
                .collect()
        } else {
            Vec::new()
        };
        // v_i(y) = Σ_{J ⊆ [n]∖K_i, |J| ≤ d - |K_i|} C_{K_i,J} y^J
        let low: Vec<(Monomial, u32)> = monomials_up_to(n, room)
            .into_iter()
            .filter(|j| j.is_disjoint(k))
            .map(|j| (j, exp.coeff(k, j)))
            .filter(|&(_, c)| c != 0)
            .collect();
        u_high.push(high);
        v_low.push(low);
    }
    BlockPolys { kappa, u_high, v_low }
}

fn eval_terms(f: Fp, terms: &[(Monomial, u32)], x: &[u32]) -> u32 {
    terms.iter().fold(0, |acc, &(m, c)| f.add(acc, f.mul(c, m.eval(f, x))))
}

fn dot(f: Fp, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

fn check_compatible(p: &MultilinearPoly, points: &FieldPointSet, d: usize) -> Result<()> {
    if p.field() != points.field() {
        return Err(Error::InvalidPrime(points.field().modulus()));
    }
    if p.num_vars() != points.dim() {
        return Err(Error::DimensionMismatch { expected: p.num_vars(), found: points.dim() });
    }
    if !p.is_zero() && p.degree() > d {
        return Err(Error::DegreeBound { degree: p.degree(), bound: d });
    }
    if d > p.num_vars() {
        return Err(Error::DegreeOutOfRange { d, n: p.num_vars() });
    }
    Ok(())
}

impl LemmaCertificate {
    pub fn build(p: &MultilinearPoly, points: &FieldPointSet, d: usize) -> Result<Self> {
        check_compatible(p, points, d)?;
        let f = p.field();
        let exp = difference_expansion(p);
        let blocks = block_polys(&exp, d);
        let m = blocks.kappa.len();
        let pts = points.points().to_vec();

        let (u, v): (Vec<Vec<u32>>, Vec<Vec<u32>>) = pts
            .par_iter()
            .map(|x| {
                let mut u = Vec::with_capacity(2 * m);
                let mut v = Vec::with_capacity(2 * m);
                for &k in &blocks.kappa {
                    u.push(k.eval(f, x));
                }
                for high in &blocks.u_high {
                    u.push(eval_terms(f, high, x));
                }
                for low in &blocks.v_low {
                    v.push(eval_terms(f, low, x));
                }
                for &k in &blocks.kappa {
                    v.push(k.eval(f, x));
                }
                (u, v)
            })
            .unzip();

        let gram: Vec<Vec<u32>> =
            u.par_iter().map(|ua| v.iter().map(|vb| dot(f, ua, vb)).collect()).collect();
        let p_at_zero = p.coeff(Monomial::ONE);
        Ok(LemmaCertificate { n: p.num_vars(), field: f, d, m, kappa: blocks.kappa, points: pts, u, v, gram, p_at_zero })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Rank of the family `{u(a) : a ∈ A}` in `F^{2m}`.
    pub fn u_rank(&self) -> usize {
        Matrix::from_rows(self.field, 2 * self.m, &self.u).rank()
    }

    /// First off-diagonal nonzero entry of the Gram matrix, row-major.
    pub fn first_offdiagonal_nonzero(&self) -> Option<(usize, usize)> {
        self.gram.iter().enumerate().find_map(|(a, row)| {
            row.iter().enumerate().find(|&(b, &g)| a != b && g != 0).map(|(b, _)| (a, b))
        })
    }

    pub fn offdiagonal_nonzero_count(&self) -> usize {
        self.gram
            .iter()
            .enumerate()
            .map(|(a, row)| row.iter().enumerate().filter(|&(b, &g)| a != b && g != 0).count())
            .sum()
    }

    /// The Gram matrix as CSV, one row per point.
    pub fn gram_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.gram {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn build_certificate(p: &MultilinearPoly, points: &FieldPointSet, d: usize) -> Result<LemmaCertificate> {
    LemmaCertificate::build(p, points, d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub p: u32,
    pub d: usize,
    pub m: usize,
    pub two_m: usize,
    pub size: usize,
    /// `|A| > 2m`.
    pub size_ok: bool,
    /// `P(a - b) = 0` for all distinct `a, b ∈ A`.
    pub hypothesis_ok: bool,
    pub p0_zero: bool,
    pub u_rank: usize,
    pub first_violation: Option<(usize, usize)>,
    /// `size_ok ∧ hypothesis_ok ⇒ p0_zero`. False means the engine is broken.
    pub consistent: bool,
}

/// Checks the lemma on a concrete `(P, A)` with declared degree bound `d`.
pub fn check_lemma(p: &MultilinearPoly, points: &FieldPointSet, d: usize) -> Result<LemmaReport> {
    let cert = LemmaCertificate::build(p, points, d)?;
    Ok(report_from_certificate(&cert))
}

/// [`check_lemma`] with `d = deg P`.
pub fn check_lemma_natural(p: &MultilinearPoly, points: &FieldPointSet) -> Result<LemmaReport> {
    check_lemma(p, points, p.degree())
}

pub fn report_from_certificate(cert: &LemmaCertificate) -> LemmaReport {
    let first_violation = cert.first_offdiagonal_nonzero();
    let size_ok = cert.size() > 2 * cert.m;
    let hypothesis_ok = first_violation.is_none();
    let p0_zero = cert.p_at_zero == 0;
    LemmaReport {
        n: cert.n,
        p: cert.field.modulus(),
        d: cert.d,
        m: cert.m,
        two_m: 2 * cert.m,
        size: cert.size(),
        size_ok,
        hypothesis_ok,
        p0_zero,
        u_rank: cert.u_rank(),
        first_violation,
        consistent: !(size_ok && hypothesis_ok) || p0_zero,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceWitness {
    pub rank: usize,
    pub size: usize,
    pub two_m: usize,
}

/// In the contradiction configuration (nonzero diagonal, zero off-diagonal)
/// the `u(a)` are independent; returns their rank next to `|A|` and `2m`.
pub fn independence_witness(cert: &LemmaCertificate) -> Result<IndependenceWitness> {
    for (a, row) in cert.gram.iter().enumerate() {
        for (b, &g) in row.iter().enumerate() {
            if (a == b) == (g == 0) {
                return Err(Error::GramPrecondition { row: a, col: b, value: g });
            }
        }
    }
    Ok(IndependenceWitness { rank: cert.u_rank(), size: cert.size(), two_m: 2 * cert.m })
}

/// Largest `A ⊆ F_2^n` with `P(a - b) = 0` for all distinct `a, b ∈ A`,
/// found by exact clique search in the Cayley graph of the zero set of `P`.
/// `A` can be taken to contain 0 since only differences matter.
pub fn largest_vanishing_difference_set(p: &MultilinearPoly) -> Result<Vec<u64>> {
    if !p.field().is_binary() {
        return Err(Error::InvalidPrime(p.field().modulus()));
    }
    let n = p.num_vars();
    if n > 6 {
        return Err(Error::TooLarge { requested: 1u128 << n, cap: 64 });
    }
    let size = 1usize << n;
    let zero_at: Vec<bool> = (0..size as u64).map(|x| p.evaluate_mask(x) == 0).collect();
    let adj: Vec<u64> = (0..size)
        .map(|a| (0..size).filter(|&b| b != a && zero_at[a ^ b]).fold(0u64, |m, b| m | (1 << b)))
        .collect();
    let mut best = vec![0u64];
    let mut current = vec![0u64];
    extend_clique(&adj, &mut current, adj[0], &mut best);
    Ok(best)
}

fn extend_clique(adj: &[u64], current: &mut Vec<u64>, candidates: u64, best: &mut Vec<u64>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    let mut cands = candidates;
    while cands != 0 {
        if current.len() + cands.count_ones() as usize <= best.len() {
            return;
        }
        let v = cands.trailing_zeros() as u64;
        cands &= cands - 1;
        current.push(v);
        extend_clique(adj, current, cands & adj[v as usize], best);
        current.pop();
    }
}

/// Result of searching for a counterexample to the lemma's contrapositive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessProbe {
    pub two_m: usize,
    /// Largest set with all nonzero differences in the zero set of `P`.
    pub max_size: usize,
    pub witness: Vec<u64>,
    pub p0_nonzero: bool,
    /// `p0_nonzero ⇒ max_size ≤ 2m`.
    pub within_bound: bool,
}

pub fn tightness_probe(p: &MultilinearPoly, d: usize) -> Result<TightnessProbe> {
    let two_m = 2 * usize::try_from(half_degree_dimension(p.num_vars(), d)).unwrap_or(usize::MAX);
    let witness = largest_vanishing_difference_set(p)?;
    let p0_nonzero = p.coeff(Monomial::ONE) != 0;
    Ok(TightnessProbe {
        two_m,
        max_size: witness.len(),
        within_bound: !p0_nonzero || witness.len() <= two_m,
        witness,
        p0_nonzero,
    })
}
