//! Multilinear polynomials over `F_p`.
//!
//! Monomials are subsets of the variable set, stored as bitmasks. The
//! canonical monomial order (used for matrix columns, kernel selection and
//! printing) sorts by degree first and by bitmask second.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldPointSet, Fp};
use crate::linalg::Matrix;

pub const MAX_VARS: usize = 32;

/// `x^I = ∏_{i ∈ I} x_i`, with `I` stored as a bitmask over `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_vars(vars: &[usize]) -> Self {
        Monomial(vars.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn vars(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| (self.0 >> i) & 1 == 1)
    }

    pub fn is_disjoint(self, other: Monomial) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    /// Value at a point of `F_2^n` given as a bitmask.
    pub fn eval_mask(self, x: u64) -> bool {
        (self.0 as u64) & !x == 0
    }

    pub fn eval(self, field: Fp, x: &[u32]) -> u32 {
        self.vars().fold(1 % field.modulus(), |acc, i| field.mul(acc, x[i]))
    }

    /// All submasks of `self`, including the empty one and `self`.
    pub fn submonomials(self) -> impl Iterator<Item = Monomial> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(Monomial(cur))
        })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let names: Vec<String> = self.vars().map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{}", names.join("*"))
    }
}

/// Monomials in `n` variables with degree in `lo..=hi`, canonical order.
pub fn monomials_in_degree_range(n: usize, lo: usize, hi: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in lo..=hi.min(n) {
        if k == 0 {
            out.push(Monomial::ONE);
            continue;
        }
        // Gosper's hack walks the k-subsets in increasing numeric order.
        let limit = 1u64 << n;
        let mut s: u64 = (1 << k) - 1;
        while s < limit {
            out.push(Monomial(s as u32));
            let c = s & s.wrapping_neg();
            let r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
    out
}

/// Monomials of degree at most `d`, canonical order.
pub fn monomials_up_to(n: usize, d: usize) -> Vec<Monomial> {
    monomials_in_degree_range(n, 0, d)
}

/// A multilinear polynomial `Σ_K p_K x^K` over `F_p` with no zero terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultilinearPoly {
    n: usize,
    field: Fp,
    coeffs: BTreeMap<Monomial, u32>,
}

impl MultilinearPoly {
    pub fn zero(field: Fp, n: usize) -> Self {
        MultilinearPoly { n, field, coeffs: BTreeMap::new() }
    }

    pub fn constant(field: Fp, n: usize, c: u32) -> Self {
        MultilinearPoly::from_terms(field, n, [(Monomial::ONE, c)]).expect("constant term is in range")
    }

    /// Sums the given terms; repeated monomials accumulate.
    pub fn from_terms(
        field: Fp,
        n: usize,
        terms: impl IntoIterator<Item = (Monomial, u32)>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut coeffs: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in terms {
            if n < 32 && m.0 >> n != 0 {
                return Err(Error::DimensionMismatch { expected: n, found: 32 - m.0.leading_zeros() as usize });
            }
            let e = coeffs.entry(m).or_insert(0);
            *e = field.add(*e, c % field.modulus());
        }
        coeffs.retain(|_, c| *c != 0);
        Ok(MultilinearPoly { n, field, coeffs })
    }

    /// Uniformly random coefficients on every monomial of degree `<= d`.
    pub fn random<R: Rng + ?Sized>(field: Fp, n: usize, d: usize, rng: &mut R) -> Result<Self> {
        let terms: Vec<(Monomial, u32)> = monomials_up_to(n, d)
            .into_iter()
            .map(|m| (m, rng.gen_range(0..field.modulus())))
            .collect();
        MultilinearPoly::from_terms(field, n, terms)
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree. The zero polynomial reports 0; consult [`Self::is_zero`].
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: Monomial) -> u32 {
        self.coeffs.get(&m).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, u32)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn check_point(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[u32]) -> Result<u32> {
        self.check_point(x)?;
        let f = self.field;
        let x: Vec<u32> = x.iter().map(|&c| c % f.modulus()).collect();
        Ok(self.coeffs.iter().fold(0, |acc, (m, &c)| f.add(acc, f.mul(c, m.eval(f, &x)))))
    }

    /// Binary fast path: evaluation at a point of `F_2^n` given as a mask,
    /// valid for any `p` since coordinates are 0 or 1.
    pub fn evaluate_mask(&self, x: u64) -> u32 {
        let f = self.field;
        self.coeffs
            .iter()
            .filter(|(m, _)| m.eval_mask(x))
            .fold(0, |acc, (_, &c)| f.add(acc, c))
    }

    /// `Q(x) = P(c + x)`.
    pub fn shift(&self, c: &[u32]) -> Result<Self> {
        self.check_point(c)?;
        let f = self.field;
        let mut out: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (k, &pk) in &self.coeffs {
            // ∏_{i∈K}(x_i + c_i) = Σ_{J⊆K} c^{K∖J} x^J
            for j in k.submonomials() {
                let rest = Monomial(k.0 & !j.0);
                let w = f.mul(pk, rest.eval(f, c));
                if w != 0 {
                    let e = out.entry(j).or_insert(0);
                    *e = f.add(*e, w);
                }
            }
        }
        out.retain(|_, v| *v != 0);
        Ok(MultilinearPoly { n: self.n, field: f, coeffs: out })
    }

    /// Text form: header `p=<p> n=<n>`, then one monomial per line as
    /// sorted 1-based variables joined by `*` (`x1*x3`; the constant is `1`).
    /// Coefficients other than 1 are written as a `c:` prefix. The parser
    /// also takes bare indices (`2*3`), except that a lone `1` is the constant.
    pub fn to_text(&self) -> String {
        let mut s = format!("p={} n={}\n", self.field.modulus(), self.n);
        for (m, c) in self.terms() {
            if c == 1 {
                s.push_str(&format!("{m}\n"));
            } else {
                s.push_str(&format!("{c}:{m}\n"));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) =
            lines.next().ok_or(Error::Parse { line: 1, msg: "missing `p=<prime> n=<vars>` header".into() })?;
        let mut p = None;
        let mut n = None;
        for tok in header.split_whitespace() {
            let bad = || Error::Parse { line: hline, msg: format!("bad header token `{tok}`") };
            match tok.split_once('=') {
                Some(("p", v)) => p = Some(v.parse::<u32>().map_err(|_| bad())?),
                Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let (Some(p), Some(n)) = (p, n) else {
            return Err(Error::Parse { line: hline, msg: "header needs both p= and n=".into() });
        };
        let field = Fp::new(p)?;
        let mut terms = Vec::new();
        for (line, body) in lines {
            let bad = |msg: String| Error::Parse { line, msg };
            let (coeff, mono) = match body.split_once(':') {
                Some((c, m)) => (c.trim().parse::<u32>().map_err(|_| bad(format!("bad coefficient `{c}`")))?, m.trim()),
                None => (1, body),
            };
            let m = if mono == "1" {
                Monomial::ONE
            } else {
                let mut mask = 0u32;
                for v in mono.split('*') {
                    let v = v.trim();
                    let i: usize = v.strip_prefix('x').unwrap_or(v).parse().map_err(|_| bad(format!("bad variable `{v}`")))?;
                    if i == 0 || i > n {
                        return Err(bad(format!("variable {i} outside 1..={n}")));
                    }
                    mask |= 1 << (i - 1);
                }
                Monomial(mask)
            };
            terms.push((m, coeff));
        }
        MultilinearPoly::from_terms(field, n, terms)
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                let mono = if m == Monomial::ONE { String::new() } else { m.to_string() };
                match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    _ => format!("{c}*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Values of every monomial of degree `<= d` at every point of a set.
#[derive(Clone, Debug)]
pub struct EvaluationMatrix {
    pub monomials: Vec<Monomial>,
    pub matrix: Matrix,
}

pub fn evaluation_matrix(points: &FieldPointSet, d: usize) -> Result<EvaluationMatrix> {
    let n = points.dim();
    if d > n {
        return Err(Error::DegreeOutOfRange { d, n });
    }
    let field = points.field();
    let monomials = monomials_up_to(n, d);
    let mut matrix = Matrix::zeros(field, points.len(), monomials.len());
    for (r, x) in points.points().iter().enumerate() {
        for (c, m) in monomials.iter().enumerate() {
            matrix.set(r, c, m.eval(field, x));
        }
    }
    Ok(EvaluationMatrix { monomials, matrix })
}

/// A nonzero polynomial of degree `<= d` vanishing on every point of the
/// set, or `None` when the evaluation matrix has full column rank.
///
/// Among all such polynomials, returns the one whose largest monomial is
/// smallest in canonical order, normalized so that monomial has coefficient 1.
pub fn vanishing_poly(points: &FieldPointSet, d: usize) -> Result<Option<MultilinearPoly>> {
    let n = points.dim();
    let em = evaluation_matrix(points, d)?;
    let Some(v) = em.matrix.kernel_basis().into_iter().next() else {
        return Ok(None);
    };
    let terms = em.monomials.iter().copied().zip(v);
    MultilinearPoly::from_terms(points.field(), n, terms).map(Some)
}

/// `f_δ(n, d)`: the number of exponent vectors `0 <= i_1..i_n <= δ` with
/// `i_1 + … + i_n <= d`.
pub fn monomial_count_fdelta(n: usize, d: usize, delta: usize) -> BigUint {
    // ways[s] = number of exponent vectors over the variables so far with sum s
    let mut ways = vec![BigUint::from(0u32); d + 1];
    ways[0] = BigUint::from(1u32);
    for _ in 0..n {
        let mut next = vec![BigUint::from(0u32); d + 1];
        for (s, slot) in next.iter_mut().enumerate() {
            for e in 0..=delta.min(s) {
                *slot += &ways[s - e];
            }
        }
        ways = next;
    }
    ways.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Fp {
        Fp::TWO
    }

    fn mono(vars: &[usize]) -> Monomial {
        Monomial::from_vars(vars)
    }

    #[test]
    fn canonical_order() {
        let ms = monomials_up_to(3, 3);
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["1", "x1", "x2", "x3", "x1*x2", "x1*x3", "x2*x3", "x1*x2*x3"]);
        assert_eq!(ms[1], mono(&[0]));
        assert_eq!(monomials_up_to(10, 4).len(), 1 + 10 + 45 + 120 + 210);
        let mut sorted = ms.clone();
        sorted.sort();
        assert_eq!(sorted, ms);
    }

    #[test]
    fn evaluation_examples() {
        let z = MultilinearPoly::zero(f2(), 3);
        assert_eq!(z.evaluate(&[1, 0, 1]).unwrap(), 0);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        let p = MultilinearPoly::from_terms(f2(), 2, [(mono(&[0, 1]), 1)]).unwrap();
        assert_eq!(p.evaluate(&[1, 1]).unwrap(), 1);
        assert_eq!(p.evaluate(&[1, 0]).unwrap(), 0);
        let q = MultilinearPoly::from_terms(f2(), 3, [(Monomial::ONE, 1), (mono(&[0]), 1), (mono(&[0, 2]), 1)])
            .unwrap();
        assert_eq!(q.evaluate(&[1, 1, 1]).unwrap(), 1);
        assert!(q.evaluate(&[1, 1]).is_err());
    }

    #[test]
    fn mask_evaluation_agrees_with_truth_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = MultilinearPoly::random(f2(), 5, 5, &mut rng).unwrap();
            for x in 0..32u64 {
                let pt: Vec<u32> = (0..5).map(|i| ((x >> i) & 1) as u32).collect();
                assert_eq!(p.evaluate_mask(x), p.evaluate(&pt).unwrap());
            }
        }
    }

    #[test]
    fn shift_examples() {
        let p = MultilinearPoly::from_terms(f2(), 1, [(mono(&[0]), 1)]).unwrap();
        assert_eq!(p.shift(&[0]).unwrap(), p);
        let q = p.shift(&[1]).unwrap();
        assert_eq!(q.to_text(), "p=2 n=1\n1\nx1\n");
        assert_eq!(q.coeff(Monomial::ONE), 1);
        assert_eq!(q.coeff(mono(&[0])), 1);
    }

    #[test]
    fn text_format_round_trip() {
        let f = Fp::new(5).unwrap();
        let p = MultilinearPoly::from_terms(f, 4, [(Monomial::ONE, 3), (mono(&[0, 3]), 1), (mono(&[1]), 4)]).unwrap();
        let text = p.to_text();
        assert_eq!(text, "p=5 n=4\n3:1\n4:x2\nx1*x4\n");
        assert_eq!(MultilinearPoly::from_text(&text).unwrap(), p);
        let bare = MultilinearPoly::from_text("p=5 n=4\n3:1\n4:2\n1*4\n").unwrap();
        assert_eq!(bare, p);
        assert!(MultilinearPoly::from_text("p=4 n=2\n1\n").is_err());
        assert!(matches!(MultilinearPoly::from_text("p=2 n=2\n3\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn evaluation_matrix_examples() {
        let origin = FieldPointSet::from_masks(3, [0]);
        let em = evaluation_matrix(&origin, 3).unwrap();
        assert_eq!(em.matrix.row(0), &[1, 0, 0, 0, 0, 0, 0, 0]);
        let ones = FieldPointSet::from_masks(2, [0b11]);
        assert_eq!(evaluation_matrix(&ones, 2).unwrap().matrix.row(0), &[1, 1, 1, 1]);
        let full = FieldPointSet::from_masks(4, 0..16);
        assert_eq!(evaluation_matrix(&full, 4).unwrap().matrix.rank(), 16);
        assert!(evaluation_matrix(&full, 5).is_err());
    }

    #[test]
    fn vanishing_examples() {
        let empty = FieldPointSet::from_masks(3, []);
        let p = vanishing_poly(&empty, 0).unwrap().unwrap();
        assert_eq!(p, MultilinearPoly::constant(f2(), 3, 1));
        let full = FieldPointSet::from_masks(3, 0..8);
        assert!(vanishing_poly(&full, 3).unwrap().is_none());
    }

    #[test]
    fn fdelta_small_values() {
        assert_eq!(monomial_count_fdelta(1, 5, 2), BigUint::from(3u32));
        assert_eq!(monomial_count_fdelta(1, 1, 7), BigUint::from(2u32));
        assert_eq!(monomial_count_fdelta(4, 2, 1), BigUint::from(11u32));
        assert_eq!(monomial_count_fdelta(5, 0, 3), BigUint::from(1u32));
    }
}
