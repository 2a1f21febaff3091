//! Arithmetic in `Z_4^n`, the involution subgroup `F_n`, coset bookkeeping
//! and progression-freeness.
//!
//! A [`GroupVector`] packs its coordinates two bits apiece into a `u64`,
//! coordinate `i` in bits `2i..2i+1`. The low bit of every digit is its
//! mod-2 reduction, so the coset of `g` modulo `F_n` is read off with a
//! single mask, and doubling is a shift of that mask.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Largest dimension a packed vector can hold.
pub const MAX_DIM: usize = 32;

const LO: u64 = 0x5555_5555_5555_5555;

fn lane_mask(n: usize) -> u64 {
    if n >= 32 {
        u64::MAX
    } else {
        (1u64 << (2 * n)) - 1
    }
}

/// Spreads bit `i` of `mask` to bit `2i`.
fn spread(mask: u64) -> u64 {
    let mut x = mask & 0xffff_ffff;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & LO;
    x
}

/// Inverse of [`spread`]: gathers bits `2i` into bit `i`.
fn gather(x: u64) -> u64 {
    let mut x = x & LO;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
    x = (x | (x >> 16)) & 0x0000_0000_ffff_ffff;
    x
}

/// An element of `Z_4^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupVector {
    n: u8,
    bits: u64,
}

impl GroupVector {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(GroupVector { n: n as u8, bits: 0 })
    }

    pub fn new(digits: &[u8]) -> Result<Self> {
        check_dim(digits.len())?;
        let mut bits = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            if d > 3 {
                return Err(Error::InvalidDigit { digit: d as u32, coord: i, modulus: 4 });
            }
            bits |= (d as u64) << (2 * i);
        }
        Ok(GroupVector { n: digits.len() as u8, bits })
    }

    /// Builds a vector from its packed representation, masking stray bits.
    pub fn from_packed(n: usize, bits: u64) -> Result<Self> {
        check_dim(n)?;
        Ok(GroupVector { n: n as u8, bits: bits & lane_mask(n) })
    }

    /// The element of `F_n` whose digit `i` is 2 exactly when bit `i` of
    /// `mask` is set.
    pub fn from_binary(n: usize, mask: u64) -> Result<Self> {
        check_dim(n)?;
        Ok(GroupVector { n: n as u8, bits: (spread(mask) << 1) & lane_mask(n) })
    }

    /// Inverse of [`GroupVector::lex_rank`].
    pub fn from_lex_rank(n: usize, rank: u64) -> Result<Self> {
        check_dim(n)?;
        let mut bits = 0u64;
        let mut r = rank;
        for i in (0..n).rev() {
            bits |= (r & 3) << (2 * i);
            r >>= 2;
        }
        Ok(GroupVector { n: n as u8, bits })
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn packed(&self) -> u64 {
        self.bits
    }

    pub fn digit(&self, i: usize) -> u8 {
        debug_assert!(i < self.dim());
        ((self.bits >> (2 * i)) & 3) as u8
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| self.digit(i)).collect()
    }

    /// Position in the lexicographic order of digit strings, coordinate 1
    /// most significant.
    pub fn lex_rank(&self) -> u64 {
        (0..self.dim()).fold(0u64, |acc, i| (acc << 2) | self.digit(i) as u64)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    // Two-bit adder per lane: the low bits add without carry into the
    // neighbouring lane, their AND carries into the high bit.
    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let (a, b) = (self.bits, other.bits);
        let lo = (a ^ b) & LO;
        let carry = a & b & LO;
        let hi = ((a >> 1) ^ (b >> 1) ^ carry) & LO;
        GroupVector { n: self.n, bits: lo | (hi << 1) }
    }

    pub fn neg(&self) -> Self {
        let lo = self.bits & LO;
        let hi = (self.bits >> 1) & LO;
        GroupVector { n: self.n, bits: lo | ((hi ^ lo) << 1) }
    }

    /// `g -> 2g`. The image lies in `F_n`.
    pub fn double(&self) -> Self {
        GroupVector { n: self.n, bits: (self.bits & LO) << 1 }
    }

    /// Whether `self` is an involution or zero, i.e. lies in `F_n`.
    pub fn in_involution_subgroup(&self) -> bool {
        self.bits & LO == 0
    }

    /// Coordinatewise mod-2 reduction as a bitmask (bit `i` = digit `i` mod 2).
    /// Two vectors share an `F_n`-coset iff their keys agree.
    pub fn coset_key(&self) -> u64 {
        gather(self.bits)
    }

    /// The canonical coset representative: the vector with digits in `{0,1}`.
    pub fn coset_representative(&self) -> Self {
        GroupVector { n: self.n, bits: self.bits & LO }
    }

    /// Encodes an element of `F_n` as a vector of `F_2^n` (digit 2 to 1).
    /// Returns `None` when `self` has an odd digit.
    pub fn to_binary(&self) -> Option<u64> {
        if self.in_involution_subgroup() {
            Some(gather(self.bits >> 1))
        } else {
            None
        }
    }

    /// Concatenation: `self` supplies the first coordinates.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let n = self.dim() + other.dim();
        check_dim(n)?;
        Ok(GroupVector { n: n as u8, bits: self.bits | (other.bits << (2 * self.dim())) })
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(())
}

impl Ord for GroupVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.lex_rank().cmp(&other.lex_rank()))
    }
}

impl PartialOrd for GroupVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            write!(f, "{}", self.digit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupVector({self})")
    }
}

/// A finite subset of `Z_4^n`, kept sorted in lexicographic order.
///
/// The empty set may carry dimension 0 when no dimension is known (e.g. an
/// empty set file).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointSet {
    n: usize,
    elements: Vec<GroupVector>,
}

/// A violating triple `a + b = 2c` with `a, b, c` pairwise distinct.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Progression {
    pub a: GroupVector,
    pub b: GroupVector,
    pub c: GroupVector,
}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        PointSet { n, elements: Vec::new() }
    }

    pub fn new(n: usize, elements: impl IntoIterator<Item = GroupVector>) -> Result<Self> {
        let mut elements: Vec<GroupVector> = elements.into_iter().collect();
        for e in &elements {
            if e.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.dim() });
            }
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(PointSet { n, elements })
    }

    /// Convenience constructor from digit strings such as `"013"`.
    pub fn from_strs(items: &[&str]) -> Result<Self> {
        let vs = items
            .iter()
            .map(|s| {
                let ds: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
                GroupVector::new(&ds)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = vs.first().map_or(0, |v| v.dim());
        PointSet::new(n, vs)
    }

    /// The whole group `Z_4^n`, in lexicographic order.
    pub fn full(n: usize) -> Result<Self> {
        check_dim(n)?;
        if n > 12 {
            return Err(Error::TooLarge { requested: 1u128 << (2 * n), cap: 1 << 24 });
        }
        let elements = (0..(1u64 << (2 * n)))
            .map(|r| GroupVector::from_lex_rank(n, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(PointSet { n, elements })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupVector] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupVector> {
        self.elements.iter()
    }

    pub fn contains(&self, g: &GroupVector) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// True when every element lies in `F_n` (all digits in `{0, 2}`).
    pub fn is_binary(&self) -> bool {
        self.elements.iter().all(GroupVector::in_involution_subgroup)
    }

    /// The `F_2^n` encodings of the elements, for sets inside `F_n`.
    pub fn to_binary(&self) -> Option<Vec<u64>> {
        self.elements.iter().map(GroupVector::to_binary).collect()
    }

    pub fn translate(&self, t: &GroupVector) -> Result<Self> {
        let moved = self.elements.iter().map(|e| e.add(t)).collect::<Result<Vec<_>>>()?;
        PointSet::new(self.n, moved)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let n = if self.is_empty() { other.n } else { self.n };
        PointSet::new(n, self.elements.iter().chain(other.elements.iter()).copied())
    }

    pub fn intersection(&self, other: &Self) -> PointSet {
        let elements = self.elements.iter().filter(|e| other.contains(e)).copied().collect();
        PointSet { n: self.n, elements }
    }

    /// Exact progression test. Returns the first violating triple in the
    /// scan order (pairs `i < j` in lexicographic order), or `None`.
    pub fn find_progression(&self) -> Option<Progression> {
        let mut halves: HashMap<u64, Vec<GroupVector>> = HashMap::new();
        for c in &self.elements {
            halves.entry(c.double().packed()).or_default().push(*c);
        }
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                let s = a.add_unchecked(b);
                if !s.in_involution_subgroup() {
                    continue;
                }
                if let Some(cs) = halves.get(&s.packed()) {
                    if let Some(c) = cs.iter().find(|c| *c != a && *c != b) {
                        return Some(Progression { a: *a, b: *b, c: *c });
                    }
                }
            }
        }
        None
    }

    pub fn is_progression_free(&self) -> bool {
        self.find_progression().is_none()
    }

    /// Splits the set along the cosets of `F_n`.
    pub fn coset_decompose(&self) -> CosetDecomposition {
        let mut parts: BTreeMap<GroupVector, Vec<GroupVector>> = BTreeMap::new();
        for e in &self.elements {
            parts.entry(e.coset_representative()).or_default().push(*e);
        }
        let parts = parts
            .into_iter()
            .map(|(rep, elements)| (rep, PointSet { n: self.n, elements }))
            .collect();
        CosetDecomposition { n: self.n, parts }
    }

    /// `2·S`: sums of pairs of distinct elements.
    pub fn two_dot(&self) -> PointSet {
        let mut sums = Vec::with_capacity(self.len() * self.len().saturating_sub(1) / 2);
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                sums.push(a.add_unchecked(b));
            }
        }
        sums.sort_unstable();
        sums.dedup();
        PointSet { n: self.n, elements: sums }
    }

    /// `2∗S`: the image under doubling.
    pub fn two_star(&self) -> PointSet {
        let mut ds: Vec<GroupVector> = self.elements.iter().map(GroupVector::double).collect();
        ds.sort_unstable();
        ds.dedup();
        PointSet { n: self.n, elements: ds }
    }

    /// The `k`-fold Cartesian power, elements concatenated in order.
    pub fn tensor_power(&self, k: usize, cap: usize) -> Result<PointSet> {
        if k == 0 {
            return Err(Error::Domain { what: "tensor_power exponent", value: "0".into() });
        }
        let requested = (self.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if requested > cap as u128 {
            return Err(Error::TooLarge { requested, cap: cap as u128 });
        }
        let n = self.n * k;
        if !self.is_empty() {
            check_dim(n)?;
        }
        let mut acc = self.elements.clone();
        for _ in 1..k {
            let mut next = Vec::with_capacity(acc.len() * self.len());
            for prefix in &acc {
                for e in &self.elements {
                    next.push(prefix.concat(e)?);
                }
            }
            acc = next;
        }
        PointSet::new(n, acc)
    }
}

/// The partition `A = ⊔ A_R` over `F_n`-cosets `R` meeting `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetDecomposition {
    pub n: usize,
    /// `(r, A ∩ (r + F_n))`, with `r` the digits-in-`{0,1}` representative,
    /// sorted by representative.
    pub parts: Vec<(GroupVector, PointSet)>,
}

impl CosetDecomposition {
    pub fn total(&self) -> usize {
        self.parts.iter().map(|(_, p)| p.len()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, p)| p.len()).collect()
    }
}
