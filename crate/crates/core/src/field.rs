//! Prime fields `F_p` and point sets in `F_p^n`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest modulus accepted. Products of two reduced elements stay in `u64`.
pub const MAX_PRIME: u32 = 65_521;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub const TWO: Fp = Fp { p: 2 };

    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p > MAX_PRIME || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Fp { p })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_binary(self) -> bool {
        self.p == 2
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p as u64 - 2)
    }

    /// `(-1)^k`.
    pub fn sign(self, k: usize) -> u32 {
        if k % 2 == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A deduplicated set of points of `F_p^n`, sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldPointSet {
    field: Fp,
    n: usize,
    points: Vec<Vec<u32>>,
}

impl FieldPointSet {
    pub fn new(field: Fp, n: usize, points: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut pts: Vec<Vec<u32>> = Vec::new();
        for pt in points {
            if pt.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: pt.len() });
            }
            if let Some((coord, &digit)) = pt.iter().enumerate().find(|(_, &c)| c >= field.modulus()) {
                return Err(Error::InvalidDigit { digit, coord, modulus: field.modulus() });
            }
            pts.push(pt);
        }
        pts.sort_unstable();
        pts.dedup();
        Ok(FieldPointSet { field, n, points: pts })
    }

    /// Points of `F_2^n` given as bitmasks (bit `i` is coordinate `i`).
    pub fn from_masks(n: usize, masks: impl IntoIterator<Item = u64>) -> Self {
        let mut pts: Vec<Vec<u32>> =
            masks.into_iter().map(|m| (0..n).map(|i| ((m >> i) & 1) as u32).collect()).collect();
        pts.sort_unstable();
        pts.dedup();
        FieldPointSet { field: Fp::TWO, n, points: pts }
    }

    /// All of `F_p^n`.
    pub fn full(field: Fp, n: usize) -> Result<Self> {
        let total = (field.modulus() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > 1 << 20 {
            return Err(Error::TooLarge { requested: total, cap: 1 << 20 });
        }
        let p = field.modulus();
        let pts = (0..total as u64).map(|mut idx| {
            let mut v = vec![0u32; n];
            for c in v.iter_mut().rev() {
                *c = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            v
        });
        FieldPointSet::new(field, n, pts)
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(x)).is_ok()
    }

    /// Coordinatewise `a - b`.
    pub fn difference(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }
}
