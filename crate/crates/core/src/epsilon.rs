use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A parameter `0 < ε < 1/4`, held as an exact reduced fraction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Epsilon {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Epsilon {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num <= 0 || num.checked_mul(4).map_or(true, |q| q >= den) {
            return Err(Error::EpsilonOutOfRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Epsilon { num: num / g, den: den / g })
    }

    /// The 24-point grid `1/100, 2/100, …, 24/100`.
    pub fn grid() -> Vec<Epsilon> {
        (1..=24).map(|k| Epsilon::new(k, 100).expect("grid point in range")).collect()
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌈2εn⌉`, exactly.
    pub fn ceil_two_eps_n(&self, n: usize) -> usize {
        let top = 2 * self.num as i128 * n as i128;
        let den = self.den as i128;
        ((top + den - 1) / den) as usize
    }

    /// `1/2 - ε` as `(num, den)`.
    pub fn half_minus(&self) -> (i64, i64) {
        (self.den - 2 * self.num, 2 * self.den)
    }

    /// `2ε` as `(num, den)`.
    pub fn doubled(&self) -> (i64, i64) {
        (2 * self.num, self.den)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts `p/q` or a plain decimal such as `0.125`; both are read exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidEpsilon(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Epsilon::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) || int.starts_with('-') {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac_val)).ok_or_else(bad)?;
        Epsilon::new(num, den)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
