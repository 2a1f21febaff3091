//! High-precision fallback for comparisons that land inside a floating-point
//! guard band.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;

/// Decimal digits used when nothing else is configured.
pub const DEFAULT_DIGITS: usize = 50;

/// Environment variable overriding [`DEFAULT_DIGITS`].
pub const PRECISION_ENV: &str = "Z4AP_PRECISION";

/// Working precision in decimal digits: `Z4AP_PRECISION` when set to a
/// positive integer, [`DEFAULT_DIGITS`] otherwise.
pub fn precision_digits() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_DIGITS)
}

/// A scratch context for high-precision evaluation.
pub struct HighPrecision {
    bits: usize,
    consts: Consts,
}

impl HighPrecision {
    pub fn with_digits(digits: usize) -> Self {
        // 64 guard bits on top of the requested decimal precision
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        HighPrecision { bits, consts: Consts::new().expect("astro-float constant cache") }
    }

    pub fn from_env() -> Self {
        Self::with_digits(precision_digits())
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Magnitude below which two results at this precision are not
    /// distinguishable, for values of order one.
    pub fn resolution(&self) -> f64 {
        2f64.powi(-((self.bits as i32) - 32).min(1000))
    }

    pub fn float(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn int(&self, x: i64) -> BigFloat {
        BigFloat::from_i64(x, self.bits)
    }

    pub fn uint(&mut self, x: &BigUint) -> BigFloat {
        BigFloat::parse(&x.to_string(), Radix::Dec, self.bits, RoundingMode::ToEven, &mut self.consts)
    }

    pub fn ratio(&self, num: i64, den: i64) -> BigFloat {
        self.int(num).div(&self.int(den), self.bits, RoundingMode::ToEven)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RoundingMode::ToEven)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RoundingMode::ToEven)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RoundingMode::ToEven)
    }

    pub fn log2(&mut self, x: &BigFloat) -> BigFloat {
        x.log2(self.bits, RoundingMode::ToEven, &mut self.consts)
    }

    /// Binary entropy; the endpoints 0 and 1 map to 0.
    pub fn entropy(&mut self, x: &BigFloat) -> BigFloat {
        let one = self.int(1);
        let y = self.sub(&one, x);
        if x.is_zero() || y.is_zero() {
            return self.int(0);
        }
        let a = self.log2(x);
        let a = self.mul(x, &a);
        let b = self.log2(&y);
        let b = self.mul(&y, &b);
        self.add(&a, &b).neg()
    }

    pub fn to_f64(&mut self, x: &BigFloat) -> f64 {
        x.format(Radix::Dec, RoundingMode::ToEven, &mut self.consts)
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .unwrap_or(f64::NAN)
    }
}

/// Outcome of a certified strict comparison `lhs < rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certified {
    pub holds: bool,
    /// `rhs - lhs` as finally evaluated.
    pub margin: f64,
    pub high_precision: bool,
}

/// Decides `lhs < rhs` from double-precision values, falling back to
/// `exact` when `|rhs - lhs| < guard`. The fallback returns `(lhs, rhs)` in
/// high precision; a difference inside its resolution counts as not holding.
pub fn certify_less(
    lhs: f64,
    rhs: f64,
    guard: f64,
    exact: impl FnOnce(&mut HighPrecision) -> (BigFloat, BigFloat),
) -> Certified {
    let margin = rhs - lhs;
    if margin.is_finite() && margin.abs() >= guard {
        return Certified { holds: margin > 0.0, margin, high_precision: false };
    }
    let mut hp = HighPrecision::from_env();
    let (l, r) = exact(&mut hp);
    let diff = hp.sub(&r, &l);
    let margin = hp.to_f64(&diff);
    let holds = diff.is_positive() && margin > hp.resolution() * (1.0 + rhs.abs());
    Certified { holds, margin, high_precision: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_at_quarter() {
        let mut hp = HighPrecision::with_digits(60);
        let q = hp.ratio(1, 4);
        let h = hp.entropy(&q);
        // 2 - (3/4) log2 3
        let three = hp.int(3);
        let l3 = hp.log2(&three);
        let want = hp.sub(&hp.int(2), &hp.mul(&hp.ratio(3, 4), &l3));
        let diff = hp.sub(&h, &want);
        assert!(hp.to_f64(&diff.abs()) < 1e-50);
        assert!((hp.to_f64(&h) - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn fallback_resolves_near_ties() {
        let c = certify_less(1.0, 1.0, 1e-9, |hp| (hp.ratio(1, 3), hp.ratio(1, 2)));
        assert!(c.holds && c.high_precision);
        let c = certify_less(1.0, 1.0, 1e-9, |hp| (hp.ratio(1, 3), hp.ratio(2, 6)));
        assert!(!c.holds);
        let c = certify_less(1.0, 2.0, 1e-9, |_| unreachable!());
        assert!(c.holds && !c.high_precision);
    }
}
