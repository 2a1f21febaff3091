//! Entropy, binomial sums, the exponent `γ` and the bounds built from it.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::cosets::CosetProfile;
use crate::error::{Error, Result};
use crate::precision::{certify_less, Certified};

/// Guard band (in log2 units) below which inequality checks re-run in high
/// precision.
pub const LOG_GUARD: f64 = 1e-9;

/// Binary entropy `H(x) = -x log2 x - (1-x) log2(1-x)`, extended by
/// continuity to `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { what: "entropy", value: x.to_string() });
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

fn h(x: f64) -> f64 {
    entropy(x).unwrap_or(f64::NAN)
}

/// `H'(x) = log2((1-x)/x)`.
fn entropy_slope(x: f64) -> f64 {
    ((1.0 - x) / x).log2()
}

pub fn binom(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `Σ_{i=0}^{d} C(n, i)`; saturates at `2^n` for `d >= n`.
pub fn binom_sum(n: usize, d: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut acc = BigUint::one();
    for i in 1..=d.min(n) {
        term = term * (n + 1 - i) / i;
        acc += &term;
    }
    acc
}

/// `log2` of a positive big integer, to within a few ulps.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyBoundCheck {
    pub n: usize,
    pub z: f64,
    /// `Σ_{i ≤ ⌊z⌋} C(n, i)`, decimal.
    #[serde(serialize_with = "crate::report::big_as_string")]
    pub lhs: BigUint,
    pub lhs_log2: f64,
    /// `n H(z/n)`.
    pub rhs_log2: f64,
    pub holds: bool,
    pub high_precision: bool,
}

/// Checks `Σ_{0 ≤ i ≤ z} C(n, i) < 2^{n H(z/n)}` for `0 < z ≤ n/2`.
pub fn check_entropy_bound(n: usize, z: f64) -> Result<EntropyBoundCheck> {
    if n == 0 || !(z > 0.0 && z <= n as f64 / 2.0) {
        return Err(Error::Domain { what: "check_entropy_bound", value: format!("n={n}, z={z}") });
    }
    let lhs = binom_sum(n, z.floor() as usize);
    let lhs_log2 = log2_big(&lhs);
    let rhs_log2 = n as f64 * h(z / n as f64);
    let Certified { holds, high_precision, .. } = certify_less(lhs_log2, rhs_log2, LOG_GUARD, |hp| {
        let l = hp.uint(&lhs);
        let l = hp.log2(&l);
        let x = hp.float(z).div(&hp.int(n as i64), hp.bits(), astro_float::RoundingMode::ToEven);
        let r = hp.entropy(&x);
        (l, hp.mul(&hp.int(n as i64), &r))
    });
    Ok(EntropyBoundCheck { n, z, lhs, lhs_log2, rhs_log2, holds, high_precision })
}

/// Every `(n, z)` with `1 ≤ n ≤ max_n`, integer `1 ≤ z ≤ n/2`.
pub fn entropy_table(max_n: usize) -> Vec<EntropyBoundCheck> {
    (1..=max_n)
        .flat_map(|n| (1..=n / 2).map(move |z| (n, z)))
        .map(|(n, z)| check_entropy_bound(n, z as f64).expect("grid point in domain"))
        .collect()
}

/// The objective `g(ε) = (H(1/2 - ε) + H(2ε)) / 2` on `(0, 1/4)`.
pub fn gamma_objective(eps: f64) -> f64 {
    0.5 * (h(0.5 - eps) + h(2.0 * eps))
}

fn gamma_slope(eps: f64) -> f64 {
    0.5 * (-entropy_slope(0.5 - eps) + 2.0 * entropy_slope(2.0 * eps))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaResult {
    pub gamma: f64,
    pub eps_star: f64,
    pub iterations: usize,
    pub tolerance_achieved: f64,
}

/// Maximizes `g` on `(0, 1/4)`: golden-section search narrows the bracket,
/// then bisection on the sign of `g'` pins the maximizer to `tolerance`
/// (or to double-precision resolution, whichever is coarser).
pub fn compute_gamma(tolerance: f64) -> Result<GammaResult> {
    if !(tolerance > 0.0) {
        return Err(Error::Domain { what: "compute_gamma tolerance", value: tolerance.to_string() });
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-12, 0.25 - 1e-12);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (gamma_objective(c), gamma_objective(d));
    let mut iterations = 0;
    while b - a > 1e-4 {
        iterations += 1;
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gamma_objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gamma_objective(d);
        }
    }
    // g is strictly concave here, so g' changes sign once inside [a, b].
    debug_assert!(gamma_slope(a) > 0.0 && gamma_slope(b) < 0.0);
    while (b - a) / 2.0 > tolerance {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        if gamma_slope(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let eps_star = 0.5 * (a + b);
    Ok(GammaResult { gamma: gamma_objective(eps_star), eps_star, iterations, tolerance_achieved: (b - a) / 2.0 })
}

/// `γ` at tolerance `1e-12`, computed once.
pub fn gamma() -> GammaResult {
    static GAMMA: OnceLock<GammaResult> = OnceLock::new();
    *GAMMA.get_or_init(|| compute_gamma(1e-12).expect("positive tolerance"))
}

/// `4^{γn}`.
pub fn theorem_bound(n: usize) -> f64 {
    4f64.powf(gamma().gamma * n as f64)
}

/// `(n + 2) · 4^{γn}`, the bound before the tensor-power step.
pub fn finite_bound(n: usize) -> f64 {
    (n + 2) as f64 * theorem_bound(n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryBound {
    pub factors: Vec<u64>,
    pub rk4: usize,
    #[serde(serialize_with = "crate::report::big_as_string")]
    pub order: BigUint,
    /// `4^{-(1-γ) rk4} · |G|`.
    pub bound: f64,
}

/// Bound for `G = Z_{m_1} ⊕ … ⊕ Z_{m_k}` with `m_1 | m_2 | … | m_k`.
pub fn corollary_bound(factors: &[u64]) -> Result<CorollaryBound> {
    if let Some(i) = factors.iter().position(|&m| m == 0) {
        return Err(Error::ChainViolated(i));
    }
    if let Some(i) = factors.windows(2).position(|w| w[1] % w[0] != 0) {
        return Err(Error::ChainViolated(i + 1));
    }
    let rk4 = factors.iter().filter(|&&m| m % 4 == 0).count();
    let order: BigUint = factors.iter().map(|&m| BigUint::from(m)).product();
    let log2_bound = log2_big(&order) - 2.0 * (1.0 - gamma().gamma) * rk4 as f64;
    Ok(CorollaryBound { factors: factors.to_vec(), rk4, order, bound: log2_bound.exp2() })
}

/// Adaptive Simpson on `[a, b]`.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `x(ε) = 2^{n H(1/2 - ε) + 1}`, decreasing from `2^{n+1}` at 0 to
/// `2^{n H(1/4) + 1}` at `1/4`.
fn substitution(n: usize, eps: f64) -> f64 {
    (n as f64 * h(0.5 - eps) + 1.0).exp2()
}

/// The `ε ∈ [0, 1/4]` where `x(ε) = c`, for `c` in the range of `x`.
fn substitution_inverse(n: usize, c: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.25f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if substitution(n, mid) > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralReport {
    pub n: usize,
    pub total: usize,
    /// `∫_0^∞ N(x) dx` summed over the steps of `N`.
    pub step_integral: u64,
    pub identity_ok: bool,
    /// `T = 2^{n H(1/4) + 1}`.
    pub split_point: f64,
    /// `∫_0^T N`.
    pub head_integral: f64,
    /// `2^{(H(1/4) + 1) n + 1}`.
    pub head_bound: f64,
    pub head_ok: bool,
    /// `∫_T^{2^{n+1}} N`, from the step function.
    pub tail_integral: f64,
    /// The same integral after the substitution `x = x(ε)`, by quadrature.
    pub tail_substituted: f64,
    pub substitution_rel_err: f64,
    pub substitution_ok: bool,
    /// `2n ∫_0^{1/4} 2^{n(H(1/2-ε)+H(2ε))} ln((1/2+ε)/(1/2-ε)) dε`: what the
    /// tail becomes once every coset count obeys the rich-coset bound.
    pub tail_envelope: f64,
    pub tail_within_envelope: bool,
    /// `n · 4^{γn}`.
    pub tail_bound: f64,
    pub envelope_within_bound: bool,
    pub finite_bound: f64,
    pub finite_bound_ok: bool,
}

/// Relative accuracy required of the substituted tail integral.
pub const SUBSTITUTION_RTOL: f64 = 1e-6;

/// Evaluates the integral decomposition of `|A|` for a coset profile.
pub fn integral_decomposition_check(profile: &CosetProfile) -> IntegralReport {
    let n = profile.n;
    let nf = n as f64;
    let total = profile.total;
    let step_integral = profile.step_integral();
    let identity_ok = step_integral == total as u64;

    let h14 = h(0.25);
    let split_point = (nf * h14 + 1.0).exp2();
    let upper = (nf + 1.0).exp2();
    let head_integral = profile.integral(0.0, split_point);
    let head_bound = ((h14 + 1.0) * nf + 1.0).exp2();
    let head_ok = head_integral <= head_bound * (1.0 + 1e-12);
    let tail_integral = profile.integral(split_point, upper);

    // piecewise quadrature: N(x(ε)) jumps where x(ε) equals a count
    let mut cuts = vec![0.0, 0.25];
    for &c in profile.distinct_counts().iter() {
        let c = c as f64;
        if c > split_point && c < upper {
            cuts.push(substitution_inverse(n, c));
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut tail_substituted = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let level = profile.survival(substitution(n, 0.5 * (a + b))) as f64;
        if level == 0.0 {
            continue;
        }
        let f = |e: f64| nf * substitution(n, e) * level * ((0.5 + e) / (0.5 - e)).ln();
        tail_substituted += integrate(&f, a, b, 1e-10 * (1.0 + upper));
    }
    let substitution_rel_err = if tail_integral == 0.0 {
        tail_substituted.abs()
    } else {
        (tail_substituted - tail_integral).abs() / tail_integral
    };

    let envelope_f = |e: f64| 2.0 * nf * (nf * (h(0.5 - e) + h(2.0 * e))).exp2() * ((0.5 + e) / (0.5 - e)).ln();
    let tail_envelope = integrate(&envelope_f, 0.0, 0.25, 1e-12 * (1.0 + theorem_bound(n)));
    let tail_bound = nf * theorem_bound(n);
    let finite = finite_bound(n);

    IntegralReport {
        n,
        total,
        step_integral,
        identity_ok,
        split_point,
        head_integral,
        head_bound,
        head_ok,
        tail_integral,
        tail_substituted,
        substitution_rel_err,
        substitution_ok: substitution_rel_err <= SUBSTITUTION_RTOL,
        tail_envelope,
        tail_within_envelope: tail_integral <= tail_envelope * (1.0 + 1e-9),
        tail_bound,
        envelope_within_bound: tail_envelope < tail_bound,
        finite_bound: finite,
        finite_bound_ok: (total as f64) < finite,
    }
}
