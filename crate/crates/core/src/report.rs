//! Serialization helpers shared by the reports.

use num_bigint::BigUint;
use serde::Serializer;

/// Big integers go out as decimal strings so JSON consumers never round them.
pub fn big_as_string<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

/// Floats that may be infinite (huge bounds) go out as `null` instead of failing.
pub fn finite_or_null<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}
