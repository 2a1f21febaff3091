//! Consolidated checks on a concrete set: progression-freeness, coset
//! profile, rich-coset counts over the standard epsilon grid, the integral
//! decomposition and the size bounds.

use std::path::Path;

use serde::Serialize;

use crate::bounds::{finite_bound, integral_decomposition_check, theorem_bound, IntegralReport};
use crate::cosets::{build_b_and_c, coset_profile, rich_coset_report, CosetProfile, RichCosetReport};
use crate::error::Result;
use crate::epsilon::Epsilon;
use crate::group::PointSet;
use crate::setfile::read_set;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub size: usize,
    pub progression_free: bool,
    /// `(a, b, c)` with `a + b = 2c`, when not progression-free.
    pub witness: Option<[String; 3]>,
    pub profile: CosetProfile,
    /// `B ∩ C = ∅` with every coset selected.
    pub disjointness_ok: bool,
    pub rich_cosets: Vec<RichCosetReport>,
    /// Every grid point satisfies the rich-coset bound.
    pub rich_cosets_ok: bool,
    pub integral: IntegralReport,
    #[serde(serialize_with = "crate::report::finite_or_null")]
    pub theorem_bound: f64,
    #[serde(serialize_with = "crate::report::finite_or_null")]
    pub finite_bound: f64,
    pub within_theorem_bound: bool,
    pub within_finite_bound: bool,
    /// All checks that a progression-free set must pass did pass.
    pub ok: bool,
}

pub fn verify_set(a: &PointSet) -> VerifyReport {
    let n = a.dim();
    let witness = a.find_progression().map(|p| [p.a.to_string(), p.b.to_string(), p.c.to_string()]);
    let progression_free = witness.is_none();
    let decomp = a.coset_decompose();
    let all: Vec<usize> = (0..decomp.parts.len()).collect();
    let disjointness_ok = build_b_and_c(&decomp, &all).is_disjoint();
    let rich_cosets: Vec<RichCosetReport> = Epsilon::grid().into_iter().map(|e| rich_coset_report(a, e)).collect();
    let rich_cosets_ok = rich_cosets.iter().all(|r| r.holds);
    let profile = coset_profile(a);
    let integral = integral_decomposition_check(&profile);
    let tb = theorem_bound(n);
    let fb = finite_bound(n);
    let within_theorem_bound = (a.len() as f64) <= tb;
    let within_finite_bound = (a.len() as f64) < fb;
    let ok = progression_free
        && disjointness_ok
        && rich_cosets_ok
        && integral.identity_ok
        && within_theorem_bound
        && within_finite_bound;
    VerifyReport {
        n,
        size: a.len(),
        progression_free,
        witness,
        profile,
        disjointness_ok,
        rich_cosets,
        rich_cosets_ok,
        integral,
        theorem_bound: tb,
        finite_bound: fb,
        within_theorem_bound,
        within_finite_bound,
        ok,
    }
}

pub fn verify_file(path: impl AsRef<Path>) -> Result<VerifyReport> {
    Ok(verify_set(&read_set(path)?))
}
