//! C ABI over the `z4ap` library.
//!
//! Every fallible function returns a [`Z4apStatus`]; on failure a message
//! is kept per thread and can be read with [`z4ap_last_error`]. Handles are
//! opaque, owned by the caller, and released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use z4ap::bounds::{compute_gamma, finite_bound, theorem_bound};
use z4ap::cosets::rich_coset_report;
use z4ap::search::{exact_r3, SearchResult};
use z4ap::setfile::{parse_set, read_set};
use z4ap::{Epsilon, Error, PointSet};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Z4apStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    TooLarge = 4,
    NotProgressionFree = 5,
    IoError = 6,
    BufferTooSmall = 7,
    Internal = 99,
}

/// A set of elements of `Z_4^n`.
pub struct Z4apPointSet {
    inner: PointSet,
}

/// Outcome of an exact search.
pub struct Z4apSearchResult {
    inner: SearchResult,
}

/// Rich-coset counts for one epsilon.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Z4apRichCosetReport {
    pub n: usize,
    pub rich_count: usize,
    /// log2 of the richness threshold.
    pub threshold_log2: f64,
    /// log2 of the bound on the number of rich cosets.
    pub bound_log2: f64,
    /// The threshold exceeds the coset size.
    pub vacuous: bool,
    /// rich_count is below the bound.
    pub holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> Z4apStatus {
    match e {
        Error::Parse { .. } | Error::InvalidEpsilon(_) | Error::InvalidDigit { .. } => Z4apStatus::ParseError,
        Error::TooLarge { .. } => Z4apStatus::TooLarge,
        Error::NotProgressionFree(..) => Z4apStatus::NotProgressionFree,
        Error::Io(_) => Z4apStatus::IoError,
        _ => Z4apStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> Z4apStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `f`, turning panics into [`Z4apStatus::Internal`].
fn guard(f: impl FnOnce() -> Z4apStatus) -> Z4apStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == Z4apStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => {
            set_error("internal error");
            Z4apStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Z4apStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(Z4apStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        Z4apStatus::InvalidArgument
    })
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return Z4apStatus::NullPointer;
        })+
    };
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn z4ap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

fn box_set(set: PointSet, out: *mut *mut Z4apPointSet) -> Z4apStatus {
    unsafe { *out = Box::into_raw(Box::new(Z4apPointSet { inner: set })) };
    Z4apStatus::Ok
}

/// Parses a set from text in the set file format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z4ap_point_set_parse(text: *const c_char, out: *mut *mut Z4apPointSet) -> Z4apStatus {
    guard(|| {
        non_null!(out);
        let text = try_status!(str_arg(text));
        match parse_set(text, 0) {
            Ok(s) => box_set(s, out),
            Err(e) => fail(e),
        }
    })
}

/// Reads a set file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z4ap_point_set_read_file(path: *const c_char, out: *mut *mut Z4apPointSet) -> Z4apStatus {
    guard(|| {
        non_null!(out);
        let path = try_status!(str_arg(path));
        match read_set(path) {
            Ok(s) => box_set(s, out),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `set` must come from this library and not have been freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn z4ap_point_set_free(set: *mut Z4apPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of elements; 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z4ap_point_set_len(set: *const Z4apPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Ambient dimension `n`; 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z4ap_point_set_dim(set: *const Z4apPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.dim())
}

/// Copies the digits of element `index` (lexicographic order) into
/// `digits`, which must hold `n` bytes.
///
/// # Safety
/// `set` must be a live handle; `digits` must point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn z4ap_point_set_element(
    set: *const Z4apPointSet,
    index: usize,
    digits: *mut u8,
    cap: usize,
) -> Z4apStatus {
    guard(|| {
        non_null!(set, digits);
        let s = &(*set).inner;
        let Some(g) = s.elements().get(index) else {
            set_error(format!("index {index} out of range for {} elements", s.len()));
            return Z4apStatus::InvalidArgument;
        };
        if cap < s.dim() {
            set_error(format!("buffer holds {cap} digits, need {}", s.dim()));
            return Z4apStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(g.digits().as_ptr(), digits, s.dim());
        Z4apStatus::Ok
    })
}

/// Decides progression-freeness. When the set has a progression and
/// `witness` is non-NULL, the triple `(a, b, c)` with `a + b = 2c` is
/// written there as `3n` digits.
///
/// # Safety
/// `set` must be a live handle, `result` writable, and `witness` either
/// NULL or `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn z4ap_is_progression_free(
    set: *const Z4apPointSet,
    result: *mut bool,
    witness: *mut u8,
    cap: usize,
) -> Z4apStatus {
    guard(|| {
        non_null!(set, result);
        let s = &(*set).inner;
        let found = s.find_progression();
        *result = found.is_none();
        if let (Some(p), false) = (found, witness.is_null()) {
            let n = s.dim();
            if cap < 3 * n {
                set_error(format!("witness buffer holds {cap} digits, need {}", 3 * n));
                return Z4apStatus::BufferTooSmall;
            }
            for (k, g) in [p.a, p.b, p.c].iter().enumerate() {
                ptr::copy_nonoverlapping(g.digits().as_ptr(), witness.add(k * n), n);
            }
        }
        Z4apStatus::Ok
    })
}

/// The constant `γ` and its maximizer, to tolerance `tol`.
///
/// # Safety
/// `gamma` must be writable; `eps_star` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn z4ap_gamma(tol: f64, gamma: *mut f64, eps_star: *mut f64) -> Z4apStatus {
    guard(|| {
        non_null!(gamma);
        match compute_gamma(tol) {
            Ok(g) => {
                *gamma = g.gamma;
                if !eps_star.is_null() {
                    *eps_star = g.eps_star;
                }
                Z4apStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `4^{γn}`.
#[no_mangle]
pub extern "C" fn z4ap_theorem_bound(n: usize) -> f64 {
    theorem_bound(n)
}

/// `(n + 2) · 4^{γn}`.
#[no_mangle]
pub extern "C" fn z4ap_finite_bound(n: usize) -> f64 {
    finite_bound(n)
}

/// Exact maximum progression-free set in `Z_4^n` by branch-and-bound.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z4ap_exact_r3(n: usize, budget: u64, out: *mut *mut Z4apSearchResult) -> Z4apStatus {
    guard(|| {
        non_null!(out);
        match exact_r3(n, budget) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(Z4apSearchResult { inner: r }));
                Z4apStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z4ap_search_result_free(r: *mut Z4apSearchResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z4ap_search_result_best_size(r: *const Z4apSearchResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.best_size)
}

/// Whether the size is proven maximal.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z4ap_search_result_exact(r: *const Z4apSearchResult) -> bool {
    r.as_ref().is_some_and(|r| r.inner.exact)
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z4ap_search_result_nodes(r: *const Z4apSearchResult) -> u64 {
    r.as_ref().map_or(0, |r| r.inner.nodes_explored)
}

/// A new set handle holding a copy of the witness.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z4ap_search_result_witness(
    r: *const Z4apSearchResult,
    out: *mut *mut Z4apPointSet,
) -> Z4apStatus {
    guard(|| {
        non_null!(r, out);
        box_set((*r).inner.witness.clone(), out)
    })
}

/// Rich-coset counts for `ε = eps_num / eps_den`.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z4ap_rich_coset_report(
    set: *const Z4apPointSet,
    eps_num: i64,
    eps_den: i64,
    out: *mut Z4apRichCosetReport,
) -> Z4apStatus {
    guard(|| {
        non_null!(set, out);
        let eps = match Epsilon::new(eps_num, eps_den) {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        let r = rich_coset_report(&(*set).inner, eps);
        *out = Z4apRichCosetReport {
            n: r.n,
            rich_count: r.rich_count,
            threshold_log2: r.threshold_log2,
            bound_log2: r.bound_log2,
            vacuous: r.vacuous,
            holds: r.holds,
        };
        Z4apStatus::Ok
    })
}
