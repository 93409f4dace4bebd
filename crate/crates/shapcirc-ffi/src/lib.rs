//! C ABI over the `shapcirc` library: opaque handles, integer status
//! codes, and a thread-local error message.
//!
//! Conventions:
//!
//! * Handles are created by `*_parse` functions and released by the
//!   matching `*_free`; freeing a null pointer is a no-op.
//! * Every fallible function returns a [`ShapcircStatus`] and writes its
//!   result through an `out` pointer, which is touched only on
//!   [`ShapcircStatus::Ok`].
//! * Strings returned through `char **out` are NUL-terminated, UTF-8, and
//!   owned by the caller; release them with [`shapcirc_string_free`].
//! * On failure, [`shapcirc_last_error`] returns a message describing the
//!   most recent error on the calling thread.
//! * Panics never unwind across the boundary; they surface as
//!   [`ShapcircStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use shapcirc::coeffs::CoefficientFunction;
use shapcirc::numeric::{render_rational, to_f64};
use shapcirc::scores::{escore_dd, ev};
use shapcirc::{Circuit, Probabilities};

/// Result of a `shapcirc_*` call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShapcircStatus {
    /// Success; any `out` parameter has been written.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// The input failed to parse or validate; see `shapcirc_last_error`.
    InvalidInput = 2,
    /// An internal invariant failed; see `shapcirc_last_error`.
    Panic = 3,
}

/// Coefficient family used when scoring a variable.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShapcircCoefficient {
    /// `c(k, ℓ) = 1/(k·C(k−1, ℓ))`.
    Shapley = 0,
    /// `c(k, ℓ) = 1`.
    Banzhaf = 1,
    /// `c(k, ℓ) = 2^(1−k)`.
    Penrose = 2,
}

impl From<ShapcircCoefficient> for CoefficientFunction {
    fn from(c: ShapcircCoefficient) -> Self {
        match c {
            ShapcircCoefficient::Shapley => CoefficientFunction::Shapley,
            ShapcircCoefficient::Banzhaf => CoefficientFunction::Banzhaf,
            ShapcircCoefficient::Penrose => CoefficientFunction::PenroseBanzhaf,
        }
    }
}

/// Opaque handle to a parsed deterministic-decomposable circuit.
pub struct ShapcircCircuit(Circuit);

/// Opaque handle to a variable-probability assignment.
pub struct ShapcircProbabilities(Probabilities);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: ShapcircStatus, message: &str) -> ShapcircStatus {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
    status
}

fn ok() -> ShapcircStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
    ShapcircStatus::Ok
}

/// Run `f` with panics converted to [`ShapcircStatus::Panic`].
fn catching(f: impl FnOnce() -> ShapcircStatus) -> ShapcircStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ShapcircStatus::Panic, "internal panic"))
}

/// # Safety
/// `text` must be null or point to a NUL-terminated string.
unsafe fn utf8_arg<'a>(text: *const c_char) -> Result<&'a str, ShapcircStatus> {
    if text.is_null() {
        return Err(fail(ShapcircStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(ShapcircStatus::InvalidInput, "argument is not valid UTF-8"))
}

unsafe fn circuit_arg<'a>(c: *const ShapcircCircuit) -> Result<&'a Circuit, ShapcircStatus> {
    c.as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| fail(ShapcircStatus::NullArgument, "null circuit handle"))
}

unsafe fn probabilities_arg<'a>(
    p: *const ShapcircProbabilities,
) -> Result<&'a Probabilities, ShapcircStatus> {
    p.as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| fail(ShapcircStatus::NullArgument, "null probabilities handle"))
}

fn out_arg<'a, T>(out: *mut T) -> Result<&'a mut T, ShapcircStatus> {
    // Out parameters are written exactly once on success.
    unsafe { out.as_mut() }.ok_or_else(|| fail(ShapcircStatus::NullArgument, "null out parameter"))
}

fn input_error(e: shapcirc::Error) -> ShapcircStatus {
    fail(ShapcircStatus::InvalidInput, &e.to_string())
}

fn export_string(s: String, out: &mut *mut c_char) -> ShapcircStatus {
    match CString::new(s) {
        Ok(cs) => {
            *out = cs.into_raw();
            ok()
        }
        Err(_) => fail(ShapcircStatus::Panic, "interior NUL in rendered string"),
    }
}

/// Library version as a static string; never freed by the caller.
#[no_mangle]
pub extern "C" fn shapcirc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent error on this thread (empty after a
/// success). The pointer stays valid until the next `shapcirc_*` call on
/// the same thread; never freed by the caller.
#[no_mangle]
pub extern "C" fn shapcirc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a circuit from its text format into a fresh handle.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_circuit_parse(
    text: *const c_char,
    out: *mut *mut ShapcircCircuit,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        let text = match utf8_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Circuit::parse(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(ShapcircCircuit(c)));
                ok()
            }
            Err(e) => input_error(e),
        }
    })
}

/// Release a circuit handle (null is a no-op).
///
/// # Safety
/// `c` must come from [`shapcirc_circuit_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_circuit_free(c: *mut ShapcircCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of variables in the circuit's universe.
///
/// # Safety
/// `c` must be a live circuit handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_circuit_num_vars(
    c: *const ShapcircCircuit,
    out: *mut u32,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        match circuit_arg(c) {
            Ok(c) => {
                *out = c.universe().len() as u32;
                ok()
            }
            Err(s) => s,
        }
    })
}

/// Parse a probability assignment (one `<var> <value>` pair per line).
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_probabilities_parse(
    text: *const c_char,
    out: *mut *mut ShapcircProbabilities,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        let text = match utf8_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Probabilities::parse(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(ShapcircProbabilities(p)));
                ok()
            }
            Err(e) => input_error(e),
        }
    })
}

/// Release a probabilities handle (null is a no-op).
///
/// # Safety
/// `p` must come from [`shapcirc_probabilities_parse`] and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_probabilities_free(p: *mut ShapcircProbabilities) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Expected value of the circuit, rounded to the nearest double.
///
/// # Safety
/// `c` and `p` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_ev(
    c: *const ShapcircCircuit,
    p: *const ShapcircProbabilities,
    out: *mut f64,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        let (c, p) = match (circuit_arg(c), probabilities_arg(p)) {
            (Ok(c), Ok(p)) => (c, p),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match ev(c, p) {
            Ok(v) => {
                *out = to_f64(&v);
                ok()
            }
            Err(e) => input_error(e),
        }
    })
}

/// Expected value of the circuit as an exact `"numerator/denominator"`
/// string owned by the caller.
///
/// # Safety
/// `c` and `p` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_ev_rational(
    c: *const ShapcircCircuit,
    p: *const ShapcircProbabilities,
    out: *mut *mut c_char,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        let (c, p) = match (circuit_arg(c), probabilities_arg(p)) {
            (Ok(c), Ok(p)) => (c, p),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match ev(c, p) {
            Ok(v) => export_string(render_rational(&v), out),
            Err(e) => input_error(e),
        }
    })
}

/// Expected score of variable `var`, rounded to the nearest double.
///
/// # Safety
/// `c` and `p` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_score(
    c: *const ShapcircCircuit,
    p: *const ShapcircProbabilities,
    var: u32,
    coeff: ShapcircCoefficient,
    out: *mut f64,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        let (c, p) = match (circuit_arg(c), probabilities_arg(p)) {
            (Ok(c), Ok(p)) => (c, p),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match escore_dd(c, p, var, &coeff.into()) {
            Ok(v) => {
                *out = to_f64(&v);
                ok()
            }
            Err(e) => input_error(e),
        }
    })
}

/// Expected score of variable `var` as an exact
/// `"numerator/denominator"` string owned by the caller.
///
/// # Safety
/// `c` and `p` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_score_rational(
    c: *const ShapcircCircuit,
    p: *const ShapcircProbabilities,
    var: u32,
    coeff: ShapcircCoefficient,
    out: *mut *mut c_char,
) -> ShapcircStatus {
    catching(|| {
        let out = match out_arg(out) {
            Ok(o) => o,
            Err(s) => return s,
        };
        let (c, p) = match (circuit_arg(c), probabilities_arg(p)) {
            (Ok(c), Ok(p)) => (c, p),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match escore_dd(c, p, var, &coeff.into()) {
            Ok(v) => export_string(render_rational(&v), out),
            Err(e) => input_error(e),
        }
    })
}

/// Release a string returned by this library (null is a no-op).
///
/// # Safety
/// `s` must come from a `shapcirc_*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn shapcirc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
