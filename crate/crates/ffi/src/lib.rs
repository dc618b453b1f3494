//! C interface to `predictive-theory`.
//!
//! Theories and predictions are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns a
//! [`PtStatus`]; on failure [`pt_last_error_message`] describes the error.
//! Strings returned as `*const c_char` are borrowed from their handle;
//! strings returned as `*mut c_char` are owned and go back through
//! [`pt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_rational::BigRational;
use predictive_theory::cli::trace_json;
use predictive_theory::{load_theory, parse_situation, predict, Flag, PredictiveTheory, Scalar, ValidationStatus};

/// Result of a call. The parse, validation and situation codes match the
/// `ptheory` exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    Parse = 2,
    Validation = 3,
    Situation = 4,
    NullPointer = 10,
    InvalidUtf8 = 11,
    OutOfRange = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtValidity {
    Valid = 0,
    Invalid = 1,
    /// The enumeration cap was reached before any violation turned up.
    Incomplete = 2,
}

pub const PT_FLAG_ZERO_SUM_FALLBACK: u32 = 1;
pub const PT_FLAG_NON_SEPARABLE_FALLBACK: u32 = 1 << 1;
pub const PT_FLAG_RECURSION_GUARD: u32 = 1 << 2;
pub const PT_FLAG_DIVISION_SHIELD: u32 = 1 << 3;

/// A checked theory.
pub struct PtTheory {
    inner: PredictiveTheory,
}

/// One prediction: target values with exact and floating probabilities.
pub struct PtPrediction {
    values: Vec<CString>,
    exact: Vec<CString>,
    probabilities: Vec<f64>,
    flags: u32,
    json: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: PtStatus, message: impl Into<String>) -> PtStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> PtStatus) -> PtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(cause) => {
            let message = cause
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| cause.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PtStatus::Panic, message)
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, PtStatus> {
    if p.is_null() {
        return Err(fail(PtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(PtStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn flag_bits(flags: impl IntoIterator<Item = Flag>) -> u32 {
    flags.into_iter().fold(0, |acc, f| {
        acc | match f {
            Flag::ZeroSumFallback => PT_FLAG_ZERO_SUM_FALLBACK,
            Flag::NonSeparableFallback => PT_FLAG_NON_SEPARABLE_FALLBACK,
            Flag::RecursionGuard => PT_FLAG_RECURSION_GUARD,
            Flag::DivisionShield => PT_FLAG_DIVISION_SHIELD,
        }
    })
}

fn c_string(s: String) -> CString {
    CString::new(s).unwrap_or_default()
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and checks theory source text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_theory_parse(source: *const c_char, out: *mut *mut PtTheory) -> PtStatus {
    guard(|| {
        if out.is_null() {
            return fail(PtStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let source = match text(source, "source") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match load_theory(source) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PtTheory { inner }));
                PtStatus::Ok
            }
            Err(e) => fail(PtStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `theory` must come from [`pt_theory_parse`] and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn pt_theory_free(theory: *mut PtTheory) {
    if !theory.is_null() {
        drop(Box::from_raw(theory));
    }
}

/// Number of rules, or 0 for a null handle.
///
/// # Safety
/// `theory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_theory_rule_count(theory: *const PtTheory) -> usize {
    theory.as_ref().map_or(0, |t| t.inner.rules().len())
}

/// Checks that every situation has a separable MSR set, visiting at most
/// `cap` situations. Returns [`PtStatus::Validation`] when the theory is
/// invalid, with the first witness in the error message.
///
/// # Safety
/// `theory` must be a live handle and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pt_theory_validate(theory: *const PtTheory, cap: u64, out: *mut PtValidity) -> PtStatus {
    guard(|| {
        let Some(theory) = theory.as_ref() else {
            return fail(PtStatus::NullPointer, "theory is null");
        };
        let report = theory.inner.check_uniquely_predictive(cap);
        let validity = match report.status {
            ValidationStatus::Valid => PtValidity::Valid,
            ValidationStatus::Invalid => PtValidity::Invalid,
            ValidationStatus::Incomplete => PtValidity::Incomplete,
        };
        if let Some(out) = out.as_mut() {
            *out = validity;
        }
        match report.violations.first() {
            Some(v) => fail(
                PtStatus::Validation,
                format!(
                    "not uniquely predictive: MSRs {} are not separable",
                    theory.inner.names(&v.msrs).join(", ")
                ),
            ),
            None => PtStatus::Ok,
        }
    })
}

/// Predicts the target distribution for a situation such as
/// `"A = true, B = true"`. Arithmetic is exact.
///
/// # Safety
/// `theory` must be a live handle, `situation` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_query(
    theory: *const PtTheory,
    situation: *const c_char,
    out: *mut *mut PtPrediction,
) -> PtStatus {
    guard(|| {
        if out.is_null() {
            return fail(PtStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(theory) = theory.as_ref() else {
            return fail(PtStatus::NullPointer, "theory is null");
        };
        let situation = match text(situation, "situation") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let schema = match parse_situation(&theory.inner, situation) {
            Ok(s) => s,
            Err(e) => return fail(PtStatus::Situation, e.to_string()),
        };
        let p = predict::<BigRational>(&theory.inner, &schema);
        let prediction = PtPrediction {
            values: p.distribution.iter().map(|(v, _)| c_string(v.to_string())).collect(),
            exact: p.distribution.iter().map(|(_, q)| c_string(q.render())).collect(),
            probabilities: p.distribution.iter().map(|(_, q)| q.to_f64()).collect(),
            flags: flag_bits(p.flags()),
            json: trace_json(&theory.inner, &p.trace).to_string(),
        };
        *out = Box::into_raw(Box::new(prediction));
        PtStatus::Ok
    })
}

/// # Safety
/// `prediction` must come from [`pt_query`] and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_free(prediction: *mut PtPrediction) {
    if !prediction.is_null() {
        drop(Box::from_raw(prediction));
    }
}

/// Number of target values, or 0 for a null handle.
///
/// # Safety
/// `prediction` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_len(prediction: *const PtPrediction) -> usize {
    prediction.as_ref().map_or(0, |p| p.values.len())
}

/// The `index`-th target value, or null when out of range.
///
/// # Safety
/// `prediction` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_value(prediction: *const PtPrediction, index: usize) -> *const c_char {
    prediction.as_ref().and_then(|p| p.values.get(index)).map_or(ptr::null(), |s| s.as_ptr())
}

/// The `index`-th probability as an exact fraction such as `"27/34"`, or
/// null when out of range.
///
/// # Safety
/// `prediction` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_exact(prediction: *const PtPrediction, index: usize) -> *const c_char {
    prediction.as_ref().and_then(|p| p.exact.get(index)).map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `prediction` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_probability(
    prediction: *const PtPrediction,
    index: usize,
    out: *mut f64,
) -> PtStatus {
    let (Some(p), Some(out)) = (prediction.as_ref(), out.as_mut()) else {
        return fail(PtStatus::NullPointer, "prediction or out is null");
    };
    match p.probabilities.get(index) {
        Some(q) => {
            *out = *q;
            PtStatus::Ok
        }
        None => fail(PtStatus::OutOfRange, format!("index {index} out of range 0..{}", p.probabilities.len())),
    }
}

/// Heuristic events behind the prediction as `PT_FLAG_*` bits.
///
/// # Safety
/// `prediction` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_flags(prediction: *const PtPrediction) -> u32 {
    prediction.as_ref().map_or(0, |p| p.flags)
}

/// The full derivation as JSON. Release with [`pt_string_free`]. Null for
/// a null handle.
///
/// # Safety
/// `prediction` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_prediction_to_json(prediction: *const PtPrediction) -> *mut c_char {
    prediction.as_ref().map_or(ptr::null_mut(), |p| c_string(p.json.clone()).into_raw())
}

/// # Safety
/// `s` must be null or come from a function documented to return an owned
/// string.
#[no_mangle]
pub unsafe extern "C" fn pt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
