//! C ABI over the search library.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns a [`HoggStatus`] and leaves a message retrievable
//! through [`hogg_last_error`] on failure. Buffers are caller-allocated and
//! passed with their length, so the library never owns caller memory.
//! The generated header lives at `include/hoggsim.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use hoggsim::error::Error;
use hoggsim::sat::Formula;
use hoggsim::search::{self, SearchResult};

/// Result of any fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HoggStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Formula text did not parse.
    ParseError = 3,
    /// The inputs parsed but name an unsupported or inconsistent problem.
    DomainError = 4,
    /// A caller buffer had the wrong length.
    BadLength = 5,
    /// An index argument was out of range.
    IndexOutOfRange = 6,
}

/// A parsed formula. Opaque; release with `hogg_formula_free`.
pub struct HoggFormula(Formula);

/// A completed search run. Opaque; release with `hogg_search_free`.
pub struct HoggSearchResult(SearchResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HoggStatus, message: &str) -> HoggStatus {
    let stored = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("unrepresentable error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
    status
}

fn fail_with(e: &Error) -> HoggStatus {
    let status = match e {
        Error::EmptyFormula
        | Error::EmptyClause { .. }
        | Error::InvalidLiteral { .. }
        | Error::InvalidVarCount { .. }
        | Error::VariableOutOfRange { .. }
        | Error::NoVariables => HoggStatus::ParseError,
        _ => HoggStatus::DomainError,
    };
    fail(status, &e.to_string())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn hogg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message from the most recent failure on this thread, empty if none yet.
/// The pointer stays valid until the next failing call on the same thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn hogg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse formula text (e.g. "1, -2" or "n=3; 2") into a handle written to
/// `out`.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to writable
/// pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hogg_formula_parse(
    text: *const c_char,
    out: *mut *mut HoggFormula,
) -> HoggStatus {
    if text.is_null() || out.is_null() {
        return fail(HoggStatus::NullArgument, "text and out must be non-null");
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(s) => s,
        Err(_) => return fail(HoggStatus::InvalidUtf8, "formula text is not UTF-8"),
    };
    match text.parse::<Formula>() {
        Ok(f) => {
            *out = Box::into_raw(Box::new(HoggFormula(f)));
            HoggStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Release a formula handle. Null is a no-op.
///
/// # Safety
/// `f` must be null or a pointer from `hogg_formula_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hogg_formula_free(f: *mut HoggFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn hogg_formula_var_count(f: *const HoggFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.var_count())
}

/// Number of clauses, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live formula handle.
#[no_mangle]
pub unsafe extern "C" fn hogg_formula_clause_count(f: *const HoggFormula) -> usize {
    f.as_ref().map_or(0, |f| f.0.clause_count())
}

/// Write the canonical formula text to `out` as a heap string; release it
/// with `hogg_string_free`.
///
/// # Safety
/// `f` must be a live formula handle and `out` writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hogg_formula_to_text(
    f: *const HoggFormula,
    out: *mut *mut c_char,
) -> HoggStatus {
    let Some(f) = f.as_ref() else {
        return fail(HoggStatus::NullArgument, "formula handle is null");
    };
    if out.is_null() {
        return fail(HoggStatus::NullArgument, "out must be non-null");
    }
    // Canonical text never contains NUL.
    *out = CString::new(f.0.to_string()).unwrap().into_raw();
    HoggStatus::Ok
}

/// Release a string produced by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string pointer this library returned, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hogg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run the single-step search and write a result handle to `out`.
///
/// # Safety
/// `f` must be a live formula handle and `out` writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_run(
    f: *const HoggFormula,
    out: *mut *mut HoggSearchResult,
) -> HoggStatus {
    let Some(f) = f.as_ref() else {
        return fail(HoggStatus::NullArgument, "formula handle is null");
    };
    if out.is_null() {
        return fail(HoggStatus::NullArgument, "out must be non-null");
    }
    match search::run_search(&f.0) {
        Ok(result) => {
            *out = Box::into_raw(Box::new(HoggSearchResult(result)));
            HoggStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Release a search result handle. Null is a no-op.
///
/// # Safety
/// `r` must be null or a pointer from `hogg_search_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_free(r: *mut HoggSearchResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// State dimension (2^n), or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_dim(r: *const HoggSearchResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.final_state().dim())
}

/// Whether the instance was satisfiable 1-SAT with distinct clause
/// variables, making the search exact. False for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_guaranteed(r: *const HoggSearchResult) -> bool {
    r.as_ref().is_some_and(|r| r.0.guaranteed())
}

/// Copy the answer-state amplitudes into `out` interleaved as
/// re0, im0, re1, im1, ...; `len` must be exactly 2 * dim.
///
/// # Safety
/// `r` must be a live result handle and `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_amplitudes(
    r: *const HoggSearchResult,
    out: *mut f64,
    len: usize,
) -> HoggStatus {
    let Some(r) = r.as_ref() else {
        return fail(HoggStatus::NullArgument, "result handle is null");
    };
    if out.is_null() {
        return fail(HoggStatus::NullArgument, "out must be non-null");
    }
    let amps = r.0.final_state().amplitudes();
    if len != 2 * amps.len() {
        return fail(
            HoggStatus::BadLength,
            &format!(
                "amplitude buffer needs {} doubles, got {len}",
                2 * amps.len()
            ),
        );
    }
    let out = std::slice::from_raw_parts_mut(out, len);
    for (i, a) in amps.iter().enumerate() {
        out[2 * i] = a.re;
        out[2 * i + 1] = a.im;
    }
    HoggStatus::Ok
}

/// Copy the measurement probabilities into `out`; `len` must be exactly dim.
///
/// # Safety
/// `r` must be a live result handle and `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_probabilities(
    r: *const HoggSearchResult,
    out: *mut f64,
    len: usize,
) -> HoggStatus {
    let Some(r) = r.as_ref() else {
        return fail(HoggStatus::NullArgument, "result handle is null");
    };
    if out.is_null() {
        return fail(HoggStatus::NullArgument, "out must be non-null");
    }
    let probs = r.0.probabilities();
    if len != probs.len() {
        return fail(
            HoggStatus::BadLength,
            &format!(
                "probability buffer needs {} doubles, got {len}",
                probs.len()
            ),
        );
    }
    std::slice::from_raw_parts_mut(out, len).copy_from_slice(probs);
    HoggStatus::Ok
}

/// Number of decoded solutions, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_solution_count(r: *const HoggSearchResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.decoded_solutions().len())
}

/// Write the basis index of decoded solution `i` to `out`. The bit at
/// position n-1-k of the index holds variable k+1.
///
/// # Safety
/// `r` must be a live result handle and `out` writable u64 storage.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_solution_index(
    r: *const HoggSearchResult,
    i: usize,
    out: *mut u64,
) -> HoggStatus {
    let Some(r) = r.as_ref() else {
        return fail(HoggStatus::NullArgument, "result handle is null");
    };
    if out.is_null() {
        return fail(HoggStatus::NullArgument, "out must be non-null");
    }
    match r.0.decoded_solutions().get(i) {
        Some(a) => {
            *out = a.index() as u64;
            HoggStatus::Ok
        }
        None => fail(
            HoggStatus::IndexOutOfRange,
            &format!("solution {i} of {}", r.0.decoded_solutions().len()),
        ),
    }
}

/// Serialize the full result as JSON into a heap string written to `out`;
/// release it with `hogg_string_free`.
///
/// # Safety
/// `r` must be a live result handle and `out` writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn hogg_search_to_json(
    r: *const HoggSearchResult,
    out: *mut *mut c_char,
) -> HoggStatus {
    let Some(r) = r.as_ref() else {
        return fail(HoggStatus::NullArgument, "result handle is null");
    };
    if out.is_null() {
        return fail(HoggStatus::NullArgument, "out must be non-null");
    }
    match serde_json::to_string(&r.0) {
        Ok(json) => {
            *out = CString::new(json).unwrap().into_raw();
            HoggStatus::Ok
        }
        Err(e) => fail(HoggStatus::DomainError, &e.to_string()),
    }
}

/// Verify every formula on `n` variables; writes how many passed and how
/// many exist.
///
/// # Safety
/// `out_passed` and `out_total` must be writable size_t storage.
#[no_mangle]
pub unsafe extern "C" fn hogg_sweep(
    n: usize,
    out_passed: *mut usize,
    out_total: *mut usize,
) -> HoggStatus {
    if out_passed.is_null() || out_total.is_null() {
        return fail(
            HoggStatus::NullArgument,
            "out_passed and out_total must be non-null",
        );
    }
    match search::sweep(n) {
        Ok(report) => {
            *out_passed = report.pass_count;
            *out_total = report.formula_count;
            HoggStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}
