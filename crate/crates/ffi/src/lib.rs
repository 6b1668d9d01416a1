//! C ABI over the polyzeta engine.
//!
//! A computed expansion lives behind the opaque `PzExpansion` handle. Every
//! fallible call returns a `PzStatus`; on failure the message is available
//! from `pz_last_error` on the same thread until the next call. Strings
//! handed out by the library are freed with `pz_string_free`, handles with
//! `pz_expansion_free`. No call unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyzeta::engine::{self, EngineState};
use polyzeta::mzvalg::LambdaPoly;
use polyzeta::numeval::{evaluate_expansion, lambda_poly_numeric, mzv_elem_numeric, disk_eigenvalue};
use polyzeta::serialize;
use polyzeta::Error;

/// Largest weight accepted by `pz_compute`; beyond it runs take hours.
pub const PZ_MAX_WEIGHT: u32 = 16;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NumericError = 4,
    ComputationFailed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Engine state with its coefficients C_0..C_W.
pub struct PzExpansion {
    state: EngineState,
    c: Vec<LambdaPoly>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PzStatus {
    match e {
        Error::InvalidArgument(_) | Error::Precondition(_) => PzStatus::InvalidArgument,
        Error::Parse(_) | Error::Serialization(_) => PzStatus::ParseError,
        Error::Numeric(_) => PzStatus::NumericError,
        _ => PzStatus::ComputationFailed,
    }
}

fn fail(status: PzStatus, msg: impl Into<String>) -> PzStatus {
    set_error(msg.into());
    status
}

/// Runs `f` with the error slot cleared, mapping errors and panics to codes.
fn guard(f: impl FnOnce() -> Result<(), PzStatus>) -> PzStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PzStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PzStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn lift<T>(r: polyzeta::Result<T>) -> Result<T, PzStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), PzStatus> {
    if p.is_null() {
        Err(fail(PzStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn handle<'a>(h: *const PzExpansion) -> Result<&'a PzExpansion, PzStatus> {
    non_null(h, "expansion handle")?;
    Ok(&*h)
}

fn to_c_string(s: String) -> Result<*mut c_char, PzStatus> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(PzStatus::ComputationFailed, "string contains NUL"))
}

/// Runs the engine through weight `max_weight` (1..=PZ_MAX_WEIGHT) and
/// stores a new handle in `*out`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pz_compute(max_weight: u32, out: *mut *mut PzExpansion) -> PzStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        if !(1..=PZ_MAX_WEIGHT).contains(&max_weight) {
            return Err(fail(PzStatus::InvalidArgument, format!("max_weight must lie in 1..={PZ_MAX_WEIGHT}")));
        }
        let state = lift(engine::run(max_weight as usize))?;
        let c = lift(state.c_coefficients())?;
        *out = Box::into_raw(Box::new(PzExpansion { state, c }));
        Ok(())
    })
}

/// Rebuilds a handle from a document produced by `pz_to_json` or
/// `polyzeta compute --format json`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pz_from_json(json: *const c_char, out: *mut *mut PzExpansion) -> PzStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        non_null(json, "json")?;
        let text = CStr::from_ptr(json).to_str().map_err(|_| fail(PzStatus::ParseError, "json is not UTF-8"))?;
        let doc = lift(serialize::from_str(text))?;
        let (state, c) = lift(serialize::engine_from_json(&doc))?;
        *out = Box::into_raw(Box::new(PzExpansion { state, c }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pz_expansion_free(h: *mut PzExpansion) {
    if !h.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(h))));
    }
}

/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pz_max_weight(h: *const PzExpansion, out: *mut u32) -> PzStatus {
    guard(|| {
        let e = handle(h)?;
        non_null(out, "out")?;
        *out = e.state.order as u32;
        Ok(())
    })
}

/// The full state as JSON; free the result with `pz_string_free`.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pz_to_json(h: *const PzExpansion, out: *mut *mut c_char) -> PzStatus {
    guard(|| {
        let e = handle(h)?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let text = lift(serialize::to_string(&serialize::engine_to_json(&e.state, &e.c)))?;
        *out = to_c_string(text)?;
        Ok(())
    })
}

fn coefficient(e: &PzExpansion, n: u32) -> Result<&LambdaPoly, PzStatus> {
    e.c.get(n as usize).filter(|_| n >= 1).ok_or_else(|| {
        fail(PzStatus::InvalidArgument, format!("C_n is available for 1 <= n <= {}, got {n}", e.state.order))
    })
}

/// C_n as text, highest lambda power first, e.g. `(-2*z(5))*L + (12*z(5))`.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pz_coefficient_string(h: *const PzExpansion, n: u32, out: *mut *mut c_char) -> PzStatus {
    guard(|| {
        let e = handle(h)?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        *out = to_c_string(polyzeta::cli::lambda_poly_display(coefficient(e, n)?))?;
        Ok(())
    })
}

/// Numeric lambda-coefficients of C_n: `values[d]` multiplies lambda^d.
/// `*len` is the number written; when `cap` is too small nothing is written,
/// `*len` holds the required size and the status is `BufferTooSmall`.
///
/// # Safety
/// `h` must be a live handle, `values` valid for `cap` writes (may be null
/// when `cap` is 0), `len` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pz_coefficient_values(
    h: *const PzExpansion,
    n: u32,
    prec_bits: u32,
    values: *mut f64,
    cap: usize,
    len: *mut usize,
) -> PzStatus {
    guard(|| {
        let e = handle(h)?;
        non_null(len, "len")?;
        check_prec(prec_bits)?;
        let cn = coefficient(e, n)?;
        let need = cn.coeffs().len();
        *len = need;
        if need > cap {
            return Err(fail(PzStatus::BufferTooSmall, format!("{need} values needed, room for {cap}")));
        }
        if need > 0 {
            non_null(values, "values")?;
        }
        for (d, c) in cn.coeffs().iter().enumerate() {
            *values.add(d) = lift(mzv_elem_numeric(c, prec_bits))?.re.mid_f64();
        }
        Ok(())
    })
}

fn check_prec(prec_bits: u32) -> Result<(), PzStatus> {
    if (64..=polyzeta::cli::MAX_CLI_PREC).contains(&prec_bits) {
        Ok(())
    } else {
        Err(fail(PzStatus::InvalidArgument, format!("precision must lie in 64..={}", polyzeta::cli::MAX_CLI_PREC)))
    }
}

/// C_n at lambda = j_{0,m}^2.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pz_coefficient_at_mode(h: *const PzExpansion, n: u32, m: u32, prec_bits: u32, out: *mut f64) -> PzStatus {
    guard(|| {
        let e = handle(h)?;
        non_null(out, "out")?;
        check_prec(prec_bits)?;
        if m == 0 {
            return Err(fail(PzStatus::InvalidArgument, "m counts zeros of J0 from 1"));
        }
        let lambda = lift(disk_eigenvalue(m, prec_bits))?;
        *out = lift(lambda_poly_numeric(coefficient(e, n)?, &lambda, prec_bits))?.re.mid_f64();
        Ok(())
    })
}

/// lambda(P_N)/lambda_m truncated after N^-terms, and optionally the
/// eigenvalue estimate lambda_m times that ratio (`eigenvalue` may be null).
///
/// # Safety
/// `h` must be a live handle; `ratio` valid for a write; `eigenvalue` null
/// or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pz_eval_expansion(
    h: *const PzExpansion,
    n_sides: u64,
    terms: u32,
    m: u32,
    prec_bits: u32,
    ratio: *mut f64,
    eigenvalue: *mut f64,
) -> PzStatus {
    guard(|| {
        let e = handle(h)?;
        non_null(ratio, "ratio")?;
        check_prec(prec_bits)?;
        if m == 0 {
            return Err(fail(PzStatus::InvalidArgument, "m counts zeros of J0 from 1"));
        }
        let r = lift(evaluate_expansion(n_sides, terms as usize, m, &e.c, prec_bits))?;
        *ratio = r.mid_f64();
        if !eigenvalue.is_null() {
            *eigenvalue = r.mul(&lift(disk_eigenvalue(m, prec_bits))?).mid_f64();
        }
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn pz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
