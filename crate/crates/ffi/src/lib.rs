//! C ABI over `interp-scales`.
//!
//! Functions, norming functions and couples are built from the same spec
//! strings the CLI accepts and handed out as opaque pointers that must be
//! released with the matching `*_free`. Every call returns an [`IsStatus`];
//! on failure [`is_last_error_message`] describes the error. Results are
//! written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use interp_scales::approx_spaces::{lorentz_marcinkiewicz_norm, phi_type_norm};
use interp_scales::boyd::{boyd_indices, BoydFunction};
use interp_scales::kfunc::{interpolation_norm, k_value, KMethod, SequenceCouple};
use interp_scales::operators::{approximation_numbers, DenseMatrix};
use interp_scales::parse::{parse_boyd, parse_snf, parse_space};
use interp_scales::sequences::{decreasing_rearrangement, DecreasingSequence, RawSequence};
use interp_scales::snorm::SymmetricNormingFunction;
use interp_scales::Error;

/// Result codes. `Ok` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    InvalidParameter = 5,
    Domain = 6,
    Truncation = 7,
    NumericalFailure = 8,
    Unsupported = 9,
    DivergentTail = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsKMethod {
    Exact = 0,
    Truncation = 1,
    Convex = 2,
}

impl From<IsKMethod> for KMethod {
    fn from(m: IsKMethod) -> Self {
        match m {
            IsKMethod::Exact => KMethod::Exact,
            IsKMethod::Truncation => KMethod::Truncation,
            IsKMethod::Convex => KMethod::Convex,
        }
    }
}

/// A function of class B.
pub struct IsBoydFunction(BoydFunction);

/// A symmetric norming function.
pub struct IsNormingFunction(SymmetricNormingFunction);

/// A pair of sequence spaces.
pub struct IsCouple(SequenceCouple);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(IsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidInput(_) => IsStatus::InvalidInput,
            Error::InvalidParameter(_) => IsStatus::InvalidParameter,
            Error::Domain(_) => IsStatus::Domain,
            Error::Truncation(_) => IsStatus::Truncation,
            Error::NumericalFailure { .. } => IsStatus::NumericalFailure,
            Error::Unsupported(_) => IsStatus::Unsupported,
            Error::DivergentTail(_) => IsStatus::DivergentTail,
            Error::Parse(_) => IsStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(IsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {message}"));
            IsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn sequence(values: *const f64, len: usize) -> Result<DecreasingSequence, Failure> {
    if len == 0 {
        return Ok(DecreasingSequence::zeros(0));
    }
    if values.is_null() {
        return Err(null("values"));
    }
    let raw = RawSequence::new(std::slice::from_raw_parts(values, len).to_vec())?;
    Ok(decreasing_rearrangement(&raw))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn is_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn is_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a function spec such as `power:0.4` or `phialphap:a=0.5,p=2`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn is_boyd_parse(spec: *const c_char, out: *mut *mut IsBoydFunction) -> IsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let f = parse_boyd(str_arg(spec, "spec")?)?;
        *out = boxed(IsBoydFunction(f));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`is_boyd_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn is_boyd_free(f: *mut IsBoydFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `φ(t)`.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn is_boyd_evaluate(f: *const IsBoydFunction, t: f64, out: *mut f64) -> IsStatus {
    guard(|| {
        let v = ref_arg(f, "function")?.0.evaluate(t)?;
        *out_arg(out, "out")? = v;
        Ok(())
    })
}

/// Estimated Boyd indices `β` (lower) and `α` (upper).
///
/// # Safety
/// `f` must be a live handle; `lower` and `upper` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn is_boyd_indices(f: *const IsBoydFunction, lower: *mut f64, upper: *mut f64) -> IsStatus {
    guard(|| {
        let idx = boyd_indices(&ref_arg(f, "function")?.0)?;
        let (lo, hi) = (out_arg(lower, "lower")?, out_arg(upper, "upper")?);
        *lo = idx.lower;
        *hi = idx.upper;
        Ok(())
    })
}

/// Parses `phi1`, `phiinf`, `eps:a=<a>` or `eps:a=<a>,p=<p>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn is_snf_parse(spec: *const c_char, out: *mut *mut IsNormingFunction) -> IsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let f = parse_snf(str_arg(spec, "spec")?)?;
        *out = boxed(IsNormingFunction(f));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`is_snf_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn is_snf_free(f: *mut IsNormingFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `Φ` of the decreasing rearrangement of `values[0..len]`.
///
/// # Safety
/// `f` must be a live handle, `values` must hold `len` doubles, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn is_phi_type_norm(
    f: *const IsNormingFunction,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> IsStatus {
    guard(|| {
        let v = phi_type_norm(&sequence(values, len)?, &ref_arg(f, "norming function")?.0)?;
        *out_arg(out, "out")? = v;
        Ok(())
    })
}

/// `(Σ [φ(n) a_n]^q / n)^{1/q}`; pass `q = INFINITY` for the sup form.
///
/// # Safety
/// `phi` must be a live handle, `values` must hold `len` doubles, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn is_lorentz_marcinkiewicz_norm(
    phi: *const IsBoydFunction,
    q: f64,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> IsStatus {
    guard(|| {
        let v = lorentz_marcinkiewicz_norm(&sequence(values, len)?, &ref_arg(phi, "function")?.0, q)?;
        *out_arg(out, "out")? = v;
        Ok(())
    })
}

/// Builds a couple from two space specs such as `lp:1` and `lp:inf`.
///
/// # Safety
/// `e0`, `e1` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn is_couple_parse(e0: *const c_char, e1: *const c_char, out: *mut *mut IsCouple) -> IsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a = parse_space(str_arg(e0, "e0")?)?;
        let b = parse_space(str_arg(e1, "e1")?)?;
        *out = boxed(IsCouple(SequenceCouple::new(a, b)));
        Ok(())
    })
}

/// # Safety
/// `c` must come from [`is_couple_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn is_couple_free(c: *mut IsCouple) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `K(t, x)` for the couple.
///
/// # Safety
/// `couple` must be a live handle, `values` must hold `len` doubles, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn is_k_functional(
    couple: *const IsCouple,
    method: IsKMethod,
    t: f64,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> IsStatus {
    guard(|| {
        let v = k_value(method.into(), t, &sequence(values, len)?, &ref_arg(couple, "couple")?.0)?;
        *out_arg(out, "out")? = v;
        Ok(())
    })
}

/// The `(E₀,E₁)_{φ,q}` norm with the default quadrature.
///
/// # Safety
/// Handles must be live, `values` must hold `len` doubles, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn is_interpolation_norm(
    couple: *const IsCouple,
    phi: *const IsBoydFunction,
    q: f64,
    method: IsKMethod,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> IsStatus {
    guard(|| {
        let x = sequence(values, len)?;
        let r = interpolation_norm(&x, &ref_arg(couple, "couple")?.0, &ref_arg(phi, "function")?.0, q, method.into())?;
        *out_arg(out, "out")? = r.value;
        Ok(())
    })
}

/// Singular values of the row-major `rows × cols` matrix, largest first.
/// `out` must have room for `min(rows, cols)` values; `out_len` receives
/// the count written (or required, on [`IsStatus::BufferTooSmall`]).
///
/// # Safety
/// `entries` must hold `rows * cols` doubles, `out` must hold `capacity`
/// doubles, `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn is_approximation_numbers(
    entries: *const f64,
    rows: usize,
    cols: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> IsStatus {
    guard(|| {
        let out_len = out_arg(out_len, "out_len")?;
        if entries.is_null() {
            return Err(null("entries"));
        }
        let count = rows.checked_mul(cols).ok_or_else(|| Failure(IsStatus::InvalidInput, "matrix too large".into()))?;
        let m = DenseMatrix::new(rows, cols, std::slice::from_raw_parts(entries, count).to_vec())?;
        let s = approximation_numbers(&m)?;
        *out_len = s.len();
        if capacity < s.len() {
            return Err(Failure(
                IsStatus::BufferTooSmall,
                format!("need room for {} values, got {capacity}", s.len()),
            ));
        }
        if out.is_null() && !s.is_empty() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(s.values().as_ptr(), out, s.len());
        Ok(())
    })
}
