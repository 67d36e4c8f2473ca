//! C ABI over jtlab. Objects cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free`. Every fallible call returns
//! a `JtStatus`; the message of the last failure on the calling thread is
//! available from `jt_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jtlab::lab::{run_suite, TrialConfig};
use jtlab::linalg::C64;
use jtlab::spectral::atomic_decompose;
use jtlab::{AtomicDecomposition, Element, Error, FactorDescriptor};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidFactor = 3,
    ShapeMismatch = 4,
    MembershipViolation = 5,
    FactorMismatch = 6,
    BufferTooSmall = 7,
    OutOfRange = 8,
    Config = 9,
    Json = 10,
    Numerical = 11,
    CheckFailed = 12,
    Panic = 13,
}

/// An element of a Cartan factor.
pub struct JtElement(Element);

/// Atomic decomposition `x = Σ λ_i v_i`.
pub struct JtDecomposition {
    factor: FactorDescriptor,
    dec: AtomicDecomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> JtStatus {
    match e {
        Error::InvalidFactor(_) => JtStatus::InvalidFactor,
        Error::ShapeMismatch { .. } => JtStatus::ShapeMismatch,
        Error::MembershipViolation { .. } => JtStatus::MembershipViolation,
        Error::FactorMismatch => JtStatus::FactorMismatch,
        Error::Config(_) => JtStatus::Config,
        Error::Json(_) => JtStatus::Json,
        _ => JtStatus::Numerical,
    }
}

fn fail(status: JtStatus, msg: &str) -> JtStatus {
    set_error(msg);
    status
}

/// Run `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), JtStatus>) -> JtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(JtStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: jtlab::Result<T>) -> Result<T, JtStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, JtStatus> {
    if p.is_null() {
        return Err(fail(JtStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(JtStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, JtStatus> {
    p.as_ref().ok_or_else(|| fail(JtStatus::NullPointer, "null handle"))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, JtStatus> {
    p.as_mut().ok_or_else(|| fail(JtStatus::NullPointer, "null output pointer"))
}

/// Message of the last failed call on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn jt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build an element from `len` interleaved `(re, im)` pairs in row-major
/// order. `factor` uses the grammar `type1:PxQ | type2:N | type3:N | spin:D`.
///
/// # Safety
/// `factor` must be a NUL-terminated string, `data` must point to `2 * len`
/// doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jt_element_new(
    factor: *const c_char,
    data: *const f64,
    len: usize,
    out: *mut *mut JtElement,
) -> JtStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let f: FactorDescriptor = lift(str_arg(factor)?.parse())?;
        if data.is_null() && len > 0 {
            return Err(fail(JtStatus::NullPointer, "null data"));
        }
        let raw = if len == 0 { &[][..] } else { std::slice::from_raw_parts(data, 2 * len) };
        let entries: Vec<C64> = raw.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        let x = lift(Element::from_complex(f, &entries))?;
        *out = Box::into_raw(Box::new(JtElement(x)));
        Ok(())
    })
}

/// Build an element from its JSON form `{"factor": ..., "data": ...}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jt_element_from_json(json: *const c_char, out: *mut *mut JtElement) -> JtStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let v: serde_json::Value = lift(serde_json::from_str(str_arg(json)?).map_err(Error::from))?;
        let x = lift(Element::from_json(&v))?;
        *out = Box::into_raw(Box::new(JtElement(x)));
        Ok(())
    })
}

/// # Safety
/// `x` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jt_element_free(x: *mut JtElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Matrix shape of the element; spin elements report `dim x 1`.
///
/// # Safety
/// `x` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jt_element_shape(x: *const JtElement, rows: *mut usize, cols: *mut usize) -> JtStatus {
    guard(|| {
        let x = handle(x)?;
        let (r, c) = x.0.factor().shape();
        *out_ptr(rows)? = r;
        *out_ptr(cols)? = c;
        Ok(())
    })
}

/// Copy the entries as interleaved `(re, im)` pairs, row major. `cap` is the
/// number of pairs `buf` can hold.
///
/// # Safety
/// `x` must be a live handle and `buf` must hold `2 * cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn jt_element_data(x: *const JtElement, buf: *mut f64, cap: usize) -> JtStatus {
    guard(|| {
        let x = handle(x)?;
        let d = x.0.data();
        let (r, c) = d.shape();
        if cap < r * c {
            return Err(fail(JtStatus::BufferTooSmall, &format!("need {} pairs", r * c)));
        }
        if buf.is_null() {
            return Err(fail(JtStatus::NullPointer, "null buffer"));
        }
        let out = std::slice::from_raw_parts_mut(buf, 2 * r * c);
        for i in 0..r {
            for j in 0..c {
                out[2 * (i * c + j)] = d[(i, j)].re;
                out[2 * (i * c + j) + 1] = d[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// The triple norm.
///
/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jt_element_norm(x: *const JtElement, out: *mut f64) -> JtStatus {
    guard(|| {
        *out_ptr(out)? = handle(x)?.0.norm();
        Ok(())
    })
}

/// `{x, y, z}` as a new handle.
///
/// # Safety
/// `x`, `y`, `z` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jt_triple_product(
    x: *const JtElement,
    y: *const JtElement,
    z: *const JtElement,
    out: *mut *mut JtElement,
) -> JtStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let t = lift(jtlab::factor::triple_product(&handle(x)?.0, &handle(y)?.0, &handle(z)?.0))?;
        *out = Box::into_raw(Box::new(JtElement(t)));
        Ok(())
    })
}

/// Atomic decomposition of `x`.
///
/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jt_decompose(x: *const JtElement, out: *mut *mut JtDecomposition) -> JtStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let x = handle(x)?;
        let dec = atomic_decompose(&x.0);
        *out = Box::into_raw(Box::new(JtDecomposition { factor: x.0.factor(), dec }));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jt_decomposition_free(d: *mut JtDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of atoms.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jt_decomposition_len(d: *const JtDecomposition, out: *mut usize) -> JtStatus {
    guard(|| {
        *out_ptr(out)? = handle(d)?.dec.len();
        Ok(())
    })
}

/// Copy the nonincreasing singular values into `buf` of capacity `cap`.
///
/// # Safety
/// `d` must be a live handle and `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn jt_decomposition_lambdas(d: *const JtDecomposition, buf: *mut f64, cap: usize) -> JtStatus {
    guard(|| {
        let d = handle(d)?;
        let n = d.dec.len();
        if cap < n {
            return Err(fail(JtStatus::BufferTooSmall, &format!("need {n} values")));
        }
        if n > 0 {
            if buf.is_null() {
                return Err(fail(JtStatus::NullPointer, "null buffer"));
            }
            std::slice::from_raw_parts_mut(buf, n).copy_from_slice(&d.dec.lambdas);
        }
        Ok(())
    })
}

/// The `k`-th atom (0-based) as a new element handle.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jt_decomposition_atom(d: *const JtDecomposition, k: usize, out: *mut *mut JtElement) -> JtStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let d = handle(d)?;
        let atom = d.dec.atoms.get(k).ok_or_else(|| fail(JtStatus::OutOfRange, &format!("atom {k} of {}", d.dec.len())))?;
        debug_assert_eq!(atom.factor(), d.factor);
        *out = Box::into_raw(Box::new(JtElement(atom.element().clone())));
        Ok(())
    })
}

/// Run the checker suites described by a JSON trial config and return the
/// JSON report through `report` (free with `jt_string_free`). Returns
/// `CheckFailed` when the report records a failure; the report is still set.
///
/// # Safety
/// `config` must be a NUL-terminated string and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn jt_verify(config: *const c_char, report: *mut *mut c_char) -> JtStatus {
    guard(|| {
        let report = out_ptr(report)?;
        *report = ptr::null_mut();
        let cfg: TrialConfig = lift(serde_json::from_str(str_arg(config)?).map_err(Error::from))?;
        let r = lift(run_suite(&cfg))?;
        let text = lift(serde_json::to_string(&r).map_err(Error::from))?;
        *report = CString::new(text).map_err(|_| fail(JtStatus::Json, "report contains NUL"))?.into_raw();
        if r.pass {
            Ok(())
        } else {
            Err(fail(JtStatus::CheckFailed, "at least one check failed"))
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
