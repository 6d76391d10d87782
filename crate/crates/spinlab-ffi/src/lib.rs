//! C ABI for spinlab.
//!
//! Every function returns a [`SpinlabStatus`]; results go through out-pointers. On failure the
//! message is available from [`spinlab_last_error_message`] on the same thread. Strings returned
//! by the library must be released with [`spinlab_string_free`], algebras with
//! [`spinlab_algebra_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinlab::algebra::{parse_input, MetricLieAlgebra};
use spinlab::clifford::rep;
use spinlab::dirac::{assemble_dirac, kernel};
use spinlab::gstruct::mu_v;
use spinlab::scan::verify_paper;
use spinlab::spin7::{lift_algebra, lift_spinor, spin7_form, spin7_torsion};
use spinlab::SpinError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    JacobiFailure = 4,
    InvalidArgument = 5,
    BufferTooSmall = 6,
    NoKernel = 7,
    NumericalError = 8,
    Panic = 9,
}

/// Opaque metric Lie algebra.
pub struct SpinlabAlgebra {
    inner: MetricLieAlgebra,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(s).expect("nul bytes removed")));
}

fn status_of(e: &SpinError) -> SpinlabStatus {
    match e {
        SpinError::Syntax { .. } | SpinError::UnboundParameter(_) | SpinError::ZeroParameter(_) => {
            SpinlabStatus::ParseError
        }
        SpinError::Jacobi { .. } => SpinlabStatus::JacobiFailure,
        SpinError::Numerical(_) => SpinlabStatus::NumericalError,
        _ => SpinlabStatus::InvalidArgument,
    }
}

type FfiResult = std::result::Result<(), SpinlabStatus>;

fn fail(status: SpinlabStatus, msg: impl Into<String>) -> SpinlabStatus {
    set_error(msg);
    status
}

/// Run `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> FfiResult) -> SpinlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpinlabStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SpinlabStatus::Panic, format!("panic: {msg}"))
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> std::result::Result<T, SpinlabStatus>;
}

impl<T> OrStatus<T> for spinlab::Result<T> {
    fn or_status(self) -> std::result::Result<T, SpinlabStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> std::result::Result<&'a str, SpinlabStatus> {
    if p.is_null() {
        return Err(fail(SpinlabStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(SpinlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn alg_arg<'a>(p: *const SpinlabAlgebra) -> std::result::Result<&'a MetricLieAlgebra, SpinlabStatus> {
    p.as_ref().map(|a| &a.inner).ok_or_else(|| fail(SpinlabStatus::NullPointer, "algebra is null"))
}

fn out_arg<'a, T>(p: *mut T) -> std::result::Result<&'a mut T, SpinlabStatus> {
    // SAFETY: callers pass either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| fail(SpinlabStatus::NullPointer, "output pointer is null"))
}

unsafe fn parse_impl(text: *const c_char, params: BTreeMap<String, f64>, out: *mut *mut SpinlabAlgebra) -> FfiResult {
    let out = out_arg(out)?;
    *out = ptr::null_mut();
    let text = str_arg(text, "text")?;
    let alg = parse_input(text, &params).and_then(|r| r.build()).or_status()?;
    *out = Box::into_raw(Box::new(SpinlabAlgebra { inner: alg }));
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spinlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn spinlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse compact structure equations `(0,0,12,13)` or the line-based algebra format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_algebra_parse(text: *const c_char, out: *mut *mut SpinlabAlgebra) -> SpinlabStatus {
    guard(|| parse_impl(text, BTreeMap::new(), out))
}

/// As [`spinlab_algebra_parse`] with `n` parameter bindings `names[i] = values[i]`.
///
/// # Safety
/// `names` and `values` must point to `n` elements each (may be null when `n == 0`).
#[no_mangle]
pub unsafe extern "C" fn spinlab_algebra_parse_with_params(
    text: *const c_char,
    names: *const *const c_char,
    values: *const f64,
    n: usize,
    out: *mut *mut SpinlabAlgebra,
) -> SpinlabStatus {
    guard(|| {
        let mut params = BTreeMap::new();
        if n > 0 {
            if names.is_null() || values.is_null() {
                return Err(fail(SpinlabStatus::NullPointer, "parameter arrays are null"));
            }
            let names = std::slice::from_raw_parts(names, n);
            let values = std::slice::from_raw_parts(values, n);
            for (k, v) in names.iter().zip(values) {
                params.insert(str_arg(*k, "parameter name")?.to_string(), *v);
            }
        }
        parse_impl(text, params, out)
    })
}

/// Release an algebra. Null is ignored.
///
/// # Safety
/// `alg` must come from a parse function and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn spinlab_algebra_free(alg: *mut SpinlabAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// # Safety
/// `alg` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_algebra_dim(alg: *const SpinlabAlgebra, out: *mut usize) -> SpinlabStatus {
    guard(|| {
        *out_arg(out)? = alg_arg(alg)?.dim();
        Ok(())
    })
}

/// Whether each `de^k` only involves `e^{ij}` with `i, j < k`.
///
/// # Safety
/// `alg` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_algebra_is_nilpotent(alg: *const SpinlabAlgebra, out: *mut bool) -> SpinlabStatus {
    guard(|| {
        *out_arg(out)? = alg_arg(alg)?.is_nilpotent_frame();
        Ok(())
    })
}

/// Dimension of the kernel of 4D on invariant spinors, tolerance relative to the spectral norm.
///
/// # Safety
/// `alg` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_dirac_kernel_dim(alg: *const SpinlabAlgebra, tol: f64, out: *mut usize) -> SpinlabStatus {
    guard(|| {
        let out = out_arg(out)?;
        let a = alg_arg(alg)?;
        let m = assemble_dirac(a, &rep(a.dim()).or_status()?).or_status()?;
        *out = kernel(&m, tol).or_status()?.kernel_dim;
        Ok(())
    })
}

/// Row-major matrix of 4D (or 16D^2 when `squared`). `*size` receives N; the buffer needs N*N
/// entries, otherwise `BufferTooSmall` is returned and nothing is written.
///
/// # Safety
/// `buf` must hold `len` doubles (may be null when `len == 0`); `size` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_dirac_matrix(
    alg: *const SpinlabAlgebra,
    squared: bool,
    buf: *mut f64,
    len: usize,
    size: *mut usize,
) -> SpinlabStatus {
    guard(|| {
        let size = out_arg(size)?;
        let a = alg_arg(alg)?;
        let mut m = assemble_dirac(a, &rep(a.dim()).or_status()?).or_status()?;
        if squared {
            m = m.square().or_status()?;
        }
        let n = m.size();
        *size = n;
        if len < n * n {
            return Err(fail(SpinlabStatus::BufferTooSmall, format!("buffer holds {len}, need {}", n * n)));
        }
        if buf.is_null() {
            return Err(fail(SpinlabStatus::NullPointer, "buffer is null"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, n * n);
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = m.matrix()[(i, j)];
            }
        }
        Ok(())
    })
}

/// `16 D^2 = mu + v j1` for a 5-dimensional algebra; `v` receives 5 values.
///
/// # Safety
/// `mu` must be valid, `v` must hold 5 doubles.
#[no_mangle]
pub unsafe extern "C" fn spinlab_invariants_dim5(alg: *const SpinlabAlgebra, mu: *mut f64, v: *mut f64) -> SpinlabStatus {
    guard(|| {
        let mu = out_arg(mu)?;
        if v.is_null() {
            return Err(fail(SpinlabStatus::NullPointer, "v is null"));
        }
        let inv = mu_v(alg_arg(alg)?).or_status()?;
        *mu = inv.mu;
        std::slice::from_raw_parts_mut(v, 5).copy_from_slice(&inv.v);
        Ok(())
    })
}

/// Lift kernel vector `index` (0-based) to the product with a flat torus of dimension `8 - n`
/// and report the norm of the Lee form `tau_1` of the Spin(7) structure.
///
/// # Safety
/// `alg` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_lift_tau1_norm(
    alg: *const SpinlabAlgebra,
    index: usize,
    tol: f64,
    out: *mut f64,
) -> SpinlabStatus {
    guard(|| {
        let out = out_arg(out)?;
        let a = alg_arg(alg)?;
        let m = assemble_dirac(a, &rep(a.dim()).or_status()?).or_status()?;
        let k = kernel(&m, tol).or_status()?;
        let phi = k.kernel_basis.get(index).ok_or_else(|| {
            fail(SpinlabStatus::NoKernel, format!("kernel has dimension {}, no vector {index}", k.kernel_dim))
        })?;
        let eta = lift_spinor(phi, a.dim()).or_status()?;
        let om = spin7_form(&eta, &rep(8).or_status()?).or_status()?;
        *out = spin7_torsion(&lift_algebra(a).or_status()?, &om).or_status()?.tau1.norm();
        Ok(())
    })
}

/// Full verification report as JSON. Release with [`spinlab_string_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinlab_verify_paper_json(seed: u64, out: *mut *mut c_char) -> SpinlabStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let s = CString::new(verify_paper(seed).to_json()).map_err(|_| fail(SpinlabStatus::NumericalError, "nul in report"))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn spinlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
