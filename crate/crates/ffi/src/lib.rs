//! C interface to `ellipquad`.
//!
//! Every fallible function returns an [`EqStatus`]. On failure the message is
//! available from [`eq_last_error_message`] on the same thread. Handles and
//! strings handed out by the library are released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ellipquad::quadform::{
    cf_w, density_w, PearsonSign, QuadFormFile, QuadFormModel, SplittingConvention,
};
use ellipquad::special::{hypergeom_1f0, jack_c};
use ellipquad::verify::{builtin_suite, parse_suite, run_suite, RunOptions};
use ellipquad::{
    AlgebraKind, DAMatrix, Error, HermitianMatrix, Partition, SeriesControl, SeriesResult,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Domain = 5,
    Dimension = 6,
    Rank = 7,
    Unsupported = 8,
    NotConverged = 9,
    Pole = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqConvention {
    RankR = 0,
    FullM = 1,
    FullN = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqSeriesControl {
    pub max_degree: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// A series value with its truncation diagnostics. `im` is 0 for real quantities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EqSeriesValue {
    pub re: f64,
    pub im: f64,
    pub degree_used: usize,
    pub tail_estimate: f64,
    pub converged: bool,
}

/// Opaque quadratic-form model.
pub struct EqModel {
    inner: QuadFormModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EqStatus {
    match e {
        Error::Domain(_) | Error::Indefinite { .. } | Error::NotHermitian(_) => EqStatus::Domain,
        Error::Dimension(_) => EqStatus::Dimension,
        Error::Rank(_) | Error::RankDeficientW { .. } => EqStatus::Rank,
        Error::UnsupportedAlgebra { .. } => EqStatus::Unsupported,
        Error::NotConverged { .. } => EqStatus::NotConverged,
        Error::Pole { .. } => EqStatus::Pole,
        Error::Invalid(_) => EqStatus::Invalid,
        Error::Io(_) => EqStatus::Io,
        Error::Json(_) => EqStatus::Parse,
    }
}

struct Fail(EqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EqStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            EqStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(EqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(EqStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn control(p: *const EqSeriesControl) -> Result<SeriesControl, Fail> {
    match p.as_ref() {
        None => Ok(SeriesControl::default()),
        Some(c) => Ok(SeriesControl::new(c.max_degree, c.rel_tol, c.abs_tol)?),
    }
}

fn algebra(beta: u32) -> Result<AlgebraKind, Fail> {
    Ok(AlgebraKind::new(beta)?)
}

fn real_value(r: SeriesResult<f64>) -> EqSeriesValue {
    EqSeriesValue {
        re: r.value,
        im: 0.0,
        degree_used: r.degree_used,
        tail_estimate: r.tail_estimate,
        converged: r.converged,
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn eq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn eq_clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default truncation: degree 40, rel_tol 1e-8, abs_tol 1e-12.
#[no_mangle]
pub extern "C" fn eq_series_control_default() -> EqSeriesControl {
    let c = SeriesControl::default();
    EqSeriesControl {
        max_degree: c.max_degree,
        rel_tol: c.rel_tol,
        abs_tol: c.abs_tol,
    }
}

/// Zonal polynomial C_kappa at the eigenvalues `eigs[0..n]`.
///
/// # Safety
/// `kappa` and `eigs` must point to `kappa_len` and `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_jack_c(
    beta: u32,
    kappa: *const usize,
    kappa_len: usize,
    eigs: *const f64,
    n: usize,
    out: *mut f64,
) -> EqStatus {
    guard(|| {
        let beta = algebra(beta)?;
        let kappa = Partition::new(slice(kappa, kappa_len, "kappa")?.to_vec())?;
        let eigs = slice(eigs, n, "eigs")?;
        *out_ref(out, "out")? = jack_c(&kappa, eigs, beta);
        Ok(())
    })
}

/// Truncated 1F0(a; X) at the eigenvalues of X. A NULL `ctrl` uses the defaults.
///
/// # Safety
/// `eigs` must point to `n` readable values, `ctrl` must be NULL or valid, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_hypergeom_1f0(
    a: f64,
    eigs: *const f64,
    n: usize,
    beta: u32,
    ctrl: *const EqSeriesControl,
    out: *mut EqSeriesValue,
) -> EqStatus {
    guard(|| {
        let beta = algebra(beta)?;
        let eigs = slice(eigs, n, "eigs")?;
        let ctrl = control(ctrl)?;
        let r = hypergeom_1f0(a, eigs, beta, &ctrl)?;
        *out_ref(out, "out")? = real_value(r);
        Ok(())
    })
}

/// Builds a model from its JSON description (`family`, `a`, `theta`, `sigma`).
/// The convention starts as rank-r and the Pearson sign as analytic.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eq_model_from_json(
    json: *const c_char,
    out: *mut *mut EqModel,
) -> EqStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(json, "json")?;
        let file: QuadFormFile = serde_json::from_str(text).map_err(Error::from)?;
        let inner = QuadFormModel::from_file(file, SplittingConvention::RankR)?;
        *out = Box::into_raw(Box::new(EqModel { inner }));
        Ok(())
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must come from [`eq_model_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eq_model_free(model: *mut EqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_model_set_convention(
    model: *mut EqModel,
    convention: EqConvention,
) -> EqStatus {
    guard(|| {
        let m = out_ref(model, "model")?;
        let c = match convention {
            EqConvention::RankR => SplittingConvention::RankR,
            EqConvention::FullM => SplittingConvention::FullM,
            EqConvention::FullN => SplittingConvention::FullN,
        };
        m.inner = m.inner.clone().with_convention(c);
        Ok(())
    })
}

/// Selects the printed (unsigned) Pearson VII derivative sign when `printed` is true.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_model_set_printed_signs(
    model: *mut EqModel,
    printed: bool,
) -> EqStatus {
    guard(|| {
        let m = out_ref(model, "model")?;
        let s = if printed {
            PearsonSign::Unsigned
        } else {
            PearsonSign::Analytic
        };
        m.inner = m.inner.clone().with_sign(s);
        Ok(())
    })
}

/// Algebra, W dimension m, sample rows n, and rank of A.
///
/// # Safety
/// `model` must be a live handle; each output pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn eq_model_dims(
    model: *const EqModel,
    beta: *mut u32,
    m: *mut usize,
    n: *mut usize,
    rank: *mut usize,
) -> EqStatus {
    guard(|| {
        let md = &model.as_ref().ok_or_else(|| null("model"))?.inner;
        if let Some(b) = beta.as_mut() {
            *b = md.beta().beta();
        }
        if let Some(x) = m.as_mut() {
            *x = md.m();
        }
        if let Some(x) = n.as_mut() {
            *x = md.n();
        }
        if let Some(x) = rank.as_mut() {
            *x = md.rank();
        }
        Ok(())
    })
}

fn square(md: &QuadFormModel, data: &[f64]) -> Result<HermitianMatrix, Fail> {
    let (beta, m) = (md.beta(), md.m());
    Ok(HermitianMatrix::new(DAMatrix::new(
        beta,
        m,
        m,
        data.to_vec(),
    )?)?)
}

/// Density of W at an m x m Hermitian matrix given row-major, `beta` components per entry.
///
/// # Safety
/// `model` must be a live handle, `w` must hold `len` values, `ctrl` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eq_model_density(
    model: *const EqModel,
    w: *const f64,
    len: usize,
    ctrl: *const EqSeriesControl,
    out: *mut EqSeriesValue,
) -> EqStatus {
    guard(|| {
        let md = &model.as_ref().ok_or_else(|| null("model"))?.inner;
        let w = square(md, slice(w, len, "w")?)?;
        let ctrl = control(ctrl)?;
        *out_ref(out, "out")? = real_value(density_w(&w, md, &ctrl)?);
        Ok(())
    })
}

/// Characteristic function E etr(i W S) at S, laid out as in [`eq_model_density`].
///
/// # Safety
/// `model` must be a live handle, `s` must hold `len` values, `ctrl` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eq_model_cf(
    model: *const EqModel,
    s: *const f64,
    len: usize,
    ctrl: *const EqSeriesControl,
    out: *mut EqSeriesValue,
) -> EqStatus {
    guard(|| {
        let md = &model.as_ref().ok_or_else(|| null("model"))?.inner;
        let s = square(md, slice(s, len, "s")?)?;
        let ctrl = control(ctrl)?;
        let r = cf_w(&s, md, &ctrl)?;
        *out_ref(out, "out")? = EqSeriesValue {
            re: r.value.re,
            im: r.value.im,
            degree_used: r.degree_used,
            tail_estimate: r.tail_estimate,
            converged: r.converged,
        };
        Ok(())
    })
}

/// Runs a verification suite and returns the report as JSON.
///
/// `suite` is a built-in name ("default", "quick") or a JSON list of entries.
/// A non-NULL `seed` replaces the entry seeds. `failures` (may be NULL) receives
/// the number of failed checks. Free the string with [`eq_string_free`].
///
/// # Safety
/// `suite` must be a NUL-terminated string, `seed` NULL or readable, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn eq_run_suite(
    suite: *const c_char,
    seed: *const u64,
    out_json: *mut *mut c_char,
    failures: *mut usize,
) -> EqStatus {
    guard(|| {
        let out = out_ref(out_json, "out_json")?;
        *out = ptr::null_mut();
        let text = str_arg(suite, "suite")?;
        let entries = if text.trim_start().starts_with('[') {
            parse_suite(text)?
        } else {
            builtin_suite(text.trim())?
        };
        let opts = RunOptions {
            seed_override: seed.as_ref().copied(),
            timings: false,
        };
        let rep = run_suite(&entries, &SeriesControl::default(), opts);
        let json = serde_json::to_string(&rep).map_err(Error::from)?;
        if let Some(f) = failures.as_mut() {
            *f = rep.summary.fail;
        }
        *out = CString::new(json)
            .map_err(|e| Fail(EqStatus::Invalid, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
