//! C ABI for the `ewps` library.
//!
//! Objects are exposed as opaque handles created by `*_new`/`ewps_fit` and
//! released with the matching `*_free`. Every fallible function returns an
//! [`EwpsStatus`]; on failure, [`ewps_last_error_message`] describes the most
//! recent error on the calling thread. Results are written through out
//! pointers, which are left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ewps::inference::{fit, log_likelihood, FitConfig, FitMethod, FitReport};
use ewps::{Dataset, DatasetSource, EwpsError, EwpsModel, ExtendedWeibull, GeneratorKind, MixtureTruncation, PowerSeries};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwpsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    NonExistence = 4,
    Divergence = 5,
    TruncationCap = 6,
    Quadrature = 7,
    Bracket = 8,
    Convergence = 9,
    InsufficientData = 10,
    Parse = 11,
    Io = 12,
    OutOfRange = 13,
    Panic = 14,
}

/// A distribution with bound parameters.
pub struct EwpsModelHandle {
    inner: EwpsModel,
}

/// A sequence of observations.
pub struct EwpsDatasetHandle {
    inner: Dataset,
}

/// The result of a maximum-likelihood fit.
pub struct EwpsFitHandle {
    inner: FitReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &EwpsError) -> EwpsStatus {
    match e {
        EwpsError::Domain(_) => EwpsStatus::Domain,
        EwpsError::NonExistence(_) => EwpsStatus::NonExistence,
        EwpsError::Divergence(_) => EwpsStatus::Divergence,
        EwpsError::TruncationCap { .. } => EwpsStatus::TruncationCap,
        EwpsError::Quadrature { .. } => EwpsStatus::Quadrature,
        EwpsError::Bracket { .. } => EwpsStatus::Bracket,
        EwpsError::Convergence(_) => EwpsStatus::Convergence,
        EwpsError::InsufficientData(_) => EwpsStatus::InsufficientData,
        EwpsError::Parse(_) => EwpsStatus::Parse,
        EwpsError::Io(_) => EwpsStatus::Io,
    }
}

struct Failure(EwpsStatus, String);

impl From<EwpsError> for Failure {
    fn from(e: EwpsError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = std::result::Result<T, Failure>;

fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> EwpsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EwpsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EwpsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(EwpsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EwpsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> FfiResult<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last error on this thread, or null if none occurred.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ewps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ewps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a model from family names, `θ`, `α` and the generator parameters.
/// A modified Weibull accepts `λ < 0`. `alpha` is ignored by generators that
/// fix it to 1.
///
/// # Safety
/// Strings must be nul-terminated; `xi` must point to `xi_len` values.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_new(
    mixer: *const c_char,
    generator: *const c_char,
    theta: f64,
    alpha: f64,
    xi: *const f64,
    xi_len: usize,
    out: *mut *mut EwpsModelHandle,
) -> EwpsStatus {
    guard(|| {
        let mixer: PowerSeries = text(mixer, "mixer")?.parse()?;
        let kind: GeneratorKind = text(generator, "generator")?.parse()?;
        let xi = slice(xi, xi_len, "xi")?;
        let g = if kind == GeneratorKind::ModifiedWeibull {
            ExtendedWeibull::new_relaxed(kind, xi)?
        } else {
            ExtendedWeibull::new(kind, xi)?
        };
        let alpha = if kind.alpha_role() == ewps::AlphaRole::FixedToOne { 1.0 } else { alpha };
        let model = EwpsModel::new(mixer, g, theta, alpha)?;
        write(out, Box::into_raw(Box::new(EwpsModelHandle { inner: model })))
    })
}

/// # Safety
/// `model` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_free(model: *mut EwpsModelHandle) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn model_value(model: *const EwpsModelHandle, out: *mut f64, f: impl FnOnce(&EwpsModel) -> ewps::Result<f64>) -> EwpsStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write(out, f(&m.inner)?)
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_pdf(model: *const EwpsModelHandle, x: f64, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| Ok(m.pdf(x)))
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_cdf(model: *const EwpsModelHandle, x: f64, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| Ok(m.cdf(x)))
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_survival(model: *const EwpsModelHandle, x: f64, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| Ok(m.survival(x)))
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_hazard(model: *const EwpsModelHandle, x: f64, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| Ok(m.hazard(x)))
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_quantile(model: *const EwpsModelHandle, p: f64, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| m.quantile(p))
}

/// `E[Xʳ]`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_raw_moment(model: *const EwpsModelHandle, r: u32, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| m.raw_moment(r, MixtureTruncation::default()))
}

/// Shannon entropy by quadrature.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_entropy(model: *const EwpsModelHandle, out: *mut f64) -> EwpsStatus {
    model_value(model, out, |m| m.shannon_entropy_numeric())
}

/// Writes `n` draws, deterministic in `seed`, into `out`.
///
/// # Safety
/// `model` must be a live handle and `out` must have room for `n` values.
#[no_mangle]
pub unsafe extern "C" fn ewps_model_sample(model: *const EwpsModelHandle, n: usize, seed: u64, out: *mut f64) -> EwpsStatus {
    guard(|| {
        let m = handle(model, "model")?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let data = m.inner.sample(n, seed)?;
        std::slice::from_raw_parts_mut(out, n).copy_from_slice(data.values());
        Ok(())
    })
}

/// # Safety
/// `values` must point to `len` finite values.
#[no_mangle]
pub unsafe extern "C" fn ewps_dataset_new(values: *const f64, len: usize, out: *mut *mut EwpsDatasetHandle) -> EwpsStatus {
    guard(|| {
        let values = slice(values, len, "values")?.to_vec();
        let d = Dataset::new(values, "ffi", DatasetSource::File)?;
        write(out, Box::into_raw(Box::new(EwpsDatasetHandle { inner: d })))
    })
}

/// The embedded phosphorus-concentration dataset (128 values).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_dataset_phosphorus(out: *mut *mut EwpsDatasetHandle) -> EwpsStatus {
    guard(|| write(out, Box::into_raw(Box::new(EwpsDatasetHandle { inner: Dataset::phosphorus() }))))
}

/// # Safety
/// `data` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ewps_dataset_free(data: *mut EwpsDatasetHandle) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `data` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ewps_dataset_len(data: *const EwpsDatasetHandle) -> usize {
    data.as_ref().map_or(0, |d| d.inner.len())
}

/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_log_likelihood(
    model: *const EwpsModelHandle,
    data: *const EwpsDatasetHandle,
    out: *mut f64,
) -> EwpsStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let d = handle(data, "data")?;
        write(out, log_likelihood(&m.inner, &d.inner))
    })
}

/// Fits `mixer × generator` to `data`. `method` may be null for the default
/// (`em_then_direct`); `multistart` of 0 selects the default of 8.
///
/// # Safety
/// Strings must be nul-terminated, `data` live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_fit(
    mixer: *const c_char,
    generator: *const c_char,
    data: *const EwpsDatasetHandle,
    method: *const c_char,
    multistart: usize,
    seed: u64,
    out: *mut *mut EwpsFitHandle,
) -> EwpsStatus {
    guard(|| {
        let mixer: PowerSeries = text(mixer, "mixer")?.parse()?;
        let kind: GeneratorKind = text(generator, "generator")?.parse()?;
        let d = handle(data, "data")?;
        let mut config = FitConfig {
            seed,
            ..FitConfig::default()
        };
        if !method.is_null() {
            config.method = text(method, "method")?.parse::<FitMethod>()?;
        }
        if multistart > 0 {
            config.multistart = multistart;
        }
        let report = fit(mixer, kind, &d.inner, &config)?;
        write(out, Box::into_raw(Box::new(EwpsFitHandle { inner: report })))
    })
}

/// # Safety
/// `fit` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ewps_fit_free(fit: *mut EwpsFitHandle) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Summary statistics of a fit. `aicc` is NaN when undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EwpsFitSummary {
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub aicc: f64,
    pub caic: f64,
    pub ks: f64,
    /// Number of free parameters.
    pub p: usize,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Number of entries available through `ewps_fit_estimate`.
    pub estimate_count: usize,
    pub boundary_flag_count: usize,
}

/// # Safety
/// `fit` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_fit_summary(fit: *const EwpsFitHandle, out: *mut EwpsFitSummary) -> EwpsStatus {
    guard(|| {
        let r = &handle(fit, "fit")?.inner;
        write(
            out,
            EwpsFitSummary {
                loglik: r.loglik,
                aic: r.criteria.aic,
                bic: r.criteria.bic,
                aicc: r.criteria.aicc.unwrap_or(f64::NAN),
                caic: r.criteria.caic,
                ks: r.ks,
                p: r.p,
                n: r.n,
                iterations: r.iterations,
                converged: r.converged,
                estimate_count: r.estimates.len(),
                boundary_flag_count: r.boundary_flags.len(),
            },
        )
    })
}

/// Estimate `index` in the order θ, α, ξ…: its value and standard error (NaN
/// when absent). `fixed` is set for parameters held fixed during fitting.
///
/// # Safety
/// `fit` must be live; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_fit_estimate(
    fit: *const EwpsFitHandle,
    index: usize,
    value: *mut f64,
    std_error: *mut f64,
    fixed: *mut bool,
) -> EwpsStatus {
    guard(|| {
        let r = &handle(fit, "fit")?.inner;
        let e = r.estimates.get(index).ok_or_else(|| {
            Failure(
                EwpsStatus::OutOfRange,
                format!("estimate index {index} out of range (0..{})", r.estimates.len()),
            )
        })?;
        if value.is_null() || std_error.is_null() || fixed.is_null() {
            return Err(null("output pointer"));
        }
        value.write(e.value);
        std_error.write(e.std_error.unwrap_or(f64::NAN));
        fixed.write(e.fixed);
        Ok(())
    })
}

/// The fitted distribution as a new model handle, to be freed by the caller.
///
/// # Safety
/// `fit` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_fit_model(fit: *const EwpsFitHandle, out: *mut *mut EwpsModelHandle) -> EwpsStatus {
    guard(|| {
        let r = &handle(fit, "fit")?.inner;
        write(out, Box::into_raw(Box::new(EwpsModelHandle { inner: r.model })))
    })
}

/// The full report as JSON; free the string with `ewps_string_free`.
///
/// # Safety
/// `fit` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ewps_fit_report_json(fit: *const EwpsFitHandle, out: *mut *mut c_char) -> EwpsStatus {
    guard(|| {
        let r = &handle(fit, "fit")?.inner;
        let json = serde_json::to_string(r).map_err(|e| Failure(EwpsStatus::Io, e.to_string()))?;
        let c = CString::new(json).map_err(|e| Failure(EwpsStatus::Io, e.to_string()))?;
        write(out, c.into_raw())
    })
}
