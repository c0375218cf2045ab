//! C ABI over the transrad pipeline.
//!
//! The surface follows the usual C conventions: opaque handles created and
//! destroyed by paired functions, integer status codes for every fallible
//! call, out-parameters for results, and a thread-local last-error message
//! retrievable as a NUL-terminated string. A generated header lives at
//! `include/transrad.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use transrad::harness::{
    run_experiment, write_metadata, ExperimentConfig, ExperimentResult,
};
use transrad::rademacher::{ComplexityEstimate, ComplexityMethod};
use transrad::riskbounds::margin_risk_bound;
use transrad::sample::default_p;
use transrad::Error;

/// Status of a call. Nonzero values mirror the CLI exit codes: 2 for
/// invalid inputs, 3 for data problems, 4 for numerical failures.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A parameter or configuration value was rejected.
    InvalidInput = 2,
    /// The dataset could not be read or parsed.
    DataError = 3,
    /// A numerical routine failed (asymmetry, indefiniteness, divergence).
    NumericalError = 4,
    /// An internal invariant was violated; the handle state is unchanged.
    Internal = 5,
}

/// Opaque experiment configuration handle.
pub struct TrConfig {
    inner: ExperimentConfig,
}

/// Opaque experiment result handle.
pub struct TrResult {
    inner: ExperimentResult,
    config: ExperimentConfig,
}

/// One truncation level of the bound-comparison sweep. Optional columns use
/// a presence flag; the value field is 0 when the flag is false.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct TrRow {
    /// Number of retained spectral components.
    pub t: usize,
    /// Monte-Carlo lower confidence bound.
    pub mc_lower: f64,
    /// Monte-Carlo upper confidence bound.
    pub mc_upper: f64,
    /// Closed-form coefficient-norm bound (see `has_generic`).
    pub generic_bound: f64,
    /// Closed-form kernel-trace bound (see `has_kernel`).
    pub kernel_bound: f64,
    /// Exact brute-force value (see `has_exact`; only for tiny instances).
    pub exact_oracle: f64,
    /// Whether `generic_bound` is populated.
    pub has_generic: bool,
    /// Whether `kernel_bound` is populated.
    pub has_kernel: bool,
    /// Whether `exact_oracle` is populated.
    pub has_exact: bool,
}

/// Assembled risk-bound summary of a finished experiment.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct TrRiskSummary {
    /// Labeled points.
    pub m: usize,
    /// Unlabeled points.
    pub u: usize,
    /// Empirical margin error on the labeled side.
    pub empirical_margin_error: f64,
    /// Complexity value plugged into the bound.
    pub complexity: f64,
    /// Margin parameter γ.
    pub gamma: f64,
    /// Confidence parameter δ.
    pub delta: f64,
    /// Slack term proportional to √min(m, u).
    pub slack_sqrt_min: f64,
    /// Confidence slack term.
    pub slack_confidence: f64,
    /// Assembled bound on the test margin error.
    pub total: f64,
    /// `total` clamped to [0, 1].
    pub total_clipped: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> TrStatus {
    match err.exit_code() {
        2 => TrStatus::InvalidInput,
        3 => TrStatus::DataError,
        4 => TrStatus::NumericalError,
        _ => TrStatus::Internal,
    }
}

fn fail(err: &Error) -> TrStatus {
    set_last_error(&err.to_string());
    status_of(err)
}

fn null_argument(which: &str) -> TrStatus {
    set_last_error(&format!("{which} must not be NULL"));
    TrStatus::NullArgument
}

/// Runs `body` with panics converted to `TrStatus::Internal` so unwinding
/// never crosses the C boundary.
fn guarded(body: impl FnOnce() -> TrStatus) -> TrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            TrStatus::Internal
        }
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<PathBuf, TrStatus> {
    if ptr.is_null() {
        return Err(null_argument("path"));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_last_error("path is not valid UTF-8");
            Err(TrStatus::InvalidInput)
        }
    }
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the current thread's last error message into `buffer` (always
/// NUL-terminated when `capacity` > 0) and returns the message length in
/// bytes, excluding the terminator. Call with a NULL buffer to query the
/// required capacity.
///
/// # Safety
/// `buffer` must either be NULL or point to at least `capacity` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn tr_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parses an experiment configuration file and stores a new handle in
/// `out`. The handle must be released with `tr_config_free`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer; on
/// success `*out` owns the handle.
#[no_mangle]
pub unsafe extern "C" fn tr_config_load(
    path: *const c_char,
    out: *mut *mut TrConfig,
) -> TrStatus {
    guarded(|| {
        if out.is_null() {
            return null_argument("out");
        }
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match ExperimentConfig::from_file(&path) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TrConfig { inner }));
                TrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a configuration handle. NULL is ignored.
///
/// # Safety
/// `config` must be NULL or a pointer returned by `tr_config_load` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn tr_config_free(config: *mut TrConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the full experiment for `config` under `seed` and stores a new
/// result handle in `out`. The handle must be released with
/// `tr_result_free`.
///
/// # Safety
/// `config` must be a live handle from `tr_config_load` and `out` a valid
/// pointer; on success `*out` owns the handle.
#[no_mangle]
pub unsafe extern "C" fn tr_run(
    config: *const TrConfig,
    seed: u64,
    out: *mut *mut TrResult,
) -> TrStatus {
    guarded(|| {
        if out.is_null() {
            return null_argument("out");
        }
        let Some(config) = config.as_ref() else {
            return null_argument("config");
        };
        match run_experiment(&config.inner, seed) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TrResult {
                    inner,
                    config: config.inner.clone(),
                }));
                TrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a result handle. NULL is ignored.
///
/// # Safety
/// `result` must be NULL or a pointer returned by `tr_run` that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn tr_result_free(result: *mut TrResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Returns the number of truncation levels in the sweep, or 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `tr_run`.
#[no_mangle]
pub unsafe extern "C" fn tr_result_row_count(result: *const TrResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.rows.len())
}

/// Copies sweep row `index` into `row`.
///
/// # Safety
/// `result` must be a live handle from `tr_run` and `row` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_result_row(
    result: *const TrResult,
    index: usize,
    row: *mut TrRow,
) -> TrStatus {
    guarded(|| {
        let Some(result) = result.as_ref() else {
            return null_argument("result");
        };
        if row.is_null() {
            return null_argument("row");
        }
        let Some(src) = result.inner.rows.get(index) else {
            set_last_error(&format!(
                "row index {index} out of range (sweep has {} levels)",
                result.inner.rows.len()
            ));
            return TrStatus::InvalidInput;
        };
        *row = TrRow {
            t: src.t,
            mc_lower: src.mc_lower,
            mc_upper: src.mc_upper,
            generic_bound: src.generic_bound.unwrap_or(0.0),
            kernel_bound: src.kernel_bound.unwrap_or(0.0),
            exact_oracle: src.exact_oracle.unwrap_or(0.0),
            has_generic: src.generic_bound.is_some(),
            has_kernel: src.kernel_bound.is_some(),
            has_exact: src.exact_oracle.is_some(),
        };
        TrStatus::Ok
    })
}

/// Copies the assembled risk-bound summary into `summary`.
///
/// # Safety
/// `result` must be a live handle from `tr_run` and `summary` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_result_risk(
    result: *const TrResult,
    summary: *mut TrRiskSummary,
) -> TrStatus {
    guarded(|| {
        let Some(result) = result.as_ref() else {
            return null_argument("result");
        };
        if summary.is_null() {
            return null_argument("summary");
        }
        let risk = &result.inner.risk;
        *summary = TrRiskSummary {
            m: risk.m,
            u: risk.u,
            empirical_margin_error: risk.empirical_margin_error,
            complexity: risk.complexity.value,
            gamma: risk.gamma,
            delta: risk.delta,
            slack_sqrt_min: risk.slack_sqrt_min,
            slack_confidence: risk.slack_confidence,
            total: risk.total,
            total_clipped: risk.total_clipped,
        };
        TrStatus::Ok
    })
}

/// Writes the sweep as CSV to `path` (UTF-8, LF line endings, full-precision
/// floats).
///
/// # Safety
/// `result` must be a live handle from `tr_run` and `path` a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn tr_result_write_csv(
    result: *const TrResult,
    path: *const c_char,
) -> TrStatus {
    guarded(|| {
        let Some(result) = result.as_ref() else {
            return null_argument("result");
        };
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match transrad::harness::emit_csv(&result.inner.rows, &path) {
            Ok(()) => TrStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Writes the key = value metadata sidecar (configuration, constants, error
/// report, risk bound, timing) to `path`.
///
/// # Safety
/// `result` must be a live handle from `tr_run` and `path` a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn tr_result_write_metadata(
    result: *const TrResult,
    path: *const c_char,
) -> TrStatus {
    guarded(|| {
        let Some(result) = result.as_ref() else {
            return null_argument("result");
        };
        let path = match path_from(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match write_metadata(&result.inner, &result.config, &path) {
            Ok(()) => TrStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Assembles the margin risk bound from explicit numbers, treating
/// `complexity` as an already-computed complexity value, and stores the
/// result in `summary`.
///
/// # Safety
/// `summary` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_margin_bound(
    empirical_margin_error: f64,
    complexity: f64,
    gamma: f64,
    m: usize,
    u: usize,
    delta: f64,
    summary: *mut TrRiskSummary,
) -> TrStatus {
    guarded(|| {
        if summary.is_null() {
            return null_argument("summary");
        }
        let estimate = ComplexityEstimate {
            method: ComplexityMethod::Generic,
            value: complexity,
            mc_mean: None,
            mc_lower: None,
            n_samples: None,
            delta: None,
            p: if m > 0 && u > 0 { default_p(m, u) } else { 0.0 },
        };
        match margin_risk_bound(empirical_margin_error, estimate, gamma, m, u, delta) {
            Ok(report) => {
                *summary = TrRiskSummary {
                    m: report.m,
                    u: report.u,
                    empirical_margin_error: report.empirical_margin_error,
                    complexity: report.complexity.value,
                    gamma: report.gamma,
                    delta: report.delta,
                    slack_sqrt_min: report.slack_sqrt_min,
                    slack_confidence: report.slack_confidence,
                    total: report.total,
                    total_clipped: report.total_clipped,
                };
                TrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
