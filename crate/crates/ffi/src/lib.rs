//! C ABI over the platelab core.
//!
//! Problems live behind an opaque handle created from JSON. Every call returns
//! a [`PlStatus`]; on failure the message is available from
//! [`pl_last_error`] on the same thread. Strings handed out by the library
//! must be released with [`pl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use platelab::analysis::{
    antiderivative_identity_residual, frequency_split, norm_series, solution_l2_sq_estimate, total_energy,
    Quantity,
};
use platelab::quadrature::tensor_oracle;
use platelab::scenarios::{catalog, run_scenarios, ScenarioId};
use platelab::{Error, Problem, QuadConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Numerical = 4,
    VerificationFailed = 5,
    Panic = 6,
}

/// Opaque problem handle.
pub struct PlProblem {
    problem: Problem,
    config: QuadConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::Quadrature { .. }
        | Error::NodeOverflow { .. }
        | Error::GridTooLarge { .. }
        | Error::Ambiguous(_) => PlStatus::Numerical,
        _ => PlStatus::InvalidInput,
    }
}

fn guard<F: FnOnce() -> Result<(), PlStatus>>(body: F) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            PlStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            PlStatus::Panic
        }
    }
}

fn fail(e: Error) -> PlStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> PlStatus {
    set_error(&format!("{what} is null"));
    PlStatus::NullPointer
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, PlStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        PlStatus::InvalidUtf8
    })
}

unsafe fn handle<'a>(p: *const PlProblem) -> Result<&'a PlProblem, PlStatus> {
    p.as_ref().ok_or_else(|| null("problem"))
}

unsafe fn write_out(out: *mut f64, v: f64, what: &str) -> Result<(), PlStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

/// Parses a problem from JSON into a new handle stored at `out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_problem_from_json(json: *const c_char, out: *mut *mut PlProblem) -> PlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let problem = Problem::from_json(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(PlProblem {
            problem,
            config: QuadConfig::default(),
        }));
        Ok(())
    })
}

/// Replaces the quadrature settings of a handle with a JSON QuadConfig;
/// missing fields take their defaults.
///
/// # Safety
/// `p` must come from [`pl_problem_from_json`]; `json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pl_problem_set_quadrature(p: *mut PlProblem, json: *const c_char) -> PlStatus {
    guard(|| {
        let h = p.as_mut().ok_or_else(|| null("problem"))?;
        let text = read_str(json, "json")?;
        let cfg: QuadConfig = serde_json::from_str(text).map_err(|e| fail(e.into()))?;
        cfg.validate().map_err(fail)?;
        h.config = cfg;
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `p` must come from [`pl_problem_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_problem_free(p: *mut PlProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Spatial dimension of a problem, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_problem_dimension(p: *const PlProblem) -> usize {
    p.as_ref().map_or(0, |h| h.problem.n)
}

/// ‖u(t)‖² and its quadrature error estimate; `err` may be null.
///
/// # Safety
/// `p` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_norm_sq(p: *const PlProblem, t: f64, value: *mut f64, err: *mut f64) -> PlStatus {
    guard(|| {
        let h = handle(p)?;
        let est = solution_l2_sq_estimate(&h.problem, t, &h.config).map_err(fail)?;
        write_out(value, est.value, "value")?;
        if !err.is_null() {
            *err = est.error;
        }
        Ok(())
    })
}

/// ‖u(t)‖² at `count` increasing times into `values`.
///
/// # Safety
/// `times` and `values` must point to `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn pl_norm_sq_series(
    p: *const PlProblem,
    times: *const f64,
    count: usize,
    values: *mut f64,
) -> PlStatus {
    guard(|| {
        let h = handle(p)?;
        if times.is_null() {
            return Err(null("times"));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let grid = std::slice::from_raw_parts(times, count);
        let s = norm_series(&h.problem, grid, Quantity::NormSq, &h.config).map_err(fail)?;
        let out = std::slice::from_raw_parts_mut(values, count);
        for (slot, pt) in out.iter_mut().zip(&s.points) {
            *slot = pt.value;
        }
        Ok(())
    })
}

/// E(t) = ½(‖u_t‖² + ‖(−Δ)^{σ/2}u‖²).
///
/// # Safety
/// `p` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_energy(p: *const PlProblem, t: f64, value: *mut f64) -> PlStatus {
    guard(|| {
        let h = handle(p)?;
        let v = total_energy(&h.problem, t, &h.config).map_err(fail)?;
        write_out(value, v, "value")
    })
}

/// Residual of the energy identity for the time antiderivative.
///
/// # Safety
/// `p` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_identity_residual(p: *const PlProblem, t: f64, value: *mut f64) -> PlStatus {
    guard(|| {
        let h = handle(p)?;
        let v = antiderivative_identity_residual(&h.problem, t, &h.config).map_err(fail)?;
        write_out(value, v, "value")
    })
}

/// Low and high frequency parts of ‖u(t)‖² split at (δ₀²/t)^{1/σ}.
///
/// # Safety
/// `p` must be a live handle; `low` and `high` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pl_frequency_split(
    p: *const PlProblem,
    t: f64,
    delta0: f64,
    low: *mut f64,
    high: *mut f64,
) -> PlStatus {
    guard(|| {
        let h = handle(p)?;
        let (lo, hi) = frequency_split(&h.problem, t, delta0, &h.config).map_err(fail)?;
        write_out(low, lo, "low")?;
        write_out(high, hi, "high")
    })
}

/// Brute-force tensor-grid value of ‖u(t)‖² on [−R, R]ⁿ with spacing h.
///
/// # Safety
/// `p` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_tensor_oracle(
    p: *const PlProblem,
    t: f64,
    box_radius: f64,
    step: f64,
    value: *mut f64,
) -> PlStatus {
    guard(|| {
        let h = handle(p)?;
        let v = tensor_oracle(&h.problem, t, box_radius, step).map_err(fail)?;
        write_out(value, v, "value")
    })
}

/// Runs a scenario (or `all`) and stores the JSON report array at `report`.
/// `n` selects the dimension of dimensional scenarios; 0 runs all of them.
/// Returns `VerificationFailed` when any report fails; the report is still set.
///
/// # Safety
/// `id` must be NUL-terminated; `report` a valid pointer. Free the report with
/// [`pl_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pl_verify(id: *const c_char, n: usize, report: *mut *mut c_char) -> PlStatus {
    guard(|| {
        if report.is_null() {
            return Err(null("report"));
        }
        *report = ptr::null_mut();
        let name = read_str(id, "id")?;
        let ids = if name.eq_ignore_ascii_case("all") {
            catalog()
        } else {
            ScenarioId::resolve(name, (n > 0).then_some(n)).map_err(fail)?
        };
        let reports = run_scenarios(&ids, &QuadConfig::default());
        let text = serde_json::to_string(&reports).map_err(|e| fail(e.into()))?;
        *report = CString::new(text).map_err(|_| PlStatus::Panic)?.into_raw();
        if reports.iter().all(|r| r.passed) {
            Ok(())
        } else {
            set_error("verification failed");
            Err(PlStatus::VerificationFailed)
        }
    })
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, empty after a success. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
