//! C ABI over the `azd_otto` library.
//!
//! Every fallible function returns an `AzdStatus` code and writes results
//! through out-pointers. On failure a description is available from
//! `azd_last_error_message` on the calling thread. Spectral models and sweep
//! results are opaque handles owned by the caller and released with their
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use azd_otto::{
    accumulated_rate, gibbs_state, markovian_rate, qa_sweep, response_coefficient, run_limit_cycle,
    run_thermalization_stroke, spectral_density, Error, ErrorKind, ModulationSchedule, Mode,
    Observable, OttoConfig, QuadratureConfig, QubitState, Regime, SpectralModel, SweepRow, SweepSpec,
    ThermalizationCriterion,
};

pub type AzdStatus = i32;

pub const AZD_OK: AzdStatus = 0;
/// A parameter or configuration was rejected.
pub const AZD_ERR_INVALID: AzdStatus = 2;
/// A thermalization stroke, limit cycle or sweep did not converge.
pub const AZD_ERR_CONVERGENCE: AzdStatus = 3;
/// An integral did not reach its tolerance.
pub const AZD_ERR_QUADRATURE: AzdStatus = 4;
/// A required pointer argument was null.
pub const AZD_ERR_NULL: AzdStatus = 5;
/// The library panicked; this indicates a bug.
pub const AZD_ERR_PANIC: AzdStatus = 6;

pub const AZD_MODE_AZD: i32 = 0;
pub const AZD_MODE_MARKOVIAN: i32 = 1;

pub const AZD_OBSERVABLE_POWER: i32 = 0;
pub const AZD_OBSERVABLE_COOLING_RATE: i32 = 1;

pub const AZD_REGIME_ENGINE: i32 = 0;
pub const AZD_REGIME_REFRIGERATOR: i32 = 1;
pub const AZD_REGIME_HEAT_DISTRIBUTOR: i32 = 2;
pub const AZD_REGIME_OTHER: i32 = 3;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> AzdStatus {
    match e.kind() {
        ErrorKind::Invalid => AZD_ERR_INVALID,
        ErrorKind::Convergence => AZD_ERR_CONVERGENCE,
        ErrorKind::Quadrature => AZD_ERR_QUADRATURE,
    }
}

enum Failure {
    Model(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> AzdStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AZD_OK,
        Ok(Err(Failure::Model(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed for `{name}`"));
            AZD_ERR_NULL
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            AZD_ERR_PANIC
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn input<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

/// Opaque spectral model handle.
pub struct AzdSpectralModel {
    inner: SpectralModel,
}

/// Opaque sweep result handle.
pub struct AzdSweepResult {
    rows: Vec<SweepRow>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AzdQuadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub window_halfwidth_factor: f64,
    pub max_subdivisions: usize,
}

impl From<AzdQuadrature> for QuadratureConfig {
    fn from(q: AzdQuadrature) -> Self {
        QuadratureConfig {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            window_halfwidth_factor: q.window_halfwidth_factor,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

unsafe fn quadrature(q: *const AzdQuadrature) -> QuadratureConfig {
    q.as_ref().map(|q| (*q).into()).unwrap_or_default()
}

/// Shared machine and protocol parameters. Durations are absolute.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AzdCycleParams {
    pub omega_c: f64,
    pub omega_h: f64,
    pub beta_h: f64,
    pub beta_c: f64,
    pub tau_u1: f64,
    pub tau_u2: f64,
    pub tau_cp: f64,
    pub tau_dc: f64,
    pub lambda_bar: f64,
    pub epsilon: f64,
    pub max_windows: usize,
    /// `AZD_MODE_AZD` or `AZD_MODE_MARKOVIAN`.
    pub mode: i32,
}

/// Cycle thermodynamics; `eta` and `cop` are NaN when undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AzdCycleReport {
    pub q_h: f64,
    pub q_c: f64,
    pub e_ab: f64,
    pub e_cd: f64,
    pub work: f64,
    pub tau_h: f64,
    pub tau_c: f64,
    pub tau_total: f64,
    pub power: f64,
    pub eta: f64,
    pub kappa: f64,
    pub cop: f64,
    pub regime: i32,
    pub n_dc_hot: usize,
    pub n_dc_cold: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AzdStrokeSummary {
    pub duration: f64,
    pub n_cp: usize,
    pub n_dc: usize,
    pub p1_final: f64,
}

/// One sweep row; absent values are NaN and absent counts are -1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AzdSweepRow {
    pub tau_cp: f64,
    pub value: f64,
    pub baseline: f64,
    pub qa_ratio: f64,
    pub n_dc_hot: i64,
    pub n_dc_cold: i64,
    pub converged: bool,
}

fn regime_code(r: Regime) -> i32 {
    match r {
        Regime::Engine => AZD_REGIME_ENGINE,
        Regime::Refrigerator => AZD_REGIME_REFRIGERATOR,
        Regime::HeatDistributor => AZD_REGIME_HEAT_DISTRIBUTOR,
        Regime::Other => AZD_REGIME_OTHER,
    }
}

fn otto_config(p: &AzdCycleParams, hot: &SpectralModel, cold: &SpectralModel) -> Result<OttoConfig, Error> {
    let mode = match p.mode {
        AZD_MODE_AZD => Mode::Azd,
        AZD_MODE_MARKOVIAN => Mode::Markovian,
        other => {
            return Err(Error::InvalidParameter {
                field: "mode",
                reason: format!("unknown mode {other}"),
            })
        }
    };
    let schedule = ModulationSchedule {
        tau_cp: p.tau_cp,
        tau_dc: p.tau_dc,
        lambda_bar: p.lambda_bar,
        max_windows: p.max_windows,
    };
    let config = OttoConfig {
        omega_c: p.omega_c,
        omega_h: p.omega_h,
        beta_h: p.beta_h,
        beta_c: p.beta_c,
        tau_u1: p.tau_u1,
        tau_u2: p.tau_u2,
        hot_schedule: schedule,
        cold_schedule: schedule,
        hot_bath: hot.anchored(p.omega_h, p.beta_h),
        cold_bath: cold.anchored(p.omega_c, p.beta_c),
        criterion: ThermalizationCriterion { epsilon: p.epsilon },
        mode,
    };
    config.validate()?;
    Ok(config)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn azd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn azd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn azd_quadrature_default() -> AzdQuadrature {
    let q = QuadratureConfig::default();
    AzdQuadrature {
        rel_tol: q.rel_tol,
        abs_tol: q.abs_tol,
        window_halfwidth_factor: q.window_halfwidth_factor,
        max_subdivisions: q.max_subdivisions,
    }
}

/// Creates a Lorentzian bath model.
///
/// # Safety
/// `out_model` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_lorentzian_new(
    gamma0: f64,
    width: f64,
    detuning: f64,
    beta: f64,
    omega_ref: f64,
    out_model: *mut *mut AzdSpectralModel,
) -> AzdStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let inner = SpectralModel::lorentzian(gamma0, width, detuning, beta, omega_ref)?;
        *slot = Box::into_raw(Box::new(AzdSpectralModel { inner }));
        Ok(())
    })
}

/// Creates a super-Ohmic bath model.
///
/// # Safety
/// `out_model` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_super_ohmic_new(
    gamma0: f64,
    width: f64,
    detuning: f64,
    ohmic_exponent: f64,
    beta: f64,
    omega_ref: f64,
    out_model: *mut *mut AzdSpectralModel,
) -> AzdStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let inner = SpectralModel::super_ohmic(gamma0, width, detuning, ohmic_exponent, beta, omega_ref)?;
        *slot = Box::into_raw(Box::new(AzdSpectralModel { inner }));
        Ok(())
    })
}

/// Releases a model; NULL is ignored.
///
/// # Safety
/// `model` must come from a constructor of this library and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn azd_spectral_model_free(model: *mut AzdSpectralModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `G(nu)`.
///
/// # Safety
/// `model` must be a live handle and `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_spectral_density(
    model: *const AzdSpectralModel,
    nu: f64,
    out_value: *mut f64,
) -> AzdStatus {
    guard(|| {
        let m = input(model, "model")?;
        let slot = out(out_value, "out_value")?;
        *slot = spectral_density(&m.inner, nu)?;
        Ok(())
    })
}

/// `R(omega, t)`; `q` may be NULL for defaults.
///
/// # Safety
/// `model` must be a live handle, `q` NULL or valid, `out_value` valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn azd_response_coefficient(
    model: *const AzdSpectralModel,
    omega: f64,
    t: f64,
    q: *const AzdQuadrature,
    out_value: *mut f64,
) -> AzdStatus {
    guard(|| {
        let m = input(model, "model")?;
        let slot = out(out_value, "out_value")?;
        *slot = response_coefficient(&m.inner, omega, t, &quadrature(q))?;
        Ok(())
    })
}

/// `2 * integral_0^T R(omega, t) dt`; `q` may be NULL for defaults.
///
/// # Safety
/// As for `azd_response_coefficient`.
#[no_mangle]
pub unsafe extern "C" fn azd_accumulated_rate(
    model: *const AzdSpectralModel,
    omega: f64,
    duration: f64,
    q: *const AzdQuadrature,
    out_value: *mut f64,
) -> AzdStatus {
    guard(|| {
        let m = input(model, "model")?;
        let slot = out(out_value, "out_value")?;
        *slot = accumulated_rate(&m.inner, omega, duration, &quadrature(q))?;
        Ok(())
    })
}

/// `pi G(omega)`.
///
/// # Safety
/// `model` must be a live handle and `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_markovian_rate(
    model: *const AzdSpectralModel,
    omega: f64,
    out_value: *mut f64,
) -> AzdStatus {
    guard(|| {
        let m = input(model, "model")?;
        let slot = out(out_value, "out_value")?;
        *slot = markovian_rate(&m.inner, omega)?;
        Ok(())
    })
}

/// Ground and excited populations of the Gibbs state.
///
/// # Safety
/// `out_p1` and `out_p2` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_gibbs_state(omega: f64, beta: f64, out_p1: *mut f64, out_p2: *mut f64) -> AzdStatus {
    guard(|| {
        let p1 = out(out_p1, "out_p1")?;
        let p2 = out(out_p2, "out_p2")?;
        let s = gibbs_state(omega, beta)?;
        *p1 = s.p1;
        *p2 = s.p2;
        Ok(())
    })
}

/// Windowed thermalization stroke from ground population `p1_initial`
/// towards the Gibbs state at `(omega, target_beta)`.
///
/// # Safety
/// `model` must be a live handle, `q` NULL or valid, `out_summary` valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn azd_thermalization_stroke(
    model: *const AzdSpectralModel,
    p1_initial: f64,
    omega: f64,
    tau_cp: f64,
    tau_dc: f64,
    lambda_bar: f64,
    max_windows: usize,
    epsilon: f64,
    target_beta: f64,
    q: *const AzdQuadrature,
    out_summary: *mut AzdStrokeSummary,
) -> AzdStatus {
    guard(|| {
        let m = input(model, "model")?;
        let slot = out(out_summary, "out_summary")?;
        let schedule = ModulationSchedule {
            tau_cp,
            tau_dc,
            lambda_bar,
            max_windows,
        };
        let criterion = ThermalizationCriterion::new(epsilon)?;
        let start = QubitState::from_ground_population(p1_initial)?;
        let rec = run_thermalization_stroke(start, &m.inner, omega, &schedule, &criterion, target_beta, &quadrature(q))?;
        *slot = AzdStrokeSummary {
            duration: rec.duration,
            n_cp: rec.n_cp,
            n_dc: rec.n_dc,
            p1_final: rec.final_state.p1,
        };
        Ok(())
    })
}

/// Runs the limit cycle. The bath handles supply spectral shapes; they are
/// re-anchored to `(omega_h, beta_h)` and `(omega_c, beta_c)`.
///
/// # Safety
/// `params`, `hot`, `cold` must be valid, `q` NULL or valid, `out_report`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_run_limit_cycle(
    params: *const AzdCycleParams,
    hot: *const AzdSpectralModel,
    cold: *const AzdSpectralModel,
    q: *const AzdQuadrature,
    out_report: *mut AzdCycleReport,
) -> AzdStatus {
    guard(|| {
        let p = input(params, "params")?;
        let hot = input(hot, "hot")?;
        let cold = input(cold, "cold")?;
        let slot = out(out_report, "out_report")?;
        let config = otto_config(p, &hot.inner, &cold.inner)?;
        let r = run_limit_cycle(&config, &quadrature(q))?;
        *slot = AzdCycleReport {
            q_h: r.q_h,
            q_c: r.q_c,
            e_ab: r.e_ab,
            e_cd: r.e_cd,
            work: r.work,
            tau_h: r.tau_h,
            tau_c: r.tau_c,
            tau_total: r.tau_total,
            power: r.power,
            eta: r.eta.unwrap_or(f64::NAN),
            kappa: r.kappa,
            cop: r.cop.unwrap_or(f64::NAN),
            regime: regime_code(r.regime),
            n_dc_hot: r.n_dc_hot,
            n_dc_cold: r.n_dc_cold,
        };
        Ok(())
    })
}

/// Advantage-ratio sweep over `grid` (absolute `tau_cp` values, strictly
/// increasing). `params.tau_cp` and `params.mode` are ignored.
///
/// # Safety
/// `params`, `hot`, `cold` must be valid, `grid` must point to `grid_len`
/// doubles, `q` NULL or valid, `out_result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_qa_sweep(
    params: *const AzdCycleParams,
    hot: *const AzdSpectralModel,
    cold: *const AzdSpectralModel,
    grid: *const f64,
    grid_len: usize,
    observable: i32,
    q: *const AzdQuadrature,
    out_result: *mut *mut AzdSweepResult,
) -> AzdStatus {
    guard(|| {
        let p = input(params, "params")?;
        let hot = input(hot, "hot")?;
        let cold = input(cold, "cold")?;
        let slot = out(out_result, "out_result")?;
        if grid.is_null() && grid_len > 0 {
            return Err(Failure::Null("grid"));
        }
        let grid = if grid_len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(grid, grid_len).to_vec()
        };
        let observable = match observable {
            AZD_OBSERVABLE_POWER => Observable::Power,
            AZD_OBSERVABLE_COOLING_RATE => Observable::CoolingRate,
            other => {
                return Err(Error::InvalidParameter {
                    field: "observable",
                    reason: format!("unknown observable {other}"),
                }
                .into())
            }
        };
        let mut params = *p;
        params.mode = AZD_MODE_AZD;
        if let Some(&first) = grid.first() {
            params.tau_cp = first;
        }
        let spec = SweepSpec {
            base: otto_config(&params, &hot.inner, &cold.inner)?,
            tau_cp_grid: grid,
            observable,
            emit_overlap: false,
        };
        let rows = qa_sweep(&spec, &quadrature(q))?;
        *slot = Box::into_raw(Box::new(AzdSweepResult { rows }));
        Ok(())
    })
}

/// Number of rows; 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn azd_sweep_result_len(result: *const AzdSweepResult) -> usize {
    result.as_ref().map_or(0, |r| r.rows.len())
}

/// Copies row `index` into `out_row`.
///
/// # Safety
/// `result` must be a live handle and `out_row` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn azd_sweep_result_row(
    result: *const AzdSweepResult,
    index: usize,
    out_row: *mut AzdSweepRow,
) -> AzdStatus {
    guard(|| {
        let r = input(result, "result")?;
        let slot = out(out_row, "out_row")?;
        let row = r.rows.get(index).ok_or_else(|| Error::InvalidParameter {
            field: "index",
            reason: format!("{index} out of range for {} rows", r.rows.len()),
        })?;
        let count = |n: Option<usize>| n.map_or(-1, |n| n as i64);
        *slot = AzdSweepRow {
            tau_cp: row.tau_cp,
            value: row.value.unwrap_or(f64::NAN),
            baseline: row.baseline.unwrap_or(f64::NAN),
            qa_ratio: row.qa_ratio.unwrap_or(f64::NAN),
            n_dc_hot: count(row.n_dc_hot),
            n_dc_cold: count(row.n_dc_cold),
            converged: row.converged,
        };
        Ok(())
    })
}

/// Releases a sweep result; NULL is ignored.
///
/// # Safety
/// `result` must come from `azd_qa_sweep` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn azd_sweep_result_free(result: *mut AzdSweepResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length without the terminator, or 0
/// when there is no error.
///
/// # Safety
/// `buf` must be NULL or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn azd_copy_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = CStr::to_bytes(msg);
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}
