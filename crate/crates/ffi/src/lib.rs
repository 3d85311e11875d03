//! C ABI over `gro-market`.
//!
//! Every fallible function returns a [`GroStatus`]; on failure the message
//! is kept per thread and read back with [`gro_last_error_message`].
//! Configurations and trajectories are opaque handles owned by the caller
//! and released with their `_free` function.  Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gro_market::config::ExperimentConfig;
use gro_market::experiment::Experiment;
use gro_market::harness::gibbs_gap;
use gro_market::harness::suites::{run_suite, Suite, SuiteOptions};
use gro_market::zeta::gro_solution;
use gro_market::{DiscreteDistribution, Error, Market, TrajectoryRecord};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Domain = 3,
    Runtime = 4,
    Io = 5,
    InvalidUtf8 = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// A validated experiment configuration.
pub struct GroConfig {
    exp: Experiment<Market>,
}

/// One simulated path.
pub struct GroTrajectory {
    record: TrajectoryRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> GroStatus {
    match e {
        Error::Config(_) | Error::UnknownState(_) => GroStatus::InvalidConfig,
        Error::Domain(_) | Error::IndeterminateExpectation => GroStatus::Domain,
        Error::Io(_) => GroStatus::Io,
        _ => GroStatus::Runtime,
    }
}

fn fail(status: GroStatus, msg: impl Into<String>) -> GroStatus {
    set_error(msg.into());
    status
}

/// Run `f`, turning errors and panics into status codes.
fn guard<F>(f: F) -> GroStatus
where
    F: FnOnce() -> Result<(), GroStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            GroStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(GroStatus::Panic, msg)
        }
    }
}

fn lift<T>(r: gro_market::Result<T>) -> Result<T, GroStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), GroStatus> {
    if p.is_null() {
        Err(fail(GroStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, GroStatus> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GroStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], GroStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`).  Returns the full message length plus one, so a
/// caller can size the buffer by calling with `len = 0`.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gro_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Solve one period.  `payoffs` holds `atoms × assets` values row by row,
/// `probs` one probability per atom, and `lambda_out` receives `assets`
/// proportions.
///
/// # Safety
/// Pointers must be valid for the stated lengths; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_solve_zeta(
    c: f64,
    rho: f64,
    payoffs: *const f64,
    probs: *const f64,
    atoms: usize,
    assets: usize,
    tol: f64,
    zeta_out: *mut f64,
    in_gamma_out: *mut bool,
    lambda_out: *mut f64,
) -> GroStatus {
    guard(|| {
        non_null(zeta_out, "zeta_out")?;
        non_null(in_gamma_out, "in_gamma_out")?;
        non_null(lambda_out, "lambda_out")?;
        if atoms == 0 || assets == 0 {
            return Err(fail(
                GroStatus::OutOfRange,
                "need at least one atom and one asset",
            ));
        }
        let x = slice(payoffs, atoms * assets, "payoffs")?;
        let p = slice(probs, atoms, "probs")?;
        let law = lift(DiscreteDistribution::new(
            x.chunks(assets)
                .zip(p)
                .map(|(row, q)| (row.to_vec(), *q))
                .collect(),
        ))?;
        let (sol, lambda) = lift(gro_solution(c, rho, &law, tol))?;
        *zeta_out = sol.zeta;
        *in_gamma_out = sol.in_gamma;
        ptr::copy_nonoverlapping(lambda.as_slice().as_ptr(), lambda_out, assets);
        Ok(())
    })
}

/// `α(ln α − ln β) − ‖α − β‖²/4 − |α| + |β|` for vectors of length `n`.
///
/// # Safety
/// `alpha` and `beta` must hold `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_gibbs_gap(
    alpha: *const f64,
    beta: *const f64,
    n: usize,
    out: *mut f64,
) -> GroStatus {
    guard(|| {
        non_null(out, "out")?;
        let a = slice(alpha, n, "alpha")?;
        let b = slice(beta, n, "beta")?;
        *out = lift(gibbs_gap(a, b))?;
        Ok(())
    })
}

fn emit_config(cfg: ExperimentConfig, out: *mut *mut GroConfig) -> Result<(), GroStatus> {
    let exp = lift(cfg.build())?;
    unsafe { *out = Box::into_raw(Box::new(GroConfig { exp })) };
    Ok(())
}

/// Parse and validate a JSON configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_config_from_json(
    json: *const c_char,
    out: *mut *mut GroConfig,
) -> GroStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        emit_config(lift(ExperimentConfig::from_json(text))?, out)
    })
}

/// Load a bundled preset by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_config_preset(
    name: *const c_char,
    out: *mut *mut GroConfig,
) -> GroStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let name = read_str(name, "name")?;
        emit_config(lift(ExperimentConfig::preset(name))?, out)
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gro_config_free(cfg: *mut GroConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Number of investors, assets, periods and paths of a configuration.
///
/// # Safety
/// `cfg` must be a live handle; each output must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gro_config_shape(
    cfg: *const GroConfig,
    investors: *mut usize,
    assets: *mut usize,
    horizon: *mut usize,
    paths: *mut u64,
) -> GroStatus {
    guard(|| {
        non_null(cfg, "cfg")?;
        let exp = &(*cfg).exp;
        if !investors.is_null() {
            *investors = exp.rules.len();
        }
        if !assets.is_null() {
            *assets = gro_market::PayoffModel::num_assets(&exp.model);
        }
        if !horizon.is_null() {
            *horizon = exp.horizon;
        }
        if !paths.is_null() {
            *paths = exp.paths;
        }
        Ok(())
    })
}

/// Simulate path `path` of the configuration.  The same `(config, path)`
/// always yields the same trajectory.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_simulate_path(
    cfg: *const GroConfig,
    path: u64,
    out: *mut *mut GroTrajectory,
) -> GroStatus {
    guard(|| {
        non_null(cfg, "cfg")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let record = lift((*cfg).exp.run_path(path))?;
        *out = Box::into_raw(Box::new(GroTrajectory { record }));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gro_trajectory_free(traj: *mut GroTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of simulated periods.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_trajectory_horizon(
    traj: *const GroTrajectory,
    out: *mut usize,
) -> GroStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(out, "out")?;
        *out = (*traj).record.horizon();
        Ok(())
    })
}

unsafe fn copy_row(
    traj: *const GroTrajectory,
    t: usize,
    out: *mut f64,
    len: usize,
    relative: bool,
) -> GroStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(out, "out")?;
        let rec = &(*traj).record;
        if t > rec.horizon() {
            return Err(fail(
                GroStatus::OutOfRange,
                format!("t = {t} exceeds horizon {}", rec.horizon()),
            ));
        }
        let row = if relative {
            rec.relative_at(t)
        } else {
            rec.wealth_at(t)
        };
        if len < row.len() {
            return Err(fail(
                GroStatus::OutOfRange,
                format!("buffer holds {len} values, need {}", row.len()),
            ));
        }
        ptr::copy_nonoverlapping(row.as_ptr(), out, row.len());
        Ok(())
    })
}

/// Investor wealth `Y_t` (`t = 0` is the initial wealth) into `out[0..len]`.
///
/// # Safety
/// `traj` must be a live handle; `out` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn gro_trajectory_wealth(
    traj: *const GroTrajectory,
    t: usize,
    out: *mut f64,
    len: usize,
) -> GroStatus {
    copy_row(traj, t, out, len, false)
}

/// Relative wealth `r_t` into `out[0..len]`.
///
/// # Safety
/// As for [`gro_trajectory_wealth`].
#[no_mangle]
pub unsafe extern "C" fn gro_trajectory_relative(
    traj: *const GroTrajectory,
    t: usize,
    out: *mut f64,
    len: usize,
) -> GroStatus {
    copy_row(traj, t, out, len, true)
}

/// Write the trajectory as CSV.
///
/// # Safety
/// `traj` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gro_trajectory_write_csv(
    traj: *const GroTrajectory,
    path: *const c_char,
) -> GroStatus {
    guard(|| {
        non_null(traj, "traj")?;
        let path = read_str(path, "path")?;
        let file = std::fs::File::create(Path::new(path))
            .map_err(|e| fail(GroStatus::Io, format!("{path}: {e}")))?;
        let mut w = std::io::BufWriter::new(file);
        lift((*traj).record.write_csv(&mut w))?;
        std::io::Write::flush(&mut w).map_err(|e| fail(GroStatus::Io, e.to_string()))?;
        Ok(())
    })
}

/// Run one named verification suite with default thresholds.
///
/// # Safety
/// `suite` must be a NUL-terminated string; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gro_verify_suite(
    suite: *const c_char,
    seed: u64,
    passed: *mut bool,
) -> GroStatus {
    guard(|| {
        non_null(passed, "passed")?;
        let name = read_str(suite, "suite")?;
        let suite: Suite = lift(name.parse())?;
        let opts = SuiteOptions {
            seed,
            ..SuiteOptions::default()
        };
        let mut ok = true;
        for s in suite.expand() {
            ok &= lift(run_suite(s, &opts))?.passed;
        }
        *passed = ok;
        Ok(())
    })
}
