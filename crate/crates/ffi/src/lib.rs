//! C interface to the `rlkh` solver.
//!
//! Instances and results are opaque handles created and released by this
//! library. Every fallible call returns an [`RlkhStatus`]; on failure the
//! message is available from [`rlkh_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rlkh::io::{parse_tsplib, TimeWindowData};
use rlkh::rl::StagnationBudget;
use rlkh::solver::{solve, solve_tsptw, Mode, SolveResult, SolverConfig, TsptwProblem};
use rlkh::{Error, Instance, Metric};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlkhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    IoError = 4,
    SolveError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlkhMode {
    LkhAlpha = 0,
    LkhPopmusic = 1,
    FixqAlpha = 2,
    FixqPopmusic = 3,
    VsrAlpha = 4,
    VsrPopmusic = 5,
    QOnly = 6,
    SarsaOnly = 7,
    McOnly = 8,
}

impl From<RlkhMode> for Mode {
    fn from(m: RlkhMode) -> Self {
        match m {
            RlkhMode::LkhAlpha => Mode::LkhAlpha,
            RlkhMode::LkhPopmusic => Mode::LkhPopmusic,
            RlkhMode::FixqAlpha => Mode::FixqAlpha,
            RlkhMode::FixqPopmusic => Mode::FixqPopmusic,
            RlkhMode::VsrAlpha => Mode::VsrAlpha,
            RlkhMode::VsrPopmusic => Mode::VsrPopmusic,
            RlkhMode::QOnly => Mode::QOnly,
            RlkhMode::SarsaOnly => Mode::SarsaOnly,
            RlkhMode::McOnly => Mode::McOnly,
        }
    }
}

/// Solver settings. Zero (or a non-positive time) selects the default of
/// a field; [`rlkh_config_default`] fills in the usual values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RlkhSolverConfig {
    pub mode: RlkhMode,
    pub i_max: u64,
    pub t_max: f64,
    pub seed: u64,
    pub k_max: u32,
    pub lambda: f64,
    pub gamma: f64,
    /// Stagnating iterations before the update rule changes.
    pub n_max: u64,
    /// Candidates per city.
    pub width: u32,
}

impl RlkhSolverConfig {
    fn to_config(self) -> SolverConfig {
        let mut c = SolverConfig {
            mode: self.mode.into(),
            i_max: (self.i_max > 0).then_some(self.i_max),
            t_max: (self.t_max > 0.0).then_some(self.t_max),
            seed: self.seed,
            ..Default::default()
        };
        if self.k_max > 0 {
            c.kopt.k_max = self.k_max as usize;
        }
        if self.width > 0 {
            c.width = self.width as usize;
        }
        c.rl.lambda = self.lambda;
        c.rl.gamma = self.gamma;
        if self.n_max > 0 {
            c.rl.n_max = Some(StagnationBudget::Iterations(self.n_max));
        }
        c
    }
}

/// A symmetric TSP instance.
pub struct RlkhInstance {
    inner: Instance,
}

/// Outcome of a solve call.
pub struct RlkhResult {
    inner: SolveResult,
    /// The route for time-window runs, otherwise the tour.
    order: Vec<u32>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> RlkhStatus {
    match e {
        Error::Parse(_) => RlkhStatus::ParseError,
        Error::Io { .. } => RlkhStatus::IoError,
        Error::Config(_) | Error::Instance(_) | Error::Tour(_) => RlkhStatus::InvalidArgument,
        Error::Move(_) | Error::Json(_) => RlkhStatus::SolveError,
    }
}

/// Runs `f` with panics turned into [`RlkhStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (RlkhStatus, String)>) -> RlkhStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RlkhStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            RlkhStatus::Panic
        }
    }
}

fn fail(e: Error) -> (RlkhStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RlkhStatus, String) {
    (RlkhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RlkhStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RlkhStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rlkh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Writes the default settings to `out`.
///
/// # Safety
/// `out` must be null or point to writable memory for one config.
#[no_mangle]
pub unsafe extern "C" fn rlkh_config_default(out: *mut RlkhSolverConfig) -> RlkhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = SolverConfig::default();
        *out = RlkhSolverConfig {
            mode: RlkhMode::VsrAlpha,
            i_max: 0,
            t_max: 0.0,
            seed: d.seed,
            k_max: d.kopt.k_max as u32,
            lambda: d.rl.lambda,
            gamma: d.rl.gamma,
            n_max: 0,
            width: d.width as u32,
        };
        Ok(())
    })
}

fn publish(inst: Instance, out: *mut *mut RlkhInstance) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(RlkhInstance { inner: inst })) };
}

/// Parses TSPLIB text.
///
/// # Safety
/// `text` must be null or a NUL-terminated string; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rlkh_instance_from_tsplib(text: *const c_char, out: *mut *mut RlkhInstance) -> RlkhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = c_str(text, "text")?;
        let raw = parse_tsplib(text).map_err(|e| fail(e.into()))?;
        publish(Instance::from_raw(&raw).map_err(fail)?, out);
        Ok(())
    })
}

/// Reads a TSPLIB file.
///
/// # Safety
/// As for [`rlkh_instance_from_tsplib`], with `path` a file name.
#[no_mangle]
pub unsafe extern "C" fn rlkh_instance_from_file(path: *const c_char, out: *mut *mut RlkhInstance) -> RlkhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = c_str(path, "path")?;
        let text = std::fs::read_to_string(path).map_err(|source| {
            fail(Error::Io {
                path: path.to_string(),
                source,
            })
        })?;
        let raw = parse_tsplib(&text).map_err(|e| fail(e.into()))?;
        publish(Instance::from_raw(&raw).map_err(fail)?, out);
        Ok(())
    })
}

/// Builds a rounded Euclidean instance from `n` interleaved `x, y` pairs.
///
/// # Safety
/// `xy` must point to `2 * n` doubles; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rlkh_instance_from_coords(xy: *const f64, n: usize, out: *mut *mut RlkhInstance) -> RlkhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if xy.is_null() {
            return Err(null("xy"));
        }
        let v = std::slice::from_raw_parts(xy, 2 * n);
        let pts = v.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        publish(Instance::from_coords("coords", Metric::Euc2d, pts).map_err(fail)?, out);
        Ok(())
    })
}

/// Number of cities, 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlkh_instance_dimension(inst: *const RlkhInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n())
}

/// Cost between cities `i` and `j` (0-based), -1 when out of range.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlkh_instance_cost(inst: *const RlkhInstance, i: usize, j: usize) -> i64 {
    match inst.as_ref() {
        Some(h) if i < h.inner.n() && j < h.inner.n() => h.inner.cost(i, j),
        _ => -1,
    }
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlkh_instance_free(inst: *mut RlkhInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

fn finish(r: SolveResult, out: *mut *mut RlkhResult) {
    let order = match &r.route {
        Some(route) => route.iter().map(|&c| c as u32).collect(),
        None => r.tour.order().iter().map(|&c| c as u32).collect(),
    };
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(RlkhResult { inner: r, order })) };
}

/// Solves the TSP on `inst`. `config` may be null for the defaults.
///
/// # Safety
/// `inst` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlkh_solve(
    inst: *const RlkhInstance,
    config: *const RlkhSolverConfig,
    out: *mut *mut RlkhResult,
) -> RlkhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        let cfg = config.as_ref().map_or_else(SolverConfig::default, |c| c.to_config());
        finish(solve(&inst.inner, &cfg).map_err(fail)?, out);
        Ok(())
    })
}

/// Solves with time windows. `windows` holds `2 * n` values `a0, b0, a1,
/// b1, ...`; `service` holds `n` values or is null for none. City 0 is the
/// depot and its window must contain 0.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlkh_solve_tsptw(
    inst: *const RlkhInstance,
    windows: *const i64,
    service: *const i64,
    config: *const RlkhSolverConfig,
    out: *mut *mut RlkhResult,
) -> RlkhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if windows.is_null() {
            return Err(null("windows"));
        }
        let n = inst.inner.n();
        let w = std::slice::from_raw_parts(windows, 2 * n);
        let s = if service.is_null() {
            vec![0; n]
        } else {
            std::slice::from_raw_parts(service, n).to_vec()
        };
        let tw = TimeWindowData::new(w.chunks_exact(2).map(|c| (c[0], c[1])).collect(), s)
            .map_err(|e| fail(e.into()))?;
        let problem = TsptwProblem::new(&inst.inner, tw).map_err(fail)?;
        let cfg = config.as_ref().map_or_else(SolverConfig::default, |c| c.to_config());
        finish(solve_tsptw(&problem, &cfg).map_err(fail)?, out);
        Ok(())
    })
}

/// Best tour length, -1 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlkh_result_length(r: *const RlkhResult) -> i64 {
    r.as_ref().map_or(-1, |r| r.inner.best.fo)
}

/// Best total lateness, 0 for plain TSP runs and -1 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlkh_result_violation(r: *const RlkhResult) -> i64 {
    r.as_ref().map_or(-1, |r| r.inner.best.fv)
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlkh_result_iterations(r: *const RlkhResult) -> u64 {
    r.as_ref().map_or(0, |r| r.inner.iterations)
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlkh_result_seconds(r: *const RlkhResult) -> f64 {
    r.as_ref().map_or(0.0, |r| r.inner.seconds)
}

/// Copies up to `cap` 0-based cities of the best tour into `buf` and
/// returns the tour length in cities. Pass a null `buf` to query the size.
///
/// # Safety
/// `r` must be null or a live handle; `buf` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn rlkh_result_tour(r: *const RlkhResult, buf: *mut u32, cap: usize) -> usize {
    let Some(r) = r.as_ref() else { return 0 };
    if !buf.is_null() {
        let k = cap.min(r.order.len());
        ptr::copy_nonoverlapping(r.order.as_ptr(), buf, k);
    }
    r.order.len()
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlkh_result_free(r: *mut RlkhResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Static name of a mode such as `"vsr-alpha"`.
#[no_mangle]
pub extern "C" fn rlkh_mode_name(mode: RlkhMode) -> *const c_char {
    let s: &'static CStr = match Mode::from(mode) {
        Mode::LkhAlpha => c"lkh-alpha",
        Mode::LkhPopmusic => c"lkh-popmusic",
        Mode::FixqAlpha => c"fixq-alpha",
        Mode::FixqPopmusic => c"fixq-popmusic",
        Mode::VsrAlpha => c"vsr-alpha",
        Mode::VsrPopmusic => c"vsr-popmusic",
        Mode::QOnly => c"q-only",
        Mode::SarsaOnly => c"sarsa-only",
        Mode::McOnly => c"mc-only",
    };
    s.as_ptr()
}
