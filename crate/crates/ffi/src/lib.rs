//! C ABI over the shrinkcut pipeline.
//!
//! Handles are opaque and owned by the caller: every `*_new` or run result
//! must be released with the matching `*_free`. Functions return a
//! [`ShrinkcutStatus`]; on failure [`shrinkcut_last_error`] describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use shrinkcut::jsonfmt;
use shrinkcut::pipeline::{run_pipeline, InstanceSource, PipelineConfig, PipelineError, PipelineRun};
use shrinkcut::shrink::TieBreak;
use shrinkcut::wirecut::{harada_decomposition, peng_decomposition, sampling_overhead, verify_qpd};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShrinkcutStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    StageFailed = 3,
    Io = 4,
    VerifyFailed = 5,
    Panic = 6,
}

/// Pipeline configuration.
pub struct ShrinkcutConfig {
    inner: PipelineConfig,
}

/// A finished pipeline run.
pub struct ShrinkcutRun {
    inner: PipelineRun,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: ShrinkcutStatus, msg: &str) -> ShrinkcutStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ShrinkcutStatus) -> ShrinkcutStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ShrinkcutStatus::Panic, "internal panic"),
    }
}

fn from_pipeline(e: &PipelineError) -> ShrinkcutStatus {
    let status = match e {
        PipelineError::Stage { .. } => ShrinkcutStatus::StageFailed,
        PipelineError::Io { .. } => ShrinkcutStatus::Io,
    };
    fail(status, &e.to_string())
}

/// Message of the last failed call on this thread; empty if none. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn shrinkcut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn shrinkcut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration for a generated instance with `n_cities` cities.
#[no_mangle]
pub extern "C" fn shrinkcut_config_new(n_cities: usize, seed: u64) -> *mut ShrinkcutConfig {
    Box::into_raw(Box::new(ShrinkcutConfig {
        inner: PipelineConfig::generate(n_cities, seed),
    }))
}

/// # Safety
/// `cfg` must come from [`shrinkcut_config_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_config_free(cfg: *mut ShrinkcutConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Integer settings addressable through [`shrinkcut_config_set`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShrinkcutSetting {
    Beta = 0,
    ShrinkTarget = 1,
    NodeLimit = 2,
    Layers = 3,
    Restarts = 4,
    MaxEvals = 5,
    Shots = 6,
    TopK = 7,
    /// 0 lexicographic, 1 heaviest edge.
    TieBreak = 8,
}

/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_config_set(cfg: *mut ShrinkcutConfig, setting: ShrinkcutSetting, value: usize) -> ShrinkcutStatus {
    let Some(cfg) = cfg.as_mut() else {
        return fail(ShrinkcutStatus::NullPointer, "config is null");
    };
    let c = &mut cfg.inner;
    match setting {
        ShrinkcutSetting::Beta => c.beta = value,
        ShrinkcutSetting::ShrinkTarget => c.shrink_target = value,
        ShrinkcutSetting::NodeLimit => c.separator_node_limit = value,
        ShrinkcutSetting::Layers => c.layers = value,
        ShrinkcutSetting::Restarts => c.restarts = value,
        ShrinkcutSetting::MaxEvals => c.max_evals = value,
        ShrinkcutSetting::Shots => c.shots = value,
        ShrinkcutSetting::TopK => c.top_k = value,
        ShrinkcutSetting::TieBreak => {
            c.tie_break = match value {
                0 => TieBreak::Lexicographic,
                1 => TieBreak::Heaviest,
                _ => return fail(ShrinkcutStatus::InvalidArgument, "tie break must be 0 or 1"),
            }
        }
    }
    ShrinkcutStatus::Ok
}

/// Loads the instance from a TSP JSON file instead of generating one.
///
/// # Safety
/// `cfg` must be a live configuration handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_config_set_instance_file(cfg: *mut ShrinkcutConfig, path: *const c_char) -> ShrinkcutStatus {
    let (Some(cfg), false) = (cfg.as_mut(), path.is_null()) else {
        return fail(ShrinkcutStatus::NullPointer, "config or path is null");
    };
    match CStr::from_ptr(path).to_str() {
        Ok(p) => {
            cfg.inner.instance = InstanceSource::File { path: PathBuf::from(p) };
            ShrinkcutStatus::Ok
        }
        Err(_) => fail(ShrinkcutStatus::InvalidArgument, "path is not UTF-8"),
    }
}

/// Runs every stage. `out_dir` may be null to skip writing artifacts.
///
/// # Safety
/// `cfg` must be a live handle, `out_dir` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_run(
    cfg: *const ShrinkcutConfig,
    out_dir: *const c_char,
    out: *mut *mut ShrinkcutRun,
) -> ShrinkcutStatus {
    guard(|| {
        let (Some(cfg), false) = (cfg.as_ref(), out.is_null()) else {
            return fail(ShrinkcutStatus::NullPointer, "config or output is null");
        };
        *out = ptr::null_mut();
        let dir = if out_dir.is_null() {
            None
        } else {
            match CStr::from_ptr(out_dir).to_str() {
                Ok(s) => Some(PathBuf::from(s)),
                Err(_) => return fail(ShrinkcutStatus::InvalidArgument, "output directory is not UTF-8"),
            }
        };
        match run_pipeline(&cfg.inner, dir.as_deref()) {
            Ok(run) => {
                *out = Box::into_raw(Box::new(ShrinkcutRun { inner: run }));
                ShrinkcutStatus::Ok
            }
            Err(e) => from_pipeline(&e),
        }
    })
}

/// # Safety
/// `run` must come from [`shrinkcut_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_run_free(run: *mut ShrinkcutRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Scalar results of a run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShrinkcutSummary {
    pub maxcut_vertices: usize,
    pub separator_size: usize,
    pub shrunk_vertices: usize,
    pub qubits_a: usize,
    pub qubits_b: usize,
    pub kappa: f64,
    pub expectation_uncut: f64,
    pub expectation_cut: f64,
    pub expectation_sampling: f64,
    pub optimal_length: f64,
    /// Length of the best decoded tour, or a negative value if none was feasible.
    pub best_length: f64,
    pub found_optimal: bool,
}

/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_run_summary(run: *const ShrinkcutRun, out: *mut ShrinkcutSummary) -> ShrinkcutStatus {
    let (Some(run), false) = (run.as_ref(), out.is_null()) else {
        return fail(ShrinkcutStatus::NullPointer, "run or output is null");
    };
    let r = &run.inner.report;
    *out = ShrinkcutSummary {
        maxcut_vertices: r.reduction.maxcut_vertices,
        separator_size: r.separator.size,
        shrunk_vertices: r.shrink.shrunk_vertices,
        qubits_a: r.cutting.qubits_a,
        qubits_b: r.cutting.qubits_b,
        kappa: r.cutting.kappa_joint,
        expectation_uncut: r.cutting.expectation_uncut,
        expectation_cut: r.cutting.expectation_cut,
        expectation_sampling: r.cutting.expectation_sampling,
        optimal_length: r.decoding.optimal_length,
        best_length: r.decoding.best_tour.as_ref().map_or(-1.0, |t| t.length),
        found_optimal: r.decoding.found_optimal,
    };
    ShrinkcutStatus::Ok
}

/// Copies the best decoded tour into `cities`. `len` receives the tour size;
/// when `capacity` is too small nothing is copied and `INVALID_ARGUMENT` is returned.
///
/// # Safety
/// `run` must be live, `cities` valid for `capacity` writes, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_run_best_tour(
    run: *const ShrinkcutRun,
    cities: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> ShrinkcutStatus {
    let (Some(run), false) = (run.as_ref(), len.is_null()) else {
        return fail(ShrinkcutStatus::NullPointer, "run or length is null");
    };
    let Some(tour) = &run.inner.report.decoding.best_tour else {
        *len = 0;
        return ShrinkcutStatus::Ok;
    };
    *len = tour.order.len();
    if capacity < tour.order.len() || cities.is_null() {
        return fail(ShrinkcutStatus::InvalidArgument, "tour buffer too small");
    }
    ptr::copy_nonoverlapping(tour.order.as_ptr(), cities, tour.order.len());
    ShrinkcutStatus::Ok
}

/// Report as JSON. Release with [`shrinkcut_string_free`].
///
/// # Safety
/// `run` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_run_report_json(run: *const ShrinkcutRun, out: *mut *mut c_char) -> ShrinkcutStatus {
    let (Some(run), false) = (run.as_ref(), out.is_null()) else {
        return fail(ShrinkcutStatus::NullPointer, "run or output is null");
    };
    match jsonfmt::to_string(&run.inner.report) {
        Ok(s) => {
            *out = CString::new(s).map_or(ptr::null_mut(), CString::into_raw);
            ShrinkcutStatus::Ok
        }
        Err(e) => fail(ShrinkcutStatus::StageFailed, &e.to_string()),
    }
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks both wire-cut decompositions; deviations are written when the pointers are non-null.
///
/// # Safety
/// Non-null pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_verify_qpd(harada_deviation: *mut f64, peng_deviation: *mut f64) -> ShrinkcutStatus {
    let h = verify_qpd(&harada_decomposition());
    let p = verify_qpd(&peng_decomposition());
    if let Some(d) = harada_deviation.as_mut() {
        *d = h.max_deviation;
    }
    if let Some(d) = peng_deviation.as_mut() {
        *d = p.max_deviation;
    }
    if h.passed && p.passed {
        ShrinkcutStatus::Ok
    } else {
        fail(ShrinkcutStatus::VerifyFailed, "decomposition identity check failed")
    }
}

/// Shots to observe a string of probability `p` with failure rate `delta`, uncut and cut.
///
/// # Safety
/// `n` and `n_tilde` must be writable.
#[no_mangle]
pub unsafe extern "C" fn shrinkcut_sampling_overhead(
    delta: f64,
    p: f64,
    kappa: f64,
    n: *mut u64,
    n_tilde: *mut u64,
) -> ShrinkcutStatus {
    if n.is_null() || n_tilde.is_null() {
        return fail(ShrinkcutStatus::NullPointer, "output is null");
    }
    match sampling_overhead(delta, p, kappa) {
        Ok(o) => {
            *n = o.n;
            *n_tilde = o.n_tilde;
            ShrinkcutStatus::Ok
        }
        Err(e) => fail(ShrinkcutStatus::InvalidArgument, &e.to_string()),
    }
}
