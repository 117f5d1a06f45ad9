//! C ABI for hyperlab.
//!
//! Every function returns an `HlStatus`; results go through out-pointers.
//! On failure the message is kept per thread and can be copied out with
//! `hl_last_error_message`. Handles are opaque and must be released with
//! their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hyperlab::geometry::{self, HyperboloidPoint};
use hyperlab::runner::{self, CheckReport, ExperimentConfig, Suite};
use hyperlab::{asymptotics, Error};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Config = 4,
    Io = 5,
    Numerical = 6,
    Hypothesis = 7,
    Panic = 8,
}

/// Distance to a moving center and its first two time derivatives.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HlKinematics {
    pub rho: f64,
    pub rho_t: f64,
    pub rho_tt: f64,
}

/// Opaque experiment configuration.
pub struct HlConfig {
    inner: ExperimentConfig,
}

/// Opaque result of a suite run.
pub struct HlReport {
    inner: CheckReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> HlStatus {
    match e {
        Error::Context { source, .. } | Error::Step { source, .. } => status_of(source),
        Error::Domain(_) | Error::Support(_) => HlStatus::Domain,
        Error::Invalid(_) | Error::TooFewSamples { .. } | Error::EmptyState | Error::GridTooSmall(_) => {
            HlStatus::InvalidArgument
        }
        Error::Config(_) => HlStatus::Config,
        Error::Io(_) => HlStatus::Io,
        Error::Hypothesis(_) => HlStatus::Hypothesis,
        Error::Degenerate(_) | Error::SingularMetric { .. } | Error::Solver(_) | Error::NonFinite { .. } => {
            HlStatus::Numerical
        }
    }
}

struct Fail(HlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HlStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(HlStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// NUL-terminated). Returns the full message length in bytes, 0 if none.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Default configuration for the named suite.
///
/// # Safety
/// `suite` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_config_new(suite: *const c_char, out: *mut *mut HlConfig) -> HlStatus {
    guard(|| {
        let suite: Suite = read_str(suite, "suite")?.parse()?;
        let cfg = Box::new(HlConfig {
            inner: ExperimentConfig::for_suite(suite),
        });
        write(out, Box::into_raw(cfg), "out")
    })
}

/// Parses a TOML configuration.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_config_from_toml(text: *const c_char, out: *mut *mut HlConfig) -> HlStatus {
    guard(|| {
        let inner = ExperimentConfig::from_toml(read_str(text, "text")?)?;
        inner.suite()?;
        write(out, Box::into_raw(Box::new(HlConfig { inner })), "out")
    })
}

/// # Safety
/// `cfg` must be a live handle from `hl_config_new` or `hl_config_from_toml`.
#[no_mangle]
pub unsafe extern "C" fn hl_config_set_seed(cfg: *mut HlConfig, seed: u64) -> HlStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        cfg.inner.seed = seed;
        Ok(())
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `cfg` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hl_config_free(cfg: *mut HlConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the configured suite, writing report.json, metadata.json and the
/// CSV tables into `out_dir`.
///
/// # Safety
/// `cfg` must be a live handle, `out_dir` a NUL-terminated path and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hl_run(cfg: *const HlConfig, out_dir: *const c_char, out: *mut *mut HlReport) -> HlStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let dir = read_str(out_dir, "out_dir")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ev = runner::run(&cfg.inner, Path::new(dir))?;
        write(out, Box::into_raw(Box::new(HlReport { inner: ev.report })), "out")
    })
}

/// Whether every section of the run passed.
///
/// # Safety
/// `report` must be a live handle; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_report_pass(report: *const HlReport, pass: *mut bool) -> HlStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        write(pass, r.inner.pass, "pass")
    })
}

/// The report as a JSON string; release it with `hl_string_free`.
///
/// # Safety
/// `report` must be a live handle; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_report_json(report: *const HlReport, json: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let text = serde_json::to_string_pretty(&r.inner).map_err(|e| Fail(HlStatus::Io, e.to_string()))?;
        let c = CString::new(text).map_err(|e| Fail(HlStatus::Io, e.to_string()))?;
        write(json, c.into_raw(), "json")
    })
}

/// # Safety
/// `report` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hl_report_free(report: *mut HlReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Delta^2 (rho^2) on n-dimensional hyperbolic space at radius `rho`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_bilaplacian_rho_squared(n: usize, rho: f64, out: *mut f64) -> HlStatus {
    guard(|| write(out, geometry::bilaplacian_rho_squared(n, rho)?, "out"))
}

/// Hyperbolic distance between two points of the plane in polar coordinates.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_polar2_distance(rho1: f64, theta1: f64, rho2: f64, theta2: f64, out: *mut f64) -> HlStatus {
    guard(|| {
        if ![rho1, theta1, rho2, theta2].iter().all(|v| v.is_finite()) || rho1 < 0.0 || rho2 < 0.0 {
            return Err(Fail(HlStatus::Domain, "coordinates must be finite with rho >= 0".into()));
        }
        write(out, geometry::polar2_distance(rho1, theta1, rho2, theta2), "out")
    })
}

/// Distance from the plane point (rho, theta) to the moving center of
/// amplitude `r` at time `t`, with its time derivatives.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_moving_center_kinematics(
    rho: f64,
    theta: f64,
    r: f64,
    t: f64,
    out: *mut HlKinematics,
) -> HlStatus {
    guard(|| {
        if !(rho >= 0.0) || !rho.is_finite() || !theta.is_finite() {
            return Err(Fail(HlStatus::Domain, "point must be finite with rho >= 0".into()));
        }
        let k = geometry::moving_center_kinematics(&HyperboloidPoint::polar2(rho, theta), r, t)?;
        write(
            out,
            HlKinematics {
                rho: k.rho,
                rho_t: k.rho_t,
                rho_tt: k.rho_tt,
            },
            "out",
        )
    })
}

/// Ratio of the Laplace integral to its leading-order asymptotic.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_asymptotic_ratio(sigma: f64, rho: f64, gamma0: f64, out: *mut f64) -> HlStatus {
    guard(|| write(out, asymptotics::asymptotic_ratio(sigma, rho, gamma0)?, "out"))
}

/// Quadratic-log exponent Q(ell, r) and the residual of its defining relation.
///
/// # Safety
/// `q` and `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_q_exponent(ell: u32, r: f64, q: *mut f64, residual: *mut f64) -> HlStatus {
    guard(|| {
        if q.is_null() || residual.is_null() {
            return Err(null("q or residual"));
        }
        let (a, b) = asymptotics::q_exponent(ell, r)?;
        q.write(a);
        residual.write(b);
        Ok(())
    })
}
