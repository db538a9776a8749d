//! C interface to wreathbench.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `wb_*_free`. Every fallible call returns a [`WbStatus`]; on
//! failure the message is kept per thread and read with [`wb_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wreathbench::assembly::{compression_upper_bound, CompressionBoundInput};
use wreathbench::codes::{cube_quotient_space, make_code, Code, DEFAULT_CODE_ATTEMPTS};
use wreathbench::distortion::{exact_c2, hamming_cube, SdpParams};
use wreathbench::tsmetric::FiniteMetricSpace;
use wreathbench::Error;

/// Result codes. `WB_STATUS_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    DimensionMismatch = 4,
    Parse = 5,
    Capacity = 6,
    CrossPresentation = 7,
    NotRealizable = 8,
    CodeSearchExhausted = 9,
    Panic = 10,
}

impl From<&Error> for WbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch(_) => WbStatus::DimensionMismatch,
            Error::Capacity { .. } => WbStatus::Capacity,
            Error::Parse { .. } => WbStatus::Parse,
            Error::InvalidInput(_) => WbStatus::InvalidInput,
            Error::CrossPresentation { .. } => WbStatus::CrossPresentation,
            Error::NotRealizable { .. } => WbStatus::NotRealizable,
            Error::CodeSearchExhausted { .. } => WbStatus::CodeSearchExhausted,
        }
    }
}

/// Finite metric space.
pub struct WbMetric(FiniteMetricSpace);

/// Binary linear code `C ⊆ Z₂^d`.
pub struct WbCode(Code);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WbDistortion {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub expansion_ratio: f64,
    pub solver_residual: f64,
    pub iterations: usize,
    /// Nonzero when the solver stopped before certifying the value.
    pub inconclusive: u8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WbBound {
    pub eps_hat: f64,
    pub bound: f64,
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

struct Fail(WbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(WbStatus::from(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            WbStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(WbStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|e| Fail(WbStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next `wb_` call on the same thread.
#[no_mangle]
pub extern "C" fn wb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a metric in the text format accepted by the command-line tool.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_metric_from_text(text: *const c_char, out: *mut *mut WbMetric) -> WbStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = read_str(text, "text")?;
        let m = FiniteMetricSpace::from_text(s)?;
        *out = Box::into_raw(Box::new(WbMetric(m)));
        Ok(())
    })
}

/// The Hamming cube `{0,1}^d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_metric_hamming_cube(d: usize, out: *mut *mut WbMetric) -> WbStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = Box::into_raw(Box::new(WbMetric(hamming_cube(d)?)));
        Ok(())
    })
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_metric_len(m: *const WbMetric) -> usize {
    m.as_ref().map_or(0, |m| m.0.len())
}

/// Distance between points `i` and `j`.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_metric_distance(m: *const WbMetric, i: usize, j: usize, out: *mut f64) -> WbStatus {
    guard(|| {
        non_null(m, "metric")?;
        non_null(out, "out")?;
        let m = &(*m).0;
        if i >= m.len() || j >= m.len() {
            return Err(Fail(WbStatus::InvalidInput, format!("index out of range for {} points", m.len())));
        }
        *out = m.dist(i, j);
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_metric_free(m: *mut WbMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Seeded code of length `d` and dimension `dimc` containing the all-ones
/// word, with minimum distance at least `floor`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_code_make(d: usize, dimc: usize, seed: u64, floor: usize, out: *mut *mut WbCode) -> WbStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = make_code(d, dimc, seed, floor, DEFAULT_CODE_ATTEMPTS)?;
        *out = Box::into_raw(Box::new(WbCode(c)));
        Ok(())
    })
}

/// Minimum distance of the code, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_code_min_distance(c: *const WbCode) -> usize {
    c.as_ref().map_or(0, |c| c.0.min_distance())
}

/// `Z₂^d / C^⊥` with the quotient Hamming metric.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_code_quotient_space(c: *const WbCode, point_budget: usize, out: *mut *mut WbMetric) -> WbStatus {
    guard(|| {
        non_null(c, "code")?;
        non_null(out, "out")?;
        let m = cube_quotient_space(&(*c).0, point_budget)?;
        *out = Box::into_raw(Box::new(WbMetric(m)));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_code_free(c: *mut WbCode) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Least Euclidean distortion of `m`. `max_points` caps the solver size; 0
/// keeps the default.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_exact_c2(m: *const WbMetric, max_points: usize, out: *mut WbDistortion) -> WbStatus {
    guard(|| {
        non_null(m, "metric")?;
        non_null(out, "out")?;
        let mut params = SdpParams::default();
        if max_points > 0 {
            params.max_points = max_points;
        }
        let r = exact_c2(&(*m).0, &params)?;
        *out = WbDistortion {
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            expansion_ratio: r.expansion_ratio,
            solver_residual: r.solver_residual,
            iterations: r.iterations,
            inconclusive: r.inconclusive as u8,
        };
        Ok(())
    })
}

/// Compression upper bound from a stage table (`eta=`, `L=`, then `diam,r`
/// rows).
///
/// # Safety
/// `table` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wb_compression_bound(table: *const c_char, out: *mut WbBound) -> WbStatus {
    guard(|| {
        non_null(out, "out")?;
        let input = CompressionBoundInput::from_text(read_str(table, "table")?)?;
        let b = compression_upper_bound(&input)?;
        *out = WbBound {
            eps_hat: b.eps_hat,
            bound: b.bound,
        };
        Ok(())
    })
}
