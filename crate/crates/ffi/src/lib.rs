//! C ABI over the curlflux library.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns a [`CfStatus`] and
//! leaves a message for [`cf_last_error_message`] on the calling thread.
//! Text outputs use the `(buf, cap, needed)` convention: `needed` receives
//! the byte length without the terminator, and the call fails with
//! `CF_STATUS_BUFFER_TOO_SMALL` when `cap <= needed`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use curlflux::cli::{parse_map_file, MapFile};
use curlflux::metrics::{nth_root_ratio, ratio_f64};
use curlflux::morphisms::verify_inverse;
use curlflux::sampler::estimate_curl_ratio;
use curlflux::{classify, CurlFluxPoint, Engine, EngineConfig, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NotInverse = 4,
    EnumerationTooLarge = 5,
    UnboundedCancellation = 6,
    StateBudgetExceeded = 7,
    MemoryBudgetExceeded = 8,
    GrowthBlowUp = 9,
    EngineUnavailable = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfEngine {
    Brute = 0,
    Dp = 1,
    Auto = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfCount {
    Curl = 0,
    Flux = 1,
    Ball = 2,
}

/// Ratios and n-th roots at one radius.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CfPoint {
    pub n: usize,
    pub curl_ratio: f64,
    pub curl_root: f64,
    pub flux_ratio: f64,
    pub flux_root: f64,
}

/// Monte Carlo curl ratio with a 95% normal-approximation half width.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CfEstimate {
    pub n: usize,
    pub samples: u64,
    pub hits: u64,
    pub point: f64,
    pub ci95: f64,
}

/// A parsed map file: an endomorphism and, optionally, its claimed inverse.
pub struct CfMap {
    map: MapFile,
}

/// Exact counts for every radius `0..=n`.
pub struct CfSeries {
    points: Vec<CurlFluxPoint>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::InvalidRank(_) | Error::RankMismatch { .. } => CfStatus::InvalidArgument,
        Error::Parse(_) | Error::Unreduced { .. } => CfStatus::Parse,
        Error::NotInverse { .. } => CfStatus::NotInverse,
        Error::EnumerationTooLarge { .. } => CfStatus::EnumerationTooLarge,
        Error::UnboundedCancellation { .. } => CfStatus::UnboundedCancellation,
        Error::StateBudgetExceeded { .. } => CfStatus::StateBudgetExceeded,
        Error::MemoryBudgetExceeded { .. } => CfStatus::MemoryBudgetExceeded,
        Error::GrowthBlowUp { .. } => CfStatus::GrowthBlowUp,
        Error::EngineUnavailable { .. } => CfStatus::EngineUnavailable,
    }
}

fn fail(status: CfStatus, msg: impl Into<String>) -> CfStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> CfStatus) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == CfStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CfStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

macro_rules! deref {
    ($p:expr, $what:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(CfStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

macro_rules! try_lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(status_of(&e), e.to_string()),
        }
    };
}

fn write_text(text: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> CfStatus {
    if let Some(n) = unsafe { needed.as_mut() } {
        *n = text.len();
    }
    if buf.is_null() || cap <= text.len() {
        return fail(CfStatus::BufferTooSmall, format!("need {} bytes plus terminator", text.len()));
    }
    unsafe {
        ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
        *buf.add(text.len()) = 0;
    }
    CfStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse map-file text into a new handle.
#[no_mangle]
pub unsafe extern "C" fn cf_map_parse(text: *const c_char, out: *mut *mut CfMap) -> CfStatus {
    guard(|| {
        if out.is_null() {
            return fail(CfStatus::NullPointer, "out is null");
        }
        if text.is_null() {
            return fail(CfStatus::NullPointer, "text is null");
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => return fail(CfStatus::Parse, "map text is not UTF-8"),
        };
        let map = try_lib!(parse_map_file(text));
        unsafe { *out = Box::into_raw(Box::new(CfMap { map })) };
        CfStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_map_free(map: *mut CfMap) {
    if !map.is_null() {
        drop(unsafe { Box::from_raw(map) });
    }
}

/// Rank of the free group, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cf_map_rank(map: *const CfMap) -> usize {
    unsafe { map.as_ref() }.map_or(0, |m| m.map.forward.rank())
}

#[no_mangle]
pub unsafe extern "C" fn cf_map_has_inverse(map: *const CfMap) -> bool {
    unsafe { map.as_ref() }.is_some_and(|m| m.map.inverse.is_some())
}

/// `CF_STATUS_OK` when the inverse section composes to the identity both
/// ways; `CF_STATUS_INVALID_ARGUMENT` when there is no inverse section.
#[no_mangle]
pub unsafe extern "C" fn cf_map_verify_inverse(map: *const CfMap) -> CfStatus {
    guard(|| {
        let m = deref!(map, "map");
        let Some(inv) = &m.map.inverse else {
            return fail(CfStatus::InvalidArgument, "map has no inverse section");
        };
        try_lib!(verify_inverse(&m.map.forward, inv));
        CfStatus::Ok
    })
}

/// Images as `name: word` lines.
#[no_mangle]
pub unsafe extern "C" fn cf_map_format(map: *const CfMap, buf: *mut c_char, cap: usize, needed: *mut usize) -> CfStatus {
    guard(|| {
        let m = deref!(map, "map");
        write_text(&curlflux::cli::format_map_file(&m.map), buf, cap, needed)
    })
}

/// One-line classification: permutation, inner, simple, power map or general.
#[no_mangle]
pub unsafe extern "C" fn cf_map_classify(map: *const CfMap, buf: *mut c_char, cap: usize, needed: *mut usize) -> CfStatus {
    guard(|| {
        let m = deref!(map, "map");
        let phi = &m.map.forward;
        write_text(&classify(phi).describe(phi.ctx()), buf, cap, needed)
    })
}

/// Exact curl/flux counts for radii `0..=n`.
#[no_mangle]
pub unsafe extern "C" fn cf_series_compute(map: *const CfMap, n: usize, engine: CfEngine, out: *mut *mut CfSeries) -> CfStatus {
    guard(|| {
        let m = deref!(map, "map");
        if out.is_null() {
            return fail(CfStatus::NullPointer, "out is null");
        }
        let engine = match engine {
            CfEngine::Brute => Engine::Brute,
            CfEngine::Dp => Engine::Dp,
            CfEngine::Auto => Engine::Auto,
        };
        let points = try_lib!(EngineConfig::default().series(&m.map.forward, n, engine));
        unsafe { *out = Box::into_raw(Box::new(CfSeries { points })) };
        CfStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_series_free(series: *mut CfSeries) {
    if !series.is_null() {
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Number of points, i.e. `n + 1`; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cf_series_len(series: *const CfSeries) -> usize {
    unsafe { series.as_ref() }.map_or(0, |s| s.points.len())
}

#[no_mangle]
pub unsafe extern "C" fn cf_series_point(series: *const CfSeries, n: usize, out: *mut CfPoint) -> CfStatus {
    guard(|| {
        let s = deref!(series, "series");
        let Some(p) = s.points.get(n) else {
            return fail(CfStatus::InvalidArgument, format!("radius {n} beyond series end {}", s.points.len() - 1));
        };
        if out.is_null() {
            return fail(CfStatus::NullPointer, "out is null");
        }
        unsafe {
            *out = CfPoint {
                n,
                curl_ratio: ratio_f64(&p.curl_count, &p.ball),
                curl_root: nth_root_ratio(&p.curl_count, &p.ball, n),
                flux_ratio: ratio_f64(&p.flux_count, &p.ball),
                flux_root: nth_root_ratio(&p.flux_count, &p.ball, n),
            }
        };
        CfStatus::Ok
    })
}

/// Exact count at radius `n` as decimal text.
#[no_mangle]
pub unsafe extern "C" fn cf_series_count(
    series: *const CfSeries,
    n: usize,
    which: CfCount,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> CfStatus {
    guard(|| {
        let s = deref!(series, "series");
        let Some(p) = s.points.get(n) else {
            return fail(CfStatus::InvalidArgument, format!("radius {n} beyond series end {}", s.points.len() - 1));
        };
        let v = match which {
            CfCount::Curl => &p.curl_count,
            CfCount::Flux => &p.flux_count,
            CfCount::Ball => &p.ball,
        };
        write_text(&v.to_string(), buf, cap, needed)
    })
}

/// Seeded Monte Carlo estimate of the curl ratio at radius `n`.
#[no_mangle]
pub unsafe extern "C" fn cf_estimate_curl_ratio(
    map: *const CfMap,
    n: usize,
    samples: u64,
    seed: u64,
    out: *mut CfEstimate,
) -> CfStatus {
    guard(|| {
        let m = deref!(map, "map");
        if out.is_null() {
            return fail(CfStatus::NullPointer, "out is null");
        }
        if samples == 0 {
            return fail(CfStatus::InvalidArgument, "samples must be positive");
        }
        let e = estimate_curl_ratio(&m.map.forward, n, samples, seed);
        unsafe { *out = CfEstimate { n, samples: e.samples, hits: e.hits, point: e.point, ci95: e.ci95 } };
        CfStatus::Ok
    })
}
