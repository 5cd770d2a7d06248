//! C ABI over the flatcensus engine.
//!
//! Every fallible call returns an [`FcStatus`]; on failure the message is
//! kept per thread and read back with [`fc_last_error`]. Strings handed out
//! by this library must be released with [`fc_string_free`], handles with
//! their matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flatcensus::census::{run_census, CensusRun, RunConfig};
use flatcensus::cli::{classify, default_marking};
use flatcensus::dt::{count_il, PantsDecomposition};
use flatcensus::{Error, MarkedTiling, RawTable};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Domain = 5,
    ResourceLimit = 6,
    Io = 7,
    Panic = 8,
}

/// A marked square-tiled surface.
pub struct FcSurface {
    raw: RawTable,
    mt: MarkedTiling,
}

/// A finished census run.
pub struct FcCensus {
    run: CensusRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FcStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => FcStatus::Parse,
        Error::Domain(_) | Error::CensusIncomplete { .. } => FcStatus::Domain,
        Error::ResourceLimit(_) => FcStatus::ResourceLimit,
        Error::Io(_) => FcStatus::Io,
        _ => FcStatus::InvalidInput,
    }
}

struct Fail(FcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(FcStatus::Parse, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(FcStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(FcStatus::InvalidUtf8, e.to_string()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(FcStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(FcStatus::InvalidInput, e.to_string()))?;
    put(out, c.into_raw())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(FcStatus::NullPointer, "null handle".into()))
}

/// Message of the last failed call on this thread, or null. Owned by the library;
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a gluing table in JSON form. Unmarked tables get the default marking.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_surface_from_json(json: *const c_char, out: *mut *mut FcSurface) -> FcStatus {
    guard(|| {
        let raw: RawTable = serde_json::from_str(str_arg(json)?)?;
        let mt = default_marking(&raw)?;
        put(out, Box::into_raw(Box::new(FcSurface { raw, mt })))
    })
}

/// # Safety
/// `s` must be null or a handle from [`fc_surface_from_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_surface_free(s: *mut FcSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live surface handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_surface_genus(s: *const FcSurface, out: *mut u32) -> FcStatus {
    guard(|| put(out, deref(s)?.mt.genus()))
}

/// # Safety
/// `s` must be a live surface handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_surface_aut_order(s: *const FcSurface, out: *mut u64) -> FcStatus {
    guard(|| put(out, deref(s)?.mt.automorphisms().order() as u64))
}

/// Full description as pretty JSON; free with [`fc_string_free`].
///
/// # Safety
/// `s` must be a live surface handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_surface_classify_json(s: *const FcSurface, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let mut raw = deref(s)?.raw.clone();
        raw.marked = deref(s)?.mt.marked_ids();
        let v = classify(&raw)?;
        put_string(out, serde_json::to_string_pretty(&v)?)
    })
}

/// Runs a pruned census of (g, n) up to `max_area` with `workers` threads.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_census_run(
    g: u32,
    n: u32,
    max_area: u32,
    workers: u32,
    out: *mut *mut FcCensus,
) -> FcStatus {
    guard(|| {
        let mut cfg = RunConfig::new(g, n, max_area);
        cfg.workers = workers.max(1) as usize;
        cfg.validate()?;
        let run = run_census(&cfg)?;
        put(out, Box::into_raw(Box::new(FcCensus { run })))
    })
}

/// # Safety
/// `c` must be null or a handle from [`fc_census_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_census_free(c: *mut FcCensus) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of non-empty (area, h_type, v_type) buckets.
///
/// # Safety
/// `c` must be a live census handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_census_bucket_count(c: *const FcCensus, out: *mut usize) -> FcStatus {
    guard(|| put(out, deref(c)?.run.table.len()))
}

/// Sum of all buckets as `num/den`.
///
/// # Safety
/// `c` must be a live census handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_census_total(c: *const FcCensus, out: *mut *mut c_char) -> FcStatus {
    guard(|| put_string(out, deref(c)?.run.table.total().to_string()))
}

/// # Safety
/// `c` must be a live census handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_census_csv(c: *const FcCensus, out: *mut *mut c_char) -> FcStatus {
    guard(|| put_string(out, deref(c)?.run.table.to_csv()))
}

/// Closed-form constants for (g, n) as a JSON array.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_predict_json(g: u32, n: u32, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let preds = flatcensus::asymptotics::predictions(g, n)?;
        put_string(out, serde_json::to_string(&preds)?)
    })
}

/// Number of integral Dehn-Thurston points of length at most `l`, in decimal.
///
/// # Safety
/// `pants_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_dt_count(pants_json: *const c_char, l: u64, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let pd: PantsDecomposition = serde_json::from_str(str_arg(pants_json)?)?;
        pd.validate()?;
        put_string(out, count_il(&pd, l).to_string())
    })
}
