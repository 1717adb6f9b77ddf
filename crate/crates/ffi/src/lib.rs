//! C ABI over the hamchaos toolkit.
//!
//! Every entry point returns an [`HcStatus`]. On failure the message is kept
//! per thread and read back with [`hc_last_error`]. Maps and scenario reports
//! are opaque handles released with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hamchaos::scenario::{self, ScenarioReport};
use hamchaos::{ChaosError, MapSystem, PhasePoint};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfChart = 3,
    Numerical = 4,
    Config = 5,
    Io = 6,
    NotFound = 7,
    Panic = 8,
}

/// Opaque map handle.
pub struct HcMap {
    map: MapSystem,
}

/// Opaque handle over the reports of one scenario run.
pub struct HcReport {
    reports: Vec<ScenarioReport>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &ChaosError) -> HcStatus {
    match e {
        ChaosError::InvalidParameter(_) | ChaosError::BadSymbols(_) | ChaosError::NotAFlow(_) | ChaosError::NotAMap(_) => {
            HcStatus::InvalidArgument
        }
        ChaosError::NonFinite(_) | ChaosError::OutOfChart { .. } => HcStatus::OutOfChart,
        ChaosError::Config { .. } => HcStatus::Config,
        ChaosError::Io(_) => HcStatus::Io,
        _ => HcStatus::Numerical,
    }
}

fn fail(status: HcStatus, msg: &str) -> HcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), (HcStatus, String)>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HcStatus::Ok
        }
        Ok(Err((s, m))) => fail(s, &m),
        Err(_) => fail(HcStatus::Panic, "internal panic"),
    }
}

fn chaos(e: ChaosError) -> (HcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn utf8<'a>(s: *const c_char, what: &str) -> Result<&'a str, (HcStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (HcStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_map(make: impl FnOnce() -> hamchaos::Result<MapSystem>, out: *mut *mut HcMap) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let map = make().map_err(chaos)?;
        unsafe { *out = Box::into_raw(Box::new(HcMap { map })) };
        Ok(())
    })
}

/// Standard map on the unit torus with kick strength `k`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_map_standard(k: f64, out: *mut *mut HcMap) -> HcStatus {
    new_map(|| MapSystem::standard(k), out)
}

/// Stadium billiard with straight-edge parameter `gamma` (unit radius).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_map_stadium(gamma: f64, out: *mut *mut HcMap) -> HcStatus {
    new_map(|| MapSystem::stadium(gamma), out)
}

/// The baker map on the unit square.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_map_baker(out: *mut *mut HcMap) -> HcStatus {
    new_map(|| Ok(MapSystem::Baker), out)
}

/// # Safety
/// `map` must be null or a handle from one of the `hc_map_*` constructors,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_map_free(map: *mut HcMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// One step of the map. `action` may be null.
///
/// # Safety
/// `map` must be a live handle; `q_out` and `p_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_map_step(
    map: *const HcMap,
    q: f64,
    p: f64,
    q_out: *mut f64,
    p_out: *mut f64,
    action: *mut f64,
) -> HcStatus {
    guard(|| {
        let m = map.as_ref().ok_or_else(|| null("map"))?;
        if q_out.is_null() || p_out.is_null() {
            return Err(null("output"));
        }
        let (x, s) = m.map.step(PhasePoint::new(q, p)).map_err(chaos)?;
        *q_out = x.q;
        *p_out = x.p;
        if !action.is_null() {
            *action = s;
        }
        Ok(())
    })
}

/// Propagate `n` steps and write the tangent matrix of the composite map to
/// `jacobian` as `[dq/dq, dq/dp, dp/dq, dp/dp]`.
///
/// # Safety
/// `map` must be a live handle; `q_out`, `p_out` must be writable and
/// `jacobian` must point to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_map_jacobian(
    map: *const HcMap,
    q: f64,
    p: f64,
    n: usize,
    q_out: *mut f64,
    p_out: *mut f64,
    jacobian: *mut f64,
) -> HcStatus {
    guard(|| {
        let m = map.as_ref().ok_or_else(|| null("map"))?;
        if q_out.is_null() || p_out.is_null() || jacobian.is_null() {
            return Err(null("output"));
        }
        let (x, _, j) = m.map.step_n_jacobian(PhasePoint::new(q, p), n).map_err(chaos)?;
        *q_out = x.q;
        *p_out = x.p;
        let out = std::slice::from_raw_parts_mut(jacobian, 4);
        out.copy_from_slice(&[j.a, j.b, j.c, j.d]);
        Ok(())
    })
}

/// Write the orbit `x_0 .. x_n` into `qs` and `ps`, each of length `n + 1`.
///
/// # Safety
/// `map` must be a live handle; `qs` and `ps` must each hold `n + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_map_orbit(map: *const HcMap, q: f64, p: f64, n: usize, qs: *mut f64, ps: *mut f64) -> HcStatus {
    guard(|| {
        let m = map.as_ref().ok_or_else(|| null("map"))?;
        if qs.is_null() || ps.is_null() {
            return Err(null("output"));
        }
        let seg = hamchaos::dynamics::iterate(&m.map, PhasePoint::new(q, p), n).map_err(chaos)?;
        let qs = std::slice::from_raw_parts_mut(qs, n + 1);
        let ps = std::slice::from_raw_parts_mut(ps, n + 1);
        for (i, x) in seg.points.iter().enumerate().take(n + 1) {
            qs[i] = x.q;
            ps[i] = x.p;
        }
        Ok(())
    })
}

fn finish_run(r: hamchaos::Result<Vec<ScenarioReport>>, out: *mut *mut HcReport) -> Result<(), (HcStatus, String)> {
    let reports = r.map_err(chaos)?;
    unsafe { *out = Box::into_raw(Box::new(HcReport { reports })) };
    Ok(())
}

unsafe fn opt_dir<'a>(dir: *const c_char) -> Result<Option<&'a Path>, (HcStatus, String)> {
    if dir.is_null() {
        Ok(None)
    } else {
        Ok(Some(Path::new(utf8(dir, "out_dir")?)))
    }
}

/// Run scenario file text. `out_dir` may be null to skip artifacts.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out_dir` null or NUL-terminated,
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_run_text(
    text: *const c_char,
    out_dir: *const c_char,
    assert: bool,
    out: *mut *mut HcReport,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = utf8(text, "text")?;
        let dir = opt_dir(out_dir)?;
        finish_run(scenario::run_text(text, dir, None, assert), out)
    })
}

/// Run one built-in catalog scenario by name.
///
/// # Safety
/// As for [`hc_scenario_run_text`], with `name` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hc_catalog_run(
    name: *const c_char,
    out_dir: *const c_char,
    assert: bool,
    out: *mut *mut HcReport,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = utf8(name, "name")?;
        let entry = scenario::catalog_entry(name)
            .ok_or_else(|| (HcStatus::NotFound, format!("no catalog scenario named `{name}`")))?;
        let dir = opt_dir(out_dir)?;
        finish_run(scenario::run_text(entry.text, dir, None, assert), out)
    })
}

/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hc_report_free(report: *mut HcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of scenarios in the report; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hc_report_len(report: *const HcReport) -> usize {
    report.as_ref().map_or(0, |r| r.reports.len())
}

/// Number of failed checks across all scenarios; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hc_report_failed(report: *const HcReport) -> usize {
    report.as_ref().map_or(0, |r| {
        r.reports.iter().flat_map(|s| &s.checks).filter(|c| !c.passed).count()
    })
}

/// Look up metric `name` of scenario `index`.
///
/// # Safety
/// `report` must be a live handle, `name` NUL-terminated, `value` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_report_metric(
    report: *const HcReport,
    index: usize,
    name: *const c_char,
    value: *mut f64,
) -> HcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        let name = utf8(name, "name")?;
        let s = r
            .reports
            .get(index)
            .ok_or_else(|| (HcStatus::NotFound, format!("scenario index {index} out of range")))?;
        *value = s
            .metric(name)
            .ok_or_else(|| (HcStatus::NotFound, format!("scenario {} has no metric `{name}`", s.name)))?;
        Ok(())
    })
}

/// Formatted results table of scenario `index`, or null if out of range.
/// Release with [`hc_string_free`].
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hc_report_table(report: *const HcReport, index: usize) -> *mut c_char {
    match report.as_ref().and_then(|r| r.reports.get(index)) {
        Some(s) => CString::new(s.table().replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
