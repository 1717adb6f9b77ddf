use std::ffi::{CStr, CString};
use std::ptr;

use hamchaos_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hc_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn standard_map_step_matches_closed_form() {
    let mut map: *mut HcMap = ptr::null_mut();
    unsafe {
        assert_eq!(hc_map_standard(1.1, &mut map), HcStatus::Ok);
        let (mut q, mut p, mut s) = (0.0, 0.0, 0.0);
        assert_eq!(hc_map_step(map, 0.3, 0.2, &mut q, &mut p, &mut s), HcStatus::Ok);
        let p1 = 0.2 - 1.1 / (2.0 * std::f64::consts::PI) * (2.0 * std::f64::consts::PI * 0.3).sin();
        let q1 = (0.3 + p1).rem_euclid(1.0);
        assert!((p - p1.rem_euclid(1.0)).abs() < 1e-12, "{p} vs {p1}");
        assert!((q - q1).abs() < 1e-12);
        hc_map_free(map);
    }
}

#[test]
fn stadium_bounce_trace_is_34() {
    let mut map: *mut HcMap = ptr::null_mut();
    unsafe {
        assert_eq!(hc_map_stadium(1.0, &mut map), HcStatus::Ok);
        let (mut q, mut p) = (0.0, 0.0);
        let mut j = [0.0; 4];
        assert_eq!(hc_map_jacobian(map, 0.0, 0.0, 2, &mut q, &mut p, j.as_mut_ptr()), HcStatus::Ok);
        assert!(q.abs() < 1e-12 && p.abs() < 1e-12);
        assert!((j[0] + j[3] - 34.0).abs() < 1e-9, "trace {}", j[0] + j[3]);
        assert!((j[0] * j[3] - j[1] * j[2] - 1.0).abs() < 1e-9);
        hc_map_free(map);
    }
}

#[test]
fn baker_orbit_fills_buffers() {
    let mut map: *mut HcMap = ptr::null_mut();
    unsafe {
        assert_eq!(hc_map_baker(&mut map), HcStatus::Ok);
        let mut qs = [0.0; 4];
        let mut ps = [0.0; 4];
        assert_eq!(hc_map_orbit(map, 0.5, 0.0, 3, qs.as_mut_ptr(), ps.as_mut_ptr()), HcStatus::Ok);
        assert_eq!(qs[0], 0.5);
        assert_eq!((qs[1], ps[1]), (0.0, 0.5));
        assert_eq!((qs[2], ps[2]), (0.0, 0.25));
        hc_map_free(map);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut map: *mut HcMap = ptr::null_mut();
        assert_eq!(hc_map_stadium(-1.0, &mut map), HcStatus::InvalidArgument);
        assert!(map.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(hc_map_stadium(1.0, ptr::null_mut()), HcStatus::NullPointer);
        assert!(last_error().contains("null"));

        assert_eq!(hc_map_standard(0.5, &mut map), HcStatus::Ok);
        assert!(last_error().is_empty());
        let (mut q, mut p) = (0.0, 0.0);
        assert_eq!(hc_map_step(map, f64::NAN, 0.0, &mut q, &mut p, ptr::null_mut()), HcStatus::OutOfChart);
        assert_eq!(hc_map_step(ptr::null(), 0.1, 0.0, &mut q, &mut p, ptr::null_mut()), HcStatus::NullPointer);
        hc_map_free(map);
        hc_map_free(ptr::null_mut());
    }
}

#[test]
fn scenario_text_round_trip() {
    let text = CString::new("[scenario m]\noperation = monodromy\ngamma = 1.0\nassert.trace = 34 +- 1e-9\n").unwrap();
    let mut report: *mut HcReport = ptr::null_mut();
    unsafe {
        assert_eq!(hc_scenario_run_text(text.as_ptr(), ptr::null(), true, &mut report), HcStatus::Ok);
        assert_eq!(hc_report_len(report), 1);
        assert_eq!(hc_report_failed(report), 0);
        let mut v = 0.0;
        let name = CString::new("trace").unwrap();
        assert_eq!(hc_report_metric(report, 0, name.as_ptr(), &mut v), HcStatus::Ok);
        assert!((v - 34.0).abs() < 1e-9);
        let missing = CString::new("nope").unwrap();
        assert_eq!(hc_report_metric(report, 0, missing.as_ptr(), &mut v), HcStatus::NotFound);
        assert_eq!(hc_report_metric(report, 5, name.as_ptr(), &mut v), HcStatus::NotFound);
        let table = hc_report_table(report, 0);
        assert!(CStr::from_ptr(table).to_str().unwrap().contains("trace"));
        hc_string_free(table);
        assert!(hc_report_table(report, 1).is_null());
        hc_report_free(report);
    }
}

#[test]
fn config_errors_carry_line() {
    let text = CString::new("[scenario m]\noperation = monodromy\ncolour = red\n").unwrap();
    let mut report: *mut HcReport = ptr::null_mut();
    unsafe {
        assert_eq!(hc_scenario_run_text(text.as_ptr(), ptr::null(), false, &mut report), HcStatus::Config);
    }
    assert!(report.is_null());
    let msg = last_error();
    assert!(msg.contains("line 3") && msg.contains("colour"), "{msg}");
}

#[test]
fn catalog_by_name() {
    let mut report: *mut HcReport = ptr::null_mut();
    let name = CString::new("sec3-monodromy").unwrap();
    let bogus = CString::new("fig99").unwrap();
    unsafe {
        assert_eq!(hc_catalog_run(bogus.as_ptr(), ptr::null(), true, &mut report), HcStatus::NotFound);
        assert_eq!(hc_catalog_run(name.as_ptr(), ptr::null(), true, &mut report), HcStatus::Ok);
        assert_eq!(hc_report_failed(report), 0);
        hc_report_free(report);
        assert_eq!(hc_report_len(ptr::null()), 0);
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(hc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hamchaos.h")).unwrap();
    for f in [
        "hc_last_error",
        "hc_version",
        "hc_map_standard",
        "hc_map_stadium",
        "hc_map_baker",
        "hc_map_free",
        "hc_map_step",
        "hc_map_jacobian",
        "hc_map_orbit",
        "hc_scenario_run_text",
        "hc_catalog_run",
        "hc_report_free",
        "hc_report_len",
        "hc_report_failed",
        "hc_report_metric",
        "hc_report_table",
        "hc_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("HC_STATUS_OK = 0"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, "#include \"hamchaos.h\"\nint main(void) { return HC_STATUS_OK; }\n").unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
