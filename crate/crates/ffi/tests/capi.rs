use std::f64::consts::PI;
use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use sphere_ricci_ffi::*;

fn last_error() -> String {
    let p = sr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn round(n: usize) -> *mut SrMetric {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sr_metric_round(n, &mut m) }, SrStatus::Ok);
    m
}

#[test]
fn round_metric_accessors() {
    let m = round(32);
    unsafe {
        let mut len = 0;
        assert_eq!(sr_metric_len(m, &mut len), SrStatus::Ok);
        assert_eq!(len, 33);

        let mut k = vec![0.0; len];
        assert_eq!(sr_metric_curvature(m, k.as_mut_ptr(), len), SrStatus::Ok);
        assert!(k.iter().all(|v| (v - 1.0).abs() < 1e-12));

        let mut area = 0.0;
        assert_eq!(sr_metric_total_area(m, &mut area), SrStatus::Ok);
        assert!((area - 4.0 * PI).abs() < 1e-12);

        let mut tc = 0.0;
        assert_eq!(sr_metric_total_curvature(m, &mut tc), SrStatus::Ok);
        assert!((tc - 4.0 * PI).abs() < 1e-12);

        let (mut ok, mut at) = (false, 0);
        assert_eq!(sr_metric_ritore(m, &mut ok, &mut at), SrStatus::Ok);
        assert!(ok);
        assert_eq!(at, usize::MAX);

        let mut t0 = 0.0;
        assert_eq!(sr_solve_t0(m, &mut t0), SrStatus::Ok);
        assert_eq!(t0, f64::INFINITY);

        sr_metric_free(m);
    }
}

#[test]
fn bad_grid_reports_invalid_argument() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sr_metric_round(33, &mut m) }, SrStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(last_error().contains("grid"), "{}", last_error());
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(sr_metric_round(32, ptr::null_mut()), SrStatus::NullPointer);
        let mut x = 0.0;
        assert_eq!(sr_metric_time(ptr::null(), &mut x), SrStatus::NullPointer);
        sr_metric_free(ptr::null_mut());
        sr_trajectory_free(ptr::null_mut());
        sr_string_free(ptr::null_mut());
    }
}

#[test]
fn buffer_length_is_checked() {
    let m = round(16);
    let mut buf = [0.0; 5];
    unsafe {
        assert_eq!(sr_metric_u(m, buf.as_mut_ptr(), buf.len()), SrStatus::BufferSize);
        sr_metric_free(m);
    }
    assert!(last_error().contains("expected 17"));
}

#[test]
fn samples_round_trip_and_normalize() {
    let u = [0.3; 17];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(sr_metric_from_samples(u.as_ptr(), u.len(), &mut m), SrStatus::Ok);
        let mut area = 0.0;
        sr_metric_total_area(m, &mut area);
        assert!((area - 4.0 * PI * 0.6f64.exp()).abs() < 1e-10);
        assert_eq!(sr_metric_normalize(m), SrStatus::Ok);
        let mut back = vec![1.0; 17];
        sr_metric_u(m, back.as_mut_ptr(), 17);
        assert!(back.iter().all(|v| v.abs() < 1e-12));
        sr_metric_free(m);
    }
}

#[test]
fn rosenau_metric_profile_matches_closed_form() {
    let mut m = ptr::null_mut();
    let xi = [0.1, 0.3, 0.5];
    let mut phi = [0.0; 3];
    unsafe {
        assert_eq!(sr_metric_rosenau(128, 0.5, &mut m), SrStatus::Ok);
        let status = sr_metric_profile(m, xi.as_ptr(), 3, phi.as_mut_ptr(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(status, SrStatus::Ok);
        sr_metric_free(m);
    }
    for (x, p) in xi.iter().zip(phi) {
        assert!((p - sr_rosenau_profile(*x, 0.5)).abs() < 1e-3, "{x}: {p}");
    }
}

#[test]
fn evolve_and_compare() {
    let modes = [2u32];
    let amps = [0.1];
    let times = [0.0, 0.25, 0.5];
    let mut m = ptr::null_mut();
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(
            sr_metric_fourier(32, modes.as_ptr(), amps.as_ptr(), 1, &mut m),
            SrStatus::Ok
        );
        assert_eq!(sr_evolve(m, 0.5, 0.5, times.as_ptr(), 3, &mut traj), SrStatus::Ok);

        let mut len = 0;
        sr_trajectory_len(traj, &mut len);
        assert_eq!(len, 3);

        let mut last = ptr::null_mut();
        assert_eq!(sr_trajectory_snapshot(traj, 2, &mut last), SrStatus::Ok);
        let mut t = 0.0;
        sr_metric_time(last, &mut t);
        assert_eq!(t, 0.5);
        sr_metric_free(last);
        assert_eq!(sr_trajectory_snapshot(traj, 3, &mut last), SrStatus::InvalidArgument);

        let mut t0 = 0.0;
        assert_eq!(sr_solve_t0(m, &mut t0), SrStatus::Ok);
        assert!(t0.is_finite());

        let mut passed = false;
        let mut json = ptr::null_mut();
        assert_eq!(sr_compare(traj, t0, &mut passed, &mut json), SrStatus::Ok);
        assert!(passed);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        sr_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.is_object());

        sr_trajectory_free(traj);
        sr_metric_free(m);
    }
}

#[test]
fn unnormalized_initial_data_is_refused() {
    let u = [0.5; 17];
    let mut m = ptr::null_mut();
    let mut traj = ptr::null_mut();
    unsafe {
        sr_metric_from_samples(u.as_ptr(), u.len(), &mut m);
        assert_eq!(
            sr_evolve(m, 0.1, 0.5, ptr::null(), 0, &mut traj),
            SrStatus::InvalidArgument
        );
        assert!(traj.is_null());
        sr_metric_free(m);
    }
    assert!(last_error().contains("normalize"));
}

#[test]
fn curvature_bound_limits() {
    assert!((sr_curvature_bound(50.0, 0.0) - 1.0).abs() < 1e-15);
    assert!(sr_curvature_bound(-1.0, 0.0) > 7.0);
    assert_eq!(sr_rosenau_profile(0.5, f64::INFINITY), 2.0 * PI);
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(sr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sphere_ricci.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "sr_metric_round",
        "sr_evolve",
        "sr_compare",
        "SR_STATUS_BLOWUP",
        "typedef struct SrMetric SrMetric",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"sphere_ricci.h\"\nint main(void) { SrMetric *m = 0; return sr_metric_round(32, &m) == SR_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
