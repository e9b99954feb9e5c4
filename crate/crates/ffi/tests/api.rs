use std::ffi::{CStr, CString};
use std::ptr;

use isolab_ffi::*;

const RUNNING_GEOMETRY: &str = r#"{
    "ellipse": { "a": 2.0, "b": 1.0 },
    "corner_rounding": 0.0,
    "outer_bumps": [
        { "center": -1.85, "half_width": 0.06, "depth": 0.05 },
        { "center": 1.8, "half_width": 0.05, "depth": 0.07 }
    ],
    "focal_bumps": [ { "center": -0.8, "half_width": 0.3, "depth": 0.25 } ]
}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(isolab_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn running_pair() -> *mut IsolabPair {
    let json = CString::new(RUNNING_GEOMETRY).unwrap();
    let mut pair = ptr::null_mut();
    let st = unsafe { isolab_pair_from_json(json.as_ptr(), &mut pair) };
    assert_eq!(st, IsolabStatus::Ok, "{}", last_error());
    pair
}

fn bump(center: f64, half_width: f64, depth: f64) -> IsolabBump {
    IsolabBump {
        center,
        half_width,
        depth,
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(isolab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn pair_from_bumps_and_from_json_agree() {
    let outer = [bump(-1.85, 0.06, 0.05), bump(1.8, 0.05, 0.07)];
    let focal = [bump(-0.8, 0.3, 0.25)];
    let mut a = ptr::null_mut();
    let st =
        unsafe { isolab_pair_new(2.0, 1.0, outer.as_ptr(), 2, focal.as_ptr(), 1, 0.0, &mut a) };
    assert_eq!(st, IsolabStatus::Ok, "{}", last_error());
    let b = running_pair();

    let n = 64;
    let (mut xa, mut xb) = (vec![0.0; 2 * n], vec![0.0; 2 * n]);
    for which in 0..3 {
        unsafe {
            assert_eq!(
                isolab_pair_boundary(a, which, n, xa.as_mut_ptr()),
                IsolabStatus::Ok
            );
            assert_eq!(
                isolab_pair_boundary(b, which, n, xb.as_mut_ptr()),
                IsolabStatus::Ok
            );
        }
        assert_eq!(xa, xb);
    }
    let mut status = -1;
    unsafe {
        assert_eq!(isolab_pair_status(a, &mut status), IsolabStatus::Ok);
        isolab_pair_free(a);
        isolab_pair_free(b);
    }
    assert_eq!(status, 0);
}

#[test]
fn symmetric_focal_bump_gives_identical_members() {
    let focal = [bump(0.0, 0.3, 0.25)];
    let mut p = ptr::null_mut();
    let mut status = -1;
    unsafe {
        let st = isolab_pair_new(2.0, 1.0, ptr::null(), 0, focal.as_ptr(), 1, 0.0, &mut p);
        assert_eq!(st, IsolabStatus::Ok, "{}", last_error());
        assert_eq!(isolab_pair_status(p, &mut status), IsolabStatus::Ok);
        isolab_pair_free(p);
    }
    assert_eq!(status, 2);
}

#[test]
fn invalid_geometry_reports_code_and_message() {
    let mut p = ptr::null_mut();
    let st = unsafe { isolab_pair_new(1.0, 2.0, ptr::null(), 0, ptr::null(), 0, 0.0, &mut p) };
    assert_eq!(st, IsolabStatus::Geometry);
    assert!(p.is_null());
    assert!(!last_error().is_empty());

    // A focal bump reaching past the focus.
    let focal = [bump(1.5, 0.5, 0.1)];
    let st = unsafe { isolab_pair_new(2.0, 1.0, ptr::null(), 0, focal.as_ptr(), 1, 0.0, &mut p) };
    assert_eq!(st, IsolabStatus::Geometry);
    assert!(!last_error().is_empty());
}

#[test]
fn malformed_json_is_a_config_error() {
    let json = CString::new(r#"{"ellipse": {"a": 2.0}"#).unwrap();
    let mut p = ptr::null_mut();
    let st = unsafe { isolab_pair_from_json(json.as_ptr(), &mut p) };
    assert_eq!(st, IsolabStatus::Config);
    assert!(p.is_null());
}

#[test]
fn null_pointers_are_rejected() {
    let mut status = 0;
    unsafe {
        assert_eq!(
            isolab_pair_status(ptr::null(), &mut status),
            IsolabStatus::NullPointer
        );
        assert!(last_error().contains("pair"));
        assert_eq!(
            isolab_pair_new(
                2.0,
                1.0,
                ptr::null(),
                1,
                ptr::null(),
                0,
                0.0,
                &mut ptr::null_mut()
            ),
            IsolabStatus::NullPointer
        );
        assert_eq!(
            isolab_pair_from_json(ptr::null(), &mut ptr::null_mut()),
            IsolabStatus::NullPointer
        );
        let p = running_pair();
        assert_eq!(
            isolab_pair_status(p, ptr::null_mut()),
            IsolabStatus::NullPointer
        );
        assert_eq!(
            isolab_pair_boundary(p, 0, 8, ptr::null_mut()),
            IsolabStatus::NullPointer
        );
        let mut xy = [0.0; 16];
        assert_eq!(
            isolab_pair_boundary(p, 3, 8, xy.as_mut_ptr()),
            IsolabStatus::InvalidArgument
        );
        isolab_pair_free(p);
        isolab_pair_free(ptr::null_mut());
        isolab_length_spectrum_free(ptr::null_mut());
        isolab_eigenpair_free(ptr::null_mut());
        isolab_string_free(ptr::null_mut());
    }
}

#[test]
fn members_share_their_length_spectrum() {
    let p = running_pair();
    let caps = IsolabCaps {
        l_max: 6.0,
        n_max: 3,
        n_starts: 40,
        seed: 1,
    };
    let (mut s1, mut s2) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(
            isolab_length_spectrum(p, 1, caps, &mut s1),
            IsolabStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(
            isolab_length_spectrum(p, 2, caps, &mut s2),
            IsolabStatus::Ok,
            "{}",
            last_error()
        );
        let n = isolab_length_spectrum_len(s1);
        assert!(n > 0);
        let (mut len, mut mult) = (0.0, 0usize);
        assert_eq!(
            isolab_length_spectrum_get(s1, 0, &mut len, &mut mult),
            IsolabStatus::Ok
        );
        assert!(len > 0.0 && len <= 6.0 && mult >= 1);
        assert_eq!(
            isolab_length_spectrum_get(s1, n, &mut len, &mut mult),
            IsolabStatus::InvalidArgument
        );
        let (mut pass, mut gap) = (0, f64::NAN);
        assert_eq!(
            isolab_length_spectra_compare(s1, s2, 1e-8, &mut pass, &mut gap),
            IsolabStatus::Ok
        );
        assert_eq!(pass, 1, "max gap {gap}");
        assert!(gap <= 1e-8);
        isolab_length_spectrum_free(s1);
        isolab_length_spectrum_free(s2);
        isolab_pair_free(p);
    }
}

#[test]
fn run_rejects_unknown_experiment_and_bad_config() {
    let cfg = CString::new("{}").unwrap();
    let (mut report, mut code) = (ptr::null_mut(), -1);
    unsafe {
        let exp = CString::new("no-such-thing").unwrap();
        let st = isolab_run(
            exp.as_ptr(),
            cfg.as_ptr(),
            ptr::null(),
            &mut report,
            &mut code,
        );
        assert_eq!(st, IsolabStatus::InvalidArgument);
        assert!(last_error().contains("no-such-thing"));

        let exp = CString::new("pair-make").unwrap();
        let bad = CString::new(r#"{"geometry": {}, "bogus": 1}"#).unwrap();
        let st = isolab_run(
            exp.as_ptr(),
            bad.as_ptr(),
            ptr::null(),
            &mut report,
            &mut code,
        );
        assert_eq!(st, IsolabStatus::Config);
        assert!(report.is_null());
    }
}

#[test]
fn run_pair_make_returns_report() {
    let cfg = CString::new(format!(r#"{{"geometry": {RUNNING_GEOMETRY}}}"#)).unwrap();
    let exp = CString::new("pair-make").unwrap();
    let (mut report, mut code) = (ptr::null_mut(), -1);
    unsafe {
        let st = isolab_run(
            exp.as_ptr(),
            cfg.as_ptr(),
            ptr::null(),
            &mut report,
            &mut code,
        );
        assert_eq!(st, IsolabStatus::Ok, "{}", last_error());
        let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
        isolab_string_free(report);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["experiment"], "pair-make");
        assert_eq!(v["exit_code"], 0);
    }
    assert_eq!(code, 0);
}

#[test]
fn eigenpair_of_base_domain() {
    let p = running_pair();
    let mut e = ptr::null_mut();
    unsafe {
        let st = isolab_ground_state(p, 0, 3.0, 3.8, 9, 200, &mut e);
        assert_eq!(st, IsolabStatus::Ok, "{}", last_error());
        let (mut lambda, mut bar) = (0.0, 0.0);
        assert_eq!(
            isolab_eigenpair_lambda(e, &mut lambda, &mut bar),
            IsolabStatus::Ok
        );
        assert!((lambda - 11.7366).abs() < 1e-2, "lambda {lambda}");
        assert!(bar >= 0.0);
        let mut u = 0.0;
        assert_eq!(
            isolab_eigenpair_value(e, 0.0, 0.5, &mut u),
            IsolabStatus::Ok
        );
        assert!(u.is_finite() && u != 0.0);
        isolab_eigenpair_free(e);
        isolab_pair_free(p);
    }
}
