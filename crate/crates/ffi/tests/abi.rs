use std::ffi::{CStr, CString};
use std::ptr;

use polyzeta_ffi::*;

fn last_error() -> String {
    let p = pz_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn compute(w: u32) -> *mut PzExpansion {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pz_compute(w, &mut h) }, PzStatus::Ok);
    assert!(!h.is_null());
    h
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { pz_string_free(p) };
    s
}

#[test]
fn compute_and_inspect() {
    let h = compute(6);
    let mut w = 0;
    assert_eq!(unsafe { pz_max_weight(h, &mut w) }, PzStatus::Ok);
    assert_eq!(w, 6);
    assert!(pz_last_error().is_null());

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pz_coefficient_string(h, 5, &mut s) }, PzStatus::Ok);
    assert_eq!(take_string(s), "(-2*z(5))*L + (12*z(5))");

    let z5 = 1.0369277551433699263_f64;
    let mut vals = [0.0; 4];
    let mut len = 0;
    assert_eq!(unsafe { pz_coefficient_values(h, 5, 128, vals.as_mut_ptr(), vals.len(), &mut len) }, PzStatus::Ok);
    assert_eq!(len, 2);
    assert!((vals[0] - 12.0 * z5).abs() < 1e-14 && (vals[1] + 2.0 * z5).abs() < 1e-14);
    assert_eq!(unsafe { pz_coefficient_values(h, 5, 128, vals.as_mut_ptr(), 1, &mut len) }, PzStatus::BufferTooSmall);
    assert_eq!(len, 2);

    let (mut r, mut e) = (0.0, 0.0);
    assert_eq!(unsafe { pz_eval_expansion(h, 12, 3, 1, 128, &mut r, &mut e) }, PzStatus::Ok);
    let z3 = 1.2020569031595942854_f64;
    assert!((r - (1.0 + 4.0 * z3 / 1728.0)).abs() < 1e-15);
    assert!((e / r - 5.783185962946784521).abs() < 1e-12);
    unsafe { pz_expansion_free(h) };
}

#[test]
fn json_round_trip() {
    let h = compute(5);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pz_to_json(h, &mut s) }, PzStatus::Ok);
    let text = take_string(s);
    let c = CString::new(text.clone()).unwrap();
    let mut h2 = ptr::null_mut();
    assert_eq!(unsafe { pz_from_json(c.as_ptr(), &mut h2) }, PzStatus::Ok);
    let mut s2 = ptr::null_mut();
    assert_eq!(unsafe { pz_to_json(h2, &mut s2) }, PzStatus::Ok);
    assert_eq!(take_string(s2), text);
    unsafe {
        pz_expansion_free(h);
        pz_expansion_free(h2);
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pz_compute(0, &mut h) }, PzStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("max_weight"));
    assert_eq!(unsafe { pz_compute(3, ptr::null_mut()) }, PzStatus::NullPointer);

    let bad = CString::new("{\"max_weight\": 1}").unwrap();
    assert_eq!(unsafe { pz_from_json(bad.as_ptr(), &mut h) }, PzStatus::ParseError);

    let h = compute(3);
    let mut r = 0.0;
    assert_eq!(unsafe { pz_eval_expansion(h, 12, 5, 1, 128, &mut r, ptr::null_mut()) }, PzStatus::InvalidArgument);
    assert!(last_error().contains("terms"));
    assert_eq!(unsafe { pz_eval_expansion(h, 2, 3, 1, 128, &mut r, ptr::null_mut()) }, PzStatus::InvalidArgument);
    assert_eq!(unsafe { pz_eval_expansion(h, 12, 3, 1, 32, &mut r, ptr::null_mut()) }, PzStatus::InvalidArgument);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pz_coefficient_string(h, 0, &mut s) }, PzStatus::InvalidArgument);
    assert_eq!(unsafe { pz_coefficient_string(h, 4, &mut s) }, PzStatus::InvalidArgument);
    assert_eq!(unsafe { pz_max_weight(ptr::null(), &mut 0) }, PzStatus::NullPointer);
    unsafe {
        pz_expansion_free(h);
        pz_expansion_free(ptr::null_mut());
        pz_string_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(pz_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
