use std::ffi::{CStr, CString};
use std::ptr;

use interp_scales_ffi::*;

fn last_error() -> String {
    let p = is_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn boyd(spec: &str) -> *mut IsBoydFunction {
    let s = CString::new(spec).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { is_boyd_parse(s.as_ptr(), &mut h) }, IsStatus::Ok);
    h
}

#[test]
fn boyd_handle_round_trip() {
    let h = boyd("power:0.3");
    let (mut v, mut lo, mut hi) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(is_boyd_evaluate(h, 4.0, &mut v), IsStatus::Ok);
        assert_eq!(is_boyd_indices(h, &mut lo, &mut hi), IsStatus::Ok);
        is_boyd_free(h);
    }
    assert!((v - 4f64.powf(0.3)).abs() < 1e-15);
    assert!((lo - 0.3).abs() < 1e-12 && (hi - 0.3).abs() < 1e-12);
    assert!(is_last_error_message().is_null());
}

#[test]
fn parse_errors_carry_the_token() {
    let s = CString::new("powr:0.3").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { is_boyd_parse(s.as_ptr(), &mut h) }, IsStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().contains("powr:0.3"));
}

#[test]
fn null_pointers_are_reported() {
    let mut v = 0.0;
    assert_eq!(unsafe { is_boyd_evaluate(ptr::null(), 1.0, &mut v) }, IsStatus::NullPointer);
    assert_eq!(unsafe { is_boyd_parse(ptr::null(), ptr::null_mut()) }, IsStatus::NullPointer);
    unsafe { is_boyd_free(ptr::null_mut()) };
}

#[test]
fn norms_and_k_functional() {
    let x = [0.5, 1.0, 0.25];
    let snf = CString::new("phi1").unwrap();
    let (e0, e1) = (CString::new("lp:1").unwrap(), CString::new("lp:inf").unwrap());
    let mut f = ptr::null_mut();
    let mut c = ptr::null_mut();
    let phi = boyd("power:0.5");
    let (mut n1, mut lm, mut k, mut interp) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(is_snf_parse(snf.as_ptr(), &mut f), IsStatus::Ok);
        assert_eq!(is_phi_type_norm(f, x.as_ptr(), x.len(), &mut n1), IsStatus::Ok);
        assert_eq!(is_lorentz_marcinkiewicz_norm(phi, f64::INFINITY, x.as_ptr(), x.len(), &mut lm), IsStatus::Ok);
        assert_eq!(is_couple_parse(e0.as_ptr(), e1.as_ptr(), &mut c), IsStatus::Ok);
        assert_eq!(is_k_functional(c, IsKMethod::Exact, 1.5, x.as_ptr(), x.len(), &mut k), IsStatus::Ok);
        let unit = [1.0];
        assert_eq!(is_interpolation_norm(c, phi, 2.0, IsKMethod::Truncation, unit.as_ptr(), 1, &mut interp), IsStatus::Ok);
        let mut bad = 0.0;
        assert_eq!(is_k_functional(c, IsKMethod::Exact, -1.0, x.as_ptr(), x.len(), &mut bad), IsStatus::Domain);
        is_snf_free(f);
        is_couple_free(c);
        is_boyd_free(phi);
    }
    assert_eq!(n1, 1.75);
    // sup of sqrt(n) a_n over (1, 0.5, 0.25) is attained at n = 1
    assert_eq!(lm, 1.0);
    // x_1 + 0.5·x_2
    assert_eq!(k, 1.25);
    assert!((interp / 2f64.sqrt() - 1.0).abs() < 1e-6);
}

#[test]
fn approximation_numbers_fill_buffer() {
    let m = [0.0, 2.0, 3.0, 0.0, 0.0, 0.0];
    let mut out = [0.0; 2];
    let mut len = 0;
    unsafe {
        assert_eq!(is_approximation_numbers(m.as_ptr(), 3, 2, out.as_mut_ptr(), 2, &mut len), IsStatus::Ok);
        assert_eq!((len, out), (2, [3.0, 2.0]));
        assert_eq!(is_approximation_numbers(m.as_ptr(), 3, 2, out.as_mut_ptr(), 1, &mut len), IsStatus::BufferTooSmall);
        assert_eq!(len, 2);
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(is_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
