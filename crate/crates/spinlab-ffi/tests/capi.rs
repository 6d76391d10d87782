use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use spinlab_ffi::*;

fn parse(text: &str) -> (SpinlabStatus, *mut SpinlabAlgebra) {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { spinlab_algebra_parse(c.as_ptr(), &mut out) };
    (s, out)
}

fn last_error() -> String {
    let p = spinlab_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn parse_and_query() {
    let (s, alg) = parse("(0,0,12,13)");
    assert_eq!(s, SpinlabStatus::Ok);
    let mut dim = 0usize;
    let mut nil = false;
    unsafe {
        assert_eq!(spinlab_algebra_dim(alg, &mut dim), SpinlabStatus::Ok);
        assert_eq!(spinlab_algebra_is_nilpotent(alg, &mut nil), SpinlabStatus::Ok);
        spinlab_algebra_free(alg);
    }
    assert_eq!((dim, nil), (4, true));
}

#[test]
fn parse_errors() {
    let (s, alg) = parse("(0,0,12,1x)");
    assert_eq!(s, SpinlabStatus::ParseError);
    assert!(alg.is_null());
    assert!(last_error().contains("position"));
    assert_eq!(parse("(0,0,0,12,34)").0, SpinlabStatus::JacobiFailure);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { spinlab_algebra_parse(ptr::null(), &mut out) }, SpinlabStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { spinlab_algebra_parse(bad.as_ptr().cast(), &mut out) }, SpinlabStatus::InvalidUtf8);
}

#[test]
fn parameters_kernel_and_lift() {
    let text = CString::new("(0,0,0,0,mu12*12+mu34*34)").unwrap();
    let names = [CString::new("mu12").unwrap(), CString::new("mu34").unwrap()];
    let ptrs: Vec<*const c_char> = names.iter().map(|n| n.as_ptr()).collect();
    let values = [1.0, -1.0];
    let mut alg = ptr::null_mut();
    unsafe {
        assert_eq!(
            spinlab_algebra_parse_with_params(text.as_ptr(), ptrs.as_ptr(), values.as_ptr(), 2, &mut alg),
            SpinlabStatus::Ok
        );
        let mut k = 0usize;
        assert_eq!(spinlab_dirac_kernel_dim(alg, 1e-9, &mut k), SpinlabStatus::Ok);
        assert_eq!(k, 4);
        let mut mu = 0.0;
        let mut v = [0.0; 5];
        assert_eq!(spinlab_invariants_dim5(alg, &mut mu, v.as_mut_ptr()), SpinlabStatus::Ok);
        assert_eq!(mu, 2.0);
        assert_eq!(v[4], -2.0);
        let mut t = f64::NAN;
        assert_eq!(spinlab_lift_tau1_norm(alg, 0, 1e-9, &mut t), SpinlabStatus::Ok);
        assert!(t <= 1e-8);
        assert_eq!(spinlab_lift_tau1_norm(alg, 4, 1e-9, &mut t), SpinlabStatus::NoKernel);
        spinlab_algebra_free(alg);

        let mut unbound = ptr::null_mut();
        assert_eq!(spinlab_algebra_parse_with_params(text.as_ptr(), ptr::null(), ptr::null(), 0, &mut unbound), SpinlabStatus::ParseError);
    }
}

#[test]
fn matrix_buffer() {
    let (_, alg) = parse("(0,0,0,0,12)");
    let mut n = 0usize;
    unsafe {
        assert_eq!(spinlab_dirac_matrix(alg, false, ptr::null_mut(), 0, &mut n), SpinlabStatus::BufferTooSmall);
        assert_eq!(n, 8);
        let mut buf = vec![0.0; n * n];
        assert_eq!(spinlab_dirac_matrix(alg, true, buf.as_mut_ptr(), buf.len(), &mut n), SpinlabStatus::Ok);
        // 16 D^2 = I for de5 = e12
        for i in 0..n {
            for j in 0..n {
                assert!((buf[i * n + j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert_eq!(spinlab_algebra_dim(ptr::null(), &mut n), SpinlabStatus::NullPointer);
        spinlab_algebra_free(alg);
        spinlab_algebra_free(ptr::null_mut());
    }
}

#[test]
fn verify_json_and_version() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(spinlab_verify_paper_json(0, &mut s), SpinlabStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_string();
        spinlab_string_free(s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["claims"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    }
    let ver = unsafe { CStr::from_ptr(spinlab_version()) }.to_str().unwrap();
    assert_eq!(ver, env!("CARGO_PKG_VERSION"));
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "spinlab.h"

int main(void) {
    SpinlabAlgebra *alg = NULL;
    if (spinlab_algebra_parse("(0,0,0,0,12+34)", &alg) != SPINLAB_STATUS_OK) return 1;
    uintptr_t k = 0;
    if (spinlab_dirac_kernel_dim(alg, 1e-9, &k) != SPINLAB_STATUS_OK) return 2;
    spinlab_algebra_free(alg);
    if (spinlab_algebra_parse("(0,0,1", &alg) != SPINLAB_STATUS_PARSE_ERROR) return 3;
    printf("%u %s\n", (unsigned)k, spinlab_last_error_message() ? "err" : "none");
    return 0;
}
"#;

#[test]
fn c_program_links_against_staticlib() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libspinlab_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() || !lib.exists() {
        eprintln!("no C compiler or static library; C link check not run");
        return;
    }
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("capi_smoke.c");
    let bin = tmp.join("capi_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let st = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4 err");
}
