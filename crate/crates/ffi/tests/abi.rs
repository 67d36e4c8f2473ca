use std::ffi::{CStr, CString};
use std::ptr;

use jtlab_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(jt_last_error()).to_string_lossy().into_owned() }
}

fn element(factor: &str, pairs: &[f64]) -> Result<*mut JtElement, JtStatus> {
    let mut out = ptr::null_mut();
    let s = unsafe { jt_element_new(cstr(factor).as_ptr(), pairs.as_ptr(), pairs.len() / 2, &mut out) };
    if s == JtStatus::Ok {
        Ok(out)
    } else {
        assert!(out.is_null());
        Err(s)
    }
}

#[test]
fn element_roundtrip_and_norm() {
    let x = element("type1:2x2", &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0]).unwrap();
    let (mut r, mut c, mut n) = (0, 0, 0.0);
    unsafe {
        assert_eq!(jt_element_shape(x, &mut r, &mut c), JtStatus::Ok);
        assert_eq!((r, c), (2, 2));
        assert_eq!(jt_element_norm(x, &mut n), JtStatus::Ok);
        assert!((n - 4.0).abs() < 1e-12);
        let mut buf = [0.0; 8];
        assert_eq!(jt_element_data(x, buf.as_mut_ptr(), 3), JtStatus::BufferTooSmall);
        assert_eq!(jt_element_data(x, buf.as_mut_ptr(), 4), JtStatus::Ok);
        assert_eq!(buf[7], 4.0);
        jt_element_free(x);
    }
}

#[test]
fn decomposition_handles() {
    let x = element("type3:2", &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(jt_decompose(x, &mut d), JtStatus::Ok);
        let mut len = 0;
        assert_eq!(jt_decomposition_len(d, &mut len), JtStatus::Ok);
        assert_eq!(len, 2);
        let mut lam = [0.0; 2];
        assert_eq!(jt_decomposition_lambdas(d, lam.as_mut_ptr(), 2), JtStatus::Ok);
        assert!((lam[0] - 2.0).abs() < 1e-12 && (lam[1] - 1.0).abs() < 1e-12);
        let mut a = ptr::null_mut();
        assert_eq!(jt_decomposition_atom(d, 0, &mut a), JtStatus::Ok);
        let mut n = 0.0;
        jt_element_norm(a, &mut n);
        assert!((n - 1.0).abs() < 1e-12);
        let mut t = ptr::null_mut();
        assert_eq!(jt_triple_product(a, a, a, &mut t), JtStatus::Ok);
        let mut buf = [0.0; 8];
        jt_element_data(t, buf.as_mut_ptr(), 4);
        assert!((buf[0] - 1.0).abs() < 1e-12);
        let mut none = ptr::null_mut();
        assert_eq!(jt_decomposition_atom(d, 5, &mut none), JtStatus::OutOfRange);
        assert!(none.is_null());
        for e in [a, t, x] {
            jt_element_free(e);
        }
        jt_decomposition_free(d);
    }
}

#[test]
fn errors_carry_status_and_message() {
    assert_eq!(element("type7:2", &[0.0, 0.0]), Err(JtStatus::InvalidFactor));
    assert!(last_error().contains("type7"));
    assert_eq!(element("type1:2x2", &[1.0, 0.0]), Err(JtStatus::ShapeMismatch));
    assert_eq!(element("type2:2", &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]), Err(JtStatus::MembershipViolation));
    let mut n = 0.0;
    assert_eq!(unsafe { jt_element_norm(ptr::null(), &mut n) }, JtStatus::NullPointer);
    let mut out = ptr::null_mut();
    let s = unsafe { jt_element_new(ptr::null(), ptr::null(), 0, &mut out) };
    assert_eq!(s, JtStatus::NullPointer);
    let a = element("spin:3", &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let b = element("type3:2", &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { jt_triple_product(a, b, a, &mut t) }, JtStatus::FactorMismatch);
    unsafe {
        jt_element_free(a);
        jt_element_free(b);
        jt_element_free(ptr::null_mut());
    }
}

#[test]
fn json_and_verify() {
    let mut x = ptr::null_mut();
    let json = cstr(r#"{"factor":{"kind":"spin","dim":2},"data":[[1.0,0.0],[0.0,1.0]]}"#);
    assert_eq!(unsafe { jt_element_from_json(json.as_ptr(), &mut x) }, JtStatus::Ok);
    unsafe { jt_element_free(x) };
    assert_eq!(unsafe { jt_element_from_json(cstr("{").as_ptr(), &mut x) }, JtStatus::Json);

    let cfg = cstr(r#"{"factors":[{"kind":"type3","n":2}],"trials":3,"master_seed":9,"suites":["weyl","interlacing"]}"#);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { jt_verify(cfg.as_ptr(), &mut report) }, JtStatus::Ok);
    let text = unsafe { CStr::from_ptr(report).to_str().unwrap().to_string() };
    unsafe { jt_string_free(report) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], serde_json::json!(true));

    let bad = cstr(r#"{"factors":[],"trials":1,"master_seed":0,"suites":["nope"]}"#);
    assert_eq!(unsafe { jt_verify(bad.as_ptr(), &mut report) }, JtStatus::Config);
    assert!(report.is_null());
}

/// The generated header is valid C and C++.
#[test]
fn header_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/jtlab.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!("#include \"{header}\"\nint main(void) {{ JtStatus s = JT_STATUS_OK; (void)jt_last_error; return (int)s; }}\n"),
    )
    .unwrap();
    for (cc, extra) in [("cc", vec!["-std=c99"]), ("c++", vec!["-x", "c++"])] {
        let out = std::process::Command::new(cc)
            .args(&extra)
            .args(["-fsyntax-only", "-Wall", "-Werror"])
            .arg(&src)
            .output()
            .expect("C compiler available");
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
