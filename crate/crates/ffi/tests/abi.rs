use std::ffi::{CStr, CString};
use std::ptr;

use linunion_ffi::*;

fn last_error() -> String {
    let p = lu_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn discs(n: usize, seed: u64) -> *mut LuFamily {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { lu_generate_random_discs(n, seed, &mut f) }, LuStatus::Ok);
    f
}

#[test]
fn triple_round_trip_and_queries() {
    let json = CString::new(
        r#"{"kind":"discs","label":"triple","eps":1e-9,"members":[
            {"id":0,"cx":0.0,"cy":0.0,"r":1.0},
            {"id":1,"cx":1.8,"cy":0.0,"r":1.0},
            {"id":2,"cx":0.9,"cy":1.5588457268119895,"r":1.0}]}"#,
    )
    .unwrap();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(lu_family_from_json(json.as_ptr(), &mut f), LuStatus::Ok);
        let (mut n, mut u, mut w) = (0, 0, 0);
        let mut kind = LuKind::Curves;
        assert_eq!(lu_family_len(f, &mut n), LuStatus::Ok);
        assert_eq!(lu_family_kind(f, &mut kind), LuStatus::Ok);
        assert_eq!(lu_union_complexity(f, &mut u), LuStatus::Ok);
        assert_eq!(lu_clique_number(f, &mut w), LuStatus::Ok);
        assert_eq!((n, kind, u, w), (3, LuKind::Discs, 6, 3));

        let mut s = ptr::null_mut();
        assert_eq!(lu_family_to_json(f, &mut s), LuStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(lu_family_from_json(s, &mut g), LuStatus::Ok);
        let mut n2 = 0;
        lu_family_len(g, &mut n2);
        assert_eq!(n2, 3);
        lu_string_free(s);
        lu_family_free(g);
        lu_family_free(f);
    }
}

#[test]
fn depth_profile_buffer_protocol() {
    let f = discs(25, 4);
    unsafe {
        let mut len = 0;
        assert_eq!(lu_depth_profile(f, ptr::null_mut(), 0, &mut len), LuStatus::BufferTooSmall);
        assert!(len >= 3);
        let mut buf = vec![usize::MAX; len];
        assert_eq!(lu_depth_profile(f, buf.as_mut_ptr(), len, &mut len), LuStatus::Ok);
        assert_eq!(&buf[..2], &[0, 0]);
        assert!(buf.windows(2).skip(2).all(|w| w[0] <= w[1]));
        let mut u = 0;
        lu_union_complexity(f, &mut u);
        assert_eq!(buf[2], u);
        lu_family_free(f);
    }
}

#[test]
fn analyze_json_parses() {
    let f = discs(15, 1);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(lu_analyze_json(f, 6.0, &mut s), LuStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(v["kind"], "discs");
        assert_eq!(v["stats"]["bounds"]["thm1"]["pass"], true);
        lu_string_free(s);
        lu_family_free(f);
    }
}

#[test]
fn charging_certificates() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(lu_generate_lines_parabolas(10, 3, &mut f), LuStatus::Ok);
        let mut cert = LuCertificate::default();
        assert_eq!(lu_charge_certificate(f, 3, &mut cert), LuStatus::Ok);
        assert_eq!((cert.k, cert.n, cert.bound, cert.pass), (3, 10, 40, 1));
        assert!(cert.qualifying_count <= cert.bound);
        assert_eq!(lu_charge_certificate(f, 1, &mut cert), LuStatus::Parameter);
        assert!(last_error().contains("k"));
        let mut w = 0;
        assert_eq!(lu_clique_number(f, &mut w), LuStatus::Kind);
        lu_family_free(f);
    }
}

#[test]
fn error_paths() {
    let mut f = ptr::null_mut();
    unsafe {
        let bad = CString::new("{\"kind\":\"discs\"").unwrap();
        assert_eq!(lu_family_from_json(bad.as_ptr(), &mut f), LuStatus::Format);
        assert!(f.is_null());
        assert_eq!(lu_family_from_json(ptr::null(), &mut f), LuStatus::NullPointer);
        let mut n = 0;
        assert_eq!(lu_family_len(ptr::null(), &mut n), LuStatus::NullPointer);
        assert_eq!(lu_generate_random_discs(0, 1, &mut f), LuStatus::Parameter);
        let tangent = CString::new(
            r#"{"kind":"discs","label":"t","eps":1e-9,"members":[{"id":0,"cx":0,"cy":0,"r":1},{"id":1,"cx":2,"cy":0,"r":1}]}"#,
        )
        .unwrap();
        let st = lu_family_from_json(tangent.as_ptr(), &mut f);
        assert!(matches!(st, LuStatus::Tangency | LuStatus::Validation), "{st:?}");
        let missing = CString::new("/nonexistent/family.json").unwrap();
        assert_eq!(lu_family_load(missing.as_ptr(), &mut f), LuStatus::Io);
        lu_family_free(ptr::null_mut());
        lu_string_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_error() {
    let mut n = 0;
    unsafe {
        assert_eq!(lu_family_len(ptr::null(), &mut n), LuStatus::NullPointer);
        let f = discs(3, 0);
        assert!(lu_last_error().is_null());
        lu_family_free(f);
    }
}
