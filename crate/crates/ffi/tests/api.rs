use std::ffi::{c_char, CStr, CString};
use std::ptr;

use chasekit_ffi::*;

const THEORY: &str = "rel P/1, R/2, Q/1
axiom tau1: P(x) |-[x] exists y. P(x) & R(x,y)
axiom tau2: R(x,y) |-[x,y] R(x,y) & Q(y)";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    chasekit_string_free(s);
    out
}

fn last_error() -> String {
    let p = chasekit_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p).to_str().unwrap().to_string() }
}

unsafe fn theory() -> *mut ChasekitTheory {
    let mut t = ptr::null_mut();
    assert_eq!(chasekit_theory_parse(c(THEORY).as_ptr(), &mut t), ChasekitStatus::Ok);
    t
}

#[test]
fn chase_round_trip() {
    unsafe {
        let t = theory();
        let mut a = ptr::null_mut();
        let src = c("carrier: a\nrel P: a");
        assert_eq!(chasekit_structure_parse(src.as_ptr(), t, &mut a), ChasekitStatus::Ok);
        let mut ch = ptr::null_mut();
        assert_eq!(chasekit_chase(t, a, chasekit_options_default(), &mut ch), ChasekitStatus::Ok);
        let (mut sat, mut levels) = (0u8, 0u32);
        assert_eq!(chasekit_chase_status(ch, &mut sat, &mut levels), ChasekitStatus::Ok);
        assert_eq!((sat, levels), (1, 2));
        let mut out = ptr::null_mut();
        assert_eq!(chasekit_chase_model(ch, &mut out), ChasekitStatus::Ok);
        let model = take(out);
        assert!(model.contains("rel Q"), "{model}");
        chasekit_chase_free(ch);
        chasekit_structure_free(a);
        chasekit_theory_free(t);
    }
}

#[test]
fn entails_verdicts() {
    unsafe {
        let t = theory();
        let opts = chasekit_options_default();
        let mut v = ChasekitVerdict::Unknown;
        let mut report = ptr::null_mut();
        let q = c("P(x) |-[x] exists y. R(x,y) & Q(y)");
        assert_eq!(chasekit_entails(t, q.as_ptr(), opts, &mut v, &mut report), ChasekitStatus::Ok);
        assert_eq!(v, ChasekitVerdict::Provable);
        assert!(!take(report).is_empty());
        let q = c("P(x) |-[x] Q(x)");
        assert_eq!(chasekit_entails(t, q.as_ptr(), opts, &mut v, ptr::null_mut()), ChasekitStatus::Ok);
        assert_eq!(v, ChasekitVerdict::Refuted);
        chasekit_theory_free(t);
    }
}

#[test]
fn check_reports_bad_node() {
    unsafe {
        let t = theory();
        let mut valid = 1u8;
        let mut diag = ptr::null_mut();
        let src = c("n0 = identity : P(x) |-[x] Q(x)");
        assert_eq!(chasekit_check_derivation(t, src.as_ptr(), &mut valid, &mut diag), ChasekitStatus::Ok);
        assert_eq!(valid, 0);
        assert!(take(diag).starts_with("at node /"));
        let src = c("n0 = axiom[tau2] : R(x,y) |-[x,y] R(x,y) & Q(y)");
        assert_eq!(chasekit_check_derivation(t, src.as_ptr(), &mut valid, ptr::null_mut()), ChasekitStatus::Ok);
        assert_eq!(valid, 1);
        chasekit_theory_free(t);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut t = ptr::null_mut();
        let bad = c("rel P/1\naxiom a: P(x |-[x] P(x)");
        assert_eq!(chasekit_theory_parse(bad.as_ptr(), &mut t), ChasekitStatus::ParseError);
        assert!(t.is_null());
        assert!(last_error().starts_with("2:"), "{}", last_error());
        assert_eq!(chasekit_theory_parse(ptr::null(), &mut t), ChasekitStatus::NullArgument);
        let invalid = [0xffu8, 0];
        assert_eq!(
            chasekit_theory_parse(invalid.as_ptr() as *const c_char, &mut t),
            ChasekitStatus::InvalidUtf8
        );
        let t = theory();
        let mut ch = ptr::null_mut();
        assert_eq!(
            chasekit_chase(t, ptr::null(), chasekit_options_default(), &mut ch),
            ChasekitStatus::NullArgument
        );
        chasekit_theory_free(t);
        chasekit_theory_free(ptr::null_mut());
        chasekit_string_free(ptr::null_mut());
    }
}

#[test]
fn unsaturated_chase_has_no_model() {
    unsafe {
        let mut t = ptr::null_mut();
        let src = c("rel R/2\naxiom succ: true |-[x] exists y. R(x,y)");
        assert_eq!(chasekit_theory_parse(src.as_ptr(), &mut t), ChasekitStatus::Ok);
        let mut a = ptr::null_mut();
        assert_eq!(chasekit_structure_parse(c("carrier: a").as_ptr(), t, &mut a), ChasekitStatus::Ok);
        let mut ch = ptr::null_mut();
        let opts = ChasekitOptions { fuel: 3, faithful: 0, parallel: 1 };
        assert_eq!(chasekit_chase(t, a, opts, &mut ch), ChasekitStatus::Ok);
        let (mut sat, mut levels) = (1u8, 0u32);
        chasekit_chase_status(ch, &mut sat, &mut levels);
        assert_eq!((sat, levels), (0, 3));
        let mut out = ptr::null_mut();
        assert_eq!(chasekit_chase_model(ch, &mut out), ChasekitStatus::InvalidInput);
        chasekit_chase_free(ch);
        chasekit_structure_free(a);
        chasekit_theory_free(t);
    }
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/chasekit.h")).unwrap();
    for name in ["chasekit_theory_parse", "chasekit_chase", "chasekit_entails", "chasekit_last_error"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    assert!(header.contains("typedef struct ChasekitTheory ChasekitTheory;"));
}
