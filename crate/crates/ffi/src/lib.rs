//! C interface to chasekit.
//!
//! Objects are opaque handles released with their `_free` function. Every
//! fallible call returns a [`ChasekitStatus`]; on failure the message is
//! available from [`chasekit_last_error`] on the same thread. Strings handed
//! out by the library are released with [`chasekit_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chasekit::chase::{chase_general, entails, ChaseMode, ChaseOptions, ChaseStatus, Entailment, GeneralChase};
use chasekit::proofs::{check_derivation, parse_derivation, print_derivation};
use chasekit::semantics::{parse_structure, Structure};
use chasekit::syntax::Theory;
use chasekit::text::{parse_query, parse_theory};
use chasekit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChasekitStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChasekitVerdict {
    Provable = 0,
    Refuted = 1,
    Unknown = 2,
}

/// Chase options. `faithful` and `parallel` are booleans (0 or 1).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ChasekitOptions {
    pub fuel: u32,
    pub faithful: u8,
    pub parallel: u8,
}

pub struct ChasekitTheory(Theory);
pub struct ChasekitStructure(Structure);
pub struct ChasekitChase(GeneralChase);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(ChasekitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => ChasekitStatus::ParseError,
            Error::Internal(_) => ChasekitStatus::Internal,
            _ => ChasekitStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ChasekitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChasekitStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside chasekit".into());
            ChasekitStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ChasekitStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ChasekitStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| Failure(ChasekitStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn options(o: &ChasekitOptions) -> ChaseOptions {
    let mut opts = ChaseOptions::new(o.fuel as usize);
    if o.faithful != 0 {
        opts.mode = ChaseMode::Faithful;
    }
    opts.parallel = o.parallel != 0;
    opts
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn chasekit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn chasekit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Defaults: fuel 20, lean, sequential.
#[no_mangle]
pub extern "C" fn chasekit_options_default() -> ChasekitOptions {
    ChasekitOptions {
        fuel: 20,
        faithful: 0,
        parallel: 0,
    }
}

/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chasekit_theory_parse(src: *const c_char, out: *mut *mut ChasekitTheory) -> ChasekitStatus {
    guard(|| {
        let t = parse_theory(text(src, "src")?)?;
        put(out, ChasekitTheory(t), "out")
    })
}

/// # Safety
/// `t` must be null or a handle from [`chasekit_theory_parse`].
#[no_mangle]
pub unsafe extern "C" fn chasekit_theory_free(t: *mut ChasekitTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Parses a structure. Symbols not declared in the text are looked up in
/// `theory`, which may be null.
///
/// # Safety
/// Pointers must be valid or null where allowed.
#[no_mangle]
pub unsafe extern "C" fn chasekit_structure_parse(
    src: *const c_char,
    theory: *const ChasekitTheory,
    out: *mut *mut ChasekitStructure,
) -> ChasekitStatus {
    guard(|| {
        let base = theory.as_ref().map(|t| &t.0.signature);
        let s = parse_structure(text(src, "src")?, base)?;
        put(out, ChasekitStructure(s), "out")
    })
}

/// # Safety
/// `s` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn chasekit_structure_free(s: *mut ChasekitStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a valid structure handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chasekit_structure_print(s: *const ChasekitStructure, out: *mut *mut c_char) -> ChasekitStatus {
    guard(|| put_string(out, handle(s, "structure")?.0.to_string()))
}

/// Chases `a` with `theory`.
///
/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chasekit_chase(
    theory: *const ChasekitTheory,
    a: *const ChasekitStructure,
    opts: ChasekitOptions,
    out: *mut *mut ChasekitChase,
) -> ChasekitStatus {
    guard(|| {
        let t = handle(theory, "theory")?;
        let a = handle(a, "structure")?;
        let c = chase_general(&t.0, &a.0, options(&opts))?;
        put(out, ChasekitChase(c), "out")
    })
}

/// # Safety
/// `c` must be null or a handle from [`chasekit_chase`].
#[no_mangle]
pub unsafe extern "C" fn chasekit_chase_free(c: *mut ChasekitChase) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Writes 1 to `saturated` when a fixpoint was reached, and the number of
/// computed levels beyond the input to `levels`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn chasekit_chase_status(
    c: *const ChasekitChase,
    saturated: *mut u8,
    levels: *mut u32,
) -> ChasekitStatus {
    guard(|| {
        let c = handle(c, "chase")?;
        if saturated.is_null() || levels.is_null() {
            return Err(null("out"));
        }
        let (s, n) = match c.0.status() {
            ChaseStatus::Saturated(level) => (1, level),
            ChaseStatus::FuelExhausted => (0, c.0.trace.levels.len() - 1),
        };
        *saturated = s;
        *levels = n as u32;
        Ok(())
    })
}

/// The last chase level read back over the theory's signature; fails when
/// the chase did not saturate.
///
/// # Safety
/// `c` must be a valid chase handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chasekit_chase_model(c: *const ChasekitChase, out: *mut *mut c_char) -> ChasekitStatus {
    guard(|| {
        let c = handle(c, "chase")?;
        let model = c
            .0
            .model
            .as_ref()
            .filter(|_| matches!(c.0.status(), ChaseStatus::Saturated(_)))
            .ok_or_else(|| Failure(ChasekitStatus::InvalidInput, "chase did not saturate".into()))?;
        put_string(out, model.to_string())
    })
}

/// Decides `query` (a sequent, possibly with `|` in the consequent) in
/// `theory`. `report` receives the witness formula for a provable query,
/// the countermodel for a refuted one and an empty string otherwise.
///
/// # Safety
/// Pointers must be valid; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn chasekit_entails(
    theory: *const ChasekitTheory,
    query: *const c_char,
    opts: ChasekitOptions,
    verdict: *mut ChasekitVerdict,
    report: *mut *mut c_char,
) -> ChasekitStatus {
    guard(|| {
        let t = handle(theory, "theory")?;
        let q = parse_query(text(query, "query")?, &t.0.signature)?;
        if verdict.is_null() {
            return Err(null("verdict"));
        }
        let (v, msg) = match entails(&t.0, &q, options(&opts))? {
            Entailment::Provable { witness, .. } => (ChasekitVerdict::Provable, witness.formula.to_string()),
            Entailment::Refuted { countermodel, .. } => (ChasekitVerdict::Refuted, countermodel.to_string()),
            Entailment::Unknown { .. } => (ChasekitVerdict::Unknown, String::new()),
        };
        *verdict = v;
        if !report.is_null() {
            put_string(report, msg)?;
        }
        Ok(())
    })
}

/// Checks a derivation file against `theory`. Writes 1 to `valid` when every
/// node is correct; otherwise 0, with the first bad node described in
/// `diagnostic` (which may be null).
///
/// # Safety
/// Pointers must be valid; `diagnostic` may be null.
#[no_mangle]
pub unsafe extern "C" fn chasekit_check_derivation(
    theory: *const ChasekitTheory,
    src: *const c_char,
    valid: *mut u8,
    diagnostic: *mut *mut c_char,
) -> ChasekitStatus {
    guard(|| {
        let t = handle(theory, "theory")?;
        let d = parse_derivation(text(src, "src")?, &t.0.signature)?;
        if valid.is_null() {
            return Err(null("valid"));
        }
        let (ok, msg) = match check_derivation(&d, &t.0) {
            Ok(()) => (1, String::new()),
            Err(f) => (0, f.to_string()),
        };
        *valid = ok;
        if !diagnostic.is_null() {
            put_string(diagnostic, msg)?;
        }
        Ok(())
    })
}

/// Normalizes a derivation file to the printed form.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn chasekit_derivation_reformat(
    theory: *const ChasekitTheory,
    src: *const c_char,
    out: *mut *mut c_char,
) -> ChasekitStatus {
    guard(|| {
        let t = handle(theory, "theory")?;
        let d = parse_derivation(text(src, "src")?, &t.0.signature)?;
        put_string(out, print_derivation(&d, &t.0.signature))
    })
}
