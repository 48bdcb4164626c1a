use std::collections::BTreeMap;

use super::*;
use crate::text::{parse_formula, parse_query};

fn sig() -> Signature {
    Signature::new()
        .with_rel("P", 1)
        .with_rel("Q", 1)
        .with_rel("R", 2)
        .with_fun("c", 0)
}

fn ctx(vs: &[&str]) -> Context {
    Context::from_names(vs.iter().copied())
}

fn map(pairs: &[(&str, Term)]) -> BTreeMap<String, Term> {
    pairs.iter().map(|(v, t)| (v.to_string(), t.clone())).collect()
}

#[test]
fn identity_substitution() {
    let f = parse_formula("R(x,y)", &sig()).unwrap();
    let m = map(&[("x", Term::var("x")), ("y", Term::var("y"))]);
    let out = substitute(&f, &ctx(&["x", "y"]), &m, &ctx(&["x", "y"])).unwrap();
    assert_eq!(out, f);
}

#[test]
fn substituting_constants() {
    let f = parse_formula("R(x1,x2)", &sig()).unwrap();
    let m = map(&[("x1", Term::constant("c")), ("x2", Term::constant("c"))]);
    let out = substitute(&f, &ctx(&["x1", "x2"]), &m, &ctx(&[])).unwrap();
    assert_eq!(out.to_string(), "R(c,c)");
}

#[test]
fn capture_is_avoided() {
    let f = parse_formula("exists y. R(x,y)", &sig()).unwrap();
    let m = map(&[("x", Term::var("y"))]);
    let out = substitute(&f, &ctx(&["x"]), &m, &ctx(&["y"])).unwrap();
    assert_eq!(out.to_string(), "exists y'. R(y,y')");
}

#[test]
fn partial_assignment_is_an_error() {
    let f = parse_formula("R(x,y)", &sig()).unwrap();
    let m = map(&[("x", Term::var("x"))]);
    let err = substitute(&f, &ctx(&["x", "y"]), &m, &ctx(&["x", "y"])).unwrap_err();
    assert_eq!(err, Error::UnboundVariable("y".into()));
}

#[test]
fn weakening() {
    let p = parse_formula("P(x)", &sig()).unwrap();
    assert_eq!(weaken(&p, &ctx(&["x"]), &ctx(&["x", "y"])).unwrap(), p);
    let top = Formula::top();
    assert_eq!(weaken(&top, &ctx(&[]), &ctx(&["x"])).unwrap(), top);
    let r = parse_formula("R(x,y)", &sig()).unwrap();
    assert!(matches!(
        weaken(&r, &ctx(&["x", "y"]), &ctx(&["x"])),
        Err(Error::NotASubcontext { .. })
    ));
}

#[test]
fn fragments() {
    let s = sig();
    assert_eq!(classify_formula(&parse_formula("P(x) & Q(x)", &s).unwrap()), Fragment::Horn);
    assert_eq!(
        classify_formula(&parse_formula("exists y. R(x,y)", &s).unwrap()),
        Fragment::Regular
    );
    let q = parse_query("true |-[x,y] R(x,y) | Q(x)", &s).unwrap();
    assert_eq!(classify_query(&q), Fragment::Geometric);
}

#[test]
fn alpha_equivalence_ignores_binder_names() {
    let s = sig();
    let a = parse_formula("exists y. R(x,y)", &s).unwrap();
    let b = parse_formula("exists z. R(x,z)", &s).unwrap();
    let c = parse_formula("exists x. R(x,x)", &s).unwrap();
    assert!(alpha_eq(&a, &b));
    assert!(!alpha_eq(&a, &c));
}

#[test]
fn context_equality_is_set_equality() {
    assert_eq!(ctx(&["x", "y"]), ctx(&["y", "x"]));
    assert_ne!(ctx(&["x"]), ctx(&["x", "y"]));
}
