use super::*;
use crate::syntax::{Atom, Formula, Signature, Term};

fn sig() -> Signature {
    Signature::new()
        .with_rel("P", 1)
        .with_rel("Q", 1)
        .with_rel("R", 2)
        .with_fun("f", 1)
        .with_fun("c", 0)
}

#[test]
fn exists_scopes_to_the_right() {
    let f = parse_formula("P(x) & exists y. R(x,y) & Q(y)", &sig()).unwrap();
    let expected = Formula::And(vec![
        Atom::rel("P", vec![Term::var("x")]).into(),
        Formula::Exists(
            vec!["y".into()],
            Box::new(Formula::And(vec![
                Atom::rel("R", vec![Term::var("x"), Term::var("y")]).into(),
                Atom::rel("Q", vec![Term::var("y")]).into(),
            ])),
        ),
    ]);
    assert_eq!(f, expected);
}

#[test]
fn constants_and_functions_resolve_by_signature() {
    let f = parse_formula("f(c) = x", &sig()).unwrap();
    assert_eq!(
        f,
        Formula::Atom(Atom::Eq(
            Term::app("f", vec![Term::constant("c")]),
            Term::var("x")
        ))
    );
}

#[test]
fn printing_round_trips_nested_structure() {
    let s = sig();
    for src in [
        "true",
        "(P(x) & Q(x)) & R(x,x)",
        "(exists y. R(x,y)) & P(x)",
        "exists y z. R(y,z) & (true & y = z)",
        "exists y. exists z. R(y,z)",
        "P(f(f(c)))",
    ] {
        let f = parse_formula(src, &s).unwrap();
        let printed = f.to_string();
        assert_eq!(parse_formula(&printed, &s).unwrap(), f, "{src} -> {printed}");
    }
}

#[test]
fn query_with_disjunction() {
    let q = parse_query("P(x) |-[x] Q(x) | exists y. R(x,y)", &sig()).unwrap();
    assert_eq!(q.disjuncts.len(), 2);
    assert_eq!(q.to_string(), "P(x) |-[x] Q(x) | exists y. R(x,y)");
}

#[test]
fn implicit_context_follows_occurrence_order() {
    let q = parse_sequent("R(y,x) |- exists z. R(x,z)", &sig()).unwrap();
    assert_eq!(q.context.vars(), ["y".to_string(), "x".to_string()]);
}

#[test]
fn unbound_variable_in_sequent_is_rejected() {
    assert!(parse_sequent("P(x) |-[] P(x)", &sig()).is_err());
}

#[test]
fn theory_file() {
    let src = "# example\nrel P/1, R/2\nrel Q/1\naxiom tau1: P(x) |-[x] exists y. R(x,y)\naxiom tau2: R(x,y) |-[x,y] Q(y)\n";
    let t = parse_theory(src).unwrap();
    assert_eq!(t.axioms.len(), 2);
    let again = parse_theory(&t.to_string()).unwrap();
    assert_eq!(again, t);
}

#[test]
fn theory_errors_carry_positions() {
    let err = parse_theory("rel P/1\naxiom a: P(x) |-[x] S(x)").unwrap_err();
    match err {
        crate::Error::Parse { line, .. } => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}
