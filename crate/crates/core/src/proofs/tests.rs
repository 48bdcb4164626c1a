use std::collections::VecDeque;

use super::tactics::*;
use super::*;
use crate::syntax::{Context, Signature, Term, Theory};
use crate::text::{parse_formula, parse_sequent, parse_theory};

fn sig() -> Signature {
    Signature::new()
        .with_rel("P", 1)
        .with_rel("Q", 1)
        .with_rel("R", 2)
        .with_rel("S", 1)
        .with_fun("f", 1)
        .with_fun("c1", 0)
        .with_fun("c2", 0)
}

#[test]
fn identity_checks() {
    let seq = parse_sequent("P(x) |-[x] P(x)", &sig()).unwrap();
    let d = Derivation::leaf(seq, Rule::Identity);
    assert!(check_derivation(&d, &Theory::new(sig())).is_ok());
}

#[test]
fn mismatched_cut_fails_at_root() {
    let s = sig();
    let t = parse_theory("rel P/1, Q/1, R/1, S/1\naxiom a: P(x) |-[x] Q(x)\naxiom b: R(x) |-[x] S(x)").unwrap();
    let a = Derivation::leaf(parse_sequent("P(x) |-[x] Q(x)", &t.signature).unwrap(), Rule::Axiom("a".into()));
    let b = Derivation::leaf(parse_sequent("R(x) |-[x] S(x)", &t.signature).unwrap(), Rule::Axiom("b".into()));
    let d = cut(a, b);
    let err = check_derivation(&d, &t).unwrap_err();
    assert!(err.path.is_empty(), "{err}");
    let _ = s;
}

#[test]
fn substitution_into_constants() {
    let t = parse_theory("rel R/2\nfun c1/0, c2/0\naxiom ax: true |-[x1,x2] R(x1,x2)").unwrap();
    let leaf = Derivation::leaf(t.axioms["ax"].clone(), Rule::Axiom("ax".into()));
    let map = [("x1".to_string(), Term::constant("c1")), ("x2".to_string(), Term::constant("c2"))].into();
    let d = substitution(leaf, map, &Context::empty()).unwrap();
    assert_eq!(d.conclusion.to_string(), "true |-[] R(c1,c2)");
    assert!(check_derivation(&d, &t).is_ok());
}

fn prove(hyp: &str, goal: &str, ctx: &[&str], witnesses: Vec<Term>) -> Derivation {
    let s = sig();
    let ctx = Context::from_names(ctx.iter().copied());
    let mut p = Prover::new(ctx, parse_formula(hyp, &s).unwrap());
    let goal = parse_formula(goal, &s).unwrap();
    p.reserve(&goal);
    let d = p.prove_goal(&goal, &mut VecDeque::from(witnesses)).unwrap();
    check_derivation(&d, &Theory::new(s)).unwrap_or_else(|e| panic!("{e}"));
    assert!(crate::syntax::alpha_eq(&d.conclusion.consequent, &goal));
    d
}

#[test]
fn horn_prover_equational_steps() {
    prove("R(x,y) & x = y", "R(y,x)", &["x", "y"], vec![]);
    prove("x = y & y = z", "z = x", &["x", "y", "z"], vec![]);
    prove("x = y & P(f(x))", "P(f(y))", &["x", "y"], vec![]);
    prove("f(x) = y & f(y) = x & x = y", "f(f(x)) = x", &["x", "y"], vec![]);
    prove("true", "x = x", &["x"], vec![]);
    prove("f(c1) = c2 & P(c2)", "P(f(c1))", &[], vec![]);
}

#[test]
fn existential_goals_use_witnesses() {
    prove(
        "R(x,y) & Q(y)",
        "exists u. R(x,u) & exists w. Q(w) & u = w",
        &["x", "y"],
        vec![Term::var("y"), Term::var("y")],
    );
    prove("P(x) & (Q(x) & R(x,x))", "exists x. R(x,x)", &["x"], vec![Term::var("x")]);
}

#[test]
fn unprovable_atom_is_reported() {
    let s = sig();
    let mut p = Prover::new(Context::from_names(["x"]), parse_formula("P(x)", &s).unwrap());
    assert!(p.prove_atom(&crate::syntax::Atom::rel("Q", vec![Term::var("x")])).is_none());
}

#[test]
fn derivation_file_examples() {
    let t = parse_theory("rel R/2\naxiom r: true |-[x1,x2] R(x1,x2)\n").unwrap();
    let src = "fun c1/0, c2/0\n# comment\nn0 = axiom[r] : true |-[x1,x2] R(x1,x2)\nn1 = subst[x1:=c1, x2:=c2](n0) : true |-[] R(c1,c2)\n";
    let d = parse_derivation(src, &t.signature).unwrap();
    check_derivation(&d, &t).unwrap();
    assert_eq!(print_derivation(&d, &t.signature), src.replace("# comment\n", ""));
    for bad in [
        "n0 = axiom : true |-[] true",
        "n0 = identity(n9) : true |-[] true",
        "n0 = identity : true |-[] true\nn1 = identity : true |-[] true",
        "n0 = frob : true |-[] true",
        "n0 = subst[x:=f(y)] : true |-[] true",
    ] {
        assert!(parse_derivation(bad, &t.signature).is_err(), "{bad}");
    }
}

fn consts(names: &[&str]) -> std::collections::BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn abstraction_examples() {
    let t = parse_theory("rel R/2\naxiom r2: true |-[x1,x2] R(x1,x2)\naxiom r1: true |-[x1] R(x1,x1)\n").unwrap();
    let d = parse_derivation(
        "fun c1/0, c2/0\nn0 = axiom[r2] : true |-[x1,x2] R(x1,x2)\nn1 = subst[x1:=c1, x2:=c2](n0) : true |-[] R(c1,c2)\n",
        &t.signature,
    )
    .unwrap();
    let a = abstract_constants(&d, &consts(&["c1", "c2"]), &t).unwrap();
    assert_eq!(a.derivation.conclusion.to_string(), "true |-[y1,y2] R(y1,y2)");
    assert_eq!(a.assignment["y1"], "c1");
    assert_eq!(a.assignment["y2"], "c2");
    assert_eq!(a.derivation.rule_multiset(), d.rule_multiset());

    let d = parse_derivation(
        "fun c/0\nn0 = axiom[r1] : true |-[x1] R(x1,x1)\nn1 = subst[x1:=c](n0) : true |-[] R(c,c)\n",
        &t.signature,
    )
    .unwrap();
    let a = abstract_constants(&d, &consts(&["c"]), &t).unwrap();
    assert_eq!(a.derivation.conclusion.to_string(), "true |-[y1] R(y1,y1)");
    assert_eq!(a.fresh, vec!["y1".to_string()]);

    let d = parse_derivation("n0 = axiom[r1] : true |-[x1] R(x1,x1)\n", &t.signature).unwrap();
    let a = abstract_constants(&d, &consts(&["c"]), &t).unwrap();
    assert!(a.fresh.is_empty());
    assert_eq!(a.derivation, d);
}

#[test]
fn abstraction_identifies_cut_formula_occurrences() {
    let t = parse_theory("rel P/1, Q/1\naxiom pq: P(x) |-[x] Q(x)\n").unwrap();
    let src = "fun a/0\n\
        n0 = axiom[pq] : P(x) |-[x] Q(x)\n\
        n1 = subst[x:=a](n0) : P(a) |-[] Q(a)\n\
        n2 = identity : Q(a) |-[] Q(a)\n\
        n3 = cut(n1, n2) : P(a) |-[] Q(a)\n\
        n4 = top-intro : P(a) & P(a) |-[] true\n\
        n5 = and-elim[0] : P(a) & P(a) |-[] P(a)\n\
        n6 = cut(n5, n3) : P(a) & P(a) |-[] Q(a)\n\
        n7 = and-intro(n4, n6) : P(a) & P(a) |-[] true & Q(a)\n";
    let d = parse_derivation(src, &t.signature).unwrap();
    check_derivation(&d, &t).unwrap();
    let a = abstract_constants(&d, &consts(&["a"]), &t).unwrap();
    assert_eq!(a.derivation.conclusion.to_string(), "P(y1) & P(y2) |-[y1,y2] true & Q(y1)");
    assert_eq!(a.derivation.rule_multiset(), d.rule_multiset());
    let t2 = parse_theory("rel P/1, Q/1\nfun a/0\naxiom pq: P(x) |-[x] Q(a)\n").unwrap();
    assert!(matches!(abstract_constants(&d, &consts(&["a"]), &t2), Err(crate::Error::ConstantInTheory(_))));
}

#[test]
fn diagram_derivations() {
    use crate::semantics::parse_structure;
    let empty = Theory::default();
    let sig = Signature::new().with_rel("P", 1).with_rel("R", 2);
    let a = parse_structure("carrier: a b\nrel P: a\nrel R: (a,b)\n", Some(&sig)).unwrap();
    let x = Context::from_names(["x".to_string()]);
    let p = derive_from_diagram(&a, &parse_formula("P(x)", &sig).unwrap(), &x, &[0], &empty).unwrap();
    assert_eq!(p.derivation.size(), 1);
    check_derivation(&p.derivation, &p.diagram.theory).unwrap();
    let p = derive_from_diagram(&a, &parse_formula("exists y. R(x,y)", &sig).unwrap(), &x, &[0], &empty).unwrap();
    check_derivation(&p.derivation, &p.diagram.theory).unwrap();
    assert_eq!(p.derivation.conclusion.to_string(), "true |-[] exists y. R(c_a,y)");
    let e = derive_from_diagram(&a, &parse_formula("P(x)", &sig).unwrap(), &x, &[1], &empty);
    assert_eq!(e.unwrap_err(), crate::Error::NotSatisfied);

    let fsig = Signature::new().with_fun("f", 1).with_rel("P", 1);
    let b = parse_structure("carrier: a b\nfun f: a -> b\nfun f: b -> b\nrel P: b\n", Some(&fsig)).unwrap();
    let p = derive_from_diagram(&b, &parse_formula("P(f(f(x))) & f(x) = f(f(x))", &fsig).unwrap(), &x, &[0], &empty).unwrap();
    check_derivation(&p.derivation, &p.diagram.theory).unwrap();
}

#[test]
fn diagram_elimination_example() {
    use crate::semantics::parse_structure;
    let t = parse_theory("rel R/2, Q/1\naxiom tau2: R(x,y) |-[x,y] Q(y)\n").unwrap();
    let a = parse_structure("carrier: a b\nrel R: (a,b)\n", Some(&t.signature)).unwrap();
    let src = "fun c_a/0, c_b/0\n\
        n0 = axiom[diag_R_a_b] : true |-[] R(c_a,c_b)\n\
        n1 = axiom[tau2] : R(x,y) |-[x,y] Q(y)\n\
        n2 = subst[x:=c_a, y:=c_b](n1) : R(c_a,c_b) |-[] Q(c_b)\n\
        n3 = cut(n0, n2) : true |-[] Q(c_b)\n";
    let d = parse_derivation(src, &t.signature).unwrap();
    let out = eliminate_diagram_constants(&d, &a, &t).unwrap();
    assert_eq!(out.context.len(), 1);
    let y = &out.context[0];
    assert_eq!(out.chi.to_string(), format!("exists w1 w2. {y} = w2 & R(w1,w2)"));
    assert_eq!(out.assignment[y], 1);
    check_derivation(&out.derivation, &t).unwrap();

    let src = "n0 = axiom[tau2] : R(x,y) |-[x,y] Q(y)\n";
    let d = parse_derivation(src, &t.signature).unwrap();
    let out = eliminate_diagram_constants(&d, &a, &t).unwrap();
    assert!(out.chi.is_top());
    check_derivation(&out.derivation, &t).unwrap();
}
