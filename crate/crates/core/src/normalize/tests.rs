use super::*;
use crate::syntax::{Context, Signature, Theory};
use crate::text::{parse_formula, parse_sequent, parse_theory};

fn sig() -> Signature {
    Signature::new().with_rel("P", 1).with_rel("Q", 1).with_rel("R", 2)
}

fn show(atoms: &[crate::syntax::Atom]) -> String {
    atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" & ")
}

#[test]
fn prenex_examples() {
    let x = Context::from_names(["x"]);
    let (b, m) = prenex(&parse_formula("P(x)", &sig()).unwrap(), &x);
    assert!(b.is_empty());
    assert_eq!(show(&m), "P(x)");
    let (b, m) = prenex(&parse_formula("exists y. R(x,y) & exists z. R(y,z)", &sig()).unwrap(), &x);
    assert_eq!(b, ["y", "z"]);
    assert_eq!(show(&m), "R(x,y) & R(y,z)");
    let (b, m) = prenex(&parse_formula("exists y. P(x)", &sig()).unwrap(), &x);
    assert_eq!(b, ["y"]);
    assert_eq!(show(&m), "P(x) & y = y");
}

#[test]
fn prenex_renames_clashing_binders() {
    let x = Context::from_names(["x", "y"]);
    let (b, m) = prenex(&parse_formula("(exists y. R(x,y)) & exists y. Q(y)", &sig()).unwrap(), &x);
    assert_eq!(b, ["y'", "y''"]);
    assert_eq!(show(&m), "R(x,y') & Q(y'')");
}

#[test]
fn normalize_examples() {
    let n = normalize_sequent(&parse_sequent("P(x) |-[x] exists y. R(x,y)", &sig()).unwrap());
    assert_eq!(n.to_sequent().to_string(), "P(x) |-[x] exists y. P(x) & R(x,y)");
    let n = normalize_sequent(&parse_sequent("R(x,y) |-[x,y] Q(y)", &sig()).unwrap());
    assert_eq!(n.to_sequent().to_string(), "R(x,y) |-[x,y] R(x,y) & Q(y)");
    let n = normalize_sequent(&parse_sequent("true |-[] true", &sig()).unwrap());
    assert!(n.antecedent.is_empty() && n.bound.is_empty() && n.matrix.is_empty());
}

#[test]
fn normalize_hoists_antecedent_quantifiers() {
    let n = normalize_sequent(&parse_sequent("exists y. R(x,y) |-[x] P(x)", &sig()).unwrap());
    assert_eq!(n.to_sequent().to_string(), "R(x,y) |-[x,y] R(x,y) & P(x)");
    assert!(n.side_condition_holds());
}

#[test]
fn normalization_is_idempotent() {
    let n = normalize_sequent(&parse_sequent("exists z. R(x,z) |-[x] exists y. R(x,y) & Q(y)", &sig()).unwrap());
    assert_eq!(normalize_sequent(&n.to_sequent()), n);
}

#[test]
fn equality_elimination() {
    let t = parse_theory("rel R/2\naxiom a: x = y |-[x,y] R(x,y)").unwrap();
    let e = eliminate_equality(&t).unwrap();
    assert_eq!(e.theory.axioms["a"].to_string(), "E(x,y) |-[x,y] R(x,y)");
    assert!(!e.theory.has_equality());

    let empty = eliminate_equality(&Theory::new(Signature::new().with_rel("R", 2))).unwrap();
    let shown: Vec<String> = empty.theory.axioms.values().map(|s| s.to_string()).collect();
    assert_eq!(
        shown,
        [
            "E(x1,y) & R(x1,x2) |-[x1,x2,y] R(y,x2)",
            "E(x2,y) & R(x1,x2) |-[x1,x2,y] R(x1,y)",
            "true |-[x] E(x,x)",
            "E(x,y) |-[x,y] E(y,x)",
            "E(x,y) & E(y,z) |-[x,y,z] E(x,z)",
        ]
    );
}

#[test]
fn equality_elimination_needs_relational_signature() {
    let t = Theory::new(Signature::new().with_fun("f", 1));
    assert!(matches!(eliminate_equality(&t), Err(crate::Error::NotRelational(_))));
}

#[test]
fn function_elimination() {
    let t = parse_theory("rel P/1\nfun f/1\naxiom a: true |-[x] P(f(x))").unwrap();
    let fe = eliminate_functions(&t);
    assert_eq!(
        fe.theory.axioms["a"].to_string(),
        "true |-[x] exists z_f_0. F_f(x,z_f_0) & P(z_f_0)"
    );
    assert_eq!(
        fe.theory.axioms["F_f_total"].to_string(),
        "true |-[x1] exists z. F_f(x1,z)"
    );
    assert_eq!(
        fe.theory.axioms["F_f_functional"].to_string(),
        "F_f(x1,z) & F_f(x1,z') |-[x1,z,z'] F_f(x1,z) & F_f(x1,z') & z = z'"
    );
    assert!(fe.theory.signature.is_relational());

    let c = parse_theory("rel P/1\nfun c/0\naxiom a: true |-[] P(c)").unwrap();
    let fe = eliminate_functions(&c);
    assert_eq!(fe.theory.axioms["a"].to_string(), "true |-[] exists z_c_0. F_c(z_c_0) & P(z_c_0)");

    let rel = parse_theory("rel P/1\naxiom a: P(x) |-[x] P(x)").unwrap();
    assert_eq!(eliminate_functions(&rel).theory, rel);
}

#[test]
fn nested_terms_flatten_innermost_first() {
    let t = parse_theory("rel R/2\nfun f/1, g/2\naxiom a: true |-[x] R(g(f(x),x), f(x))").unwrap();
    let fe = eliminate_functions(&t);
    assert_eq!(
        fe.theory.axioms["a"].to_string(),
        "true |-[x] exists z_f_0 z_g_0 z_f_1. F_f(x,z_f_0) & F_g(z_f_0,x,z_g_0) & F_f(x,z_f_1) & R(z_g_0,z_f_1)"
    );
}
