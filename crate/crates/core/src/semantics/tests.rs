use super::*;
use crate::normalize::eliminate_functions;
use crate::syntax::{Context, Signature, Theory};
use crate::text::{parse_formula, parse_sequent};

fn env(pairs: &[(&str, Elem)]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn parse_and_print_round_trip() {
    let src = "carrier: a b\nrel P: (a)\nrel R/2: (a,b)\nrel S/3:\nfun f: a->b b->a\nfun c/0: ()->a\n";
    let s = parse_structure(src, None).unwrap();
    assert_eq!(s.size(), 2);
    let again = parse_structure(&s.to_string(), None).unwrap();
    assert_eq!(again, s);
}

#[test]
fn partial_function_is_rejected() {
    assert!(parse_structure("carrier: a b\nfun f: a->b\n", None).is_err());
}

#[test]
fn evaluate_returns_witnesses() {
    let a = parse_structure("carrier: a b\nrel R: (a,b)\n", None).unwrap();
    let f = parse_formula("exists y. R(x,y)", &a.signature).unwrap();
    let w = evaluate(&a, &f, &env(&[("x", 0)])).unwrap();
    assert_eq!(w["y"], 1);
    assert!(satisfies(&a, &crate::syntax::Formula::top(), &env(&[])));
    let eq = parse_formula("x = y", &a.signature).unwrap();
    assert!(!satisfies(&a, &eq, &env(&[("x", 0), ("y", 1)])));
}

#[test]
fn validates_by_enumeration() {
    let sig = Signature::new().with_rel("P", 1).with_rel("R", 2);
    let seq = parse_sequent("P(x) |-[x] exists y. R(x,y)", &sig).unwrap();
    let a = parse_structure("carrier: a\nrel P: (a)\nrel R/2:\n", None).unwrap();
    assert!(!validates(&a, &seq));
    let b = parse_structure("carrier: a b\nrel P: (a)\nrel R: (a,b)\n", None).unwrap();
    assert!(validates(&b, &seq));
}

#[test]
fn representing_structure_examples() {
    let sig = Signature::new().with_rel("P", 1).with_rel("R", 2);
    let ctx = Context::from_names(["x1", "x2"]);
    let f = parse_formula("R(x1,x2) & x1 = x2", &sig).unwrap();
    let rep = representing_structure(&f.horn_atoms().unwrap(), &ctx, &sig).unwrap();
    assert_eq!(rep.structure.size(), 1);
    assert!(rep.structure.holds("R", &[0, 0]));
    assert_eq!(rep.canonical, vec![0, 0]);

    let f = parse_formula("P(x1) & R(x1,x2)", &sig).unwrap();
    let rep = representing_structure(&f.horn_atoms().unwrap(), &ctx, &sig).unwrap();
    assert_eq!(rep.structure.size(), 2);
    assert!(rep.structure.holds("P", &[0]));
    assert!(rep.structure.holds("R", &[0, 1]));

    let rep = representing_structure(&[], &Context::from_names(["x"]), &sig).unwrap();
    assert_eq!(rep.structure.size(), 1);
    assert_eq!(rep.structure.tuple_count(), 0);
}

#[test]
fn diagram_examples() {
    let a = parse_structure("carrier: a\nrel P: (a)\n", None).unwrap();
    let d = diagram(&a);
    assert_eq!(d.constants, vec!["c_a".to_string()]);
    assert_eq!(d.theory.axioms.len(), 1);
    assert_eq!(d.theory.axioms.values().next().unwrap().to_string(), "true |-[] P(c_a)");

    let empty = parse_structure("carrier:\n", None).unwrap();
    assert!(diagram(&empty).theory.is_empty());

    let f = parse_structure("carrier: a\nfun f: a->a\n", None).unwrap();
    let d = diagram(&f);
    assert_eq!(d.theory.axioms.values().next().unwrap().to_string(), "true |-[] f(c_a) = c_a");
}

#[test]
fn e_and_q() {
    let a = parse_structure("carrier: a b\nrel R: (a,b)\n", None).unwrap();
    let e = e_expand(&a, "E");
    assert_eq!(e.rel("E").len(), 2);
    let (q, _) = q_quotient(&e, "E", &a.signature).unwrap();
    assert!(isomorphic(&q, &a));

    let b = parse_structure("carrier: a b\nrel E: (a,a) (a,b) (b,a) (b,b)\nrel R: (a,b) (a,a) (b,a) (b,b)\n", None)
        .unwrap();
    let (q, map) = q_quotient(&b, "E", &a.signature).unwrap();
    assert_eq!(q.size(), 1);
    assert!(q.holds("R", &[0, 0]));
    assert_eq!(map, vec![0, 0]);

    let bad = parse_structure("carrier: a b\nrel E: (a,a) (a,b) (b,a) (b,b)\nrel R: (a,b)\n", None).unwrap();
    assert!(matches!(q_quotient(&bad, "E", &a.signature), Err(crate::Error::NotAnEStructure(_))));
}

#[test]
fn graphs_round_trip() {
    let a = parse_structure("carrier: 0 1\nfun f: 0->1 1->0\n", None).unwrap();
    let fe = eliminate_functions(&Theory::new(a.signature.clone()));
    let g = structure_of_graphs(&a, &fe);
    assert_eq!(g.rel("F_f").len(), 2);
    assert!(g.holds("F_f", &[0, 1]));
    assert_eq!(structure_from_graphs(&g, &fe).unwrap(), a);

    let mut bad = g.clone();
    bad.add_tuple("F_f", vec![0, 0]);
    assert!(matches!(structure_from_graphs(&bad, &fe), Err(crate::Error::NotFunctional(_))));
}

#[test]
fn hom_search_examples() {
    let a = parse_structure("carrier: a b\nrel R: (a,b)\n", None).unwrap();
    let id: Vec<Elem> = a.elements().collect();
    assert_eq!(hom_extend_search(&id, &id, &a, &a), Some(id.clone()));

    let b = parse_structure("carrier: b\nrel P: (b)\n", None).unwrap();
    let m = parse_structure("carrier: m\nrel P/1:\n", None).unwrap();
    assert_eq!(hom_extend_search(&[], &[], &b, &m), None);
}
