use serde::Serialize;

use crate::error::{Error, Result};
use crate::syntax::{Atom, Context, Formula, Sequent, Signature, Term, Theory};

/// Result of replacing equality by a congruence predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EqElimination {
    pub base: Signature,
    /// The binary predicate standing in for equality.
    pub symbol: String,
    pub theory: Theory,
}

/// Picks `E`, or `E0`, `E1`, … if `E` is taken.
pub fn equality_symbol(sig: &Signature) -> String {
    if !sig.has_symbol("E") {
        return "E".into();
    }
    (0..)
        .map(|k| format!("E{k}"))
        .find(|n| !sig.has_symbol(n))
        .unwrap()
}

pub fn replace_equality(f: &Formula, e: &str) -> Formula {
    f.map_atoms(&mut |a| match a {
        Atom::Eq(l, r) => Atom::Rel(e.to_string(), vec![l.clone(), r.clone()]),
        other => other.clone(),
    })
}

/// Inverse of [`replace_equality`].
pub fn restore_equality(f: &Formula, e: &str) -> Formula {
    f.map_atoms(&mut |a| match a {
        Atom::Rel(r, args) if r == e && args.len() == 2 => Atom::Eq(args[0].clone(), args[1].clone()),
        other => other.clone(),
    })
}

fn e_atom(e: &str, x: &str, y: &str) -> Atom {
    Atom::Rel(e.to_string(), vec![Term::var(x), Term::var(y)])
}

fn unique_name(theory: &Theory, base: String) -> String {
    let mut name = base;
    while theory.axioms.contains_key(&name) {
        name.push('_');
    }
    name
}

/// The axioms saying `e` is an equivalence relation respected by every
/// relation of `sig`, one congruence axiom per argument position.
pub fn eq_axioms(sig: &Signature, e: &str) -> Vec<(String, Sequent)> {
    let ctx = |vs: &[&str]| Context::from_names(vs.iter().copied());
    let mut out = vec![
        (
            format!("{e}_refl"),
            Sequent::new(ctx(&["x"]), Formula::top(), e_atom(e, "x", "x").into()),
        ),
        (
            format!("{e}_sym"),
            Sequent::new(ctx(&["x", "y"]), e_atom(e, "x", "y").into(), e_atom(e, "y", "x").into()),
        ),
        (
            format!("{e}_trans"),
            Sequent::new(
                ctx(&["x", "y", "z"]),
                Formula::conj(&[e_atom(e, "x", "y"), e_atom(e, "y", "z")]),
                e_atom(e, "x", "z").into(),
            ),
        ),
    ];
    for (r, &n) in &sig.rels {
        if r == e {
            continue;
        }
        let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        for i in 0..n {
            let moved = "y".to_string();
            let mut ctx_vars = xs.clone();
            ctx_vars.push(moved.clone());
            let before = Atom::Rel(r.clone(), xs.iter().map(|x| Term::var(x)).collect());
            let mut after_args: Vec<Term> = xs.iter().map(|x| Term::var(x)).collect();
            after_args[i] = Term::var(&moved);
            out.push((
                format!("{e}_cong_{r}_{}", i + 1),
                Sequent::new(
                    Context(ctx_vars),
                    Formula::conj(&[e_atom(e, &xs[i], &moved), before]),
                    Atom::Rel(r.clone(), after_args).into(),
                ),
            ));
        }
    }
    out
}

/// `T^E ∪ E_Σ` over `Σ + E`.
pub fn eliminate_equality(theory: &Theory) -> Result<EqElimination> {
    if let Some(f) = theory.signature.funs.keys().next() {
        return Err(Error::NotRelational(f.clone()));
    }
    let e = equality_symbol(&theory.signature);
    let mut out = Theory::new(theory.signature.clone().with_rel(&e, 2));
    for (name, seq) in &theory.axioms {
        out.axioms.insert(
            name.clone(),
            Sequent::new(
                seq.context.clone(),
                replace_equality(&seq.antecedent, &e),
                replace_equality(&seq.consequent, &e),
            ),
        );
    }
    for (name, seq) in eq_axioms(&theory.signature, &e) {
        let name = unique_name(&out, name);
        out.axioms.insert(name, seq);
    }
    Ok(EqElimination {
        base: theory.signature.clone(),
        symbol: e,
        theory: out,
    })
}
