use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::derivation::{Derivation, Rule};
use crate::syntax::{alpha_eq, substitute, Atom, Context, Formula, Sequent, Signature, Term, Theory};

/// The first invalid node, addressed by child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(f, "at node /{}: {}", path.join("/"), self.message)
    }
}

/// Checks every node of `d` against the rules and the axioms of `theory`.
pub fn check_derivation(d: &Derivation, theory: &Theory) -> Result<(), CheckFailure> {
    let mut path = Vec::new();
    check_rec(d, theory, &mut path)
}

fn check_rec(d: &Derivation, theory: &Theory, path: &mut Vec<usize>) -> Result<(), CheckFailure> {
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_rec(p, theory, path)?;
        path.pop();
    }
    check_node(d, theory).map_err(|message| CheckFailure {
        path: path.clone(),
        message,
    })
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn premises(d: &Derivation, n: usize) -> Check {
    ensure(d.premises.len() == n, || {
        format!("{} expects {n} premises, found {}", d.rule.tag(), d.premises.len())
    })
}

fn same(a: &Formula, b: &Formula, what: &str) -> Check {
    ensure(alpha_eq(a, b), || format!("{what}: `{a}` differs from `{b}`"))
}

fn same_context(a: &Context, b: &Context) -> Check {
    ensure(a == b, || format!("context {a} differs from {b}"))
}

fn check_terms(sig: &Signature, t: &Term) -> Check {
    if let Term::App(f, args) = t {
        if let Some(n) = sig.fun_arity(f) {
            ensure(n == args.len(), || format!("`{f}` expects {n} arguments"))?;
        }
        for a in args {
            check_terms(sig, a)?;
        }
    }
    Ok(())
}

fn well_formed(seq: &Sequent, sig: &Signature) -> Check {
    seq.context.check_distinct().map_err(|e| e.to_string())?;
    for f in [&seq.antecedent, &seq.consequent] {
        for v in f.free_vars() {
            ensure(seq.context.contains(&v), || format!("variable `{v}` is not in context {}", seq.context))?;
        }
        for a in f.atoms() {
            if let Atom::Rel(r, args) = a {
                if let Some(n) = sig.rel_arity(r) {
                    ensure(n == args.len(), || format!("`{r}` expects {n} arguments"))?;
                }
            }
            for t in a.terms() {
                check_terms(sig, t)?;
            }
        }
    }
    Ok(())
}

fn check_node(d: &Derivation, theory: &Theory) -> Check {
    let c = &d.conclusion;
    well_formed(c, &theory.signature)?;
    match &d.rule {
        Rule::Axiom(name) => {
            premises(d, 0)?;
            let ax = theory
                .axioms
                .get(name)
                .ok_or_else(|| format!("no axiom named `{name}`"))?;
            ensure(ax.context.is_subcontext_of(&c.context), || {
                format!("axiom context {} is not contained in {}", ax.context, c.context)
            })?;
            same(&c.antecedent, &ax.antecedent, "antecedent")?;
            same(&c.consequent, &ax.consequent, "consequent")
        }
        Rule::Identity => {
            premises(d, 0)?;
            same(&c.antecedent, &c.consequent, "identity")
        }
        Rule::Cut => {
            premises(d, 2)?;
            let (p, q) = (&d.premises[0].conclusion, &d.premises[1].conclusion);
            same_context(&p.context, &c.context)?;
            same_context(&q.context, &c.context)?;
            same(&p.consequent, &q.antecedent, "cut formula")?;
            same(&c.antecedent, &p.antecedent, "antecedent")?;
            same(&c.consequent, &q.consequent, "consequent")
        }
        Rule::Substitution(map) => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let dom: BTreeSet<&str> = map.keys().map(String::as_str).collect();
            ensure(dom == p.context.as_set(), || {
                format!("substitution domain differs from premise context {}", p.context)
            })?;
            let ant = substitute(&p.antecedent, &p.context, map, &c.context).map_err(|e| e.to_string())?;
            let cons = substitute(&p.consequent, &p.context, map, &c.context).map_err(|e| e.to_string())?;
            same(&c.antecedent, &ant, "substituted antecedent")?;
            same(&c.consequent, &cons, "substituted consequent")
        }
        Rule::AndIntro => {
            ensure(!d.premises.is_empty(), || "and-intro needs premises".into())?;
            let Formula::And(parts) = &c.consequent else {
                return Err("and-intro must conclude a conjunction".into());
            };
            ensure(parts.len() == d.premises.len(), || "conjunct count differs from premise count".into())?;
            for (part, p) in parts.iter().zip(&d.premises) {
                let p = &p.conclusion;
                same_context(&p.context, &c.context)?;
                same(&p.antecedent, &c.antecedent, "antecedent")?;
                same(&p.consequent, part, "conjunct")?;
            }
            Ok(())
        }
        Rule::AndElim(i) => {
            premises(d, 0)?;
            let Formula::And(parts) = &c.antecedent else {
                return Err("and-elim needs a conjunction on the left".into());
            };
            let part = parts.get(*i).ok_or_else(|| format!("conjunct {i} does not exist"))?;
            same(&c.consequent, part, "conjunct")
        }
        Rule::TopIntro => {
            premises(d, 0)?;
            ensure(c.consequent.is_top(), || "top-intro must conclude `true`".into())
        }
        Rule::EqRefl => {
            premises(d, 0)?;
            ensure(c.antecedent.is_top(), || "eq-refl has antecedent `true`".into())?;
            match &c.consequent {
                Formula::Atom(Atom::Eq(Term::Var(x), Term::Var(y))) if x == y => Ok(()),
                _ => Err("eq-refl concludes `x = x` for a variable x".into()),
            }
        }
        Rule::EqSubst(pairs) => {
            premises(d, 0)?;
            let Formula::And(parts) = &c.antecedent else {
                return Err("eq-subst needs a conjunction on the left".into());
            };
            ensure(parts.len() == pairs.len() + 1, || "eq-subst: wrong number of conjuncts".into())?;
            let mut map = std::collections::BTreeMap::new();
            for ((x, y), part) in pairs.iter().zip(parts) {
                let expected = Formula::Atom(Atom::Eq(Term::var(x), Term::var(y)));
                same(part, &expected, "equality conjunct")?;
                ensure(map.insert(x.clone(), Term::var(y)).is_none(), || format!("`{x}` rewritten twice"))?;
            }
            let theta = &parts[pairs.len()];
            let mut full = map.clone();
            for v in c.context.vars() {
                full.entry(v.clone()).or_insert_with(|| Term::var(v));
            }
            let expected = substitute(theta, &c.context, &full, &c.context).map_err(|e| e.to_string())?;
            same(&c.consequent, &expected, "rewritten formula")
        }
        Rule::ExistsDown => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let Formula::Exists(ys, body) = &c.antecedent else {
                return Err("exists-down must conclude an existential antecedent".into());
            };
            binders_fresh(ys, &c.context)?;
            same_context(&p.context, &c.context.extended(ys))?;
            same(&p.antecedent, body, "antecedent")?;
            same(&p.consequent, &c.consequent, "consequent")
        }
        Rule::ExistsUp => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let Formula::Exists(ys, body) = &p.antecedent else {
                return Err("exists-up needs an existential antecedent in its premise".into());
            };
            binders_fresh(ys, &p.context)?;
            same_context(&c.context, &p.context.extended(ys))?;
            same(&c.antecedent, body, "antecedent")?;
            same(&c.consequent, &p.consequent, "consequent")
        }
        Rule::Frobenius => {
            premises(d, 0)?;
            let shape = || "frobenius concludes `φ & exists ȳ. ψ |- exists ȳ. φ & ψ`".to_string();
            let Formula::And(parts) = &c.antecedent else { return Err(shape()) };
            let [phi, Formula::Exists(ys, psi)] = parts.as_slice() else { return Err(shape()) };
            binders_fresh(ys, &c.context)?;
            let expected = Formula::Exists(
                ys.clone(),
                Box::new(Formula::And(vec![phi.clone(), (**psi).clone()])),
            );
            same(&c.consequent, &expected, "frobenius")
        }
        Rule::Weakening => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            ensure(p.context.is_subcontext_of(&c.context), || {
                format!("premise context {} is not contained in {}", p.context, c.context)
            })?;
            same(&c.antecedent, &p.antecedent, "antecedent")?;
            same(&c.consequent, &p.consequent, "consequent")
        }
    }
}

fn binders_fresh(ys: &[String], ctx: &Context) -> Check {
    let mut seen = BTreeSet::new();
    for y in ys {
        ensure(!ctx.contains(y), || format!("bound variable `{y}` clashes with context {ctx}"))?;
        ensure(seen.insert(y), || format!("`{y}` bound twice"))?;
    }
    Ok(())
}
