use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::abstraction::abstract_constants;
use super::check::check_derivation;
use super::derivation::{Derivation, Rule};
use super::tactics::{cut, exists_elim, identity, substitution, Prover};
use crate::error::{Error, Result};
use crate::normalize::prenex;
use crate::semantics::{diagram_avoiding, eval_term, satisfies, solve_one, Diagram, Elem, Env, Structure};
use crate::syntax::{substitute, Atom, Context, Formula, Sequent, Term, Theory};

/// A derivation of `⊤ ⊢ φ(c̄)` from the diagram of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramProof {
    pub diagram: Diagram,
    pub derivation: Derivation,
}

/// Derives `φ(ā)`, with each element named by its diagram constant, from
/// `Diag(A)`. Diagram axiom names avoid those of `avoid`.
pub fn derive_from_diagram(
    a: &Structure,
    phi: &Formula,
    ctx: &Context,
    args: &[Elem],
    avoid: &Theory,
) -> Result<DiagramProof> {
    if args.len() != ctx.len() {
        return Err(Error::Internal("tuple length differs from context".into()));
    }
    a.signature.check_formula(phi, ctx)?;
    let env: Env = ctx.vars().iter().cloned().zip(args.iter().copied()).collect();
    if !satisfies(a, phi, &env) {
        return Err(Error::NotSatisfied);
    }
    let diag = diagram_avoiding(a, avoid);
    let (bound, matrix) = prenex(phi, ctx);
    let sol = solve_one(a, &matrix, &bound, &env).ok_or(Error::NotSatisfied)?;

    let by_fact: BTreeMap<&Formula, &String> = diag
        .theory
        .axioms
        .iter()
        .map(|(name, s)| (&s.consequent, name))
        .collect();
    let name_term = |t: &Term| diag.constant(eval_term(a, t, &sol).expect("total"));
    let mut facts: Vec<Atom> = Vec::new();
    let mut push = |f: Atom| {
        if !facts.contains(&f) {
            facts.push(f);
        }
    };
    for atom in &matrix {
        for t in atom.terms() {
            let mut subs = Vec::new();
            t.subterms(&mut subs);
            for s in subs {
                if let Term::App(f, xs) = &s {
                    let lhs = Term::App(f.clone(), xs.iter().map(name_term).collect());
                    push(Atom::Eq(lhs, name_term(&s)));
                }
            }
        }
        if let Atom::Rel(r, ts) = atom {
            push(Atom::Rel(r.clone(), ts.iter().map(name_term).collect()));
        }
    }

    let empty = Context::empty();
    let leaves: Vec<Derivation> = facts
        .iter()
        .map(|f| {
            let f = Formula::Atom(f.clone());
            let name = by_fact[&f].clone();
            Derivation::leaf(Sequent::new(empty.clone(), Formula::top(), f), Rule::Axiom(name))
        })
        .collect();
    let hyp = Formula::conj(&facts);
    let names: BTreeMap<String, Term> =
        ctx.vars().iter().cloned().zip(args.iter().map(|&e| diag.constant(e))).collect();
    let goal = substitute(phi, ctx, &names, &empty)?;
    let mut witnesses: VecDeque<Term> = bound.iter().map(|u| diag.constant(sol[u])).collect();
    let mut prover = Prover::new(empty.clone(), hyp.clone());
    let body = prover.prove_goal(&goal, &mut witnesses)?;
    let derivation = match leaves.len() {
        0 => body,
        1 if body.rule == Rule::Identity => leaves.into_iter().next().unwrap(),
        1 => cut(leaves.into_iter().next().unwrap(), body),
        _ => cut(
            Derivation::node(Sequent::new(empty, Formula::top(), hyp), Rule::AndIntro, leaves),
            body,
        ),
    };
    Ok(DiagramProof { diagram: diag, derivation })
}

/// `χ(ȳ)` true of the named elements, with a derivation of
/// `χ(ȳ) ∧ φ(x̄,ȳ) ⊢ ψ(x̄,ȳ)` from the theory alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramElimination {
    pub diagram: Diagram,
    /// Conjunction of the diagram sentences the input used.
    pub xi: Formula,
    /// Variables replacing constants of the input's root sequent.
    pub context: Vec<String>,
    pub assignment: BTreeMap<String, Elem>,
    pub chi: Formula,
    pub derivation: Derivation,
}

/// Removes the diagram axioms from a derivation in `theory ∪ Diag(A)`.
pub fn eliminate_diagram_constants(d: &Derivation, a: &Structure, theory: &Theory) -> Result<DiagramElimination> {
    let diag = diagram_avoiding(a, theory);
    let both = theory.union(&diag.theory)?;
    check_derivation(d, &both).map_err(|e| Error::CheckFailed(e.to_string()))?;

    let mut used: Vec<Atom> = Vec::new();
    d.walk(&mut |n| {
        if let Rule::Axiom(name) = &n.rule {
            if let Some(s) = diag.theory.axioms.get(name) {
                let Formula::Atom(f) = &s.consequent else { unreachable!() };
                if !used.contains(f) {
                    used.push(f.clone());
                }
            }
        }
    });
    let xi = Formula::conj(&used);
    let rebuilt = with_hypothesis(d, &xi, &diag);
    let constants: BTreeSet<String> = diag.constants.iter().cloned().collect();
    let ab = abstract_constants(&rebuilt, &constants, theory)?;

    let root = &ab.derivation.conclusion;
    let Formula::And(parts) = &root.antecedent else { unreachable!() };
    let (xi_bar, phi_bar) = (&parts[0], &parts[1]);
    let fresh: BTreeSet<&String> = ab.fresh.iter().collect();
    let mut ys: Vec<String> = Vec::new();
    for f in [phi_bar, &root.consequent] {
        for v in vars_in_order(f) {
            if fresh.contains(&v) && !ys.contains(&v) {
                ys.push(v);
            }
        }
    }
    let mut xs: Vec<String> = Vec::new();
    for v in vars_in_order(xi_bar) {
        if fresh.contains(&v) && !xs.contains(&v) {
            xs.push(v);
        }
    }

    let mut taken = BTreeSet::new();
    ab.derivation.walk(&mut |n| {
        taken.extend(n.conclusion.context.vars().iter().cloned());
        n.conclusion.antecedent.all_vars(&mut taken);
        n.conclusion.consequent.all_vars(&mut taken);
    });
    let mut k = 0;
    let mut ws = Vec::new();
    let mut wmap: BTreeMap<String, Term> = BTreeMap::new();
    for v in &xs {
        let w = loop {
            k += 1;
            let w = format!("w{k}");
            if !taken.contains(&w) {
                break w;
            }
        };
        wmap.insert(v.clone(), Term::var(&w));
        ws.push(w);
    }
    let mut body: Vec<Atom> = xs
        .iter()
        .filter(|v| ys.contains(v))
        .map(|v| Atom::eq(Term::var(v), wmap[v].clone()))
        .collect();
    body.extend(xi_bar.atoms().into_iter().map(|a| a.rename(&wmap)));

    let (chi, derivation) = if ws.is_empty() {
        (xi_bar.clone(), ab.derivation.clone())
    } else {
        let only: Vec<&String> = xs.iter().filter(|v| !ys.contains(v)).collect();
        let outer = Context::from_names(root.context.vars().iter().filter(|v| !only.contains(v)).cloned());
        let inner = outer.extended(&ws);
        let b = Formula::conj(&body);
        let chi = Formula::Exists(ws.clone(), Box::new(b.clone()));
        let start = Formula::And(vec![chi.clone(), phi_bar.clone()]);
        let swapped = Formula::And(vec![phi_bar.clone(), chi.clone()]);
        let swap = Derivation::node(
            Sequent::new(outer.clone(), start.clone(), swapped.clone()),
            Rule::AndIntro,
            vec![and_elim(&outer, &start, 1), and_elim(&outer, &start, 0)],
        );
        let hyp = Formula::And(vec![phi_bar.clone(), b]);
        let frob = Derivation::leaf(
            Sequent::new(outer.clone(), swapped, Formula::Exists(ws.clone(), Box::new(hyp.clone()))),
            Rule::Frobenius,
        );
        let mut map: BTreeMap<String, Term> = outer.vars().iter().map(|v| (v.clone(), Term::var(v))).collect();
        for v in &only {
            map.insert((*v).clone(), wmap[*v].clone());
        }
        let sub = substitution(ab.derivation.clone(), map, &inner)?;
        let Formula::And(goal) = &sub.conclusion.antecedent else { unreachable!() };
        let mut prover = Prover::new(inner.clone(), hyp.clone());
        prover.reserve(&sub.conclusion.antecedent);
        let d_xi = prover.prove_goal(&goal[0], &mut VecDeque::new())?;
        let d_phi = prover.project(&[0]);
        let bridge = Derivation::node(
            prover.seq(Formula::And(vec![goal[0].clone(), phi_bar.clone()])),
            Rule::AndIntro,
            vec![d_xi, d_phi],
        );
        let elim = exists_elim(&ws, cut(bridge, sub), &outer);
        (chi, cut(cut(swap, frob), elim))
    };

    check_derivation(&derivation, theory).map_err(|e| Error::Internal(format!("diagram elimination: {e}")))?;
    let mut assignment = BTreeMap::new();
    for y in &ys {
        let e = diag
            .element_of(&ab.assignment[y])
            .ok_or_else(|| Error::Internal(format!("`{y}` does not name an element")))?;
        assignment.insert(y.clone(), e);
    }
    if !satisfies(a, &chi, &assignment) {
        return Err(Error::Internal("χ fails at the named elements".into()));
    }
    Ok(DiagramElimination {
        diagram: diag,
        xi,
        context: ys,
        assignment,
        chi,
        derivation,
    })
}

fn vars_in_order(f: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    for a in f.atoms() {
        for t in a.terms() {
            let mut subs = Vec::new();
            t.subterms(&mut subs);
            for s in subs {
                if let Term::Var(v) = s {
                    out.push(v);
                }
            }
        }
    }
    out
}

fn and_elim(ctx: &Context, f: &Formula, i: usize) -> Derivation {
    let Formula::And(parts) = f else { unreachable!() };
    Derivation::leaf(Sequent::new(ctx.clone(), f.clone(), parts[i].clone()), Rule::AndElim(i))
}

/// Rebuilds `d : φ ⊢ ψ` in `T ∪ Diag(A)` as `ξ ∧ φ ⊢ ψ` in `T`.
fn with_hypothesis(d: &Derivation, xi: &Formula, diag: &Diagram) -> Derivation {
    let c = &d.conclusion;
    let ctx = &c.context;
    let h = |f: &Formula| Formula::And(vec![xi.clone(), f.clone()]);
    let hyp = h(&c.antecedent);
    let seq = |cons: Formula| Sequent::new(ctx.clone(), hyp.clone(), cons);
    let via_body = |d: &Derivation| cut(and_elim(ctx, &hyp, 1), d.clone());
    let premises: Vec<Derivation> = d.premises.iter().map(|p| with_hypothesis(p, xi, diag)).collect();
    match &d.rule {
        Rule::Axiom(name) if diag.is_diagram_axiom(name) => {
            let to_xi = and_elim(ctx, &hyp, 0);
            let pick = match xi {
                Formula::And(parts) => {
                    let i = parts.iter().position(|p| p == &c.consequent).expect("used fact");
                    and_elim(ctx, xi, i)
                }
                _ => identity(ctx, xi),
            };
            cut(to_xi, pick)
        }
        Rule::Axiom(_) | Rule::AndElim(_) | Rule::EqRefl | Rule::EqSubst(_) | Rule::Frobenius => via_body(d),
        Rule::Identity => Derivation::leaf(seq(c.consequent.clone()), Rule::AndElim(1)),
        Rule::TopIntro => Derivation::leaf(seq(c.consequent.clone()), Rule::TopIntro),
        Rule::Cut => {
            let mut it = premises.into_iter();
            let (p, q) = (it.next().unwrap(), it.next().unwrap());
            let mid = Formula::And(vec![xi.clone(), p.conclusion.consequent.clone()]);
            let bridge = Derivation::node(seq(mid), Rule::AndIntro, vec![and_elim(ctx, &hyp, 0), p]);
            cut(bridge, q)
        }
        Rule::Substitution(_) | Rule::AndIntro | Rule::Weakening => {
            Derivation::node(seq(c.consequent.clone()), d.rule.clone(), premises)
        }
        Rule::ExistsDown => {
            let Formula::Exists(ys, body) = &c.antecedent else { unreachable!() };
            let frob = Derivation::leaf(
                seq(Formula::Exists(ys.clone(), Box::new(h(body)))),
                Rule::Frobenius,
            );
            cut(frob, exists_elim(ys, premises.into_iter().next().unwrap(), ctx))
        }
        Rule::ExistsUp => {
            let p = premises.into_iter().next().unwrap();
            let ex = d.premises[0].conclusion.antecedent.clone();
            let outer = d.premises[0].conclusion.context.clone();
            let weak = Derivation::node(
                Sequent::new(ctx.clone(), h(&ex), c.consequent.clone()),
                Rule::Weakening,
                vec![p],
            );
            let up = Derivation::node(
                Sequent::new(ctx.clone(), c.antecedent.clone(), ex.clone()),
                Rule::ExistsUp,
                vec![identity(&outer, &ex)],
            );
            let bridge = Derivation::node(
                seq(h(&ex)),
                Rule::AndIntro,
                vec![and_elim(ctx, &hyp, 0), cut(and_elim(ctx, &hyp, 1), up)],
            );
            cut(bridge, weak)
        }
    }
}
