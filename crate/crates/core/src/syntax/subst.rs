use std::collections::{BTreeMap, BTreeSet};

use super::{Context, FreshNames, Formula, Term};
use crate::error::{Error, Result};

/// Capture-avoiding simultaneous substitution `φ[f]` of a formula in `ctx`
/// into `target`.
///
/// `assignment` must cover `ctx` and its images must live in `target`.
/// Bound variables that clash with `target` or with a variable of some image
/// are renamed by appending primes.
pub fn substitute(
    formula: &Formula,
    ctx: &Context,
    assignment: &BTreeMap<String, Term>,
    target: &Context,
) -> Result<Formula> {
    for v in ctx.vars() {
        let image = assignment
            .get(v)
            .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
        for w in image.vars() {
            if !target.contains(&w) {
                return Err(Error::UnboundVariable(w));
            }
        }
    }
    for v in formula.free_vars() {
        if !ctx.contains(&v) {
            return Err(Error::UnboundVariable(v));
        }
    }
    let mut avoid: BTreeSet<String> = target.vars().iter().cloned().collect();
    for t in assignment.values() {
        t.collect_vars(&mut avoid);
    }
    Ok(subst_rec(formula, assignment, &avoid))
}

/// Substitution without scope checks; variables outside the map stay put.
pub fn substitute_unchecked(formula: &Formula, assignment: &BTreeMap<String, Term>) -> Formula {
    let mut avoid = BTreeSet::new();
    for t in assignment.values() {
        t.collect_vars(&mut avoid);
    }
    for v in formula.free_vars() {
        if !assignment.contains_key(&v) {
            avoid.insert(v);
        }
    }
    subst_rec(formula, assignment, &avoid)
}

fn subst_rec(formula: &Formula, map: &BTreeMap<String, Term>, avoid: &BTreeSet<String>) -> Formula {
    match formula {
        Formula::Atom(a) => Formula::Atom(a.rename(map)),
        Formula::And(parts) => Formula::And(parts.iter().map(|p| subst_rec(p, map, avoid)).collect()),
        Formula::Exists(vars, body) => {
            let mut inner_map = map.clone();
            let mut inner_avoid = avoid.clone();
            let mut names = FreshNames::avoiding(avoid.iter().cloned());
            let mut all = BTreeSet::new();
            body.all_vars(&mut all);
            names.avoid_all(&all);
            names.avoid_all(vars);
            let mut new_vars = Vec::with_capacity(vars.len());
            for v in vars {
                if avoid.contains(v) {
                    let renamed = names.prime(v);
                    inner_map.insert(v.clone(), Term::Var(renamed.clone()));
                    inner_avoid.insert(renamed.clone());
                    new_vars.push(renamed);
                } else {
                    inner_map.remove(v);
                    inner_avoid.insert(v.clone());
                    new_vars.push(v.clone());
                }
            }
            Formula::Exists(new_vars, Box::new(subst_rec(body, &inner_map, &inner_avoid)))
        }
    }
}

/// Renames bound variables so none of them lies in `avoid`.
pub fn rename_bound_apart(formula: &Formula, avoid: &BTreeSet<String>) -> Formula {
    let mut full = avoid.clone();
    full.extend(formula.free_vars());
    subst_rec(formula, &BTreeMap::new(), &full)
}

/// `formula` viewed in the larger context `to`.
pub fn weaken(formula: &Formula, from: &Context, to: &Context) -> Result<Formula> {
    if !from.is_subcontext_of(to) {
        return Err(Error::NotASubcontext {
            from: from.vars().join(","),
            to: to.vars().join(","),
        });
    }
    let avoid = to.vars().iter().cloned().collect();
    Ok(rename_bound_apart(formula, &avoid))
}

/// α-equivalence: equal up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_rec(a, b, &mut Vec::new(), &mut Vec::new())
}

fn lookup(stack: &[String], v: &str) -> Option<usize> {
    stack.iter().rposition(|x| x == v)
}

fn term_alpha(a: &Term, b: &Term, sa: &[String], sb: &[String]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (lookup(sa, x), lookup(sb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| term_alpha(x, y, sa, sb))
        }
        _ => false,
    }
}

fn alpha_rec(a: &Formula, b: &Formula, sa: &mut Vec<String>, sb: &mut Vec<String>) -> bool {
    use super::Atom;
    match (a, b) {
        (Formula::Atom(x), Formula::Atom(y)) => match (x, y) {
            (Atom::Eq(l1, r1), Atom::Eq(l2, r2)) => {
                term_alpha(l1, l2, sa, sb) && term_alpha(r1, r2, sa, sb)
            }
            (Atom::Rel(r1, a1), Atom::Rel(r2, a2)) => {
                r1 == r2
                    && a1.len() == a2.len()
                    && a1.iter().zip(a2).all(|(s, t)| term_alpha(s, t, sa, sb))
            }
            _ => false,
        },
        (Formula::And(xs), Formula::And(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_rec(x, y, sa, sb))
        }
        (Formula::Exists(vx, bx), Formula::Exists(vy, by)) => {
            if vx.len() != vy.len() {
                return false;
            }
            let (na, nb) = (sa.len(), sb.len());
            sa.extend(vx.iter().cloned());
            sb.extend(vy.iter().cloned());
            let ok = alpha_rec(bx, by, sa, sb);
            sa.truncate(na);
            sb.truncate(nb);
            ok
        }
        _ => false,
    }
}
