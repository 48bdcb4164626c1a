use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::engine::{instantiate, ChaseStatus, ChaseTrace};
use crate::error::{Error, Result};
use crate::normalize::prenex;
use crate::proofs::tactics::{cut, exists_elim, identity, substitution, Prover};
use crate::proofs::{Derivation, Rule};
use crate::semantics::{satisfies, solve_one, Elem, Env};
use crate::syntax::{Atom, Context, FreshNames, Formula, Sequent, Term};

/// `ψ` with `A ⊨ ψ(ā)` and a derivation of `ψ ⊢_x̄ φ` from the chase theory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub context: Context,
    pub formula: Formula,
    pub derivation: Derivation,
    /// Least chase level at which `φ(ā)` holds.
    pub level: usize,
}

/// Explains `φ(ā)` at a chase level by a formula true in the base structure.
pub fn conservativity_witness(
    trace: &ChaseTrace,
    phi: &Formula,
    ctx: &Context,
    args: &[Elem],
) -> Result<Witness> {
    if args.len() != ctx.len() {
        return Err(Error::Internal("tuple length differs from context".into()));
    }
    if args.iter().any(|&e| e >= trace.base().size()) {
        return Err(Error::Internal("tuple is not in the base structure".into()));
    }
    let env: Env = ctx.vars().iter().cloned().zip(args.iter().copied()).collect();
    let level = trace
        .levels
        .iter()
        .position(|s| satisfies(s, phi, &env))
        .ok_or(match trace.status {
            ChaseStatus::Saturated(_) => Error::NotSatisfiedAtAnyLevel,
            ChaseStatus::FuelExhausted => Error::TraceExhausted,
        })?;
    let mut goal = phi.clone();
    let mut steps = Vec::new();
    for k in (1..=level).rev() {
        let (psi, d) = descend(trace, k, &goal, ctx, &env)?;
        steps.push(d);
        goal = psi;
    }
    steps.reverse();
    let derivation = steps
        .into_iter()
        .reduce(cut)
        .unwrap_or_else(|| identity(ctx, phi));
    let (formula, derivation) = simplify(ctx, goal, derivation)?;
    Ok(Witness {
        context: ctx.clone(),
        formula,
        derivation,
        level,
    })
}

/// Drops bound variables fixed by an equation `v = z` of an `∃z̄. α1 ∧ … ∧ αn`
/// witness, justifying the smaller formula by a cut.
fn simplify(ctx: &Context, psi: Formula, d: Derivation) -> Result<(Formula, Derivation)> {
    let (zs, atoms) = match &psi {
        Formula::Exists(zs, body) => match &**body {
            Formula::Atom(a) => (zs.clone(), vec![a.clone()]),
            Formula::And(parts) if parts.iter().all(|p| matches!(p, Formula::Atom(_))) => (
                zs.clone(),
                parts
                    .iter()
                    .map(|p| match p {
                        Formula::Atom(a) => a.clone(),
                        _ => unreachable!(),
                    })
                    .collect(),
            ),
            _ => return Ok((psi, d)),
        },
        _ => return Ok((psi, d)),
    };
    let mut value: BTreeMap<String, Term> = zs.iter().map(|z| (z.clone(), Term::var(z))).collect();
    let mut atoms = atoms;
    let mut kept = zs.clone();
    while let Some((i, z, t)) = atoms.iter().enumerate().find_map(|(i, a)| match a {
        Atom::Eq(Term::Var(l), Term::Var(r)) if l != r => {
            if kept.contains(r) {
                Some((i, r.clone(), Term::var(l)))
            } else if kept.contains(l) {
                Some((i, l.clone(), Term::var(r)))
            } else {
                None
            }
        }
        _ => None,
    }) {
        atoms.remove(i);
        kept.retain(|k| *k != z);
        let step: BTreeMap<String, Term> = [(z, t)].into_iter().collect();
        atoms = atoms.iter().map(|a| a.rename(&step)).collect();
        for v in value.values_mut() {
            *v = v.rename(&step);
        }
    }
    if kept.len() == zs.len() {
        return Ok((psi, d));
    }
    let inner_ctx = ctx.extended(&kept);
    let hyp = Formula::conj(&atoms);
    let mut prover = Prover::new(inner_ctx, hyp.clone());
    prover.reserve(&psi);
    let mut witnesses: VecDeque<Term> = zs.iter().map(|z| value[z].clone()).collect();
    let back = prover.prove_goal(&psi, &mut witnesses)?;
    let back = if kept.is_empty() { back } else { exists_elim(&kept, back, ctx) };
    Ok((Formula::exists(kept, hyp), cut(back, d)))
}

/// One step of the descent: from `goal` true at level `k`, a formula true at
/// level `k - 1` with a derivation of `formula ⊢ goal`.
fn descend(
    trace: &ChaseTrace,
    k: usize,
    goal: &Formula,
    ctx: &Context,
    env: &Env,
) -> Result<(Formula, Derivation)> {
    let s = &trace.levels[k];
    let prev = &trace.levels[k - 1];
    let firings = &trace.firings[k];
    let (bound, matrix) = prenex(goal, ctx);
    let sol = solve_one(s, &matrix, &bound, env)
        .ok_or_else(|| Error::Internal("goal fails at its level".into()))?;
    let is_new = |e: Elem| e >= prev.size();
    let mut owner: BTreeMap<Elem, (usize, usize)> = BTreeMap::new();
    for (fi, f) in firings.iter().enumerate() {
        for (j, &w) in f.witnesses.iter().enumerate() {
            owner.insert(w, (fi, j));
        }
    }

    let mut all = BTreeSet::new();
    goal.all_vars(&mut all);
    let mut names = FreshNames::avoiding(all);
    names.avoid_all(ctx.vars());

    // Old witnesses keep a (renamed) variable; new ones come from firings.
    let mut rename: BTreeMap<String, Term> = BTreeMap::new();
    let mut old_vars = Vec::new();
    let mut used: Vec<usize> = Vec::new();
    let use_firing = |fi: usize, used: &mut Vec<usize>| {
        if !used.contains(&fi) {
            used.push(fi);
        }
    };
    for u in &bound {
        let e = sol[u];
        if is_new(e) {
            use_firing(owner[&e].0, &mut used);
        } else {
            let name = names.prime(u);
            rename.insert(u.clone(), Term::var(&name));
            old_vars.push(name);
        }
    }

    let mut kept = Vec::new();
    let mut links: Vec<(usize, usize, String)> = Vec::new();
    for alpha in &matrix {
        match alpha {
            Atom::Eq(l, _) => {
                let v = l.as_var().expect("relational");
                if !is_new(sol[v]) {
                    kept.push(alpha.rename(&rename));
                }
            }
            Atom::Rel(r, targs) => {
                let vals: Vec<Elem> = targs.iter().map(|t| sol[t.as_var().expect("relational")]).collect();
                if vals.iter().all(|&e| !is_new(e)) && prev.holds(r, &vals) {
                    kept.push(alpha.rename(&rename));
                    continue;
                }
                let (fi, beta) = explain(trace, firings, r, &vals)
                    .ok_or_else(|| Error::Internal(format!("no firing explains `{alpha}`")))?;
                use_firing(fi, &mut used);
                let ax = &trace.theory.axioms[&firings[fi].axiom];
                let Atom::Rel(_, bargs) = beta else { unreachable!() };
                for (t, b) in targs.iter().zip(bargs) {
                    let b = b.as_var().unwrap();
                    if let Some(ci) = ax.context.index_of(b) {
                        let a = t.rename(&rename).as_var().unwrap().to_string();
                        if !links.contains(&(fi, ci, a.clone())) {
                            links.push((fi, ci, a));
                        }
                    }
                }
            }
        }
    }

    // Variables standing for each used firing's arguments.
    let mut zs: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut exist_vars = old_vars.clone();
    let mut antecedents = Vec::new();
    for &fi in &used {
        let ax = &trace.theory.axioms[&firings[fi].axiom];
        let z: Vec<String> = ax.context.vars().iter().map(|_| names.fresh("z")).collect();
        let map: BTreeMap<String, Term> = ax
            .context
            .vars()
            .iter()
            .cloned()
            .zip(z.iter().map(|v| Term::var(v)))
            .collect();
        antecedents.extend(ax.antecedent.iter().map(|a| a.rename(&map)));
        exist_vars.extend(z.iter().cloned());
        zs.insert(fi, z);
    }
    let rho: Vec<Atom> = links
        .iter()
        .map(|(fi, ci, a)| Atom::eq(Term::var(a), Term::var(&zs[fi][*ci])))
        .collect();
    let mut body_atoms = kept;
    body_atoms.extend(antecedents);
    body_atoms.extend(rho);
    let body = Formula::conj(&body_atoms);
    let psi = Formula::exists(exist_vars.clone(), body.clone());

    debug_assert!({
        let mut w = env.clone();
        for (u, t) in &rename {
            w.insert(t.as_var().unwrap().to_string(), sol[u]);
        }
        for (fi, z) in &zs {
            for (v, &e) in z.iter().zip(&firings[*fi].args) {
                w.insert(v.clone(), e);
            }
        }
        crate::semantics::satisfies(prev, &body, &w)
    });

    let gamma = ctx.extended(&exist_vars);
    let plan = Plan {
        trace,
        k,
        goal,
        bound: &bound,
        sol: &sol,
        rename: &rename,
        zs: &zs,
        used: &used,
        prev_size: prev.size(),
        owner: &owner,
    };
    let inner = plan.open(0, &gamma, body, &mut BTreeMap::new())?;
    let d = if exist_vars.is_empty() {
        inner
    } else {
        exists_elim(&exist_vars, inner, ctx)
    };
    Ok((psi, d))
}

/// The first firing with a matrix atom instantiating to `r(vals)`.
fn explain<'a>(
    trace: &'a ChaseTrace,
    firings: &[super::engine::Firing],
    r: &str,
    vals: &[Elem],
) -> Option<(usize, &'a Atom)> {
    for (fi, f) in firings.iter().enumerate() {
        let ax = &trace.theory.axioms[&f.axiom];
        let mut env: Env = ax.context.vars().iter().cloned().zip(f.args.iter().copied()).collect();
        for (y, &w) in ax.bound.iter().zip(&f.witnesses) {
            env.insert(y.clone(), w);
        }
        for beta in &ax.matrix {
            let (r2, t) = instantiate(beta, &env);
            if r2 == r && t == vals {
                return Some((fi, beta));
            }
        }
    }
    None
}

struct Plan<'a> {
    trace: &'a ChaseTrace,
    k: usize,
    goal: &'a Formula,
    bound: &'a [String],
    sol: &'a Env,
    rename: &'a BTreeMap<String, Term>,
    zs: &'a BTreeMap<usize, Vec<String>>,
    used: &'a [usize],
    prev_size: usize,
    owner: &'a BTreeMap<Elem, (usize, usize)>,
}

impl Plan<'_> {
    /// Derivation of `hyp ⊢_gamma goal`, opening the used firings from `next` on.
    fn open(
        &self,
        next: usize,
        gamma: &Context,
        hyp: Formula,
        opened: &mut BTreeMap<usize, Vec<String>>,
    ) -> Result<Derivation> {
        let mut prover = Prover::new(gamma.clone(), hyp.clone());
        prover.reserve(self.goal);
        let Some(&fi) = self.used.get(next) else {
            let mut witnesses: VecDeque<Term> = self
                .bound
                .iter()
                .map(|u| {
                    let e = self.sol[u];
                    if e >= self.prev_size {
                        let (f, j) = self.owner[&e];
                        Term::var(&opened[&f][j])
                    } else {
                        self.rename[u].clone()
                    }
                })
                .collect();
            return prover.prove_goal(self.goal, &mut witnesses);
        };
        let firing = &self.trace.firings[self.k][fi];
        let ax = &self.trace.theory.axioms[&firing.axiom];
        let leaf = Derivation::leaf(ax.to_sequent(), Rule::Axiom(firing.axiom.clone()));
        let map: BTreeMap<String, Term> = ax
            .context
            .vars()
            .iter()
            .cloned()
            .zip(self.zs[&fi].iter().map(|v| Term::var(v)))
            .collect();
        let inst = substitution(leaf, map, gamma)?;
        let need = prover.prove_goal(&inst.conclusion.antecedent, &mut VecDeque::new())?;
        let got = cut(need, inst);
        let consequent = got.conclusion.consequent.clone();
        let both = Derivation::node(
            prover.seq(Formula::And(vec![hyp.clone(), consequent.clone()])),
            Rule::AndIntro,
            vec![identity(gamma, &hyp), got],
        );
        match consequent {
            Formula::Exists(ys, m) => {
                let joined = Formula::And(vec![hyp.clone(), (*m).clone()]);
                let frob = Derivation::leaf(
                    Sequent::new(
                        gamma.clone(),
                        both.conclusion.consequent.clone(),
                        Formula::Exists(ys.clone(), Box::new(joined.clone())),
                    ),
                    Rule::Frobenius,
                );
                opened.insert(fi, ys.clone());
                let inner_gamma = gamma.extended(&ys);
                let rest = self.open(next + 1, &inner_gamma, joined, opened)?;
                let elim = exists_elim(&ys, rest, gamma);
                Ok(cut(cut(both, frob), elim))
            }
            m => {
                opened.insert(fi, Vec::new());
                let joined = Formula::And(vec![hyp, m]);
                let rest = self.open(next + 1, gamma, joined, opened)?;
                Ok(cut(both, rest))
            }
        }
    }
}
