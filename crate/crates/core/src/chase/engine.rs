use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalize::{NormalSequent, NormalTheory};
use crate::semantics::{solve_all, solve_one, Elem, Env, Structure};
use crate::syntax::{Atom, Term};

/// How triggers are selected at each level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChaseMode {
    /// Datalog axioms first; an existential trigger only fires while its
    /// consequent is unsatisfied.
    Lean,
    /// Every trigger fires at every level with fresh witnesses.
    Faithful,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChaseOptions {
    pub fuel: usize,
    pub mode: ChaseMode,
    pub parallel: bool,
}

impl ChaseOptions {
    pub fn new(fuel: usize) -> Self {
        ChaseOptions {
            fuel,
            mode: ChaseMode::Lean,
            parallel: false,
        }
    }
}

/// Where a carrier element of the chase comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChaseElement {
    Base(Elem),
    New {
        level: usize,
        axiom: String,
        args: Vec<Elem>,
        index: usize,
    },
}

/// One axiom instance fired while building a level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Firing {
    pub axiom: String,
    /// Values of the axiom's context variables, in context order.
    pub args: Vec<Elem>,
    /// Elements adjoined for the bound variables, in order.
    pub witnesses: Vec<Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChaseStatus {
    Saturated(usize),
    FuelExhausted,
}

/// The tower `A = S⁰ ⊆ S¹ ⊆ …`. Levels share element ids: level `k` is the
/// first `levels[k].size()` elements, so each embedding is an inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChaseTrace {
    pub theory: NormalTheory,
    pub levels: Vec<Structure>,
    /// `firings[k]` built level `k` from level `k - 1`; `firings[0]` is empty.
    pub firings: Vec<Vec<Firing>>,
    pub elements: Vec<ChaseElement>,
    pub status: ChaseStatus,
    pub mode: ChaseMode,
}

impl ChaseTrace {
    pub fn last(&self) -> &Structure {
        self.levels.last().expect("at least the base level")
    }

    pub fn base(&self) -> &Structure {
        &self.levels[0]
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self.status, ChaseStatus::Saturated(_))
    }

    /// The level at which `e` first appears.
    pub fn level_of(&self, e: Elem) -> usize {
        match &self.elements[e] {
            ChaseElement::Base(_) => 0,
            ChaseElement::New { level, .. } => *level,
        }
    }
}

/// Checks that `theory` is normal, relational and equality-free.
pub fn check_chase_theory(theory: &NormalTheory) -> Result<()> {
    if let Some(f) = theory.signature.funs.keys().next() {
        return Err(Error::PreconditionViolation(format!("function symbol `{f}` in signature")));
    }
    for (name, ax) in &theory.axioms {
        if ax.has_equality() {
            return Err(Error::PreconditionViolation(format!("axiom `{name}` uses equality")));
        }
        if !ax.side_condition_holds() {
            return Err(Error::PreconditionViolation(format!("axiom `{name}` is not normal")));
        }
        for a in ax.antecedent.iter().chain(&ax.matrix) {
            if let Atom::Rel(_, args) = a {
                if args.iter().any(|t| t.as_var().is_none()) {
                    return Err(Error::PreconditionViolation(format!(
                        "axiom `{name}` has a non-variable term"
                    )));
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn instantiate(atom: &Atom, env: &Env) -> (String, Vec<Elem>) {
    match atom {
        Atom::Rel(r, args) => (
            r.clone(),
            args.iter()
                .map(|t| match t {
                    Term::Var(v) => env[v],
                    Term::App(..) => unreachable!("relational"),
                })
                .collect(),
        ),
        Atom::Eq(..) => unreachable!("equality-free"),
    }
}

struct Trigger<'a> {
    name: &'a str,
    axiom: &'a NormalSequent,
    args: Vec<Elem>,
}

impl Trigger<'_> {
    fn env(&self) -> Env {
        self.axiom
            .context
            .vars()
            .iter()
            .cloned()
            .zip(self.args.iter().copied())
            .collect()
    }
}

fn triggers<'a>(theory: &'a NormalTheory, s: &Structure, parallel: bool) -> Vec<Trigger<'a>> {
    let per_axiom = |(name, ax): (&'a String, &'a NormalSequent)| -> Vec<Trigger<'a>> {
        let vars = ax.context.vars();
        let mut args: Vec<Vec<Elem>> = solve_all(s, &ax.antecedent, vars, &Env::new())
            .into_iter()
            .map(|env| vars.iter().map(|v| env[v]).collect())
            .collect();
        args.sort();
        args.dedup();
        args.into_iter()
            .map(|args| Trigger { name, axiom: ax, args })
            .collect()
    };
    let axioms: Vec<(&String, &NormalSequent)> = theory.axioms.iter().collect();
    let lists: Vec<Vec<Trigger>> = if parallel {
        axioms.into_par_iter().map(per_axiom).collect()
    } else {
        axioms.into_iter().map(per_axiom).collect()
    };
    lists.into_iter().flatten().collect()
}

fn adds_something(s: &Structure, t: &Trigger) -> bool {
    let env = t.env();
    t.axiom.matrix.iter().any(|a| {
        let (r, tuple) = instantiate(a, &env);
        !s.holds(&r, &tuple)
    })
}

fn unsatisfied(s: &Structure, t: &Trigger) -> bool {
    solve_one(s, &t.axiom.matrix, &t.axiom.bound, &t.env()).is_none()
}

fn select<'a>(s: &Structure, all: Vec<Trigger<'a>>, mode: ChaseMode, parallel: bool) -> Vec<Trigger<'a>> {
    if mode == ChaseMode::Faithful {
        return all;
    }
    let (datalog, existential): (Vec<_>, Vec<_>) = all.into_iter().partition(|t| t.axiom.is_datalog());
    let keep = |ts: Vec<Trigger<'a>>, pred: &(dyn Fn(&Trigger) -> bool + Sync)| -> Vec<Trigger<'a>> {
        if parallel {
            let flags: Vec<bool> = ts.par_iter().map(pred).collect();
            ts.into_iter().zip(flags).filter(|(_, f)| *f).map(|(t, _)| t).collect()
        } else {
            ts.into_iter().filter(|t| pred(t)).collect()
        }
    };
    let datalog = keep(datalog, &|t| adds_something(s, t));
    if !datalog.is_empty() {
        return datalog;
    }
    keep(existential, &|t| unsatisfied(s, t))
}

/// Fires `chosen` on a copy of `s`; `None` if nothing changes.
fn fire(
    s: &Structure,
    chosen: &[Trigger],
    level: usize,
    elements: &mut Vec<ChaseElement>,
) -> Option<(Structure, Vec<Firing>)> {
    let mut next = s.clone();
    let mut firings = Vec::new();
    let mut changed = false;
    let mut k = 0;
    for t in chosen {
        let mut env = t.env();
        let mut witnesses = Vec::new();
        for (j, y) in t.axiom.bound.iter().enumerate() {
            let e = next.add_element(&format!("w{level}_{k}"));
            k += 1;
            elements.push(ChaseElement::New {
                level,
                axiom: t.name.to_string(),
                args: t.args.clone(),
                index: j,
            });
            env.insert(y.clone(), e);
            witnesses.push(e);
            changed = true;
        }
        for a in &t.axiom.matrix {
            let (r, tuple) = instantiate(a, &env);
            changed |= next.add_tuple(&r, tuple);
        }
        firings.push(Firing {
            axiom: t.name.to_string(),
            args: t.args.clone(),
            witnesses,
        });
    }
    changed.then_some((next, firings))
}

/// The one-step extension `S(A)`: every trigger fires once with fresh
/// witnesses. Returns the extension and the inclusion of `a` into it.
pub fn one_step(theory: &NormalTheory, a: &Structure) -> Result<(Structure, Vec<Elem>)> {
    check_chase_theory(theory)?;
    let base = with_signature(a, theory)?;
    let all = triggers(theory, &base, false);
    let mut elements = Vec::new();
    let next = fire(&base, &all, 1, &mut elements)
        .map(|(s, _)| s)
        .unwrap_or_else(|| base.clone());
    Ok((next, a.elements().collect()))
}

fn with_signature(a: &Structure, theory: &NormalTheory) -> Result<Structure> {
    let mut s = a.clone();
    s.extend_signature(&theory.signature)?;
    if let Some(f) = s.signature.funs.keys().next() {
        return Err(Error::PreconditionViolation(format!("structure interprets function `{f}`")));
    }
    Ok(s)
}

/// Iterates the one-step extension until a level adds nothing or `fuel`
/// levels have been built.
pub fn chase(theory: &NormalTheory, a: &Structure, opts: ChaseOptions) -> Result<ChaseTrace> {
    check_chase_theory(theory)?;
    let base = with_signature(a, theory)?;
    let mut elements: Vec<ChaseElement> = base.elements().map(ChaseElement::Base).collect();
    let mut levels = vec![base];
    let mut all_firings = vec![Vec::new()];
    let mut status = ChaseStatus::FuelExhausted;
    for i in 0..=opts.fuel {
        let s = &levels[i];
        let chosen = select(s, triggers(theory, s, opts.parallel), opts.mode, opts.parallel);
        let mut scratch = elements.clone();
        match fire(s, &chosen, i + 1, &mut scratch) {
            None => {
                status = ChaseStatus::Saturated(i);
                break;
            }
            Some(_) if i == opts.fuel => break,
            Some((next, firings)) => {
                elements = scratch;
                levels.push(next);
                all_firings.push(firings);
            }
        }
    }
    Ok(ChaseTrace {
        theory: theory.clone(),
        levels,
        firings: all_firings,
        elements,
        status,
        mode: opts.mode,
    })
}
