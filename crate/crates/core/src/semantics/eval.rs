use std::collections::BTreeMap;

use super::structure::{Elem, Structure};
use crate::normalize::prenex;
use crate::syntax::{Atom, Context, Formula, Query, Sequent, Term};

/// Variable assignment.
pub type Env = BTreeMap<String, Elem>;

pub fn eval_term(a: &Structure, t: &Term, env: &Env) -> Option<Elem> {
    match t {
        Term::Var(v) => env.get(v).copied(),
        Term::App(f, args) => {
            let vals: Option<Vec<Elem>> = args.iter().map(|x| eval_term(a, x, env)).collect();
            a.fun_value(f, &vals?)
        }
    }
}

/// `Some(truth)` once every variable of the atom is assigned.
pub fn eval_atom(a: &Structure, atom: &Atom, env: &Env) -> Option<bool> {
    match atom {
        Atom::Eq(l, r) => Some(eval_term(a, l, env)? == eval_term(a, r, env)?),
        Atom::Rel(r, args) => {
            let vals: Option<Vec<Elem>> = args.iter().map(|x| eval_term(a, x, env)).collect();
            Some(a.holds(r, &vals?))
        }
    }
}

/// Backtracking search for assignments of `vars` (extending `env`) making
/// every atom true. Variables left unconstrained range over the carrier.
struct Search<'a> {
    a: &'a Structure,
    atoms: &'a [Atom],
    vars: &'a [String],
    limit: usize,
    out: Vec<Env>,
}

impl Search<'_> {
    fn run(&mut self, env: &mut Env, done: &mut Vec<bool>) {
        if self.out.len() >= self.limit {
            return;
        }
        // Check every fully assigned atom; pick the most promising open one.
        let mut best: Option<(usize, usize)> = None;
        for (i, atom) in self.atoms.iter().enumerate() {
            if done[i] {
                continue;
            }
            match eval_atom(self.a, atom, env) {
                Some(false) => return,
                Some(true) => {}
                None => {
                    let unbound = atom.vars().iter().filter(|v| !env.contains_key(*v)).count();
                    let score = match atom {
                        Atom::Rel(_, args) if args.iter().all(|t| t.as_var().is_some()) => unbound,
                        Atom::Eq(l, r) if l.as_var().is_some() || r.as_var().is_some() => unbound,
                        _ => unbound + 100,
                    };
                    if best.is_none_or(|(_, s)| score < s) {
                        best = Some((i, score));
                    }
                }
            }
        }
        let Some((i, _)) = best else {
            let rest: Vec<&String> = self.vars.iter().filter(|v| !env.contains_key(*v)).collect();
            self.enumerate_free(env, &rest);
            return;
        };
        let atom = &self.atoms[i];
        match atom {
            Atom::Rel(r, args) if args.iter().all(|t| t.as_var().is_some()) => {
                let names: Vec<&str> = args.iter().map(|t| t.as_var().unwrap()).collect();
                for tuple in self.a.rel(r) {
                    let mut added = Vec::new();
                    let mut ok = true;
                    for (n, &e) in names.iter().zip(tuple) {
                        match env.get(*n) {
                            Some(&x) if x != e => {
                                ok = false;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                env.insert(n.to_string(), e);
                                added.push(*n);
                            }
                        }
                    }
                    if ok {
                        done[i] = true;
                        self.run(env, done);
                        done[i] = false;
                    }
                    for n in added {
                        env.remove(n);
                    }
                    if self.out.len() >= self.limit {
                        return;
                    }
                }
            }
            Atom::Eq(l, r) if l.as_var().is_some() || r.as_var().is_some() => {
                let (var, other) = match (l.as_var(), r.as_var()) {
                    (Some(v), _) if !env.contains_key(v) => (v, r),
                    (_, Some(v)) => (v, l),
                    (Some(v), None) => (v, r),
                    _ => unreachable!(),
                };
                if let Some(val) = eval_term(self.a, other, env) {
                    env.insert(var.to_string(), val);
                    done[i] = true;
                    self.run(env, done);
                    done[i] = false;
                    env.remove(var);
                } else {
                    self.branch_on_some_var(atom, env, done);
                }
            }
            _ => self.branch_on_some_var(atom, env, done),
        }
    }

    fn branch_on_some_var(&mut self, atom: &Atom, env: &mut Env, done: &mut Vec<bool>) {
        let v = atom
            .vars()
            .into_iter()
            .find(|v| !env.contains_key(v))
            .expect("open atom has an unbound variable");
        for e in self.a.elements() {
            env.insert(v.clone(), e);
            self.run(env, done);
            env.remove(&v);
            if self.out.len() >= self.limit {
                return;
            }
        }
    }

    fn enumerate_free(&mut self, env: &mut Env, rest: &[&String]) {
        if self.out.len() >= self.limit {
            return;
        }
        match rest.split_first() {
            None => self.out.push(env.clone()),
            Some((v, tail)) => {
                for e in self.a.elements() {
                    env.insert((*v).clone(), e);
                    self.enumerate_free(env, tail);
                    env.remove(*v);
                }
            }
        }
    }
}

/// All extensions of `env` to `vars` satisfying the conjunction of `atoms`,
/// in a deterministic order, at most `limit` of them.
pub fn solve(a: &Structure, atoms: &[Atom], vars: &[String], env: &Env, limit: usize) -> Vec<Env> {
    let mut search = Search {
        a,
        atoms,
        vars,
        limit,
        out: Vec::new(),
    };
    let mut env = env.clone();
    let mut done = vec![false; atoms.len()];
    search.run(&mut env, &mut done);
    let mut out = search.out;
    out.sort();
    out
}

pub fn solve_all(a: &Structure, atoms: &[Atom], vars: &[String], env: &Env) -> Vec<Env> {
    solve(a, atoms, vars, env, usize::MAX)
}

/// The first extension found by the (deterministic) search.
pub fn solve_one(a: &Structure, atoms: &[Atom], vars: &[String], env: &Env) -> Option<Env> {
    solve(a, atoms, vars, env, 1).into_iter().next()
}

/// Satisfaction of a regular formula; on success also returns witnesses for
/// the bound variables of its prenex form (as named by [`prenex`]).
pub fn evaluate(a: &Structure, f: &Formula, env: &Env) -> Option<Env> {
    let ctx = Context::from_names(env.keys().cloned());
    let (bound, matrix) = prenex(f, &ctx);
    let sol = solve_one(a, &matrix, &bound, env)?;
    Some(bound.iter().map(|y| (y.clone(), sol[y])).collect())
}

pub fn satisfies(a: &Structure, f: &Formula, env: &Env) -> bool {
    evaluate(a, f, env).is_some()
}

/// Least index of a satisfied disjunct with its witnesses.
pub fn evaluate_query(a: &Structure, disjuncts: &[Formula], env: &Env) -> Option<(usize, Env)> {
    disjuncts
        .iter()
        .enumerate()
        .find_map(|(i, d)| evaluate(a, d, env).map(|w| (i, w)))
}

fn violations(a: &Structure, ctx: &Context, antecedent: &Formula, disjuncts: &[Formula]) -> Option<Env> {
    let (hoisted, ant) = prenex(antecedent, ctx);
    let mut vars = ctx.vars().to_vec();
    vars.extend(hoisted);
    for sol in solve_all(a, &ant, &vars, &Env::new()) {
        let env: Env = ctx.vars().iter().map(|v| (v.clone(), sol[v])).collect();
        if evaluate_query(a, disjuncts, &env).is_none() {
            return Some(env);
        }
    }
    None
}

/// Whether every assignment satisfying the antecedent satisfies the consequent.
pub fn validates(a: &Structure, seq: &Sequent) -> bool {
    violations(a, &seq.context, &seq.antecedent, std::slice::from_ref(&seq.consequent)).is_none()
}

pub fn validates_query(a: &Structure, q: &Query) -> bool {
    violations(a, &q.context, &q.antecedent, &q.disjuncts).is_none()
}

/// An assignment where the antecedent holds but the consequent fails.
pub fn counterexample(a: &Structure, seq: &Sequent) -> Option<Env> {
    violations(a, &seq.context, &seq.antecedent, std::slice::from_ref(&seq.consequent))
}
