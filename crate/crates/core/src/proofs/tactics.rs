//! Derivation builders: projections, equational reasoning, a Horn prover
//! with proof output, and goal-directed proofs of regular formulas from
//! witness terms.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::derivation::{Derivation, Rule};
use crate::error::{Error, Result};
use crate::syntax::{
    rename_bound_apart, substitute, Atom, Context, FreshNames, Formula, Sequent, Term,
};

/// `φ ⊢ ψ` from `φ ⊢ χ` and `χ ⊢ ψ`.
pub fn cut(first: Derivation, second: Derivation) -> Derivation {
    let c = Sequent::new(
        first.conclusion.context.clone(),
        first.conclusion.antecedent.clone(),
        second.conclusion.consequent.clone(),
    );
    Derivation::node(c, Rule::Cut, vec![first, second])
}

pub fn identity(ctx: &Context, f: &Formula) -> Derivation {
    Derivation::leaf(Sequent::new(ctx.clone(), f.clone(), f.clone()), Rule::Identity)
}

/// Instance of `d` under `map` (premise variables to terms in `target`).
pub fn substitution(d: Derivation, map: BTreeMap<String, Term>, target: &Context) -> Result<Derivation> {
    let p = &d.conclusion;
    let ant = substitute(&p.antecedent, &p.context, &map, target)?;
    let cons = substitute(&p.consequent, &p.context, &map, target)?;
    Ok(Derivation::node(
        Sequent::new(target.clone(), ant, cons),
        Rule::Substitution(map),
        vec![d],
    ))
}

/// The identity substitution on `ctx`, extended by `extra`.
pub fn identity_map(ctx: &Context, extra: &[(String, Term)]) -> BTreeMap<String, Term> {
    let mut m: BTreeMap<String, Term> = ctx.vars().iter().map(|v| (v.clone(), Term::var(v))).collect();
    for (k, t) in extra {
        m.insert(k.clone(), t.clone());
    }
    m
}

/// Paths to every atom of an `∧`-tree (quantified parts are opaque).
fn atom_paths(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<(Atom, Vec<usize>)>) {
    match f {
        Formula::Atom(a) => out.push((a.clone(), path.clone())),
        Formula::And(parts) => {
            for (i, p) in parts.iter().enumerate() {
                path.push(i);
                atom_paths(p, path, out);
                path.pop();
            }
        }
        Formula::Exists(..) => {}
    }
}

fn subformula<'a>(f: &'a Formula, path: &[usize]) -> &'a Formula {
    match (f, path.split_first()) {
        (_, None) => f,
        (Formula::And(parts), Some((i, rest))) => subformula(&parts[*i], rest),
        _ => panic!("path leaves the conjunction tree"),
    }
}

#[derive(Debug, Clone)]
enum Why {
    Hyp(Vec<usize>),
    /// Congruence justified by edges with index below the bound.
    Cong(usize),
}

#[derive(Debug, Clone)]
struct Edge {
    a: usize,
    b: usize,
    why: Why,
}

/// Proof builder for sequents `hyp ⊢_ctx _`.
pub struct Prover {
    pub ctx: Context,
    pub hyp: Formula,
    names: FreshNames,
    atoms: Vec<(Atom, Vec<usize>)>,
}

impl Prover {
    pub fn new(ctx: Context, hyp: Formula) -> Self {
        let mut all = BTreeSet::new();
        hyp.all_vars(&mut all);
        let mut names = FreshNames::avoiding(all);
        names.avoid_all(ctx.vars());
        let mut atoms = Vec::new();
        atom_paths(&hyp, &mut Vec::new(), &mut atoms);
        Prover {
            ctx,
            hyp,
            names,
            atoms,
        }
    }

    /// Reserves the variables of `f` so fresh template variables avoid them.
    pub fn reserve(&mut self, f: &Formula) {
        let mut all = BTreeSet::new();
        f.all_vars(&mut all);
        self.names.avoid_all(all);
    }

    fn reserve_term(&mut self, t: &Term) {
        self.names.avoid_all(t.vars());
    }

    pub fn seq(&self, consequent: Formula) -> Sequent {
        Sequent::new(self.ctx.clone(), self.hyp.clone(), consequent)
    }

    /// `hyp ⊢` the conjunct of `hyp` at `path`.
    pub fn project(&self, path: &[usize]) -> Derivation {
        let mut d = identity(&self.ctx, &self.hyp);
        let mut current = &self.hyp;
        for &i in path {
            let Formula::And(parts) = current else { unreachable!() };
            let elim = Derivation::leaf(
                Sequent::new(self.ctx.clone(), current.clone(), parts[i].clone()),
                Rule::AndElim(i),
            );
            d = if matches!(d.rule, Rule::Identity) { elim } else { cut(d, elim) };
            current = &parts[i];
        }
        debug_assert_eq!(current, subformula(&self.hyp, path));
        d
    }

    pub fn top(&self) -> Derivation {
        Derivation::leaf(self.seq(Formula::top()), Rule::TopIntro)
    }

    /// `hyp ⊢ t = t`.
    pub fn refl(&mut self, t: &Term) -> Derivation {
        self.reserve_term(t);
        let v = self.names.fresh("v");
        let ctx = self.ctx.extended([&v]);
        let eq = Formula::Atom(Atom::eq(Term::var(&v), Term::var(&v)));
        let leaf = Derivation::leaf(Sequent::new(ctx, Formula::top(), eq), Rule::EqRefl);
        let inst = substitution(leaf, identity_map(&self.ctx, &[(v, t.clone())]), &self.ctx)
            .expect("terms of the context");
        cut(self.top(), inst)
    }

    /// From `hyp ⊢ s = t` and `hyp ⊢ θ[s/v]` derive `hyp ⊢ θ[t/v]`, where
    /// `θ` is an atom template over the context and `v`.
    pub fn rewrite(&mut self, eq: Derivation, theta: &Atom, v: &str, body: Derivation) -> Derivation {
        let Formula::Atom(Atom::Eq(s, t)) = &eq.conclusion.consequent else {
            panic!("rewrite needs an equality")
        };
        let (s, t) = (s.clone(), t.clone());
        self.reserve_term(&s);
        self.reserve_term(&t);
        self.names.avoid(v);
        let w = self.names.fresh("w");
        let ctx = self.ctx.extended([v, w.as_str()]);
        let theta_f = Formula::Atom(theta.clone());
        let swap: BTreeMap<String, Term> = [(v.to_string(), Term::var(&w))].into();
        let leaf = Derivation::leaf(
            Sequent::new(
                ctx,
                Formula::And(vec![Atom::eq(Term::var(v), Term::var(&w)).into(), theta_f.clone()]),
                Formula::Atom(theta.rename(&swap)),
            ),
            Rule::EqSubst(vec![(v.to_string(), w.clone())]),
        );
        let map = identity_map(&self.ctx, &[(v.to_string(), s), (w, t)]);
        let inst = substitution(leaf, map, &self.ctx).expect("terms of the context");
        let both = Derivation::node(self.seq(inst.conclusion.antecedent.clone()), Rule::AndIntro, vec![eq, body]);
        cut(both, inst)
    }

    fn eq_sides(d: &Derivation) -> (Term, Term) {
        match &d.conclusion.consequent {
            Formula::Atom(Atom::Eq(s, t)) => (s.clone(), t.clone()),
            other => panic!("not an equality: {other}"),
        }
    }

    pub fn sym(&mut self, d: Derivation) -> Derivation {
        let (s, _) = Self::eq_sides(&d);
        self.names.avoid_all(s.vars());
        let v = self.names.fresh("v");
        let r = self.refl(&s);
        self.rewrite(d, &Atom::eq(Term::var(&v), s), &v, r)
    }

    pub fn trans(&mut self, first: Derivation, second: Derivation) -> Derivation {
        let (s, _) = Self::eq_sides(&first);
        let (t, _) = Self::eq_sides(&second);
        self.reserve_term(&s);
        self.reserve_term(&t);
        let v = self.names.fresh("v");
        self.rewrite(second, &Atom::eq(s, Term::var(&v)), &v, first)
    }

    /// `hyp ⊢ f(s̄) = f(t̄)` from proofs of `s_i = t_i` (`None` where equal).
    pub fn congruence(&mut self, f: &str, s: &[Term], t: &[Term], args: Vec<Option<Derivation>>) -> Derivation {
        let lhs = Term::App(f.to_string(), s.to_vec());
        let mut d = self.refl(&lhs);
        let mut current = s.to_vec();
        for (i, eq) in args.into_iter().enumerate() {
            let Some(eq) = eq else { continue };
            for x in s.iter().chain(t) {
                self.reserve_term(x);
            }
            let v = self.names.fresh("v");
            let mut tmpl = current.clone();
            tmpl[i] = Term::var(&v);
            let theta = Atom::eq(lhs.clone(), Term::App(f.to_string(), tmpl));
            d = self.rewrite(eq, &theta, &v, d);
            current[i] = t[i].clone();
        }
        d
    }

    /// `hyp ⊢ R(t̄)` from `hyp ⊢ R(s̄)` and proofs of `s_i = t_i`.
    pub fn transport(&mut self, r: &str, s: &[Term], t: &[Term], start: Derivation, args: Vec<Option<Derivation>>) -> Derivation {
        let mut d = start;
        let mut current = s.to_vec();
        for (i, eq) in args.into_iter().enumerate() {
            let Some(eq) = eq else { continue };
            for x in s.iter().chain(t) {
                self.reserve_term(x);
            }
            let v = self.names.fresh("v");
            let mut tmpl = current.clone();
            tmpl[i] = Term::var(&v);
            d = self.rewrite(eq, &Atom::Rel(r.to_string(), tmpl), &v, d);
            current[i] = t[i].clone();
        }
        d
    }

    /// Proves an atom from the atoms of `hyp` by congruence closure.
    pub fn prove_atom(&mut self, goal: &Atom) -> Option<Derivation> {
        let mut g = EqGraph::new(&self.atoms, goal);
        g.saturate();
        match goal {
            Atom::Eq(s, t) => {
                let (a, b) = (g.index[s], g.index[t]);
                let path = g.path(a, b, g.edges.len())?;
                Some(self.path_proof(&g, a, &path))
            }
            Atom::Rel(r, t) => {
                let ids: Vec<usize> = t.iter().map(|x| g.index[x]).collect();
                let atoms = self.atoms.clone();
                for (atom, path) in &atoms {
                    let Atom::Rel(r2, s) = atom else { continue };
                    if r2 != r || s.len() != t.len() {
                        continue;
                    }
                    let mut paths = Vec::new();
                    for (x, &b) in s.iter().zip(&ids) {
                        match g.path(g.index[x], b, g.edges.len()) {
                            Some(p) => paths.push(p),
                            None => break,
                        }
                    }
                    if paths.len() != s.len() {
                        continue;
                    }
                    let start = self.project(path);
                    let eqs = s
                        .iter()
                        .zip(paths)
                        .map(|(x, p)| {
                            if p.is_empty() {
                                None
                            } else {
                                Some(self.path_proof(&g, g.index[x], &p))
                            }
                        })
                        .collect();
                    return Some(self.transport(r, s, t, start, eqs));
                }
                None
            }
        }
    }

    /// Proof of `terms[from] = terms[last node]` along a path of edge indices.
    fn path_proof(&mut self, g: &EqGraph, from: usize, path: &[usize]) -> Derivation {
        let mut at = from;
        let mut acc: Option<Derivation> = None;
        for &e in path {
            let edge = &g.edges[e];
            let (next, forward) = if edge.a == at { (edge.b, true) } else { (edge.a, false) };
            let mut step = self.edge_proof(g, e);
            if !forward {
                step = self.sym(step);
            }
            acc = Some(match acc {
                None => step,
                Some(d) => self.trans(d, step),
            });
            at = next;
        }
        match acc {
            Some(d) => d,
            None => self.refl(&g.terms[from].clone()),
        }
    }

    /// Proof of `terms[a] = terms[b]` for edge `e`.
    fn edge_proof(&mut self, g: &EqGraph, e: usize) -> Derivation {
        let edge = &g.edges[e];
        match &edge.why {
            Why::Hyp(path) => {
                let d = self.project(path);
                let (s, _) = Self::eq_sides(&d);
                if s == g.terms[edge.a] {
                    d
                } else {
                    self.sym(d)
                }
            }
            Why::Cong(bound) => {
                let (Term::App(f, s), Term::App(_, t)) = (&g.terms[edge.a], &g.terms[edge.b]) else {
                    unreachable!()
                };
                let (f, s, t) = (f.clone(), s.clone(), t.clone());
                let mut args = Vec::new();
                for (x, y) in s.iter().zip(&t) {
                    let (a, b) = (g.index[x], g.index[y]);
                    let p = g.path(a, b, *bound).expect("congruence edge is justified");
                    args.push(if p.is_empty() { None } else { Some(self.path_proof(g, a, &p)) });
                }
                self.congruence(&f, &s, &t, args)
            }
        }
    }

    /// Proves `goal`, choosing witnesses for its binders (in prenex order)
    /// from `witnesses`.
    pub fn prove_goal(&mut self, goal: &Formula, witnesses: &mut VecDeque<Term>) -> Result<Derivation> {
        match goal {
            Formula::Atom(a) => self
                .prove_atom(a)
                .ok_or_else(|| Error::Internal(format!("cannot derive `{a}` from `{}`", self.hyp))),
            Formula::And(parts) if parts.is_empty() => Ok(self.top()),
            Formula::And(parts) => {
                let mut ds = Vec::new();
                for p in parts {
                    ds.push(self.prove_goal(p, witnesses)?);
                }
                let cons = Formula::And(ds.iter().map(|d| d.conclusion.consequent.clone()).collect());
                Ok(Derivation::node(self.seq(cons), Rule::AndIntro, ds))
            }
            Formula::Exists(vars, _) => {
                let mut avoid: BTreeSet<String> = self.ctx.vars().iter().cloned().collect();
                for t in witnesses.iter() {
                    t.collect_vars(&mut avoid);
                }
                let goal = if vars.iter().any(|v| avoid.contains(v)) {
                    rename_bound_apart(goal, &avoid)
                } else {
                    goal.clone()
                };
                let Formula::Exists(vars, body) = &goal else { unreachable!() };
                let mut map = identity_map(&self.ctx, &[]);
                for v in vars {
                    let t = witnesses
                        .pop_front()
                        .ok_or_else(|| Error::Internal("ran out of witnesses".into()))?;
                    map.insert(v.clone(), t);
                }
                let inner_ctx = self.ctx.extended(vars);
                let instance = substitute(body, &inner_ctx, &map, &self.ctx)?;
                let d = self.prove_goal(&instance, witnesses)?;
                let intro = exists_intro(&self.ctx, vars, body, map)?;
                Ok(cut(d, intro))
            }
        }
    }
}

/// `body[t̄/ȳ] ⊢_ctx ∃ȳ body`, with `map` sending `ȳ` to `t̄` and `ctx` to itself.
pub fn exists_intro(ctx: &Context, vars: &[String], body: &Formula, map: BTreeMap<String, Term>) -> Result<Derivation> {
    let ex = Formula::Exists(vars.to_vec(), Box::new(body.clone()));
    let id = identity(ctx, &ex);
    let inner_ctx = ctx.extended(vars);
    let up = Derivation::node(Sequent::new(inner_ctx, (*body).clone(), ex), Rule::ExistsUp, vec![id]);
    substitution(up, map, ctx)
}

/// `∃ȳ φ ⊢_ctx ψ` from `φ ⊢_{ctx,ȳ} ψ`.
pub fn exists_elim(vars: &[String], d: Derivation, ctx: &Context) -> Derivation {
    let c = &d.conclusion;
    let seq = Sequent::new(
        ctx.clone(),
        Formula::Exists(vars.to_vec(), Box::new(c.antecedent.clone())),
        c.consequent.clone(),
    );
    Derivation::node(seq, Rule::ExistsDown, vec![d])
}

/// Equality graph over the subterms of the hypotheses and the goal, with
/// congruence edges added in rounds.
struct EqGraph {
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
    edges: Vec<Edge>,
}

impl EqGraph {
    fn new(atoms: &[(Atom, Vec<usize>)], goal: &Atom) -> Self {
        let mut g = EqGraph {
            terms: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
        };
        for (a, _) in atoms {
            for t in a.terms() {
                g.intern(t);
            }
        }
        for t in goal.terms() {
            g.intern(t);
        }
        for (a, path) in atoms {
            if let Atom::Eq(s, t) = a {
                let (i, j) = (g.index[s], g.index[t]);
                if i != j {
                    g.edges.push(Edge {
                        a: i,
                        b: j,
                        why: Why::Hyp(path.clone()),
                    });
                }
            }
        }
        g
    }

    fn intern(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        if let Term::App(_, args) = t {
            for a in args {
                self.intern(a);
            }
        }
        self.terms.push(t.clone());
        self.index.insert(t.clone(), self.terms.len() - 1);
        self.terms.len() - 1
    }

    fn components(&self, bound: usize) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.terms.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in &self.edges[..bound] {
            let (a, b) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..self.terms.len()).map(|i| find(&mut parent, i)).collect()
    }

    fn saturate(&mut self) {
        loop {
            let bound = self.edges.len();
            let old = self.components(bound);
            let mut comp = old.clone();
            let mut added = false;
            for i in 0..self.terms.len() {
                for j in (i + 1)..self.terms.len() {
                    if comp[i] == comp[j] {
                        continue;
                    }
                    let (Term::App(f, s), Term::App(g, t)) = (&self.terms[i], &self.terms[j]) else {
                        continue;
                    };
                    if f != g || s.len() != t.len() {
                        continue;
                    }
                    if s.iter().zip(t).all(|(x, y)| old[self.index[x]] == old[self.index[y]]) {
                        self.edges.push(Edge { a: i, b: j, why: Why::Cong(bound) });
                        let (ci, cj) = (comp[i], comp[j]);
                        for c in comp.iter_mut() {
                            if *c == cj {
                                *c = ci;
                            }
                        }
                        added = true;
                    }
                }
            }
            if !added {
                return;
            }
        }
    }

    /// Shortest path of edge indices below `bound` from `a` to `b`.
    fn path(&self, a: usize, b: usize, bound: usize) -> Option<Vec<usize>> {
        if a == b {
            return Some(Vec::new());
        }
        let mut prev: Vec<Option<usize>> = vec![None; self.terms.len()];
        let mut seen = vec![false; self.terms.len()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for (k, e) in self.edges[..bound].iter().enumerate() {
                let y = if e.a == x {
                    e.b
                } else if e.b == x {
                    e.a
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some(k);
                    if y == b {
                        let mut out = Vec::new();
                        let mut at = b;
                        while at != a {
                            let k = prev[at].unwrap();
                            out.push(k);
                            let e = &self.edges[k];
                            at = if e.a == at { e.b } else { e.a };
                        }
                        out.reverse();
                        return Some(out);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }
}
