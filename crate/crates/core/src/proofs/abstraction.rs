use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::check::check_derivation;
use super::derivation::{Derivation, Rule};
use crate::error::{Error, Result};
use crate::syntax::{Atom, Context, Formula, Sequent, Term, Theory};

/// A constant to be abstracted, tied to one occurrence. It deliberately has
/// no equality: occurrences are identified only by where they sit, never by
/// comparing symbols.
#[derive(Debug, Clone)]
pub struct DesignatedConstant {
    symbol: String,
}

impl DesignatedConstant {
    pub fn symbol(&self) -> &str {
        &self.symbol
    }
}

/// `d̄` with root `φ̄ ⊢_{x̄,ȳ} ψ̄` and `f : ȳ → C` such that `φ̄[f] = φ`
/// and `ψ̄[f] = ψ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Abstraction {
    pub fresh: Vec<String>,
    /// Fresh variable to the constant it stands for.
    pub assignment: BTreeMap<String, String>,
    pub derivation: Derivation,
}

/// Replaces the constants `c` by variables throughout `d`, so that the
/// result is a derivation in `theory` using the same rules.
pub fn abstract_constants(d: &Derivation, c: &BTreeSet<String>, theory: &Theory) -> Result<Abstraction> {
    if let Some(k) = theory.mentioned_symbols().intersection(c).next() {
        return Err(Error::ConstantInTheory(k.clone()));
    }
    check_derivation(d, theory).map_err(|e| Error::IllFormedDerivation(e.to_string()))?;

    let mut taken = BTreeSet::new();
    d.walk(&mut |n| {
        taken.extend(n.conclusion.context.vars().iter().cloned());
        n.conclusion.antecedent.all_vars(&mut taken);
        n.conclusion.consequent.all_vars(&mut taken);
    });
    let mut prefix = String::from("y@");
    while taken.iter().any(|v| v.starts_with(&prefix)) {
        prefix.push('@');
    }

    let mut labels = Labels {
        c,
        prefix,
        occurrences: BTreeMap::new(),
        order: Vec::new(),
    };
    let mut path = Vec::new();
    let labelled = labels.relabel(d, &mut path)?;

    let mut uf = UnionFind::new(labels.order.len());
    let index: BTreeMap<String, usize> = labels.order.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let mut joiner = Joiner { index: &index, uf: &mut uf };
    joiner.constrain(&labelled)?;

    // One variable per class, numbered from the root sequent outwards.
    let mut class_order: Vec<usize> = Vec::new();
    let mut seen = BTreeSet::new();
    let root = &labelled.conclusion;
    let mut first = Vec::new();
    collect_vars(&root.antecedent, &mut first);
    collect_vars(&root.consequent, &mut first);
    let mut rest = Vec::new();
    labelled.walk(&mut |n| {
        collect_vars(&n.conclusion.antecedent, &mut rest);
        collect_vars(&n.conclusion.consequent, &mut rest);
        if let Rule::Substitution(map) = &n.rule {
            map.values().for_each(|t| collect_term_vars(t, &mut rest));
        }
    });
    for v in first.iter().chain(&rest) {
        if let Some(&i) = index.get(v) {
            let r = uf.find(i);
            if seen.insert(r) {
                class_order.push(r);
            }
        }
    }
    let mut class_name: BTreeMap<usize, String> = BTreeMap::new();
    let mut k = 0;
    for r in &class_order {
        let name = loop {
            k += 1;
            let n = format!("y{k}");
            if !taken.contains(&n) {
                break n;
            }
        };
        class_name.insert(*r, name);
    }
    let rename: BTreeMap<String, Term> = labels
        .order
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Term::var(&class_name[&uf.find(i)])))
        .collect();
    let rank: BTreeMap<String, usize> = class_order
        .iter()
        .enumerate()
        .map(|(i, r)| (class_name[r].clone(), i))
        .collect();

    let renamed = rename_tree(&labelled, &rename);
    let used = used_vars(&renamed, &rank);
    let out = extend_contexts(renamed, &used, used.root.clone(), &rank);

    let fresh: Vec<String> = ordered(&used.root, &rank);
    let mut assignment = BTreeMap::new();
    for (i, v) in labels.order.iter().enumerate() {
        let name = &class_name[&uf.find(i)];
        if fresh.contains(name) && !assignment.contains_key(name) {
            assignment.insert(name.clone(), labels.occurrences[v].symbol().to_string());
        }
    }

    check_derivation(&out, theory).map_err(|e| Error::Internal(format!("abstraction does not check: {e}")))?;
    let back: BTreeMap<String, Term> =
        assignment.iter().map(|(y, k)| (y.clone(), Term::constant(k))).collect();
    let root = &out.conclusion;
    if rename_formula(&root.antecedent, &back) != d.conclusion.antecedent
        || rename_formula(&root.consequent, &back) != d.conclusion.consequent
    {
        return Err(Error::Internal("abstraction does not instantiate to the original".into()));
    }
    Ok(Abstraction {
        fresh,
        assignment,
        derivation: out,
    })
}

fn ordered(set: &BTreeSet<String>, rank: &BTreeMap<String, usize>) -> Vec<String> {
    let mut v: Vec<String> = set.iter().cloned().collect();
    v.sort_by_key(|n| rank[n]);
    v
}

fn collect_term_vars(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => out.push(v.clone()),
        Term::App(_, args) => args.iter().for_each(|a| collect_term_vars(a, out)),
    }
}

/// Variables in order of occurrence, bound ones included.
fn collect_vars(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::Atom(a) => a.terms().into_iter().for_each(|t| collect_term_vars(t, out)),
        Formula::And(parts) => parts.iter().for_each(|p| collect_vars(p, out)),
        Formula::Exists(_, body) => collect_vars(body, out),
    }
}

fn rename_formula(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    f.map_atoms(&mut |a| a.rename(map))
}

/// Gives every designated-constant occurrence its own variable.
struct Labels<'a> {
    c: &'a BTreeSet<String>,
    prefix: String,
    occurrences: BTreeMap<String, DesignatedConstant>,
    order: Vec<String>,
}

impl Labels<'_> {
    fn relabel(&mut self, d: &Derivation, path: &mut Vec<usize>) -> Result<Derivation> {
        let mut premises = Vec::new();
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            premises.push(self.relabel(p, path)?);
            path.pop();
        }
        let tag: Vec<String> = path.iter().map(|i| i.to_string()).collect();
        let stem = format!("{}{}@", self.prefix, tag.join("_"));
        let mut k = 0;
        let mut err = None;
        let mut label = |t: &Term, this: &mut Self| this.term(t, &stem, &mut k, &mut err);
        let ant = d.conclusion.antecedent.map_atoms(&mut |a| map_terms(a, &mut |t| label(t, self)));
        let cons = d.conclusion.consequent.map_atoms(&mut |a| map_terms(a, &mut |t| label(t, self)));
        let rule = match &d.rule {
            Rule::Substitution(map) => {
                Rule::Substitution(map.iter().map(|(x, t)| (x.clone(), label(t, self))).collect())
            }
            r => r.clone(),
        };
        if let Some(e) = err {
            return Err(e);
        }
        Ok(Derivation::node(
            Sequent::new(d.conclusion.context.clone(), ant, cons),
            rule,
            premises,
        ))
    }

    fn term(&mut self, t: &Term, stem: &str, k: &mut usize, err: &mut Option<Error>) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) if self.c.contains(f) => {
                if !args.is_empty() {
                    *err = Some(Error::IllFormedDerivation(format!("`{f}` is applied to arguments")));
                    return t.clone();
                }
                let name = format!("{stem}{k}");
                *k += 1;
                self.occurrences.insert(name.clone(), DesignatedConstant { symbol: f.clone() });
                self.order.push(name.clone());
                Term::Var(name)
            }
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| self.term(a, stem, k, err)).collect(),
            ),
        }
    }
}

fn map_terms(a: &Atom, f: &mut impl FnMut(&Term) -> Term) -> Atom {
    match a {
        Atom::Eq(l, r) => Atom::Eq(f(l), f(r)),
        Atom::Rel(r, args) => Atom::Rel(r.clone(), args.iter().map(f).collect()),
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Generates the equivalence on occurrences: occurrences in corresponding
/// places of formulas that a rule requires to agree are identified.
struct Joiner<'a> {
    index: &'a BTreeMap<String, usize>,
    uf: &'a mut UnionFind,
}

fn mismatch() -> Error {
    Error::IllFormedDerivation("corresponding formulas have different shapes".into())
}

impl Joiner<'_> {
    fn constrain(&mut self, d: &Derivation) -> Result<()> {
        for p in &d.premises {
            self.constrain(p)?;
        }
        let c = &d.conclusion;
        let prem = |i: usize| &d.premises[i].conclusion;
        match &d.rule {
            Rule::Axiom(_) | Rule::TopIntro | Rule::EqRefl => Ok(()),
            Rule::Identity => self.formula(&c.antecedent, &c.consequent),
            Rule::Cut => {
                self.formula(&prem(0).antecedent, &c.antecedent)?;
                self.formula(&prem(0).consequent, &prem(1).antecedent)?;
                self.formula(&prem(1).consequent, &c.consequent)
            }
            Rule::Weakening => {
                self.formula(&prem(0).antecedent, &c.antecedent)?;
                self.formula(&prem(0).consequent, &c.consequent)
            }
            Rule::Substitution(map) => {
                let p = prem(0);
                self.subst(&p.antecedent, &c.antecedent, map, &mut Vec::new())?;
                self.subst(&p.consequent, &c.consequent, map, &mut Vec::new())
            }
            Rule::AndIntro => {
                let Formula::And(parts) = &c.consequent else { return Err(mismatch()) };
                for (i, part) in parts.iter().enumerate() {
                    self.formula(&prem(i).antecedent, &c.antecedent)?;
                    self.formula(&prem(i).consequent, part)?;
                }
                Ok(())
            }
            Rule::AndElim(i) => {
                let Formula::And(parts) = &c.antecedent else { return Err(mismatch()) };
                self.formula(&parts[*i], &c.consequent)
            }
            Rule::EqSubst(pairs) => {
                let Formula::And(parts) = &c.antecedent else { return Err(mismatch()) };
                let map = pairs.iter().map(|(x, y)| (x.clone(), Term::var(y))).collect();
                self.subst(parts.last().ok_or_else(mismatch)?, &c.consequent, &map, &mut Vec::new())
            }
            Rule::ExistsDown => {
                let Formula::Exists(_, body) = &c.antecedent else { return Err(mismatch()) };
                self.formula(&prem(0).antecedent, body)?;
                self.formula(&prem(0).consequent, &c.consequent)
            }
            Rule::ExistsUp => {
                let Formula::Exists(_, body) = &prem(0).antecedent else { return Err(mismatch()) };
                self.formula(&c.antecedent, body)?;
                self.formula(&c.consequent, &prem(0).consequent)
            }
            Rule::Frobenius => {
                let Formula::And(parts) = &c.antecedent else { return Err(mismatch()) };
                let [phi, Formula::Exists(ys, psi)] = parts.as_slice() else { return Err(mismatch()) };
                let expected = Formula::Exists(ys.clone(), Box::new(Formula::And(vec![phi.clone(), (**psi).clone()])));
                self.formula(&expected, &c.consequent)
            }
        }
    }

    fn formula(&mut self, a: &Formula, b: &Formula) -> Result<()> {
        match (a, b) {
            (Formula::Atom(x), Formula::Atom(y)) => {
                let (s, t) = (x.terms(), y.terms());
                if x.is_equality() != y.is_equality() || s.len() != t.len() {
                    return Err(mismatch());
                }
                s.into_iter().zip(t).try_for_each(|(s, t)| self.term(s, t))
            }
            (Formula::And(x), Formula::And(y)) if x.len() == y.len() => {
                x.iter().zip(y).try_for_each(|(x, y)| self.formula(x, y))
            }
            (Formula::Exists(v, x), Formula::Exists(w, y)) if v.len() == w.len() => self.formula(x, y),
            _ => Err(mismatch()),
        }
    }

    fn term(&mut self, a: &Term, b: &Term) -> Result<()> {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => match (self.index.get(x), self.index.get(y)) {
                (Some(&i), Some(&j)) => {
                    self.uf.union(i, j);
                    Ok(())
                }
                (None, None) => Ok(()),
                _ => Err(mismatch()),
            },
            (Term::App(f, s), Term::App(g, t)) if f == g && s.len() == t.len() => {
                s.iter().zip(t).try_for_each(|(s, t)| self.term(s, t))
            }
            _ => Err(mismatch()),
        }
    }

    /// `a` in the premise against `b = a[map]` in the conclusion.
    fn subst(&mut self, a: &Formula, b: &Formula, map: &BTreeMap<String, Term>, bound: &mut Vec<String>) -> Result<()> {
        match (a, b) {
            (Formula::Atom(x), Formula::Atom(y)) => {
                let (s, t) = (x.terms(), y.terms());
                if x.is_equality() != y.is_equality() || s.len() != t.len() {
                    return Err(mismatch());
                }
                s.into_iter().zip(t).try_for_each(|(s, t)| self.subst_term(s, t, map, bound))
            }
            (Formula::And(x), Formula::And(y)) if x.len() == y.len() => {
                x.iter().zip(y).try_for_each(|(x, y)| self.subst(x, y, map, bound))
            }
            (Formula::Exists(v, x), Formula::Exists(w, y)) if v.len() == w.len() => {
                let n = bound.len();
                bound.extend(v.iter().cloned());
                let r = self.subst(x, y, map, bound);
                bound.truncate(n);
                r
            }
            _ => Err(mismatch()),
        }
    }

    fn subst_term(&mut self, a: &Term, b: &Term, map: &BTreeMap<String, Term>, bound: &[String]) -> Result<()> {
        match a {
            Term::Var(x) if self.index.contains_key(x) => self.term(a, b),
            Term::Var(x) if !bound.contains(x) && map.contains_key(x) => self.term(&map[x], b),
            Term::Var(_) => Ok(()),
            Term::App(f, s) => match b {
                Term::App(g, t) if f == g && s.len() == t.len() => {
                    s.iter().zip(t).try_for_each(|(s, t)| self.subst_term(s, t, map, bound))
                }
                _ => Err(mismatch()),
            },
        }
    }
}

fn rename_tree(d: &Derivation, map: &BTreeMap<String, Term>) -> Derivation {
    let c = &d.conclusion;
    let rule = match &d.rule {
        Rule::Substitution(s) => Rule::Substitution(s.iter().map(|(x, t)| (x.clone(), t.rename(map))).collect()),
        r => r.clone(),
    };
    Derivation::node(
        Sequent::new(c.context.clone(), rename_formula(&c.antecedent, map), rename_formula(&c.consequent, map)),
        rule,
        d.premises.iter().map(|p| rename_tree(p, map)).collect(),
    )
}

/// Fresh variables occurring in each subtree.
struct Used {
    root: BTreeSet<String>,
    children: Vec<Used>,
}

fn used_vars(d: &Derivation, fresh: &BTreeMap<String, usize>) -> Used {
    let children: Vec<Used> = d.premises.iter().map(|p| used_vars(p, fresh)).collect();
    let mut vars = Vec::new();
    collect_vars(&d.conclusion.antecedent, &mut vars);
    collect_vars(&d.conclusion.consequent, &mut vars);
    if let Rule::Substitution(map) = &d.rule {
        map.values().for_each(|t| collect_term_vars(t, &mut vars));
    }
    let mut root: BTreeSet<String> = vars.into_iter().filter(|v| fresh.contains_key(v)).collect();
    for ch in &children {
        root.extend(ch.root.iter().cloned());
    }
    Used { root, children }
}

/// Adds `extra` to the context of `d`. Rules whose premises share the
/// conclusion's context pass it on; the others give each premise just
/// what it uses.
fn extend_contexts(d: Derivation, used: &Used, extra: BTreeSet<String>, rank: &BTreeMap<String, usize>) -> Derivation {
    let shares = matches!(d.rule, Rule::Cut | Rule::AndIntro | Rule::ExistsDown | Rule::ExistsUp);
    let mut rule = d.rule;
    let mut premises = Vec::new();
    for (p, u) in d.premises.into_iter().zip(&used.children) {
        let child_extra = if shares { extra.clone() } else { u.root.clone() };
        if let Rule::Substitution(map) = &mut rule {
            for v in &child_extra {
                map.insert(v.clone(), Term::var(v));
            }
        }
        premises.push(extend_contexts(p, u, child_extra, rank));
    }
    let c = d.conclusion;
    let context: Context = c.context.extended(ordered(&extra, rank));
    Derivation::node(Sequent::new(context, c.antecedent, c.consequent), rule, premises)
}
