//! Signatures, terms and formulas in context, sequents and theories.
//!
//! Formulas cover the regular fragment (atoms, finite conjunctions and
//! existential quantification). Disjunction only appears at the top of a
//! [`Query`] consequent. `⊤` is the empty conjunction.

mod fresh;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use fresh::FreshNames;
pub use subst::{alpha_eq, rename_bound_apart, substitute, substitute_unchecked, weaken};

/// Function and relation symbols with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub funs: BTreeMap<String, usize>,
    pub rels: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rel(mut self, name: &str, arity: usize) -> Self {
        self.rels.insert(name.to_string(), arity);
        self
    }

    pub fn with_fun(mut self, name: &str, arity: usize) -> Self {
        self.funs.insert(name.to_string(), arity);
        self
    }

    /// No function symbols (and hence no constants).
    pub fn is_relational(&self) -> bool {
        self.funs.is_empty()
    }

    pub fn fun_arity(&self, name: &str) -> Option<usize> {
        self.funs.get(name).copied()
    }

    pub fn rel_arity(&self, name: &str) -> Option<usize> {
        self.rels.get(name).copied()
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.fun_arity(name) == Some(0)
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.funs.contains_key(name) || self.rels.contains_key(name)
    }

    /// Union of two signatures; symbols declared in both must agree on arity.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for (name, &arity) in &other.funs {
            match out.funs.insert(name.clone(), arity) {
                Some(old) if old != arity => {
                    return Err(Error::ArityMismatch {
                        symbol: name.clone(),
                        expected: old,
                        found: arity,
                    })
                }
                _ => {}
            }
        }
        for (name, &arity) in &other.rels {
            match out.rels.insert(name.clone(), arity) {
                Some(old) if old != arity => {
                    return Err(Error::ArityMismatch {
                        symbol: name.clone(),
                        expected: old,
                        found: arity,
                    })
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn check_term(&self, term: &Term, ctx: &Context) -> Result<()> {
        match term {
            Term::Var(v) => {
                if ctx.contains(v) {
                    Ok(())
                } else {
                    Err(Error::UnboundVariable(v.clone()))
                }
            }
            Term::App(f, args) => {
                let arity = self
                    .fun_arity(f)
                    .ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: f.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a, ctx))
            }
        }
    }

    pub fn check_atom(&self, atom: &Atom, ctx: &Context) -> Result<()> {
        match atom {
            Atom::Eq(l, r) => {
                self.check_term(l, ctx)?;
                self.check_term(r, ctx)
            }
            Atom::Rel(r, args) => {
                let arity = self
                    .rel_arity(r)
                    .ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: r.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a, ctx))
            }
        }
    }

    /// Arity and scope check of a formula in `ctx`.
    pub fn check_formula(&self, formula: &Formula, ctx: &Context) -> Result<()> {
        match formula {
            Formula::Atom(a) => self.check_atom(a, ctx),
            Formula::And(parts) => parts.iter().try_for_each(|p| self.check_formula(p, ctx)),
            Formula::Exists(vars, body) => {
                let mut inner = ctx.clone();
                for v in vars {
                    inner.push_shadowing(v);
                }
                self.check_formula(body, &inner)
            }
        }
    }

    pub fn check_sequent(&self, seq: &Sequent) -> Result<()> {
        seq.context.check_distinct()?;
        self.check_formula(&seq.antecedent, &seq.context)?;
        self.check_formula(&seq.consequent, &seq.context)
    }
}

/// A finite list of distinct variables. Equality is set equality.
#[derive(Debug, Clone, Default, Eq, Serialize)]
pub struct Context(pub Vec<String>);

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.as_set() == other.as_set()
    }
}

impl Context {
    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Context(names.into_iter().map(Into::into).collect())
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.0.iter().any(|x| x == v)
    }

    pub fn as_set(&self) -> BTreeSet<&str> {
        self.0.iter().map(String::as_str).collect()
    }

    /// Appends `v` unless already present.
    pub fn push(&mut self, v: &str) {
        if !self.contains(v) {
            self.0.push(v.to_string());
        }
    }

    fn push_shadowing(&mut self, v: &str) {
        self.push(v)
    }

    pub fn extended<I, S>(&self, more: I) -> Context
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out = self.clone();
        for v in more {
            out.push(v.as_ref());
        }
        out
    }

    pub fn is_subcontext_of(&self, other: &Context) -> bool {
        self.0.iter().all(|v| other.contains(v))
    }

    pub fn check_distinct(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in &self.0 {
            if !seen.insert(v) {
                return Err(Error::IllFormedDerivation(format!(
                    "duplicate variable `{v}` in context"
                )));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.0.iter().position(|x| x == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    /// Replaces variables according to `map`; unmapped variables stay.
    pub fn rename(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }

    /// Subterms in post-order (innermost first, left to right).
    pub fn subterms(&self, out: &mut Vec<Term>) {
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.subterms(out));
        }
        out.push(self.clone());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Atom {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
}

impl Atom {
    pub fn eq(l: Term, r: Term) -> Atom {
        Atom::Eq(l, r)
    }

    pub fn rel(r: &str, args: Vec<Term>) -> Atom {
        Atom::Rel(r.to_string(), args)
    }

    /// Relational atom over plain variables.
    pub fn rel_vars(r: &str, vars: &[&str]) -> Atom {
        Atom::Rel(r.to_string(), vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Eq(l, r) => vec![l, r],
            Atom::Rel(_, args) => args.iter().collect(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.terms() {
            t.collect_vars(&mut out);
        }
        out
    }

    pub fn rename(&self, map: &BTreeMap<String, Term>) -> Atom {
        match self {
            Atom::Eq(l, r) => Atom::Eq(l.rename(map), r.rename(map)),
            Atom::Rel(r, args) => Atom::Rel(r.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }

    pub fn is_equality(&self) -> bool {
        matches!(self, Atom::Eq(..))
    }
}

/// Regular formulas. `And(vec![])` is `⊤`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Formula {
    Atom(Atom),
    And(Vec<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

impl Formula {
    pub fn top() -> Formula {
        Formula::And(Vec::new())
    }

    /// Conjunction; a singleton conjunction is its only conjunct.
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    /// Conjunction of atoms (`⊤` when empty).
    pub fn conj(atoms: &[Atom]) -> Formula {
        Formula::and(atoms.iter().cloned().map(Formula::Atom).collect())
    }

    /// Existential quantification; no binders means no quantifier.
    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::And(p) if p.is_empty())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out, &mut Vec::new());
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>, bound: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::And(parts) => parts.iter().for_each(|p| p.collect_free(out, bound)),
            Formula::Exists(vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().cloned());
                body.collect_free(out, bound);
                bound.truncate(n);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => out.extend(a.vars()),
            Formula::And(parts) => parts.iter().for_each(|p| p.all_vars(out)),
            Formula::Exists(vars, body) => {
                out.extend(vars.iter().cloned());
                body.all_vars(out);
            }
        }
    }

    pub fn symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                if let Atom::Rel(r, _) = a {
                    out.insert(r.clone());
                }
                a.terms().into_iter().for_each(|t| t.collect_symbols(out));
            }
            Formula::And(parts) => parts.iter().for_each(|p| p.symbols(out)),
            Formula::Exists(_, body) => body.symbols(out),
        }
    }

    /// All atoms, left to right, ignoring binders.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.push_atoms(&mut out);
        out
    }

    fn push_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::And(parts) => parts.iter().for_each(|p| p.push_atoms(out)),
            Formula::Exists(_, body) => body.push_atoms(out),
        }
    }

    /// Multiset of relation symbols, as a sorted list.
    pub fn relation_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Rel(r, _) => Some(r.clone()),
                Atom::Eq(..) => None,
            })
            .collect();
        out.sort();
        out
    }

    pub fn is_horn(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::And(parts) => parts.iter().all(Formula::is_horn),
            Formula::Exists(..) => false,
        }
    }

    pub fn has_equality(&self) -> bool {
        self.atoms().iter().any(|a| a.is_equality())
    }

    /// The atoms of a Horn formula; `None` if it has a quantifier.
    pub fn horn_atoms(&self) -> Option<Vec<Atom>> {
        if self.is_horn() {
            Some(self.atoms().into_iter().cloned().collect())
        } else {
            None
        }
    }

    /// Maps every atom, keeping the connective structure.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::And(parts) => Formula::And(parts.iter().map(|p| p.map_atoms(f)).collect()),
            Formula::Exists(vars, body) => Formula::Exists(vars.clone(), Box::new(body.map_atoms(f))),
        }
    }
}

/// `antecedent ⊢_context consequent` with a regular consequent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sequent {
    pub context: Context,
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl Sequent {
    pub fn new(context: Context, antecedent: Formula, consequent: Formula) -> Self {
        Sequent {
            context,
            antecedent,
            consequent,
        }
    }

    /// Same context and α-equivalent sides.
    pub fn alpha_eq(&self, other: &Sequent) -> bool {
        self.context == other.context
            && alpha_eq(&self.antecedent, &other.antecedent)
            && alpha_eq(&self.consequent, &other.consequent)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.antecedent.symbols(&mut out);
        self.consequent.symbols(&mut out);
        out
    }

    pub fn has_equality(&self) -> bool {
        self.antecedent.has_equality() || self.consequent.has_equality()
    }
}

/// A sequent whose consequent is a finite disjunction of regular formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    pub context: Context,
    pub antecedent: Formula,
    pub disjuncts: Vec<Formula>,
}

impl Query {
    pub fn single(seq: Sequent) -> Self {
        Query {
            context: seq.context,
            antecedent: seq.antecedent,
            disjuncts: vec![seq.consequent],
        }
    }

    /// The sequent `antecedent ⊢ disjuncts[i]`.
    pub fn branch(&self, i: usize) -> Sequent {
        Sequent::new(
            self.context.clone(),
            self.antecedent.clone(),
            self.disjuncts[i].clone(),
        )
    }

    pub fn as_sequent(&self) -> Option<Sequent> {
        (self.disjuncts.len() == 1).then(|| self.branch(0))
    }
}

/// Named regular axioms over a signature, ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: BTreeMap<String, Sequent>,
}

impl Theory {
    pub fn new(signature: Signature) -> Self {
        Theory {
            signature,
            axioms: BTreeMap::new(),
        }
    }

    pub fn with_axiom(mut self, name: &str, seq: Sequent) -> Self {
        self.axioms.insert(name.to_string(), seq);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn has_equality(&self) -> bool {
        self.axioms.values().any(Sequent::has_equality)
    }

    /// Symbols occurring in some axiom.
    pub fn mentioned_symbols(&self) -> BTreeSet<String> {
        self.axioms.values().flat_map(Sequent::symbols).collect()
    }

    pub fn check(&self) -> Result<()> {
        self.axioms
            .values()
            .try_for_each(|s| self.signature.check_sequent(s))
    }

    /// Union of two theories; axiom names must not clash.
    pub fn union(&self, other: &Theory) -> Result<Theory> {
        let mut out = Theory::new(self.signature.merge(&other.signature)?);
        out.axioms = self.axioms.clone();
        for (name, seq) in &other.axioms {
            if out.axioms.insert(name.clone(), seq.clone()).is_some() {
                return Err(Error::Internal(format!("duplicate axiom name `{name}`")));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Fragment {
    Horn,
    Regular,
    Geometric,
    FirstOrderUnsupported,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Fragment::Horn => "horn",
            Fragment::Regular => "regular",
            Fragment::Geometric => "geometric",
            Fragment::FirstOrderUnsupported => "first-order",
        };
        f.write_str(s)
    }
}

pub fn classify_formula(f: &Formula) -> Fragment {
    if f.is_horn() {
        Fragment::Horn
    } else {
        Fragment::Regular
    }
}

pub fn classify_sequent(s: &Sequent) -> Fragment {
    classify_formula(&s.antecedent).max(classify_formula(&s.consequent))
}

pub fn classify_query(q: &Query) -> Fragment {
    if q.disjuncts.len() != 1 {
        return Fragment::Geometric;
    }
    classify_sequent(&q.branch(0))
}

#[cfg(test)]
mod tests;
