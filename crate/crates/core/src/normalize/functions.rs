use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::normal::normalize_sequent;
use crate::syntax::{Atom, Context, FreshNames, Formula, Sequent, Signature, Term, Theory};

/// Result of replacing each `f/n` by an `(n+1)`-ary graph relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FnElimination {
    pub base: Signature,
    /// Function symbol to its graph relation.
    pub graphs: BTreeMap<String, String>,
    pub theory: Theory,
}

impl FnElimination {
    pub fn graph_of(&self, f: &str) -> &str {
        &self.graphs[f]
    }

    /// Flattens a formula in `ctx` with the same naming scheme as the axioms.
    pub fn flatten(&self, f: &Formula, ctx: &Context) -> Formula {
        let mut names = names_for(f, ctx);
        flatten_formula(f, &self.graphs, &mut names)
    }

    /// Reads `F_f(t̄, s)` back as `f(t̄) = s`.
    pub fn unflatten(&self, f: &Formula) -> Formula {
        let inverse: BTreeMap<&str, &str> =
            self.graphs.iter().map(|(k, v)| (v.as_str(), k.as_str())).collect();
        f.map_atoms(&mut |a| match a {
            Atom::Rel(r, args) if inverse.contains_key(r.as_str()) && !args.is_empty() => {
                let (last, init) = args.split_last().unwrap();
                Atom::Eq(Term::App(inverse[r.as_str()].to_string(), init.to_vec()), last.clone())
            }
            other => other.clone(),
        })
    }
}

/// Graph relation names `F_f`, primed on clashes.
pub fn graph_names(sig: &Signature) -> BTreeMap<String, String> {
    let mut taken: BTreeSet<String> = sig.funs.keys().chain(sig.rels.keys()).cloned().collect();
    let mut out = BTreeMap::new();
    for f in sig.funs.keys() {
        let mut name = format!("F_{f}");
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        out.insert(f.clone(), name);
    }
    out
}

fn names_for(f: &Formula, ctx: &Context) -> FreshNames {
    let mut all = BTreeSet::new();
    f.all_vars(&mut all);
    let mut names = FreshNames::avoiding(all);
    names.avoid_all(ctx.vars());
    names
}

fn flatten_term(
    t: &Term,
    graphs: &BTreeMap<String, String>,
    names: &mut FreshNames,
    bound: &mut Vec<String>,
    defs: &mut Vec<Atom>,
) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            let mut flat: Vec<Term> = args
                .iter()
                .map(|a| flatten_term(a, graphs, names, bound, defs))
                .collect();
            let z = names.fresh(&format!("z_{f}_"));
            flat.push(Term::var(&z));
            defs.push(Atom::Rel(graphs[f].clone(), flat));
            bound.push(z.clone());
            Term::Var(z)
        }
    }
}

fn flatten_atom(a: &Atom, graphs: &BTreeMap<String, String>, names: &mut FreshNames) -> Formula {
    let mut bound = Vec::new();
    let mut defs = Vec::new();
    let flat = match a {
        Atom::Eq(l, r) => {
            let l = flatten_term(l, graphs, names, &mut bound, &mut defs);
            let r = flatten_term(r, graphs, names, &mut bound, &mut defs);
            Atom::Eq(l, r)
        }
        Atom::Rel(r, args) => Atom::Rel(
            r.clone(),
            args.iter()
                .map(|t| flatten_term(t, graphs, names, &mut bound, &mut defs))
                .collect(),
        ),
    };
    if bound.is_empty() {
        return Formula::Atom(flat);
    }
    defs.push(flat);
    Formula::exists(bound, Formula::conj(&defs))
}

pub fn flatten_formula(
    f: &Formula,
    graphs: &BTreeMap<String, String>,
    names: &mut FreshNames,
) -> Formula {
    match f {
        Formula::Atom(a) => flatten_atom(a, graphs, names),
        Formula::And(parts) => {
            Formula::And(parts.iter().map(|p| flatten_formula(p, graphs, names)).collect())
        }
        Formula::Exists(vars, body) => {
            Formula::Exists(vars.clone(), Box::new(flatten_formula(body, graphs, names)))
        }
    }
}

/// Totality and single-valuedness of each graph relation.
pub fn graph_axioms(sig: &Signature, graphs: &BTreeMap<String, String>) -> Vec<(String, Sequent)> {
    let mut out = Vec::new();
    for (f, &n) in &sig.funs {
        let g = &graphs[f];
        let xs: Vec<Term> = (1..=n).map(|i| Term::var(&format!("x{i}"))).collect();
        let ctx = Context::from_names((1..=n).map(|i| format!("x{i}")));
        let with = |z: &str| {
            let mut args = xs.clone();
            args.push(Term::var(z));
            Atom::Rel(g.clone(), args)
        };
        out.push((
            format!("{g}_total"),
            Sequent::new(
                ctx.clone(),
                Formula::top(),
                Formula::exists(vec!["z".into()], with("z").into()),
            ),
        ));
        out.push((
            format!("{g}_functional"),
            Sequent::new(
                ctx.extended(["z", "z'"]),
                Formula::conj(&[with("z"), with("z'")]),
                Atom::eq(Term::var("z"), Term::var("z'")).into(),
            ),
        ));
    }
    out
}

/// Normalization of `F_Σ ∪ {flattened axioms}` over the relational signature.
/// A relational theory is returned unchanged.
pub fn eliminate_functions(theory: &Theory) -> FnElimination {
    let sig = &theory.signature;
    if sig.is_relational() {
        return FnElimination {
            base: sig.clone(),
            graphs: BTreeMap::new(),
            theory: theory.clone(),
        };
    }
    let graphs = graph_names(sig);
    let mut rel_sig = Signature {
        funs: BTreeMap::new(),
        rels: sig.rels.clone(),
    };
    for (f, &n) in &sig.funs {
        rel_sig.rels.insert(graphs[f].clone(), n + 1);
    }
    let mut out = Theory::new(rel_sig);
    for (name, seq) in &theory.axioms {
        let mut all = BTreeSet::new();
        seq.antecedent.all_vars(&mut all);
        seq.consequent.all_vars(&mut all);
        let mut names = FreshNames::avoiding(all);
        names.avoid_all(seq.context.vars());
        let flat = Sequent::new(
            seq.context.clone(),
            flatten_formula(&seq.antecedent, &graphs, &mut names),
            flatten_formula(&seq.consequent, &graphs, &mut names),
        );
        out.axioms
            .insert(name.clone(), normalize_sequent(&flat).to_sequent());
    }
    for (name, seq) in graph_axioms(sig, &graphs) {
        let mut name = name;
        while out.axioms.contains_key(&name) {
            name.push('_');
        }
        out.axioms.insert(name, normalize_sequent(&seq).to_sequent());
    }
    FnElimination {
        base: sig.clone(),
        graphs,
        theory: out,
    }
}
