use std::collections::BTreeMap;

use serde::Serialize;

use super::structure::{Elem, Structure};
use crate::error::{Error, Result};
use crate::normalize::{FnElimination, HornClosure};
use crate::syntax::{Atom, Context, Formula, Sequent, Signature, Term, Theory};

/// `⟨x̄ | φ⟩` with its canonical tuple `[x̄]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentedStructure {
    pub structure: Structure,
    pub context: Context,
    /// Element of each context variable, in context order.
    pub canonical: Vec<Elem>,
}

impl RepresentedStructure {
    pub fn env(&self) -> BTreeMap<String, Elem> {
        self.context
            .vars()
            .iter()
            .cloned()
            .zip(self.canonical.iter().copied())
            .collect()
    }
}

/// The structure of context variables modulo derivable equalities, with
/// exactly the derivable relation facts. Elements are named after the first
/// variable of their class.
pub fn representing_structure(
    atoms: &[Atom],
    ctx: &Context,
    sig: &Signature,
) -> Result<RepresentedStructure> {
    if let Some(f) = sig.funs.keys().next() {
        return Err(Error::NotRelational(f.clone()));
    }
    for a in atoms {
        sig.check_atom(a, ctx)?;
    }
    let vars: Vec<Term> = ctx.vars().iter().map(|v| Term::var(v)).collect();
    let closure = HornClosure::new(atoms, vars.iter());
    let mut s = Structure::new(sig.clone());
    let mut elem_of_class: BTreeMap<usize, Elem> = BTreeMap::new();
    let mut canonical = Vec::new();
    for (v, t) in ctx.vars().iter().zip(&vars) {
        let class = closure.id(t).unwrap();
        let e = *elem_of_class
            .entry(class)
            .or_insert_with(|| s.add_element(v));
        canonical.push(e);
    }
    for (r, ids) in closure.facts() {
        let tuple: Vec<Elem> = ids.iter().map(|c| elem_of_class[c]).collect();
        s.add_tuple(r, tuple);
    }
    Ok(RepresentedStructure {
        structure: s,
        context: ctx.clone(),
        canonical,
    })
}

/// `Diag(A)`: one constant per element and one axiom `⊤ ⊢ α(ā)` per fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagram {
    pub signature: Signature,
    pub theory: Theory,
    /// Constant naming each element, indexed by element.
    pub constants: Vec<String>,
}

impl Diagram {
    pub fn constant(&self, e: Elem) -> Term {
        Term::constant(&self.constants[e])
    }

    pub fn element_of(&self, constant: &str) -> Option<Elem> {
        self.constants.iter().position(|c| c == constant)
    }

    pub fn is_diagram_axiom(&self, name: &str) -> bool {
        self.theory.axioms.contains_key(name)
    }
}

fn unique(mut name: String, taken: &impl Fn(&str) -> bool) -> String {
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// The diagram of `a`. Axiom names avoid those of `avoid`.
pub fn diagram_avoiding(a: &Structure, avoid: &Theory) -> Diagram {
    let mut sig = a.signature.merge(&avoid.signature).unwrap_or_else(|_| a.signature.clone());
    let base = a.signature.clone();
    let mut constants = Vec::new();
    for e in a.elements() {
        let c = unique(format!("c_{}", a.name(e)), &|n: &str| sig.has_symbol(n));
        sig.funs.insert(c.clone(), 0);
        constants.push(c);
    }
    let mut full = base.clone();
    for c in &constants {
        full.funs.insert(c.clone(), 0);
    }
    let mut theory = Theory::new(full.clone());
    let k = |e: Elem| Term::constant(&constants[e]);
    let add = |theory: &mut Theory, base_name: String, atom: Atom| {
        let name = unique(base_name, &|n: &str| {
            theory.axioms.contains_key(n) || avoid.axioms.contains_key(n)
        });
        theory
            .axioms
            .insert(name, Sequent::new(Context::empty(), Formula::top(), atom.into()));
    };
    for (r, tuples) in a.rels() {
        for t in tuples {
            let mut name = format!("diag_{r}");
            for &e in t {
                name.push('_');
                name.push_str(a.name(e));
            }
            add(&mut theory, name, Atom::Rel(r.clone(), t.iter().map(|&e| k(e)).collect()));
        }
    }
    for (f, table) in a.funs() {
        for (args, &v) in table {
            let mut name = format!("diag_{f}");
            for &e in args {
                name.push('_');
                name.push_str(a.name(e));
            }
            let lhs = Term::App(f.clone(), args.iter().map(|&e| k(e)).collect());
            add(&mut theory, name, Atom::Eq(lhs, k(v)));
        }
    }
    Diagram {
        signature: full,
        theory,
        constants,
    }
}

pub fn diagram(a: &Structure) -> Diagram {
    diagram_avoiding(a, &Theory::default())
}

/// `A` expanded by interpreting each diagram constant as its element.
pub fn expand_with_constants(a: &Structure, d: &Diagram) -> Structure {
    let mut s = a.clone();
    let mut sig = Signature::new();
    for c in &d.constants {
        sig.funs.insert(c.clone(), 0);
    }
    s.extend_signature(&sig).expect("fresh constants");
    for (e, c) in d.constants.iter().enumerate() {
        s.set_fun(c, Vec::new(), e);
    }
    s
}

/// `e(A)`: `A` with the binary predicate `e` interpreted as equality.
pub fn e_expand(a: &Structure, e: &str) -> Structure {
    let mut s = a.clone();
    s.extend_signature(&Signature::new().with_rel(e, 2))
        .expect("equality predicate is fresh");
    for x in a.elements() {
        s.add_tuple(e, vec![x, x]);
    }
    s
}

/// `q(B)`: the quotient of `B` by the equivalence `e`, over `base`. Returns
/// the quotient and the quotient map; the least element of each class
/// represents it.
pub fn q_quotient(b: &Structure, e: &str, base: &Signature) -> Result<(Structure, Vec<Elem>)> {
    let eq = b.rel(e);
    for x in b.elements() {
        if !eq.contains(&vec![x, x]) {
            return Err(Error::NotAnEStructure(format!("`{e}` is not reflexive at {}", b.name(x))));
        }
    }
    for t in eq {
        if !eq.contains(&vec![t[1], t[0]]) {
            return Err(Error::NotAnEStructure(format!("`{e}` is not symmetric")));
        }
    }
    let mut class_of: Vec<Elem> = b.elements().collect();
    for x in b.elements() {
        class_of[x] = b.elements().find(|&y| eq.contains(&vec![x, y])).unwrap();
    }
    for t in eq {
        if class_of[t[0]] != class_of[t[1]] {
            return Err(Error::NotAnEStructure(format!("`{e}` is not transitive")));
        }
    }
    let mut q = Structure::new(base.clone());
    let mut elem_of: BTreeMap<Elem, Elem> = BTreeMap::new();
    for x in b.elements() {
        if class_of[x] == x {
            elem_of.insert(x, q.add_element(b.name(x)));
        }
    }
    let map: Vec<Elem> = b.elements().map(|x| elem_of[&class_of[x]]).collect();
    for (r, tuples) in b.rels() {
        if r == e {
            continue;
        }
        if base.rel_arity(r).is_none() {
            return Err(Error::UnknownSymbol(r.clone()));
        }
        for t in tuples {
            q.add_tuple(r, t.iter().map(|&x| map[x]).collect());
        }
    }
    for (r, tuples) in b.rels() {
        if r == e {
            continue;
        }
        for t in tuples {
            for i in 0..t.len() {
                for y in b.elements().filter(|&y| class_of[y] == class_of[t[i]]) {
                    let mut moved = t.clone();
                    moved[i] = y;
                    if !tuples.contains(&moved) {
                        return Err(Error::NotAnEStructure(format!("`{r}` does not respect `{e}`")));
                    }
                }
            }
        }
    }
    for (f, table) in b.funs() {
        for (args, &v) in table {
            let key: Vec<Elem> = args.iter().map(|&x| map[x]).collect();
            match q.fun_value(f, &key) {
                Some(w) if w != map[v] => {
                    return Err(Error::NotAnEStructure(format!("`{f}` does not respect `{e}`")))
                }
                _ => q.set_fun(f, key, map[v]),
            }
        }
    }
    Ok((q, map))
}

/// Replaces each function table by its graph relation.
pub fn structure_of_graphs(a: &Structure, fe: &FnElimination) -> Structure {
    let mut sig = Signature {
        funs: BTreeMap::new(),
        rels: a.signature.rels.clone(),
    };
    for (f, &n) in &a.signature.funs {
        sig.rels.insert(fe.graph_of(f).to_string(), n + 1);
    }
    sig.rels.extend(fe.theory.signature.rels.clone());
    let mut s = Structure::new(sig);
    for x in a.elements() {
        s.add_element(a.name(x));
    }
    for (r, tuples) in a.rels() {
        for t in tuples {
            s.add_tuple(r, t.clone());
        }
    }
    for (f, table) in a.funs() {
        for (args, &v) in table {
            let mut t = args.clone();
            t.push(v);
            s.add_tuple(fe.graph_of(f), t);
        }
    }
    s
}

/// Inverse of [`structure_of_graphs`]; each graph relation must be total and
/// single-valued.
pub fn structure_from_graphs(b: &Structure, fe: &FnElimination) -> Result<Structure> {
    let mut s = Structure::new(fe.base.clone());
    for x in b.elements() {
        s.add_element(b.name(x));
    }
    let graph_rels: std::collections::BTreeSet<&str> =
        fe.graphs.values().map(String::as_str).collect();
    for (r, tuples) in b.rels() {
        if graph_rels.contains(r.as_str()) {
            continue;
        }
        for t in tuples {
            s.add_tuple(r, t.clone());
        }
    }
    for (f, g) in &fe.graphs {
        let n = fe.base.funs[f];
        for t in b.rel(g) {
            let (v, args) = t.split_last().unwrap();
            match s.fun_value(f, args) {
                Some(w) if w != *v => return Err(Error::NotFunctional(g.clone())),
                _ => s.set_fun(f, args.to_vec(), *v),
            }
        }
        if s.fun(f).len() != b.size().pow(n as u32) {
            return Err(Error::NotFunctional(g.clone()));
        }
    }
    Ok(s)
}
