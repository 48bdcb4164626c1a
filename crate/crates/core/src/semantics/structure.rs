use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display, Formatter};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::syntax::Signature;

/// Carrier elements are indices `0..size`.
pub type Elem = usize;

/// A finite structure: named elements, relation tables and total function tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub signature: Signature,
    names: Vec<String>,
    rels: BTreeMap<String, BTreeSet<Vec<Elem>>>,
    funs: BTreeMap<String, BTreeMap<Vec<Elem>, Elem>>,
}

impl Structure {
    /// The empty structure; every symbol of `signature` gets an empty table.
    pub fn new(signature: Signature) -> Self {
        let rels = signature.rels.keys().map(|r| (r.clone(), BTreeSet::new())).collect();
        let funs = signature.funs.keys().map(|f| (f.clone(), BTreeMap::new())).collect();
        Structure {
            signature,
            names: Vec::new(),
            rels,
            funs,
        }
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.names.len()
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    /// Adds an element; the name is primed until unique.
    pub fn add_element(&mut self, name: &str) -> Elem {
        let mut name = name.to_string();
        while self.names.contains(&name) {
            name.push('\'');
        }
        self.names.push(name);
        self.names.len() - 1
    }

    pub fn rename_element(&mut self, e: Elem, name: &str) {
        self.names[e] = name.to_string();
    }

    /// Extends the signature (with empty tables) by the symbols of `sig`.
    pub fn extend_signature(&mut self, sig: &Signature) -> Result<()> {
        self.signature = self.signature.merge(sig)?;
        for r in sig.rels.keys() {
            self.rels.entry(r.clone()).or_default();
        }
        for f in sig.funs.keys() {
            self.funs.entry(f.clone()).or_default();
        }
        Ok(())
    }

    /// Inserts a tuple; returns whether it is new.
    pub fn add_tuple(&mut self, rel: &str, tuple: Vec<Elem>) -> bool {
        debug_assert_eq!(self.signature.rel_arity(rel), Some(tuple.len()), "{rel}");
        self.rels.entry(rel.to_string()).or_default().insert(tuple)
    }

    pub fn holds(&self, rel: &str, tuple: &[Elem]) -> bool {
        self.rels.get(rel).is_some_and(|t| t.contains(tuple))
    }

    pub fn rel(&self, rel: &str) -> &BTreeSet<Vec<Elem>> {
        static EMPTY: BTreeSet<Vec<Elem>> = BTreeSet::new();
        self.rels.get(rel).unwrap_or(&EMPTY)
    }

    pub fn rels(&self) -> &BTreeMap<String, BTreeSet<Vec<Elem>>> {
        &self.rels
    }

    pub fn set_fun(&mut self, f: &str, args: Vec<Elem>, value: Elem) {
        self.funs.entry(f.to_string()).or_default().insert(args, value);
    }

    pub fn fun_value(&self, f: &str, args: &[Elem]) -> Option<Elem> {
        self.funs.get(f).and_then(|t| t.get(args).copied())
    }

    pub fn fun(&self, f: &str) -> &BTreeMap<Vec<Elem>, Elem> {
        static EMPTY: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
        self.funs.get(f).unwrap_or(&EMPTY)
    }

    pub fn funs(&self) -> &BTreeMap<String, BTreeMap<Vec<Elem>, Elem>> {
        &self.funs
    }

    pub fn tuple_count(&self) -> usize {
        self.rels.values().map(BTreeSet::len).sum()
    }

    /// Every tuple in range and of the right arity; functions total.
    pub fn check(&self) -> Result<()> {
        let n = self.size();
        for (r, tuples) in &self.rels {
            let arity = self
                .signature
                .rel_arity(r)
                .ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
            for t in tuples {
                if t.len() != arity || t.iter().any(|&e| e >= n) {
                    return Err(Error::MalformedStructure(format!("bad tuple in `{r}`")));
                }
            }
        }
        for (f, &arity) in &self.signature.funs {
            let table = self.fun(f);
            let expected = n.checked_pow(arity as u32).unwrap_or(usize::MAX);
            if table.len() != expected
                || table
                    .iter()
                    .any(|(k, &v)| k.len() != arity || v >= n || k.iter().any(|&e| e >= n))
            {
                return Err(Error::MalformedStructure(format!(
                    "function `{f}` is not total on the carrier"
                )));
            }
        }
        Ok(())
    }

    /// All tuples of length `k` over the carrier, in lexicographic order.
    pub fn tuples(&self, k: usize) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t| {
                    self.elements().map(move |e| {
                        let mut t = t.clone();
                        t.push(e);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

fn write_tuple(f: &mut Formatter<'_>, s: &Structure, t: &[Elem]) -> fmt::Result {
    f.write_str("(")?;
    for (i, &e) in t.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(s.name(e))?;
    }
    f.write_str(")")
}

impl Display for Structure {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "carrier:")?;
        for n in &self.names {
            write!(f, " {n}")?;
        }
        writeln!(f)?;
        for (r, &arity) in &self.signature.rels {
            write!(f, "rel {r}/{arity}:")?;
            for t in self.rel(r) {
                f.write_str(" ")?;
                write_tuple(f, self, t)?;
            }
            writeln!(f)?;
        }
        for (g, &arity) in &self.signature.funs {
            write!(f, "fun {g}/{arity}:")?;
            for (args, &v) in self.fun(g) {
                f.write_str(" ")?;
                if arity == 1 {
                    f.write_str(self.name(args[0]))?;
                } else {
                    write_tuple(f, self, args)?;
                }
                write!(f, "->{}", self.name(v))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
