use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::syntax::{Atom, Term};

/// Congruence closure of a finite set of Horn atoms: the equalities and
/// relation facts derivable from them over the empty theory, on the
/// subterms occurring in the atoms and any extra terms registered up front.
#[derive(Debug, Clone)]
pub struct HornClosure {
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
    parent: Vec<usize>,
    facts: BTreeSet<(String, Vec<usize>)>,
}

impl HornClosure {
    pub fn new<'a>(atoms: &[Atom], extra: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut c = HornClosure {
            terms: Vec::new(),
            index: HashMap::new(),
            parent: Vec::new(),
            facts: BTreeSet::new(),
        };
        for a in atoms {
            for t in a.terms() {
                c.intern(t);
            }
        }
        for t in extra {
            c.intern(t);
        }
        for a in atoms {
            if let Atom::Eq(l, r) = a {
                let (i, j) = (c.index[l], c.index[r]);
                c.union(i, j);
            }
        }
        c.close();
        for a in atoms {
            if let Atom::Rel(r, args) = a {
                let ids = args.iter().map(|t| c.find(c.index[t])).collect();
                c.facts.insert((r.clone(), ids));
            }
        }
        c
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
        let i = self.terms.len();
        self.terms.push(t.clone());
        self.parent.push(i);
        self.index.insert(t.clone(), i);
        i
    }

    pub fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    /// Unions two classes; the smaller id becomes the representative.
    fn union(&mut self, i: usize, j: usize) -> bool {
        let (a, b) = (self.find(i), self.find(j));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }

    fn close(&mut self) {
        loop {
            let mut table: HashMap<(String, Vec<usize>), usize> = HashMap::new();
            let mut merges = Vec::new();
            for (i, t) in self.terms.iter().enumerate() {
                if let Term::App(f, args) = t {
                    let key = (
                        f.clone(),
                        args.iter().map(|a| self.find(self.index[a])).collect(),
                    );
                    match table.get(&key) {
                        Some(&j) => merges.push((i, j)),
                        None => {
                            table.insert(key, i);
                        }
                    }
                }
            }
            let mut changed = false;
            for (i, j) in merges {
                changed |= self.union(i, j);
            }
            if !changed {
                return;
            }
        }
    }

    pub fn id(&self, t: &Term) -> Option<usize> {
        self.index.get(t).map(|&i| self.find(i))
    }

    pub fn equal(&self, a: &Term, b: &Term) -> bool {
        a == b || matches!((self.id(a), self.id(b)), (Some(x), Some(y)) if x == y)
    }

    /// Whether `atom` is derivable. Terms outside the registered universe are
    /// only equal to themselves.
    pub fn holds(&self, atom: &Atom) -> bool {
        match atom {
            Atom::Eq(l, r) => self.equal(l, r),
            Atom::Rel(r, args) => {
                let ids: Option<Vec<usize>> = args.iter().map(|t| self.id(t)).collect();
                match ids {
                    Some(ids) => self.facts.contains(&(r.clone(), ids)),
                    None => false,
                }
            }
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Relation facts over class representatives.
    pub fn facts(&self) -> &BTreeSet<(String, Vec<usize>)> {
        &self.facts
    }

    /// Classes keyed by representative id, members in interning order.
    pub fn classes(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.terms.len() {
            out.entry(self.find(i)).or_default().push(i);
        }
        out
    }
}

/// `Γ ⊢ α` over the empty theory, for Horn `Γ`.
pub fn horn_entails(gamma: &[Atom], alpha: &Atom) -> bool {
    if let Atom::Eq(l, r) = alpha {
        if l == r {
            return true;
        }
    }
    HornClosure::new(gamma, alpha.terms()).holds(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn symmetric_instance_via_equality() {
        let gamma = [Atom::rel("R", vec![v("x"), v("y")]), Atom::eq(v("x"), v("y"))];
        assert!(horn_entails(&gamma, &Atom::rel("R", vec![v("y"), v("x")])));
    }

    #[test]
    fn no_rule_introduces_new_relations() {
        let gamma = [Atom::rel("P", vec![v("x")])];
        assert!(!horn_entails(&gamma, &Atom::rel("Q", vec![v("x")])));
    }

    #[test]
    fn reflexivity_from_nothing() {
        assert!(horn_entails(&[], &Atom::eq(v("x"), v("x"))));
    }

    #[test]
    fn congruence_on_function_terms() {
        let fx = Term::app("f", vec![v("x")]);
        let fy = Term::app("f", vec![v("y")]);
        let gamma = [Atom::eq(v("x"), v("y")), Atom::rel("P", vec![fx])];
        assert!(horn_entails(&gamma, &Atom::rel("P", vec![fy.clone()])));
        assert!(!horn_entails(&[Atom::rel("P", vec![fy])], &Atom::eq(v("x"), v("y"))));
    }
}
