use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::closure::horn_entails;
use crate::error::{Error, Result};
use crate::syntax::{Atom, Context, FreshNames, Formula, Sequent, Signature, Term, Theory};

/// `φ ⊢_x̄ ∃ȳ ψ` with `φ`, `ψ` Horn and `ψ ⊢ φ` derivable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalSequent {
    pub context: Context,
    pub antecedent: Vec<Atom>,
    pub bound: Vec<String>,
    pub matrix: Vec<Atom>,
}

impl NormalSequent {
    pub fn to_sequent(&self) -> Sequent {
        Sequent::new(
            self.context.clone(),
            Formula::conj(&self.antecedent),
            Formula::exists(self.bound.clone(), Formula::conj(&self.matrix)),
        )
    }

    /// The normality side condition `ψ ⊢^∅ φ`.
    pub fn side_condition_holds(&self) -> bool {
        self.antecedent.iter().all(|a| horn_entails(&self.matrix, a))
    }

    pub fn has_equality(&self) -> bool {
        self.antecedent.iter().chain(&self.matrix).any(Atom::is_equality)
    }

    pub fn is_datalog(&self) -> bool {
        self.bound.is_empty()
    }
}

/// Prenex form `∃ȳ. α1 ∧ … ∧ αn` of a regular formula. Binder names are kept
/// unless they clash with `avoid` or an earlier binder; every bound variable
/// occurs in the matrix, padded with `y = y` where needed.
pub fn prenex(formula: &Formula, avoid: &Context) -> (Vec<String>, Vec<Atom>) {
    let mut names = FreshNames::avoiding(avoid.vars().iter().cloned());
    names.avoid_all(formula.free_vars());
    let mut bound = Vec::new();
    let mut matrix = Vec::new();
    prenex_rec(formula, &BTreeMap::new(), &mut names, &mut bound, &mut matrix);
    for y in &bound {
        let used = matrix.iter().any(|a: &Atom| a.vars().contains(y));
        if !used {
            matrix.push(Atom::eq(Term::var(y), Term::var(y)));
        }
    }
    (bound, matrix)
}

fn prenex_rec(
    f: &Formula,
    map: &BTreeMap<String, Term>,
    names: &mut FreshNames,
    bound: &mut Vec<String>,
    matrix: &mut Vec<Atom>,
) {
    match f {
        Formula::Atom(a) => matrix.push(a.rename(map)),
        Formula::And(parts) => {
            for p in parts {
                prenex_rec(p, map, names, bound, matrix);
            }
        }
        Formula::Exists(vars, body) => {
            let mut inner = map.clone();
            for v in vars {
                let name = names.prime(v);
                inner.insert(v.clone(), Term::Var(name.clone()));
                bound.push(name);
            }
            prenex_rec(body, &inner, names, bound, matrix);
        }
    }
}

/// Hoists antecedent quantifiers into the context and conjoins the
/// antecedent into the consequent matrix.
pub fn normalize_sequent(seq: &Sequent) -> NormalSequent {
    let (hoisted, antecedent) = prenex(&seq.antecedent, &seq.context);
    let context = seq.context.extended(&hoisted);
    let (bound, consequent) = prenex(&seq.consequent, &context);
    let mut matrix = antecedent.clone();
    for a in consequent {
        if !matrix.contains(&a) {
            matrix.push(a);
        }
    }
    NormalSequent {
        context,
        antecedent,
        bound,
        matrix,
    }
}

/// Checks that `seq` is literally of normal shape.
pub fn as_normal(seq: &Sequent) -> Result<NormalSequent> {
    let antecedent = seq
        .antecedent
        .horn_atoms()
        .ok_or_else(|| Error::NotHorn(seq.antecedent.to_string()))?;
    let (bound, body) = match &seq.consequent {
        Formula::Exists(vars, body) => (vars.clone(), body.as_ref()),
        other => (Vec::new(), other),
    };
    let matrix = body
        .horn_atoms()
        .ok_or_else(|| Error::NotHorn(body.to_string()))?;
    let n = NormalSequent {
        context: seq.context.clone(),
        antecedent,
        bound,
        matrix,
    };
    if !n.side_condition_holds() {
        return Err(Error::NotRegular(format!(
            "consequent of `{seq}` does not entail its antecedent"
        )));
    }
    Ok(n)
}

/// A theory whose axioms are all normal sequents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalTheory {
    pub signature: Signature,
    pub axioms: BTreeMap<String, NormalSequent>,
}

impl NormalTheory {
    pub fn to_theory(&self) -> Theory {
        Theory {
            signature: self.signature.clone(),
            axioms: self
                .axioms
                .iter()
                .map(|(k, v)| (k.clone(), v.to_sequent()))
                .collect(),
        }
    }

    pub fn has_equality(&self) -> bool {
        self.axioms.values().any(NormalSequent::has_equality)
    }

    /// Relation symbols mentioned by some axiom.
    pub fn relations_used(&self) -> BTreeSet<String> {
        self.to_theory().mentioned_symbols()
    }
}

pub fn normalize_theory(theory: &Theory) -> NormalTheory {
    NormalTheory {
        signature: theory.signature.clone(),
        axioms: theory
            .axioms
            .iter()
            .map(|(k, v)| (k.clone(), normalize_sequent(v)))
            .collect(),
    }
}

/// Reads a theory whose axioms already have normal shape, without changing them.
pub fn normal_theory_of(theory: &Theory) -> Result<NormalTheory> {
    let mut axioms = BTreeMap::new();
    for (k, v) in &theory.axioms {
        axioms.insert(k.clone(), as_normal(v)?);
    }
    Ok(NormalTheory {
        signature: theory.signature.clone(),
        axioms,
    })
}
