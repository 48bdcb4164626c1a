use std::collections::BTreeMap;

use serde::Serialize;

use crate::syntax::{Sequent, Term};

/// Inference rules of the regular fragment, single-antecedent style.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// A theory axiom, possibly in a larger context.
    Axiom(String),
    /// `φ ⊢ φ`.
    Identity,
    /// From `φ ⊢ χ` and `χ ⊢ ψ` infer `φ ⊢ ψ`.
    Cut,
    /// From `φ ⊢_ȳ ψ` infer `φ[s̄/ȳ] ⊢_x̄ ψ[s̄/ȳ]`; maps every premise
    /// variable to a term in the conclusion context.
    Substitution(BTreeMap<String, Term>),
    /// From `φ ⊢ ψ1`, …, `φ ⊢ ψn` infer `φ ⊢ ψ1 ∧ … ∧ ψn`.
    AndIntro,
    /// `ψ1 ∧ … ∧ ψn ⊢ ψi` (0-based).
    AndElim(usize),
    /// `φ ⊢ ⊤`.
    TopIntro,
    /// `⊤ ⊢ x = x`.
    EqRefl,
    /// `x1 = y1 ∧ … ∧ xn = yn ∧ φ ⊢ φ[ȳ/x̄]` for variables `x̄`, `ȳ`.
    EqSubst(Vec<(String, String)>),
    /// From `φ ⊢_{x̄,ȳ} ψ` infer `∃ȳ φ ⊢_x̄ ψ`.
    ExistsDown,
    /// From `∃ȳ φ ⊢_x̄ ψ` infer `φ ⊢_{x̄,ȳ} ψ`.
    ExistsUp,
    /// `φ ∧ ∃ȳ ψ ⊢ ∃ȳ (φ ∧ ψ)`.
    Frobenius,
    /// From `φ ⊢_ȳ ψ` infer `φ ⊢_x̄ ψ` for `ȳ ⊆ x̄`.
    Weakening,
}

impl Rule {
    /// The rule name used in derivation files.
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Axiom(_) => "axiom",
            Rule::Identity => "identity",
            Rule::Cut => "cut",
            Rule::Substitution(_) => "subst",
            Rule::AndIntro => "and-intro",
            Rule::AndElim(_) => "and-elim",
            Rule::TopIntro => "top-intro",
            Rule::EqRefl => "eq-refl",
            Rule::EqSubst(_) => "eq-subst",
            Rule::ExistsDown => "exists-down",
            Rule::ExistsUp => "exists-up",
            Rule::Frobenius => "frobenius",
            Rule::Weakening => "weaken",
        }
    }
}

/// A proof tree; each node records its conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(conclusion: Sequent, rule: Rule) -> Self {
        Derivation {
            conclusion,
            rule,
            premises: Vec::new(),
        }
    }

    pub fn node(conclusion: Sequent, rule: Rule, premises: Vec<Derivation>) -> Self {
        Derivation {
            conclusion,
            rule,
            premises,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Rule tags with multiplicity, sorted. Axiom names are included.
    pub fn rule_multiset(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |d| {
            out.push(match &d.rule {
                Rule::Axiom(n) => format!("axiom[{n}]"),
                Rule::AndElim(i) => format!("and-elim[{i}]"),
                r => r.tag().to_string(),
            })
        });
        out.sort();
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Derivation)) {
        f(self);
        for p in &self.premises {
            p.walk(f);
        }
    }

    /// Names of the axioms used at leaves, in traversal order, deduplicated.
    pub fn axioms_used(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.walk(&mut |d| {
            if let Rule::Axiom(n) = &d.rule {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        });
        out
    }
}
