use serde::Serialize;

use super::engine::{chase, ChaseOptions};
use super::pipeline::Pipeline;
use super::witness::{conservativity_witness, Witness};
use crate::error::{Error, Result};
use crate::normalize::prenex;
use crate::semantics::{representing_structure, satisfies, Elem, Env, Structure};
use crate::syntax::{Query, Theory};

/// Outcome of deciding `φ ⊢_x̄ ψ₁ ∨ … ∨ ψₙ` by chasing `⟨x̄ | φ⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Entailment {
    /// Disjunct `disjunct` (0-based) holds at the canonical tuple. The
    /// witness formula holds in the structure presented by the antecedent;
    /// its derivation is from the chased theory.
    Provable { disjunct: usize, witness: Witness },
    /// The chase saturated into a model of the theory in which the
    /// antecedent holds at `tuple` and no disjunct does.
    Refuted { countermodel: Structure, tuple: Vec<Elem> },
    /// The chase ran out of fuel before any disjunct held.
    Unknown { levels: usize },
}

impl Entailment {
    pub fn is_provable(&self) -> bool {
        matches!(self, Entailment::Provable { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Entailment::Refuted { .. })
    }
}

pub fn entails(t: &Theory, q: &Query, opts: ChaseOptions) -> Result<Entailment> {
    let sig = &t.signature;
    q.context.check_distinct()?;
    sig.check_formula(&q.antecedent, &q.context)?;
    for d in &q.disjuncts {
        sig.check_formula(d, &q.context)?;
    }
    let pipeline = Pipeline::new(t)?;
    let ctx = &q.context;
    let antecedent = pipeline.translate(&q.antecedent, ctx);
    let (bound, atoms) = prenex(&antecedent, ctx);
    let rep = representing_structure(&atoms, &ctx.extended(&bound), &pipeline.theory.signature)?;
    let tuple: Vec<Elem> = rep.canonical[..ctx.len()].to_vec();
    let env: Env = ctx.vars().iter().cloned().zip(tuple.iter().copied()).collect();
    let disjuncts: Vec<_> = q.disjuncts.iter().map(|d| pipeline.translate(d, ctx)).collect();

    let trace = chase(&pipeline.theory, &rep.structure, opts)?;
    let last = trace.last();
    if let Some(i) = disjuncts.iter().position(|d| satisfies(last, d, &env)) {
        let mut witness = conservativity_witness(&trace, &disjuncts[i], ctx, &tuple)?;
        witness.formula = pipeline.back_translate(&witness.formula);
        return Ok(Entailment::Provable { disjunct: i, witness });
    }
    if !trace.is_saturated() {
        return Ok(Entailment::Unknown {
            levels: trace.levels.len() - 1,
        });
    }
    let (countermodel, map) = pipeline.read_back(last)?;
    Ok(Entailment::Refuted {
        countermodel,
        tuple: tuple.iter().map(|&e| map[e]).collect(),
    })
}

/// [`entails`], with the chosen disjunct re-checked on its own.
pub fn disjunction_split(t: &Theory, q: &Query, opts: ChaseOptions) -> Result<Entailment> {
    let out = entails(t, q, opts)?;
    if let Entailment::Provable { disjunct, .. } = &out {
        let single = Query::single(q.branch(*disjunct));
        if !entails(t, &single, opts)?.is_provable() {
            return Err(Error::Internal(format!(
                "disjunct {} alone is not provable",
                disjunct + 1
            )));
        }
    }
    Ok(out)
}
