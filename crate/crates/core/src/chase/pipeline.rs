use serde::Serialize;

use super::engine::{chase, ChaseOptions, ChaseStatus, ChaseTrace};
use super::witness::{conservativity_witness, Witness};
use crate::error::Result;
use crate::normalize::{
    eliminate_equality, eliminate_functions, normal_theory_of, normalize_theory,
    replace_equality, restore_equality, EqElimination, FnElimination, NormalTheory,
};
use crate::semantics::{
    e_expand, q_quotient, structure_from_graphs, structure_of_graphs, Elem, Structure,
};
use crate::syntax::{Context, Formula, Theory};

/// Translation of a regular theory over any signature into a normal,
/// relational, equality-free one. Stages that have nothing to do are skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pipeline {
    pub source: Theory,
    pub functions: FnElimination,
    pub equality: Option<EqElimination>,
    pub theory: NormalTheory,
}

impl Pipeline {
    pub fn new(source: &Theory) -> Result<Self> {
        source.check()?;
        let functions = eliminate_functions(source);
        let mut rel = functions.theory.clone();
        let equality = if rel.has_equality() {
            let ee = eliminate_equality(&rel)?;
            rel = ee.theory.clone();
            Some(ee)
        } else {
            None
        };
        let theory = normal_theory_of(&rel).unwrap_or_else(|_| normalize_theory(&rel));
        Ok(Pipeline {
            source: source.clone(),
            functions,
            equality,
            theory,
        })
    }

    pub fn eq_symbol(&self) -> Option<&str> {
        self.equality.as_ref().map(|e| e.symbol.as_str())
    }

    /// A formula over the source signature, in the chased theory's language.
    pub fn translate(&self, f: &Formula, ctx: &Context) -> Formula {
        let flat = self.functions.flatten(f, ctx);
        match self.eq_symbol() {
            Some(e) => replace_equality(&flat, e),
            None => flat,
        }
    }

    /// Inverse of [`Pipeline::translate`] up to provable equivalence.
    pub fn back_translate(&self, f: &Formula) -> Formula {
        let f = match self.eq_symbol() {
            Some(e) => restore_equality(f, e),
            None => f.clone(),
        };
        self.functions.unflatten(&f)
    }

    /// A source structure as a structure for the chased theory.
    pub fn translate_structure(&self, a: &Structure) -> Structure {
        let mut s = structure_of_graphs(a, &self.functions);
        if let Some(ee) = &self.equality {
            s = e_expand(&s, &ee.symbol);
        }
        s
    }

    /// Reads a chase result back over the source signature, with the map
    /// from its elements.
    pub fn read_back(&self, b: &Structure) -> Result<(Structure, Vec<Elem>)> {
        let (q, map) = match &self.equality {
            Some(ee) => q_quotient(b, &ee.symbol, &self.functions.theory.signature)?,
            None => (b.clone(), b.elements().collect()),
        };
        let m = if self.functions.graphs.is_empty() {
            q
        } else {
            structure_from_graphs(&q, &self.functions)?
        };
        Ok((m, map))
    }
}

/// The chase of a structure over an arbitrary signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralChase {
    pub pipeline: Pipeline,
    pub trace: ChaseTrace,
    /// The chase read back over the source signature. Absent when the
    /// chase ran out of fuel before reaching a structure that reads back.
    pub model: Option<Structure>,
    /// Image in `model` of each element of the input.
    pub eta: Vec<Elem>,
}

impl GeneralChase {
    pub fn status(&self) -> ChaseStatus {
        self.trace.status
    }

    /// A witness for `φ(ā)` over the source signature. The formula is read
    /// back; the derivation is from the chased theory and concludes the
    /// translated `φ`.
    pub fn witness(&self, phi: &Formula, ctx: &Context, args: &[Elem]) -> Result<Witness> {
        let translated = self.pipeline.translate(phi, ctx);
        let mut w = conservativity_witness(&self.trace, &translated, ctx, args)?;
        w.formula = self.pipeline.back_translate(&w.formula);
        Ok(w)
    }
}

pub fn chase_general(t: &Theory, a: &Structure, opts: ChaseOptions) -> Result<GeneralChase> {
    let pipeline = Pipeline::new(t)?;
    a.check()?;
    let start = pipeline.translate_structure(a);
    let trace = chase(&pipeline.theory, &start, opts)?;
    let read = pipeline.read_back(trace.last());
    let (model, eta) = match (read, trace.status) {
        (Ok((m, map)), _) => (Some(m), a.elements().map(|x| map[x]).collect()),
        (Err(e), ChaseStatus::Saturated(_)) => return Err(e),
        (Err(_), ChaseStatus::FuelExhausted) => (None, Vec::new()),
    };
    Ok(GeneralChase {
        pipeline,
        trace,
        model,
        eta,
    })
}
