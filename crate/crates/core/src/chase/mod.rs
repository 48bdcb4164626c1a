//! The chase over normal theories and the witnesses it yields.

mod engine;
mod entails;
mod pipeline;
mod witness;

pub use engine::{
    chase, check_chase_theory, one_step, ChaseElement, ChaseMode, ChaseOptions, ChaseStatus,
    ChaseTrace, Firing,
};
pub use entails::{disjunction_split, entails, Entailment};
pub use pipeline::{chase_general, GeneralChase, Pipeline};
pub use witness::{conservativity_witness, Witness};
