//! Derivations in the regular fragment: the proof checker, derivation
//! builders, the derivation file format, abstraction of constants and
//! derivations from diagrams.

mod abstraction;
mod check;
mod derivation;
mod diagram;
mod format;
pub mod tactics;

pub use abstraction::{abstract_constants, Abstraction, DesignatedConstant};
pub use check::{check_derivation, CheckFailure};
pub use derivation::{Derivation, Rule};
pub use diagram::{derive_from_diagram, eliminate_diagram_constants, DiagramElimination, DiagramProof};
pub use format::{derivation_signature, parse_derivation, print_derivation};

#[cfg(test)]
mod tests;
