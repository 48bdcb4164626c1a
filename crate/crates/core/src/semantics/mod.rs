//! Finite structures, satisfaction, homomorphisms, representing structures,
//! diagrams and the translations between structures with and without
//! equality and function symbols.

mod constructions;
mod eval;
mod hom;
mod parse;
mod structure;

pub use constructions::{
    diagram, diagram_avoiding, e_expand, expand_with_constants, q_quotient, representing_structure,
    structure_from_graphs, structure_of_graphs, Diagram, RepresentedStructure,
};
pub use eval::{
    counterexample, eval_atom, eval_term, evaluate, evaluate_query, satisfies, solve, solve_all,
    solve_one, validates, validates_query, Env,
};
pub use hom::{
    find_homomorphism, find_isomorphism, hom_extend_search, is_homomorphism, iso_extend_search, isomorphic,
};
pub use parse::parse_structure;
pub use structure::{Elem, Structure};

#[cfg(test)]
mod tests;
