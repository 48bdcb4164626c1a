//! Normal forms and theory translations: prenexing, normal sequents, Horn
//! closure, elimination of equality and of function symbols.

mod closure;
mod equality;
mod functions;
mod normal;

pub use closure::{horn_entails, HornClosure};
pub use equality::{
    eliminate_equality, eq_axioms, equality_symbol, replace_equality, restore_equality,
    EqElimination,
};
pub use functions::{
    eliminate_functions, flatten_formula, graph_axioms, graph_names, FnElimination,
};
pub use normal::{
    as_normal, normal_theory_of, normalize_sequent, normalize_theory, prenex, NormalSequent,
    NormalTheory,
};

#[cfg(test)]
mod tests;
