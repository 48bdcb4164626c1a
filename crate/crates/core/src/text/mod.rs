//! Text formats: lexer, parsers and printers for formulas, sequents and
//! theories. Structures and derivations reuse the [`Cursor`] defined here.

mod lexer;
mod parser;
mod printer;

pub use lexer::{is_ident_char, Tok};
pub use parser::{
    free_vars_in_order, parse_formula, parse_formula_in_context, parse_query, parse_sequent,
    parse_theory, Cursor, FormulaParser,
};
pub(crate) use parser::parse_query_at;
pub use printer::show_assignment;

#[cfg(test)]
mod tests;
