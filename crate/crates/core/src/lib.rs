//! Chase construction, conservativity witnesses and derivation abstraction
//! for regular (positive-primitive) theories.

pub mod error;
pub mod syntax;
pub mod text;
pub mod normalize;
pub mod semantics;
pub mod proofs;
pub mod chase;
pub mod cli;

pub use error::{Error, Result};
