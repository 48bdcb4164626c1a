use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("symbol `{symbol}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("context [{from}] is not contained in [{to}]")]
    NotASubcontext { from: String, to: String },
    #[error("formula is not regular: {0}")]
    NotRegular(String),
    #[error("formula is not Horn: {0}")]
    NotHorn(String),
    #[error("signature is not relational: function symbol `{0}`")]
    NotRelational(String),
    #[error("relation `{0}` is not the graph of a total function")]
    NotFunctional(String),
    #[error("structure is not a model of the equality axioms: {0}")]
    NotAnEStructure(String),
    #[error("malformed structure: {0}")]
    MalformedStructure(String),
    #[error("chase precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("formula does not hold at any recorded chase level")]
    NotSatisfiedAtAnyLevel,
    #[error("formula only holds beyond the recorded chase levels")]
    TraceExhausted,
    #[error("constant `{0}` occurs in the theory")]
    ConstantInTheory(String),
    #[error("ill-formed derivation: {0}")]
    IllFormedDerivation(String),
    #[error("formula is not satisfied at the given tuple")]
    NotSatisfied,
    #[error("derivation check failed: {0}")]
    CheckFailed(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
