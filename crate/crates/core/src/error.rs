use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{name}` has arity {expected}, used with {found} argument(s)")]
    ArityMismatch { name: String, expected: u8, found: usize },
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("invalid weight: {0}")]
    Weight(String),
    #[error("invalid cardinality constraint: {0}")]
    Constraint(String),
    #[error("unsupported fragment: {0}")]
    Unsupported(String),
    #[error("no numeric value for weight symbol {0}")]
    MissingWeight(String),
    #[error("brute-force enumeration needs {atoms} ground atoms, cap is {cap}")]
    OracleCap { atoms: usize, cap: usize },
    #[error("partition function is zero: no world satisfies the hard constraints")]
    ZeroPartition,
    #[error("time budget exceeded")]
    Timeout,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for every error caused by malformed input text.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownPredicate(_)
                | Error::ArityMismatch { .. }
                | Error::Signature(_)
                | Error::Weight(_)
                | Error::Constraint(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
