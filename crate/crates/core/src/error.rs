use thiserror::Error;

/// Errors raised by the library.
///
/// The variants split into three groups the CLI maps onto exit codes: bad
/// input (`InvalidModulus`, `DimensionMismatch`, ...), exhausted enumeration
/// budgets, and failed verifications of a mathematical statement.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: expected an integer h >= 2")]
    InvalidModulus(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("component index {index} out of range (ring has {count} prime components)")]
    ComponentOutOfRange { index: usize, count: usize },

    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("element is zero")]
    ZeroElement,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("family is not {0}-intersecting")]
    NotIntersecting(usize),

    #[error("family is not a maximum clique: {0}")]
    NotMaximumClique(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, needed: u128, budget: u128) -> Self {
        Error::BudgetExceeded {
            what,
            needed,
            budget,
        }
    }

    /// True for errors that report a failed mathematical check rather than
    /// bad input or an exhausted budget.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::TheoremViolation(_)
                | Error::VerificationFailed(_)
                | Error::NotIntersecting(_)
                | Error::NotMaximumClique(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
