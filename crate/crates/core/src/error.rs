use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: negative mass, wrong sum, bad range, unparsable text.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("alphabet mismatch: {left} symbols vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },

    /// The tilted normalizer vanished because the two supports are disjoint.
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("degenerate hypothesis: {0}")]
    DegenerateHypothesis(String),

    /// A constraint (mean energy, Sanov set) admits no solution.
    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("enumeration of {required} types exceeds cap of {cap}")]
    ResourceCap { required: u128, cap: u64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::AlphabetMismatch { .. }
            | Error::DegenerateSupport(_)
            | Error::DegenerateHypothesis(_) => 2,
            Error::Infeasible(_) => 3,
            Error::Overflow(_) | Error::ResourceCap { .. } => 4,
            Error::Numerical(_) => 1,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
