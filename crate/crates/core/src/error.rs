use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition (length, alphabet, range).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Channel parameters do not yield a usable window length.
    #[error("invalid parameters: {0}")]
    Parameter(String),

    /// A real-valued input lies outside the domain where a bound is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive routine would need more elementary checks than allowed.
    #[error("work budget exceeded: {required} checks needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    /// The multiset admits more than one continuation or start.
    #[error("ambiguous reconstruction: {0}")]
    Ambiguous(String),

    /// The multiset cannot be chained into a single string.
    #[error("inconsistent multiset: {0}")]
    Inconsistent(String),

    #[error("resampling gave up after {rounds} rounds")]
    Exhausted { rounds: u64 },

    #[error("assembly failed: {0}")]
    AssemblyFailed(Box<Error>),

    #[error("no kept codeword within distance {radius} of the reconstructed string")]
    NoCodewordInRange { radius: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A checked mathematical invariant failed at runtime.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
