use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed process, strategy or experiment definition.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("expectation is indeterminate: the integrand takes both +inf and -inf")]
    IndeterminateExpectation,

    #[error("unknown payoff state `{0}`")]
    UnknownState(String),

    /// Total wealth reached zero where a strategy needs it to be positive.
    #[error("market ruin: total wealth is {0}")]
    Ruin(f64),

    #[error(
        "strategy of investor {investor} returned invalid proportions at step {step}: {reason}"
    )]
    InvalidProportions {
        step: usize,
        investor: usize,
        reason: String,
    },

    #[error("cannot discount: interest factor is zero at step {0}")]
    Discounting(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
