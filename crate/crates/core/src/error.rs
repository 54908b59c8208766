use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arm {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },

    #[error("invalid incentive: {0}")]
    InvalidIncentive(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("interaction channel exhausted at round {round}")]
    Exhausted { round: u64 },

    #[error("convex body is infeasible (constraint violation {violation:.3e})")]
    InfeasibleBody { violation: f64 },

    #[error("rejection sampler degenerate: accepted {accepted} of {proposals} proposals")]
    DegenerateBody { accepted: usize, proposals: usize },

    #[error("halving cut could not be bracketed")]
    BracketFailure,

    #[error("design did not reach the leverage certificate: max leverage {leverage:.6} > {bound:.6}")]
    DesignNotConverged { leverage: f64, bound: f64 },

    #[error("design matrix is singular")]
    SingularDesign,

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
