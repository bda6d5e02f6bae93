use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate parameter: p = {0} must lie strictly between 0 and 1")]
    DegenerateParameter(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("mean {0} is not representable as a rational with denominator <= {1}")]
    NonRepresentableMean(f64, i64),

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("invalid linear program: {0}")]
    InvalidProgram(String),

    #[error("simplex exceeded {0} iterations; cycling suspected")]
    CyclingSuspected(usize),

    #[error("invalid symmetrizer problem: {0}")]
    InvalidProblem(String),

    #[error("no symmetrizer is supported on the given grid")]
    Infeasible,

    #[error("solver inconsistency: {0}")]
    SolverInconsistency(String),

    #[error("oracle instance too large: {0}")]
    OracleTooLarge(String),

    #[error("distribution is not centered (mean = {0})")]
    NotCentered(f64),

    #[error("invalid interval ({0}, {1}): need a < 0 < b")]
    InvalidInterval(f64, f64),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}
