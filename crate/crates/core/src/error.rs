use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state or argument lies outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Lengths or set sizes do not line up.
    #[error("shape error: {0}")]
    Shape(String),
    /// A schedule violates a load constraint or has infinite cost.
    #[error("infeasible at t={t}: {reason}")]
    Infeasible { t: usize, reason: String },
    /// A state is not a multiple of the required power of two.
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("configuration error: {0}")]
    Config(String),
    /// A probability or other numeric quantity left its tolerance band.
    #[error("numerical contract violated: {0}")]
    NumericalContract(String),
    /// An internal invariant or a policy contract was broken.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Malformed instance file.
    #[error("schema error: {0}")]
    Schema(String),
}
