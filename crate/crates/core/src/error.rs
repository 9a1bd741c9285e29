use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: wrong lengths, unsupported parameters, bad names.
    #[error("input error: {0}")]
    Input(String),
    /// Well-formed input outside an operation's domain (non-isotropic
    /// contexts, invalid outcome functions, p mismatch).
    #[error("domain error: {0}")]
    Domain(String),
    /// An enumeration or matrix size guard was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Floating-point residue above the declared tolerance.
    #[error("numerical integrity: {0}")]
    Numerical(String),
    /// A linear system that must be solvable is not.
    #[error("no solution: {0}")]
    NoSolution(String),
    /// A closed formula produced a non-integer where an integer is required.
    #[error("formula interpretation: {0}")]
    Formula(String),
}

pub type Result<T> = std::result::Result<T, Error>;
