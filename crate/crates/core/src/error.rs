use thiserror::Error;

/// Errors raised by the kernel algebra, the dynamics layer and the file loaders.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    /// Copy is only defined on spaces whose atoms are all singletons.
    #[error("copy needs a space with singleton atoms (atom {atom} has {size} points)")]
    CopyNeedsPoints { atom: usize, size: usize },

    #[error("space carries no product structure")]
    NotAProduct,

    #[error("not measurable: {0}")]
    NotMeasurable(String),

    #[error("kernel is not deterministic")]
    NotDeterministic,

    #[error("not invariant: {0}")]
    NotInvariant(String),

    #[error("dynamical system has a non-deterministic generator")]
    NotDeterministicSystem,

    #[error("rows of the kernel disagree inside quotient atom {atom}")]
    RowsDisagree { atom: usize },

    #[error("unsupported generators: {0}")]
    UnsupportedGenerators(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
