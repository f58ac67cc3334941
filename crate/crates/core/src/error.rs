use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("block list is empty")]
    EmptyBlocks,

    #[error("nonzero off-diagonal block at block position ({0}, {1})")]
    OffDiagonalBlock(usize, usize),

    #[error("entry map is not a bijection on index pairs")]
    NotBijection,

    #[error("unknown letter '{0}'")]
    UnknownLetter(char),

    #[error("invalid automaton: {}", .0.join("; "))]
    InvalidAutomaton(Vec<String>),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("grammar error: {0}")]
    Grammar(String),

    #[error("refinement budget exhausted: {0}")]
    Precision(String),

    #[error("witness does not match the expression shape: {0}")]
    WitnessShape(String),

    #[error("internal soundness violation: {0}")]
    Soundness(String),
}

pub type Result<T> = std::result::Result<T, Error>;
