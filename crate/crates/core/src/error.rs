use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("unknown label `{label}` in sector `{sector}`")]
    UnknownLabel { sector: String, label: String },
    #[error("wrong grade: {0}")]
    WrongGrade(String),
    #[error("depth {depth} exceeds level {level}")]
    DepthExceedsLevel { depth: usize, level: usize },
    #[error("matrix trace is {0}, expected 0")]
    NonzeroTrace(String),
    #[error("axis {0} out of range (expected 1..=4)")]
    BadAxis(usize),
    #[error("position out of range: {0}")]
    BadPosition(String),
    #[error("vector field degree {0} exceeds 1")]
    DegreeTooHigh(u32),
    #[error("generator is not affine: {0}")]
    NonAffine(String),
    #[error("degenerate metric form: {0}")]
    DegenerateMetric(String),
    #[error("scalar tower `{have}` too small, `{need}` required")]
    TowerTooSmall { have: String, need: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("permutation is even; parity needs an odd permutation")]
    EvenPermutation,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
