use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid neighbourhood spec: {0}")]
    InvalidSpec(String),

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("bounding block of an empty site set is undefined")]
    EmptySiteSet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid update family: {0}")]
    InvalidFamily(String),

    #[error("explicit family would have {rules} rules, above the cap of {cap}")]
    FamilyTooLarge { rules: u128, cap: u128 },

    #[error("invalid direction: the zero vector has no half-space")]
    ZeroDirection,

    #[error("components process requires a non-supercritical family (r > a_d), got r = {r}, a_d = {a_max}")]
    SupercriticalFamily { r: usize, a_max: usize },

    #[error("no witness at this scale: k = {k} exceeds diam of the closure ({diam})")]
    NoWitness { k: usize, diam: usize },

    #[error("grid file line {line}: {msg}")]
    GridParse { line: usize, msg: String },

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
