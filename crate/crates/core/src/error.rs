use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("objects live over different sequence spaces")]
    SpaceMismatch,

    #[error("invalid sequence space: {0}")]
    InvalidSpace(String),

    #[error("word `{word}` is not an allowed prefix: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("unknown germ label `{0}`")]
    UnknownGerm(String),

    #[error("germ closure exceeded the bound of {bound} states")]
    StateBound { bound: usize },

    #[error("invalid bisection: {0}")]
    InvalidBisection(String),

    #[error("not an element of the full group: {0}")]
    NotFull(String),

    #[error("source and range of the bisection overlap")]
    Overlap,

    #[error("multisection violation: {0}")]
    Multisection(String),

    #[error("undetermined within bounds: {0}")]
    Undetermined(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("intersection is not clopen within depth {0}")]
    NotClopen(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unresolved reference `{0}`")]
    Unresolved(String),

    #[error("invalid quasicrystal input: {0}")]
    Quasicrystal(String),

    #[error("{path}: {reason}")]
    Load { path: String, reason: String },
}
