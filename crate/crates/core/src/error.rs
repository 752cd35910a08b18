use thiserror::Error;

use crate::dsl::ParseError;
use crate::tree::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A section closure grew past its state budget. The answer is unknown.
    #[error("budget exceeded: closure grew past {budget} states")]
    BudgetExceeded { budget: usize },

    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),

    #[error("letter {letter} out of range for alphabet of size {d}")]
    LetterOutOfRange { letter: usize, d: usize },

    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(usize),

    #[error("not a permutation of 0..{d}: {images:?}")]
    NotAPermutation { images: Vec<usize>, d: usize },

    #[error("unknown catalog group `{0}`")]
    UnknownGroup(String),

    #[error("invalid truncation level {0}")]
    InvalidTruncation(usize),

    #[error("mismatched alphabets: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no rigid element found below cylinder \"{cylinder}\" within the search radius")]
    Stalled { cylinder: Vertex },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
