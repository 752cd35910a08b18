//! The `.grp` text format for group definitions.
//!
//! ```text
//! # grpdef v1
//! alphabet = 2
//! gen a = perm (0 1) [e, e]
//! gen b = perm () [a, c]
//! gen c = perm () [a, d]
//! gen d = perm () [e, b]
//! gen s = portrait {"": (0 1), "10": (0 1)}
//! ```
//!
//! Permutations use cycle notation on the letters `0..d`: `()`, `(0 1 2)` or
//! `((0 1)(2 3))`. Sections are words such as `e`, `a`, `b^-1*c`; names may
//! refer to generators defined later in the file. Errors carry the line and
//! column of the offending token.

mod emit;
mod lexer;
mod parser;

pub use emit::emit;
pub use parser::parse;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unterminated string")]
    UnterminatedString,
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("`e` is reserved for the identity")]
    ReservedName,
    #[error("expected {expected} sections (one per letter), found {found}")]
    SectionCount { expected: usize, found: usize },
    #[error("letter {letter} out of range for alphabet of size {d}")]
    LetterOutOfRange { letter: usize, d: usize },
    #[error("cycles do not form a permutation: letter {0} repeated")]
    NotAPermutation(usize),
    #[error("alphabet size must be between 2 and 36, got {0}")]
    InvalidAlphabet(usize),
    #[error("vertex \"{0}\" labelled twice")]
    DuplicateVertex(String),
    #[error("integer too large")]
    IntegerOverflow,
}
