//! Exact computation with groups acting on regular rooted trees.
//!
//! Elements are tree automorphisms given by wreath recursion. On top of the
//! word problem the crate computes exact fixed-point measures (characters),
//! finite certificates of non-freeness, and the orbit structure of diagonal
//! actions on unordered tuples of boundary points.

pub mod automaton;
pub mod ball;
pub mod catalog;
pub mod diag;
pub mod dsl;
pub mod element;
pub mod error;
pub mod group;
pub mod measure;
pub mod nonfree;
pub mod rational;
pub mod tree;

pub use automaton::{MinimalAutomaton, SectionClosure, DEFAULT_BUDGET};
pub use catalog::CatalogEntry;
pub use element::{Automorphism, Portrait, Symbol, Word};
pub use error::{Error, Result};
pub use group::{Generator, GeneratorBody, GroupDef, GroupMeta};
pub use measure::{FixSystem, LevelBound, MeasureValue};
pub use rational::Q;
pub use tree::{Alphabet, Permutation, Vertex};
