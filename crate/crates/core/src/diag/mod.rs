//! Diagonal actions on unordered tuples of boundary points.
//!
//! At level `k` an unordered `n`-tuple of distinct vertices stands for the
//! cylinder of boundary tuples through them; its mass under the symmetrized
//! product measure is `n!/d^(kn)`. Orbits of the diagonal action on these
//! tuples approximate the ergodic components, and [`component_tower`] links
//! them across levels by truncation.

mod character;
mod orbits;
mod rinv;
mod symmetrize;
mod tower;

pub use character::{
    char_interval, char_sum_check, distinctness_search, CharSumReport, CharacterInterval, ComponentRef, FixCounts,
    SeparationPair, SeparationReport,
};
pub use orbits::{orbits, Orbit, OrbitPartition};
pub use rinv::{r_invariance_check, r_invariant, RClass, RInvarianceReport};
pub use symmetrize::{symmetrization_identity_check, SymmetrizationReport};
pub use tower::{component_tower, ComponentNode, ComponentTower, TowerLevel};
