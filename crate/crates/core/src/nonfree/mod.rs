//! Finite certificates for non-freeness of the boundary action.
//!
//! * [`tnf_certificate`]: elements whose fixed-point interiors at level `k`
//!   generate every subset of `V_k`.
//! * [`support_search`] and [`anf_construct`]: elements supported inside a
//!   given clopen set with prescribed missing mass.
//! * [`lemma_subsets_verify`]: exhaustive check of the subset lemma for
//!   transitive permutation groups of small degree.

mod anf;
mod lemma;
mod tnf;

pub use anf::{anf_construct, support_search, verify_anf, AnfApproximation, AnfRound, SupportHit};
pub use lemma::{lemma_brute_force, lemma_subsets_verify, LemmaCase, LemmaCounterexample, LemmaReport, MAX_LEMMA_DEGREE};
pub use tnf::{tnf_certificate, verify_tnf, TnfCertificate, TnfEntry};
