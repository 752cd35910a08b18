//! Element representations: generator words, finite section trees and
//! finitary portraits.
//!
//! These are plain data. Evaluation (action on vertices, sections, products)
//! always happens against a [`GroupDef`](crate::group::GroupDef), which owns
//! the wreath recursion the symbols refer to.

use std::collections::BTreeMap;

use crate::tree::{Permutation, Vertex};

/// One letter of a generator word: a state index and an inversion flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    pub state: u32,
    pub inverse: bool,
}

impl Symbol {
    pub fn new(state: u32) -> Self {
        Self { state, inverse: false }
    }

    pub fn inv(state: u32) -> Self {
        Self { state, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Self { state: self.state, inverse: !self.inverse }
    }
}

/// A product of generator symbols, read as a composition: the rightmost
/// symbol acts first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Wraps symbols as given. Group operations return reduced words; use
    /// [`GroupDef::reduce`](crate::group::GroupDef::reduce) to normalize a raw one.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }
}

/// A finitary automorphism given by the permutations it applies at each
/// vertex. Only vertices strictly above `depth` may carry a permutation;
/// everything below acts trivially.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Portrait {
    d: usize,
    depth: usize,
    perms: BTreeMap<Vertex, Permutation>,
}

impl Portrait {
    pub fn identity(d: usize) -> Self {
        Self { d, depth: 0, perms: BTreeMap::new() }
    }

    /// Builds a portrait, dropping identity entries and shrinking `depth` to
    /// the deepest labelled vertex. Entries at or below `depth` are rejected
    /// by returning `None`.
    pub fn new(d: usize, depth: usize, perms: BTreeMap<Vertex, Permutation>) -> Option<Self> {
        if perms.iter().any(|(v, p)| v.level() >= depth || p.degree() != d) {
            return None;
        }
        let perms: BTreeMap<_, _> = perms.into_iter().filter(|(_, p)| !p.is_identity()).collect();
        let depth = perms.keys().map(|v| v.level() + 1).max().unwrap_or(0);
        Some(Self { d, depth, perms })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Levels `0..depth` may be labelled; the portrait acts trivially below.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_identity(&self) -> bool {
        self.perms.is_empty()
    }

    /// Permutation at `v` (identity when unlabelled).
    pub fn perm_at(&self, v: &Vertex) -> Permutation {
        self.perms.get(v).cloned().unwrap_or_else(|| Permutation::identity(self.d))
    }

    /// Nontrivial labels in vertex order.
    pub fn labels(&self) -> impl Iterator<Item = (&Vertex, &Permutation)> {
        self.perms.iter()
    }

    pub fn root_perm(&self) -> Permutation {
        self.perm_at(&Vertex::root())
    }

    /// The portrait of the restriction below the letter `x`.
    pub fn section(&self, x: u8) -> Portrait {
        let perms = self
            .perms
            .iter()
            .filter(|(v, _)| v.letters().first() == Some(&x))
            .map(|(v, p)| (Vertex::new(v.letters()[1..].to_vec()), p.clone()))
            .collect();
        Portrait::new(self.d, self.depth.saturating_sub(1), perms).expect("section of a valid portrait")
    }

    pub fn apply(&self, v: &Vertex) -> Vertex {
        let mut out = Vec::with_capacity(v.level());
        let mut prefix = Vertex::root();
        for &x in v.letters() {
            let y = match self.perms.get(&prefix) {
                Some(p) => p.apply(x),
                None => x,
            };
            out.push(y);
            prefix = prefix.child(x);
        }
        Vertex::new(out)
    }
}

/// A tree automorphism in one of three interconvertible forms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Automorphism {
    /// Product of generator symbols over a group definition.
    Word(Word),
    /// Root permutation plus one section per letter.
    Node { perm: Permutation, sections: Vec<Automorphism> },
    /// Finitary portrait.
    Portrait(Portrait),
}

impl Automorphism {
    pub fn identity() -> Self {
        Automorphism::Word(Word::empty())
    }

    /// True when the value is syntactically the identity. Use
    /// [`GroupDef::is_trivial`](crate::group::GroupDef::is_trivial) for the
    /// semantic test.
    pub fn is_syntactic_identity(&self) -> bool {
        match self {
            Automorphism::Word(w) => w.is_empty(),
            Automorphism::Portrait(p) => p.is_identity(),
            Automorphism::Node { .. } => false,
        }
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Automorphism::Word(w) => Some(w),
            _ => None,
        }
    }
}

impl From<Word> for Automorphism {
    fn from(w: Word) -> Self {
        Automorphism::Word(w)
    }
}

impl From<Portrait> for Automorphism {
    fn from(p: Portrait) -> Self {
        if p.is_identity() {
            Automorphism::identity()
        } else {
            Automorphism::Portrait(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn portrait_drops_identity_labels() {
        let mut perms = BTreeMap::new();
        perms.insert(Vertex::root(), Permutation::identity(2));
        perms.insert(Vertex::new(vec![1]), Permutation::swap(2, 0, 1));
        let p = Portrait::new(2, 5, perms).unwrap();
        assert_eq!(p.depth(), 2);
        assert_eq!(p.labels().count(), 1);
        assert_eq!(p.apply(&Vertex::new(vec![1, 0, 1])), Vertex::new(vec![1, 1, 1]));
        assert_eq!(p.apply(&Vertex::new(vec![0, 0])), Vertex::new(vec![0, 0]));
        assert!(p.section(0).is_identity());
        assert_eq!(p.section(1).root_perm(), Permutation::swap(2, 0, 1));
    }

    #[test]
    fn portrait_rejects_labels_below_depth() {
        let mut perms = BTreeMap::new();
        perms.insert(Vertex::new(vec![0, 0]), Permutation::swap(2, 0, 1));
        assert!(Portrait::new(2, 2, perms).is_none());
    }
}
