//! Vertices, letters and letter permutations of the `d`-regular rooted tree.
//!
//! Vertices are finite words over the alphabet `0..d`; the empty word is the
//! root. Within a level, vertices are ordered lexicographically, which is also
//! the order of their base-`d` index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported alphabet; letters print as a single base-36 digit.
pub const MAX_ALPHABET: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(d: usize) -> Result<Self> {
        if (2..=MAX_ALPHABET).contains(&d) {
            Ok(Self(d))
        } else {
            Err(Error::InvalidAlphabet(d))
        }
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> impl Iterator<Item = u8> {
        0..self.0 as u8
    }

    /// Number of vertices on level `k`, or `None` on overflow.
    pub fn level_size(self, k: usize) -> Option<usize> {
        self.0.checked_pow(u32::try_from(k).ok()?)
    }

    /// All vertices of level `k` in lexicographic order.
    pub fn level(self, k: usize) -> impl Iterator<Item = Vertex> {
        let d = self.0;
        let count = self.level_size(k).expect("level too large to enumerate");
        (0..count).map(move |i| Vertex::from_index(i, k, d))
    }
}

pub(crate) fn letter_char(x: u8) -> char {
    char::from_digit(u32::from(x), MAX_ALPHABET as u32).expect("letter below 36")
}

pub(crate) fn char_letter(c: char) -> Option<u8> {
    c.to_digit(MAX_ALPHABET as u32).map(|x| x as u8)
}

/// A vertex of the tree, i.e. a finite word over the alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(Vec<u8>);

impl Vertex {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Self(letters)
    }

    /// Parses a string of base-36 digits such as `"011"`.
    pub fn parse(s: &str, alphabet: Alphabet) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            let x = char_letter(c).ok_or_else(|| Error::InvalidInput(format!("bad vertex letter `{c}`")))?;
            if usize::from(x) >= alphabet.size() {
                return Err(Error::LetterOutOfRange { letter: usize::from(x), d: alphabet.size() });
            }
            letters.push(x);
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, x: u8) -> Self {
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.extend_from_slice(&self.0);
        letters.push(x);
        Self(letters)
    }

    pub fn concat(&self, other: &Vertex) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Self(letters)
    }

    /// The ancestor on level `k` (`k` at most the vertex level).
    pub fn prefix(&self, k: usize) -> Self {
        Self(self.0[..k].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        match self.0.iter().find(|&&x| usize::from(x) >= alphabet.size()) {
            Some(&x) => Err(Error::LetterOutOfRange { letter: usize::from(x), d: alphabet.size() }),
            None => Ok(()),
        }
    }

    /// Position of the vertex within its level.
    pub fn index(&self, d: usize) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * d + usize::from(x))
    }

    pub fn from_index(mut index: usize, level: usize, d: usize) -> Self {
        let mut letters = vec![0u8; level];
        for slot in letters.iter_mut().rev() {
            *slot = (index % d) as u8;
            index /= d;
        }
        Self(letters)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.0 {
            write!(f, "{}", letter_char(x))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for Vertex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A permutation of the letters `0..d`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self((0..d as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            let x = usize::from(x);
            if x >= d || std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotAPermutation { images: images.iter().map(|&y| usize::from(y)).collect(), d });
            }
        }
        Ok(Self(images))
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(d: usize, cycles: &[Vec<u8>]) -> Result<Self> {
        let mut images: Vec<u8> = (0..d as u8).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for &x in cycle {
                let xi = usize::from(x);
                if xi >= d {
                    return Err(Error::LetterOutOfRange { letter: xi, d });
                }
                if std::mem::replace(&mut used[xi], true) {
                    return Err(Error::NotAPermutation { images: cycle.iter().map(|&y| usize::from(y)).collect(), d });
                }
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[usize::from(x)] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Self(images))
    }

    /// The transposition of letters `x` and `y`.
    pub fn swap(d: usize, x: u8, y: u8) -> Self {
        let mut images: Vec<u8> = (0..d as u8).collect();
        images.swap(usize::from(x), usize::from(y));
        Self(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.0[usize::from(x)]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| usize::from(x) == i)
    }

    pub fn fixes(&self, x: u8) -> bool {
        self.apply(x) == x
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self(other.0.iter().map(|&x| self.apply(x)).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[usize::from(x)] = i as u8;
        }
        Self(inv)
    }

    /// Nontrivial cycles in canonical order (each starting at its least letter).
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || usize::from(self.0[start]) == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u8);
                x = usize::from(self.0[x]);
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation: `()`, `(0 1)`, or `((0 1)(2 3))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        let body = |c: &Vec<u8>| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match cycles.len() {
            0 => write!(f, "()"),
            1 => write!(f, "({})", body(&cycles[0])),
            _ => {
                write!(f, "(")?;
                for c in &cycles {
                    write!(f, "({})", body(c))?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_index_roundtrip() {
        let d = 3;
        for i in 0..27 {
            let v = Vertex::from_index(i, 3, d);
            assert_eq!(v.index(d), i);
        }
        assert_eq!(Vertex::from_index(5, 3, 2).to_string(), "101");
    }

    #[test]
    fn vertex_parse_rejects_out_of_range() {
        let a = Alphabet::new(2).unwrap();
        assert_eq!(Vertex::parse("012", a), Err(Error::LetterOutOfRange { letter: 2, d: 2 }));
        assert!(Vertex::parse("", a).unwrap().is_root());
    }

    #[test]
    fn alphabet_bounds() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(37).is_err());
        assert_eq!(Alphabet::new(2).unwrap().level(2).map(|v| v.to_string()).collect::<Vec<_>>(), ["00", "01", "10", "11"]);
    }

    #[test]
    fn permutation_cycles_and_display() {
        let p = Permutation::from_cycles(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(p.to_string(), "((0 1)(2 3))");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        let t = Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(t.to_string(), "(0 1 2)");
        assert_eq!(t.compose(&t).compose(&t), Permutation::identity(3));
        assert_eq!(t.compose(&t.inverse()), Permutation::identity(3));
    }

    #[test]
    fn permutation_rejects_repeats() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Permutation::from_cycles(2, &[vec![0, 2]]).is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let a = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let b = Permutation::swap(3, 0, 1);
        let ab = a.compose(&b);
        for x in 0..3 {
            assert_eq!(ab.apply(x), a.apply(b.apply(x)));
        }
    }
}
