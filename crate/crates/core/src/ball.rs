//! Enumeration of reduced generator words by length.

use crate::element::{Symbol, Word};
use crate::group::GroupDef;

/// Reduced words of length `0..=radius` in shortlex order over
/// [`GroupDef::symbol_alphabet`].
pub struct Ball<'g> {
    group: &'g GroupDef,
    alphabet: Vec<Symbol>,
    radius: usize,
    layer: Vec<Word>,
    pos: usize,
    length: usize,
}

impl<'g> Ball<'g> {
    pub fn new(group: &'g GroupDef, radius: usize) -> Self {
        Self { group, alphabet: group.symbol_alphabet(), radius, layer: vec![Word::empty()], pos: 0, length: 0 }
    }

    fn next_layer(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for w in &self.layer {
            for &s in &self.alphabet {
                let mut symbols = w.symbols().to_vec();
                symbols.push(s);
                let reduced = self.group.reduce(Word::from_symbols(symbols));
                if reduced.len() == w.len() + 1 {
                    out.push(reduced);
                }
            }
        }
        out
    }
}

impl Iterator for Ball<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        while self.pos == self.layer.len() {
            if self.length == self.radius || self.layer.is_empty() {
                return None;
            }
            self.layer = self.next_layer();
            self.length += 1;
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.layer[self.pos - 1].clone())
    }
}
