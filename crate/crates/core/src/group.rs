//! Group definitions by wreath recursion, and evaluation of elements against
//! them.
//!
//! A [`GroupDef`] names a finite list of generators. Each generator is either
//! a recursion `perm [w_0, ..., w_{d-1}]` whose sections are words over the
//! generators, or a finitary portrait. Portraits are compiled into hidden
//! states so that every word symbol carries a recursion.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::element::{Automorphism, Portrait, Symbol, Word};
use crate::error::{Error, Result};
use crate::tree::{Alphabet, Permutation, Vertex};

/// Closure budget used when probing generators for `s^2 = 1` at load time.
const INVOLUTION_PROBE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorBody {
    /// Root permutation and one section word (over the generators) per letter.
    Recursion { perm: Permutation, sections: Vec<Word> },
    Portrait(Portrait),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub body: GeneratorBody,
}

impl Generator {
    pub fn recursion(name: impl Into<String>, perm: Permutation, sections: Vec<Word>) -> Self {
        Self { name: name.into(), body: GeneratorBody::Recursion { perm, sections } }
    }

    pub fn portrait(name: impl Into<String>, portrait: Portrait) -> Self {
        Self { name: name.into(), body: GeneratorBody::Portrait(portrait) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupMeta {
    pub name: Option<String>,
    pub level_transitive: Option<bool>,
}

#[derive(Clone, Debug)]
struct State {
    name: String,
    perm: Permutation,
    perm_inv: Permutation,
    sections: Vec<Word>,
    /// `inv_sections[y]` is the section of the inverse at letter `y`.
    inv_sections: Vec<Word>,
}

/// A group `G < Aut(T_d)` given by generators; the evaluation context for
/// every element.
#[derive(Clone, Debug)]
pub struct GroupDef {
    alphabet: Alphabet,
    generators: Vec<Generator>,
    meta: GroupMeta,
    states: Vec<State>,
    involutive: Vec<bool>,
}

pub(crate) fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl GroupDef {
    pub fn new(alphabet: Alphabet, generators: Vec<Generator>, meta: GroupMeta) -> Result<Self> {
        let d = alphabet.size();
        let m = generators.len();
        let mut names = HashSet::new();
        for g in &generators {
            if !is_ident(&g.name) || g.name == "e" {
                return Err(Error::InvalidInput(format!("invalid generator name `{}`", g.name)));
            }
            if !names.insert(g.name.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate generator `{}`", g.name)));
            }
            match &g.body {
                GeneratorBody::Recursion { perm, sections } => {
                    if perm.degree() != d {
                        return Err(Error::AlphabetMismatch(perm.degree(), d));
                    }
                    if sections.len() != d {
                        return Err(Error::InvalidInput(format!(
                            "generator `{}` has {} sections, expected {d}",
                            g.name,
                            sections.len()
                        )));
                    }
                    for s in sections.iter().flat_map(|w| w.symbols()) {
                        if s.state as usize >= m {
                            return Err(Error::UnknownSymbol(format!("#{}", s.state)));
                        }
                    }
                }
                GeneratorBody::Portrait(p) => {
                    if p.degree() != d {
                        return Err(Error::AlphabetMismatch(p.degree(), d));
                    }
                }
            }
        }

        let mut states: Vec<State> = generators
            .iter()
            .map(|g| State {
                name: g.name.clone(),
                perm: Permutation::identity(d),
                perm_inv: Permutation::identity(d),
                sections: Vec::new(),
                inv_sections: Vec::new(),
            })
            .collect();
        let mut hidden: HashMap<Portrait, u32> = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            let (perm, sections) = match &g.body {
                GeneratorBody::Recursion { perm, sections } => (perm.clone(), sections.clone()),
                GeneratorBody::Portrait(p) => {
                    let sections = (0..d as u8)
                        .map(|x| compile_portrait(&p.section(x), &g.name, &Vertex::root().child(x), &mut states, &mut hidden))
                        .collect();
                    (p.root_perm(), sections)
                }
            };
            states[i].perm_inv = perm.inverse();
            states[i].perm = perm;
            states[i].sections = sections;
        }

        let mut group = Self { alphabet, generators, meta, involutive: vec![false; states.len()], states };
        group.rebuild_inverse_sections();
        for s in 0..group.states.len() {
            let square = Automorphism::Word(Word::from_symbols(vec![Symbol::new(s as u32); 2]));
            if let Ok(true) = group.is_trivial(&square, INVOLUTION_PROBE_BUDGET) {
                group.involutive[s] = true;
            }
        }
        group.rebuild_inverse_sections();
        for i in 0..group.states.len() {
            for x in 0..d {
                let w = group.states[i].sections[x].clone();
                group.states[i].sections[x] = group.reduce(w);
            }
        }
        Ok(group)
    }

    fn rebuild_inverse_sections(&mut self) {
        for i in 0..self.states.len() {
            let st = &self.states[i];
            let inv: Vec<Word> = (0..self.alphabet.size() as u8)
                .map(|y| self.inverse_word(&st.sections[usize::from(st.perm_inv.apply(y))]))
                .collect();
            self.states[i].inv_sections = inv;
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.alphabet.size()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn meta(&self) -> &GroupMeta {
        &self.meta
    }

    pub fn set_meta(&mut self, meta: GroupMeta) {
        self.meta = meta;
    }

    pub fn name(&self) -> Option<&str> {
        self.meta.name.as_deref()
    }

    /// Generators plus hidden states introduced by portrait compilation.
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Whether `s^2 = 1` was verified for state `s` at construction.
    pub fn is_involution(&self, state: usize) -> bool {
        self.involutive[state]
    }

    /// The word consisting of one generator.
    pub fn generator(&self, index: usize) -> Automorphism {
        Automorphism::Word(Word::from_symbols(vec![Symbol::new(index as u32)]))
    }

    pub fn generator_elements(&self) -> Vec<Automorphism> {
        (0..self.generators.len()).map(|i| self.generator(i)).collect()
    }

    /// Generator symbols in enumeration order: `s_0, s_0^-1, s_1, ...`, with
    /// the inverse omitted for involutions.
    pub fn symbol_alphabet(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for i in 0..self.generators.len() {
            out.push(Symbol::new(i as u32));
            if !self.involutive[i] {
                out.push(Symbol::inv(i as u32));
            }
        }
        out
    }

    fn normalize_symbol(&self, s: Symbol) -> Symbol {
        if s.inverse && self.involutive[s.state as usize] {
            Symbol::new(s.state)
        } else {
            s
        }
    }

    fn cancels(&self, a: Symbol, b: Symbol) -> bool {
        a.state == b.state && (a.inverse != b.inverse || self.involutive[a.state as usize])
    }

    /// Free reduction, also cancelling `s s` for verified involutions.
    pub fn reduce(&self, w: Word) -> Word {
        self.reduce_vec(w.into_symbols())
    }

    fn reduce_vec(&self, symbols: Vec<Symbol>) -> Word {
        let mut out: Vec<Symbol> = Vec::with_capacity(symbols.len());
        for s in symbols {
            let s = self.normalize_symbol(s);
            match out.last() {
                Some(&top) if self.cancels(top, s) => {
                    out.pop();
                }
                _ => out.push(s),
            }
        }
        Word::from_symbols(out)
    }

    pub fn inverse_word(&self, w: &Word) -> Word {
        self.reduce_vec(w.symbols().iter().rev().map(|s| s.inverted()).collect())
    }

    pub fn multiply_words(&self, a: &Word, b: &Word) -> Word {
        let mut v = a.symbols().to_vec();
        v.extend_from_slice(b.symbols());
        self.reduce_vec(v)
    }

    fn symbol_step(&self, sym: Symbol, y: u8) -> (u8, &Word) {
        let st = &self.states[sym.state as usize];
        if sym.inverse {
            (st.perm_inv.apply(y), &st.inv_sections[usize::from(y)])
        } else {
            (st.perm.apply(y), &st.sections[usize::from(y)])
        }
    }

    fn word_image(&self, w: &Word, x: u8) -> u8 {
        w.symbols().iter().rev().fold(x, |y, &s| self.symbol_step(s, y).0)
    }

    fn word_section(&self, w: &Word, x: u8) -> (u8, Word) {
        let mut pieces: Vec<&Word> = Vec::with_capacity(w.len());
        let mut y = x;
        for &s in w.symbols().iter().rev() {
            let (img, sec) = self.symbol_step(s, y);
            pieces.push(sec);
            y = img;
        }
        let mut symbols = Vec::new();
        for p in pieces.iter().rev() {
            symbols.extend_from_slice(p.symbols());
        }
        (y, self.reduce_vec(symbols))
    }

    pub fn root_perm(&self, g: &Automorphism) -> Permutation {
        match g {
            Automorphism::Word(w) => Permutation::from_images(self.alphabet.letters().map(|x| self.word_image(w, x)).collect())
                .expect("word image is a permutation"),
            Automorphism::Node { perm, .. } => perm.clone(),
            Automorphism::Portrait(p) => p.root_perm(),
        }
    }

    /// Image of the letter `x` together with the section at `x`.
    pub fn step(&self, g: &Automorphism, x: u8) -> (u8, Automorphism) {
        match g {
            Automorphism::Word(w) => {
                let (y, sec) = self.word_section(w, x);
                (y, Automorphism::Word(sec))
            }
            Automorphism::Node { perm, sections } => (perm.apply(x), sections[usize::from(x)].clone()),
            Automorphism::Portrait(p) => (p.root_perm().apply(x), Automorphism::from(p.section(x))),
        }
    }

    pub fn section_at(&self, g: &Automorphism, x: u8) -> Automorphism {
        self.step(g, x).1
    }

    /// Restriction of `g` to the subtree below `v`, in that subtree's coordinates.
    pub fn section(&self, g: &Automorphism, v: &Vertex) -> Automorphism {
        v.letters().iter().fold(g.clone(), |cur, &x| self.section_at(&cur, x))
    }

    /// Action on a vertex without validation.
    pub fn image(&self, g: &Automorphism, v: &Vertex) -> Vertex {
        if let Automorphism::Portrait(p) = g {
            return p.apply(v);
        }
        let mut cur = g.clone();
        let mut out = Vec::with_capacity(v.level());
        for (i, &x) in v.letters().iter().enumerate() {
            if i + 1 == v.level() {
                out.push(self.root_perm_image(&cur, x));
                break;
            }
            let (y, next) = self.step(&cur, x);
            out.push(y);
            cur = next;
        }
        Vertex::new(out)
    }

    fn root_perm_image(&self, g: &Automorphism, x: u8) -> u8 {
        match g {
            Automorphism::Word(w) => self.word_image(w, x),
            Automorphism::Node { perm, .. } => perm.apply(x),
            Automorphism::Portrait(p) => p.root_perm().apply(x),
        }
    }

    /// `g · v`.
    pub fn apply(&self, g: &Automorphism, v: &Vertex) -> Result<Vertex> {
        v.check(self.alphabet)?;
        self.validate(g)?;
        Ok(self.image(g, v))
    }

    /// Checks that every word symbol resolves and every node has `d` sections.
    pub fn validate(&self, g: &Automorphism) -> Result<()> {
        let d = self.degree();
        match g {
            Automorphism::Word(w) => match w.symbols().iter().find(|s| s.state as usize >= self.states.len()) {
                Some(s) => Err(Error::UnknownSymbol(format!("#{}", s.state))),
                None => Ok(()),
            },
            Automorphism::Node { perm, sections } => {
                if perm.degree() != d {
                    return Err(Error::AlphabetMismatch(perm.degree(), d));
                }
                if sections.len() != d {
                    return Err(Error::InvalidInput(format!("node has {} sections, expected {d}", sections.len())));
                }
                sections.iter().try_for_each(|s| self.validate(s))
            }
            Automorphism::Portrait(p) if p.degree() != d => Err(Error::AlphabetMismatch(p.degree(), d)),
            Automorphism::Portrait(_) => Ok(()),
        }
    }

    /// `g ∘ h`: `h` acts first.
    pub fn compose(&self, g: &Automorphism, h: &Automorphism) -> Automorphism {
        match (g, h) {
            (Automorphism::Word(a), Automorphism::Word(b)) => Automorphism::Word(self.multiply_words(a, b)),
            _ if h.is_syntactic_identity() => g.clone(),
            _ if g.is_syntactic_identity() => h.clone(),
            (Automorphism::Portrait(a), Automorphism::Portrait(b)) => {
                let depth = a.depth().max(b.depth());
                let node = self.compose_node(g, h);
                Automorphism::from(self.portrait(&node, depth))
            }
            _ => self.compose_node(g, h),
        }
    }

    fn compose_node(&self, g: &Automorphism, h: &Automorphism) -> Automorphism {
        let mut images = Vec::with_capacity(self.degree());
        let mut sections = Vec::with_capacity(self.degree());
        for x in self.alphabet.letters() {
            let (hx, hs) = self.step(h, x);
            let (ghx, gs) = self.step(g, hx);
            images.push(ghx);
            sections.push(self.compose(&gs, &hs));
        }
        let perm = Permutation::from_images(images).expect("composition of permutations");
        node_or_identity(perm, sections)
    }

    pub fn inverse(&self, g: &Automorphism) -> Automorphism {
        match g {
            Automorphism::Word(w) => Automorphism::Word(self.inverse_word(w)),
            Automorphism::Node { perm, sections } => {
                let inv = perm.inverse();
                let sections = self
                    .alphabet
                    .letters()
                    .map(|y| self.inverse(&sections[usize::from(inv.apply(y))]))
                    .collect();
                node_or_identity(inv, sections)
            }
            Automorphism::Portrait(p) => {
                let perms = p.labels().map(|(v, q)| (p.apply(v), q.inverse())).collect();
                Automorphism::from(Portrait::new(self.degree(), p.depth(), perms).expect("inverse portrait"))
            }
        }
    }

    /// Portrait of `g` on all vertices of level below `depth`; it agrees with
    /// `g` on every vertex of level at most `depth`.
    pub fn portrait(&self, g: &Automorphism, depth: usize) -> Portrait {
        let mut perms = BTreeMap::new();
        if depth > 0 {
            self.collect_portrait(g, Vertex::root(), depth, &mut perms);
        }
        Portrait::new(self.degree(), depth, perms).expect("portrait labels above depth")
    }

    fn collect_portrait(&self, g: &Automorphism, at: Vertex, remaining: usize, out: &mut BTreeMap<Vertex, Permutation>) {
        if g.is_syntactic_identity() {
            return;
        }
        let p = self.root_perm(g);
        if remaining > 1 {
            for x in self.alphabet.letters() {
                self.collect_portrait(&self.section_at(g, x), at.child(x), remaining - 1, out);
            }
        }
        if !p.is_identity() {
            out.insert(at, p);
        }
    }

    // ----- names and parsing of words -----

    fn state_name(&self, s: usize) -> &str {
        &self.states[s].name
    }

    /// Parses a word such as `ada`, `a*d*a`, `b^-1 c` or `e`. Generator
    /// names are matched greedily, longest first.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut names: Vec<(&str, usize)> = self.generators.iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect();
        names.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        let mut symbols = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::UnknownSymbol(String::new()));
        }
        while !rest.is_empty() {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '*' || c == '·');
            if rest.is_empty() {
                break;
            }
            let (sym, len) = match names.iter().find(|(n, _)| rest.starts_with(n)) {
                Some(&(n, i)) => (Some(i), n.len()),
                None if rest.starts_with('e') => (None, 1),
                None => {
                    let bad: String = rest.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
                    let bad = if bad.is_empty() { rest.chars().next().map(String::from).unwrap_or_default() } else { bad };
                    return Err(Error::UnknownSymbol(bad));
                }
            };
            rest = &rest[len..];
            let inverse = if let Some(r) = rest.strip_prefix("^-1") {
                rest = r;
                true
            } else {
                false
            };
            if let Some(i) = sym {
                symbols.push(Symbol { state: i as u32, inverse });
            }
        }
        Ok(self.reduce_vec(symbols))
    }

    pub fn parse_element(&self, text: &str) -> Result<Automorphism> {
        self.parse_word(text).map(Automorphism::Word)
    }

    fn compact_names(&self) -> bool {
        self.states.iter().all(|s| s.name.chars().count() == 1)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        let sep = if self.compact_names() { "" } else { "*" };
        w.symbols()
            .iter()
            .map(|s| {
                let name = self.state_name(s.state as usize);
                if s.inverse {
                    format!("{name}^-1")
                } else {
                    name.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn format(&self, g: &Automorphism) -> String {
        match g {
            Automorphism::Word(w) => self.format_word(w),
            Automorphism::Node { perm, sections } => {
                let secs: Vec<String> = sections.iter().map(|s| self.format(s)).collect();
                format!("{perm}[{}]", secs.join(", "))
            }
            Automorphism::Portrait(p) => {
                let mut s = String::from("{");
                for (i, (v, q)) in p.labels().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    let _ = write!(s, "\"{v}\": {q}");
                }
                s.push('}');
                s
            }
        }
    }
}

fn node_or_identity(perm: Permutation, sections: Vec<Automorphism>) -> Automorphism {
    if perm.is_identity() && sections.iter().all(Automorphism::is_syntactic_identity) {
        Automorphism::identity()
    } else {
        Automorphism::Node { perm, sections }
    }
}

/// Registers hidden states for every nontrivial sub-portrait and returns the
/// one-symbol word naming `p` (empty for the identity).
fn compile_portrait(
    p: &Portrait,
    owner: &str,
    at: &Vertex,
    states: &mut Vec<State>,
    hidden: &mut HashMap<Portrait, u32>,
) -> Word {
    if p.is_identity() {
        return Word::empty();
    }
    if let Some(&s) = hidden.get(p) {
        return Word::from_symbols(vec![Symbol::new(s)]);
    }
    let d = p.degree();
    let sections = (0..d as u8).map(|x| compile_portrait(&p.section(x), owner, &at.child(x), states, hidden)).collect();
    let perm = p.root_perm();
    let index = states.len() as u32;
    states.push(State {
        name: format!("{owner}@{at}"),
        perm_inv: perm.inverse(),
        perm,
        sections,
        inv_sections: Vec::new(),
    });
    hidden.insert(p.clone(), index);
    Word::from_symbols(vec![Symbol::new(index)])
}
