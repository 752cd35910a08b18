use std::collections::{BTreeMap, HashMap};

use super::lexer::{tokenize, Spanned, Tok};
use super::{ParseError, ParseErrorKind};
use crate::element::{Portrait, Symbol, Word};
use crate::group::{Generator, GroupDef, GroupMeta};
use crate::tree::{char_letter, Alphabet, Permutation, Vertex};

struct NameRef {
    name: String,
    inverse: bool,
    line: usize,
    column: usize,
}

enum RawBody {
    Recursion { perm: Permutation, sections: Vec<Vec<NameRef>> },
    Portrait(Portrait),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, kind: ParseErrorKind) -> ParseError {
        ParseError { line: at.line, column: at.column, kind }
    }

    fn expected(&self, what: &str) -> ParseError {
        let at = self.peek();
        self.error_at(at, ParseErrorKind::Expected { expected: what.to_string(), found: at.tok.describe() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Spanned> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.expected(what))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Spanned> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => Ok(self.bump()),
            _ => Err(self.expected(&format!("`{kw}`"))),
        }
    }

    fn ident(&mut self) -> PResult<(String, Spanned)> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            _ => Err(self.expected("identifier")),
        }
    }

    fn letter(&mut self, d: usize) -> PResult<u8> {
        let at = self.peek().clone();
        match at.tok {
            Tok::Int(n) if n < d => {
                self.bump();
                Ok(n as u8)
            }
            Tok::Int(n) => Err(self.error_at(&at, ParseErrorKind::LetterOutOfRange { letter: n, d })),
            _ => Err(self.expected("letter")),
        }
    }

    /// `"(" cycle* ")"`, cycle := `"(" INT+ ")"` | `INT INT+`.
    fn perm(&mut self, d: usize) -> PResult<Permutation> {
        self.expect(Tok::LParen, "`(`")?;
        let mut images: Vec<u8> = (0..d as u8).collect();
        let mut used = vec![false; d];
        loop {
            let start = self.peek().clone();
            let mut cycle: Vec<(u8, Spanned)> = Vec::new();
            match start.tok {
                Tok::RParen => {
                    self.bump();
                    break;
                }
                Tok::LParen => {
                    self.bump();
                    loop {
                        let at = self.peek().clone();
                        if at.tok == Tok::RParen && !cycle.is_empty() {
                            self.bump();
                            break;
                        }
                        cycle.push((self.letter(d)?, at));
                    }
                }
                Tok::Int(_) => {
                    while matches!(self.peek().tok, Tok::Int(_)) {
                        let at = self.peek().clone();
                        cycle.push((self.letter(d)?, at));
                    }
                    if cycle.len() < 2 {
                        return Err(self.expected("second letter of cycle"));
                    }
                }
                _ => return Err(self.expected("cycle or `)`")),
            }
            for (x, at) in &cycle {
                if std::mem::replace(&mut used[usize::from(*x)], true) {
                    return Err(self.error_at(at, ParseErrorKind::NotAPermutation(usize::from(*x))));
                }
            }
            for (i, (x, _)) in cycle.iter().enumerate() {
                images[usize::from(*x)] = cycle[(i + 1) % cycle.len()].0;
            }
        }
        Ok(Permutation::from_images(images).expect("disjoint cycles form a permutation"))
    }

    /// `"e"` | IDENT ("^-1")? ("*" IDENT ("^-1")?)*
    fn word(&mut self) -> PResult<Vec<NameRef>> {
        let (first, at) = self.ident()?;
        if first == "e" {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut name = first;
        let mut at = at;
        loop {
            let inverse = if self.peek().tok == Tok::InvSuffix {
                self.bump();
                true
            } else {
                false
            };
            out.push(NameRef { name, inverse, line: at.line, column: at.column });
            if self.peek().tok != Tok::Star {
                break;
            }
            self.bump();
            let next = self.ident()?;
            name = next.0;
            at = next.1;
        }
        Ok(out)
    }

    fn portrait(&mut self, alphabet: Alphabet) -> PResult<Portrait> {
        let d = alphabet.size();
        self.expect(Tok::LBrace, "`{`")?;
        let mut perms = BTreeMap::new();
        if self.peek().tok != Tok::RBrace {
            loop {
                let at = self.peek().clone();
                let Tok::Str(s) = at.tok.clone() else {
                    return Err(self.expected("vertex string"));
                };
                self.bump();
                let mut letters = Vec::new();
                for c in s.chars() {
                    match char_letter(c) {
                        Some(x) if usize::from(x) < d => letters.push(x),
                        Some(x) => return Err(self.error_at(&at, ParseErrorKind::LetterOutOfRange { letter: usize::from(x), d })),
                        None => return Err(self.error_at(&at, ParseErrorKind::UnexpectedChar(c))),
                    }
                }
                self.expect(Tok::Colon, "`:`")?;
                let p = self.perm(d)?;
                let v = Vertex::new(letters);
                if perms.insert(v, p).is_some() {
                    return Err(self.error_at(&at, ParseErrorKind::DuplicateVertex(s)));
                }
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        let depth = perms.keys().map(|v| v.level() + 1).max().unwrap_or(0);
        Ok(Portrait::new(d, depth, perms).expect("labels above computed depth"))
    }
}

/// Parses `.grp` source into a group definition.
pub fn parse(text: &str) -> Result<GroupDef, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    p.expect_keyword("alphabet")?;
    p.expect(Tok::Eq, "`=`")?;
    let at = p.peek().clone();
    let d = match at.tok {
        Tok::Int(n) => {
            p.bump();
            n
        }
        _ => return Err(p.expected("alphabet size")),
    };
    let alphabet = Alphabet::new(d).map_err(|_| p.error_at(&at, ParseErrorKind::InvalidAlphabet(d)))?;

    let mut defs: Vec<(String, RawBody)> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    while p.peek().tok != Tok::Eof {
        p.expect_keyword("gen")?;
        let (name, at) = p.ident()?;
        if name == "e" {
            return Err(p.error_at(&at, ParseErrorKind::ReservedName));
        }
        if names.contains_key(&name) {
            return Err(p.error_at(&at, ParseErrorKind::DuplicateGenerator(name)));
        }
        p.expect(Tok::Eq, "`=`")?;
        let (kind, _) = p.ident()?;
        let body = match kind.as_str() {
            "perm" => {
                let perm = p.perm(d)?;
                let open = p.expect(Tok::LBracket, "`[`")?;
                let mut sections = vec![p.word()?];
                while p.peek().tok == Tok::Comma {
                    p.bump();
                    sections.push(p.word()?);
                }
                p.expect(Tok::RBracket, "`,` or `]`")?;
                if sections.len() != d {
                    return Err(p.error_at(&open, ParseErrorKind::SectionCount { expected: d, found: sections.len() }));
                }
                RawBody::Recursion { perm, sections }
            }
            "portrait" => RawBody::Portrait(p.portrait(alphabet)?),
            _ => {
                p.pos -= 1;
                return Err(p.expected("`perm` or `portrait`"));
            }
        };
        names.insert(name.clone(), defs.len());
        defs.push((name, body));
    }

    let mut generators = Vec::with_capacity(defs.len());
    for (name, body) in defs {
        let g = match body {
            RawBody::Portrait(portrait) => Generator::portrait(name, portrait),
            RawBody::Recursion { perm, sections } => {
                let mut words = Vec::with_capacity(sections.len());
                for refs in sections {
                    let mut symbols = Vec::with_capacity(refs.len());
                    for r in refs {
                        let Some(&i) = names.get(&r.name) else {
                            return Err(ParseError {
                                line: r.line,
                                column: r.column,
                                kind: ParseErrorKind::UnknownIdentifier(r.name),
                            });
                        };
                        symbols.push(Symbol { state: i as u32, inverse: r.inverse });
                    }
                    words.push(Word::from_symbols(symbols));
                }
                Generator::recursion(name, perm, words)
            }
        };
        generators.push(g);
    }
    Ok(GroupDef::new(alphabet, generators, GroupMeta::default()).expect("parsed definition is well-formed"))
}
