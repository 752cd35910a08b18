//! Section closures, the word problem, and minimal state machines.
//!
//! The closure of `g` is the set of all sections `g|_v`. For finite-state
//! elements it is finite; every decision here runs over it breadth-first and
//! stops with [`Error::BudgetExceeded`] once it holds more than `budget`
//! states.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::element::Automorphism;
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::tree::{Permutation, Vertex};

/// Default state budget for section closures.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// The reachable section graph of an element. State 0 is the element itself.
#[derive(Clone, Debug)]
pub struct SectionClosure {
    pub states: Vec<Automorphism>,
    pub perms: Vec<Permutation>,
    pub children: Vec<Vec<usize>>,
}

impl SectionClosure {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

impl GroupDef {
    pub fn section_closure(&self, g: &Automorphism, budget: usize) -> Result<SectionClosure> {
        let mut index: HashMap<Automorphism, usize> = HashMap::new();
        let mut states = vec![g.clone()];
        index.insert(g.clone(), 0);
        let mut perms = Vec::new();
        let mut children = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let cur = states[next].clone();
            let mut images = Vec::with_capacity(self.degree());
            let mut kids = Vec::with_capacity(self.degree());
            for x in self.alphabet().letters() {
                let (y, sec) = self.step(&cur, x);
                images.push(y);
                let id = match index.get(&sec) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= budget {
                            return Err(Error::BudgetExceeded { budget });
                        }
                        let id = states.len();
                        index.insert(sec.clone(), id);
                        states.push(sec);
                        id
                    }
                };
                kids.push(id);
            }
            perms.push(Permutation::from_images(images).expect("root action is a permutation"));
            children.push(kids);
            next += 1;
        }
        Ok(SectionClosure { states, perms, children })
    }

    /// Decides whether `g` acts trivially on the whole tree.
    ///
    /// Breadth-first over sections, memoized on the section value: false at
    /// the first nontrivial root permutation, true once the closure is
    /// exhausted.
    pub fn is_trivial(&self, g: &Automorphism, budget: usize) -> Result<bool> {
        let mut seen: std::collections::HashSet<Automorphism> = std::collections::HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(g.clone());
        queue.push_back(g.clone());
        while let Some(cur) = queue.pop_front() {
            if cur.is_syntactic_identity() {
                continue;
            }
            for x in self.alphabet().letters() {
                let (y, sec) = self.step(&cur, x);
                if y != x {
                    return Ok(false);
                }
                if !seen.contains(&sec) {
                    if seen.len() >= budget {
                        return Err(Error::BudgetExceeded { budget });
                    }
                    seen.insert(sec.clone());
                    queue.push_back(sec);
                }
            }
        }
        Ok(true)
    }

    /// Semantic equality, via triviality of `g h^-1`.
    pub fn equal(&self, g: &Automorphism, h: &Automorphism, budget: usize) -> Result<bool> {
        self.is_trivial(&self.compose(g, &self.inverse(h)), budget)
    }

    /// Minimal state machine of `g`, canonically numbered.
    pub fn minimize(&self, g: &Automorphism, budget: usize) -> Result<MinimalAutomaton> {
        let closure = self.section_closure(g, budget)?;
        Ok(MinimalAutomaton::from_closure(self.degree(), &closure))
    }
}

/// Canonical minimal Mealy machine of a single automorphism.
///
/// State 0 is the element; the remaining states are numbered in
/// breadth-first order over letters. Equal elements have identical machines.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinimalAutomaton {
    d: usize,
    perms: Vec<Permutation>,
    children: Vec<Vec<usize>>,
    identity: Option<usize>,
}

impl MinimalAutomaton {
    /// Coarsest bisimulation by Moore refinement, then canonical renumbering.
    pub fn from_closure(d: usize, closure: &SectionClosure) -> Self {
        let n = closure.len();
        let mut perm_ids: BTreeMap<&Permutation, usize> = BTreeMap::new();
        for p in &closure.perms {
            let next = perm_ids.len();
            perm_ids.entry(p).or_insert(next);
        }
        let mut class: Vec<usize> = closure.perms.iter().map(|p| perm_ids[p]).collect();
        let mut count = perm_ids.len();
        loop {
            let mut sigs: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let keyed: Vec<(usize, Vec<usize>)> =
                (0..n).map(|s| (class[s], closure.children[s].iter().map(|&c| class[c]).collect())).collect();
            for k in &keyed {
                let next = sigs.len();
                sigs.entry(k.clone()).or_insert(next);
            }
            let refined: Vec<usize> = keyed.iter().map(|k| sigs[k]).collect();
            let new_count = sigs.len();
            class = refined;
            if new_count == count {
                break;
            }
            count = new_count;
        }

        // Canonical numbering: breadth-first from the class of state 0.
        let mut rep = vec![usize::MAX; count];
        for s in 0..n {
            if rep[class[s]] == usize::MAX {
                rep[class[s]] = s;
            }
        }
        let mut order = vec![usize::MAX; count];
        let mut queue = VecDeque::from([class[0]]);
        order[class[0]] = 0;
        let mut numbered = 1;
        let mut bfs = Vec::with_capacity(count);
        while let Some(c) = queue.pop_front() {
            bfs.push(c);
            for &child in &closure.children[rep[c]] {
                let cc = class[child];
                if order[cc] == usize::MAX {
                    order[cc] = numbered;
                    numbered += 1;
                    queue.push_back(cc);
                }
            }
        }
        let perms: Vec<Permutation> = bfs.iter().map(|&c| closure.perms[rep[c]].clone()).collect();
        let children: Vec<Vec<usize>> =
            bfs.iter().map(|&c| closure.children[rep[c]].iter().map(|&ch| order[class[ch]]).collect()).collect();
        let identity = (0..perms.len()).find(|&s| perms[s].is_identity() && children[s].iter().all(|&c| c == s));
        Self { d, perms, children, identity }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perm(&self, state: usize) -> &Permutation {
        &self.perms[state]
    }

    pub fn child(&self, state: usize, x: u8) -> usize {
        self.children[state][usize::from(x)]
    }

    /// The state acting trivially, if the machine has one.
    pub fn identity_state(&self) -> Option<usize> {
        self.identity
    }

    pub fn is_identity(&self) -> bool {
        self.identity == Some(0)
    }

    pub fn apply(&self, v: &Vertex) -> Vertex {
        let mut s = 0;
        let mut out = Vec::with_capacity(v.level());
        for &x in v.letters() {
            out.push(self.perms[s].apply(x));
            s = self.child(s, x);
        }
        Vertex::new(out)
    }

    /// State reached by reading `v` from the initial state.
    pub fn state_at(&self, v: &Vertex) -> usize {
        v.letters().iter().fold(0, |s, &x| self.child(s, x))
    }

    pub fn state_name(&self, state: usize) -> String {
        if Some(state) == self.identity {
            "e".to_string()
        } else {
            format!("s{state}")
        }
    }

    /// Deterministic text form: one line per state in canonical order,
    /// `name [images] section-names`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in 0..self.len() {
            let images: Vec<String> = self.perms[s].images().iter().map(|x| x.to_string()).collect();
            let secs: Vec<String> = self.children[s].iter().map(|&c| self.state_name(c)).collect();
            let _ = writeln!(out, "{} [{}] {}", self.state_name(s), images.join(" "), secs.join(" "));
        }
        out
    }
}
