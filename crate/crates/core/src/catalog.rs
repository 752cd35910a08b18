//! Built-in groups and finite-depth structural checks.

use std::collections::BTreeMap;

use crate::automaton::DEFAULT_BUDGET;
use crate::ball::Ball;
use crate::element::{Automorphism, Portrait, Symbol, Word};
use crate::error::{Error, Result};
use crate::group::{Generator, GroupDef, GroupMeta};
use crate::tree::{Alphabet, Permutation, Vertex};

/// Largest truncation level accepted for the switch group.
pub const MAX_SWITCH_LEVEL: usize = 10;

/// A named group together with the properties it is expected to satisfy.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub group: GroupDef,
    pub level_transitive: bool,
    /// Deepest level at which rigid-stabilizer witnesses are expected, if the
    /// group is weakly branch.
    pub weakly_branch_evidence_depth: Option<usize>,
    /// Words asserted to be trivial; each one is checked when loading.
    pub relations: Vec<String>,
    pub description: &'static str,
}

/// Names accepted by [`load`]; `switch-group(L)` takes a truncation level.
pub const NAMES: &[&str] = &["grigorchuk", "gupta-sidki-3", "binary-odometer", "switch-group(L)", "trivial"];

pub fn list() -> Vec<CatalogEntry> {
    ["grigorchuk", "gupta-sidki-3", "binary-odometer", "switch-group(4)", "trivial"]
        .iter()
        .map(|n| load(n).expect("built-in catalog entry"))
        .collect()
}

pub fn load(name: &str) -> Result<CatalogEntry> {
    let entry = match name {
        "grigorchuk" => grigorchuk(),
        "gupta-sidki-3" | "gupta-sidki" => gupta_sidki(),
        "binary-odometer" | "odometer" => odometer(),
        "trivial" => trivial(),
        _ => match parse_switch_level(name) {
            Some(level) => switch_group(level?)?,
            None => return Err(Error::UnknownGroup(name.to_string())),
        },
    };
    for rel in &entry.relations {
        let w = entry.group.parse_element(rel)?;
        if !entry.group.is_trivial(&w, DEFAULT_BUDGET)? {
            return Err(Error::InvalidInput(format!("catalog relation `{rel}` is not trivial in {}", entry.name)));
        }
    }
    Ok(entry)
}

fn parse_switch_level(name: &str) -> Option<Result<usize>> {
    let rest = name.strip_prefix("switch-group")?;
    let digits = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).or_else(|| rest.strip_prefix('-'))?;
    Some(
        digits
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("bad switch-group truncation `{digits}`"))),
    )
}

/// Recursion bodies given by generator names, `"e"` for the identity.
fn recursion_group(d: usize, name: &str, defs: &[(&str, Permutation, Vec<&str>)]) -> GroupDef {
    let index = |n: &str| defs.iter().position(|(m, _, _)| *m == n).expect("known generator") as u32;
    let word = |n: &str| match n {
        "e" => Word::empty(),
        _ => Word::from_symbols(n.split('*').map(|t| match t.strip_suffix("^-1") {
            Some(base) => Symbol::inv(index(base)),
            None => Symbol::new(index(t)),
        }).collect()),
    };
    let generators = defs
        .iter()
        .map(|(n, perm, secs)| Generator::recursion(*n, perm.clone(), secs.iter().map(|s| word(s)).collect()))
        .collect();
    let meta = GroupMeta { name: Some(name.to_string()), level_transitive: Some(true) };
    GroupDef::new(Alphabet::new(d).expect("catalog alphabet"), generators, meta).expect("valid catalog group")
}

fn grigorchuk() -> CatalogEntry {
    let swap = Permutation::swap(2, 0, 1);
    let id = Permutation::identity(2);
    let group = recursion_group(
        2,
        "grigorchuk",
        &[
            ("a", swap, vec!["e", "e"]),
            ("b", id.clone(), vec!["a", "c"]),
            ("c", id.clone(), vec!["a", "d"]),
            ("d", id, vec!["e", "b"]),
        ],
    );
    CatalogEntry {
        name: "grigorchuk".into(),
        group,
        level_transitive: true,
        weakly_branch_evidence_depth: Some(3),
        relations: ["aa", "bb", "cc", "dd", "bcd"].map(String::from).to_vec(),
        description: "first Grigorchuk group <a,b,c,d> on the binary tree",
    }
}

fn gupta_sidki() -> CatalogEntry {
    let t = Permutation::from_cycles(3, &[vec![0, 1, 2]]).expect("3-cycle");
    let group = recursion_group(
        3,
        "gupta-sidki-3",
        &[("t", t, vec!["e", "e", "e"]), ("a", Permutation::identity(3), vec!["t", "t^-1", "a"])],
    );
    CatalogEntry {
        name: "gupta-sidki-3".into(),
        group,
        level_transitive: true,
        weakly_branch_evidence_depth: Some(2),
        relations: ["ttt", "aaa"].map(String::from).to_vec(),
        description: "Gupta-Sidki 3-group on the ternary tree",
    }
}

fn odometer() -> CatalogEntry {
    let group = recursion_group(2, "binary-odometer", &[("a", Permutation::swap(2, 0, 1), vec!["e", "a"])]);
    CatalogEntry {
        name: "binary-odometer".into(),
        group,
        level_transitive: true,
        weakly_branch_evidence_depth: None,
        relations: Vec::new(),
        description: "binary adding machine; acts freely",
    }
}

fn trivial() -> CatalogEntry {
    let meta = GroupMeta { name: Some("trivial".into()), level_transitive: Some(false) };
    CatalogEntry {
        name: "trivial".into(),
        group: GroupDef::new(Alphabet::new(2).expect("binary"), Vec::new(), meta).expect("empty group"),
        level_transitive: false,
        weakly_branch_evidence_depth: None,
        relations: Vec::new(),
        description: "trivial group on the binary tree",
    }
}

/// Name of the switch `sigma_v`.
pub fn switch_sigma_name(v: &Vertex) -> String {
    format!("s{v}")
}

/// Name of `h_l`, the product of the switches at every level-`l` vertex.
pub fn switch_h_name(l: usize) -> String {
    format!("h{l}")
}

/// The binary-tree group generated by `sigma_v` for `v` on even levels and
/// `h_l` for odd `l`, truncated to generators of level at most `level`.
///
/// Computations on levels `k <= level` see the same orbits as the full
/// group: generators of level at least `k` fix `V_k` pointwise.
pub fn switch_group(level: usize) -> Result<CatalogEntry> {
    if level == 0 || level > MAX_SWITCH_LEVEL {
        return Err(Error::InvalidTruncation(level));
    }
    let swap = Permutation::swap(2, 0, 1);
    let alphabet = Alphabet::new(2).expect("binary");
    let mut generators = Vec::new();
    let mut relations = Vec::new();
    for l in 0..=level {
        if l % 2 == 0 {
            for v in alphabet.level(l) {
                let portrait = Portrait::new(2, l + 1, BTreeMap::from([(v.clone(), swap.clone())])).expect("switch portrait");
                let name = switch_sigma_name(&v);
                relations.push(format!("{name}*{name}"));
                generators.push(Generator::portrait(name, portrait));
            }
        } else {
            let perms = alphabet.level(l).map(|v| (v, swap.clone())).collect();
            let portrait = Portrait::new(2, l + 1, perms).expect("level switch portrait");
            let name = switch_h_name(l);
            relations.push(format!("{name}*{name}"));
            generators.push(Generator::portrait(name, portrait));
        }
    }
    let name = format!("switch-group({level})");
    let meta = GroupMeta { name: Some(name.clone()), level_transitive: Some(true) };
    Ok(CatalogEntry {
        name,
        group: GroupDef::new(alphabet, generators, meta)?,
        level_transitive: true,
        weakly_branch_evidence_depth: Some(level),
        relations,
        description: "switches on even levels and full-level switches on odd levels",
    })
}

/// Permutation of `V_k` (by vertex index) induced by each generator.
pub fn level_action(group: &GroupDef, k: usize) -> Result<Vec<Vec<u32>>> {
    let d = group.degree();
    let size = group
        .alphabet()
        .level_size(k)
        .filter(|&n| n <= u32::MAX as usize)
        .ok_or_else(|| Error::InvalidInput(format!("level {k} too large")))?;
    Ok(group
        .generator_elements()
        .iter()
        .map(|g| (0..size).map(|i| group.image(g, &Vertex::from_index(i, k, d)).index(d) as u32).collect())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelTransitivity {
    pub level: usize,
    pub transitive: bool,
    pub orbits: usize,
}

/// Orbits of the generated group on the vertices of level `k`.
pub fn check_level_transitive(group: &GroupDef, k: usize) -> Result<LevelTransitivity> {
    if k == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    let action = level_action(group, k)?;
    let size = group.alphabet().level_size(k).expect("checked by level_action");
    let mut orbit = vec![usize::MAX; size];
    let mut orbits = 0;
    for start in 0..size {
        if orbit[start] != usize::MAX {
            continue;
        }
        orbit[start] = orbits;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for perm in &action {
                let w = perm[v] as usize;
                if orbit[w] == usize::MAX {
                    orbit[w] = orbits;
                    stack.push(w);
                }
            }
        }
        orbits += 1;
    }
    Ok(LevelTransitivity { level: k, transitive: orbits == 1, orbits })
}

/// Whether `g` acts trivially outside the subtree below `v` and nontrivially
/// inside it.
pub fn is_rigid_at(group: &GroupDef, g: &Automorphism, v: &Vertex, budget: usize) -> Result<bool> {
    let mut cur = g.clone();
    for &x in v.letters() {
        if !group.root_perm(&cur).is_identity() {
            return Ok(false);
        }
        for y in group.alphabet().letters().filter(|&y| y != x) {
            if !group.is_trivial(&group.section_at(&cur, y), budget)? {
                return Ok(false);
            }
        }
        cur = group.section_at(&cur, x);
    }
    Ok(!group.is_trivial(&cur, budget)?)
}

/// First word in shortlex order of length at most `radius` lying in the
/// rigid stabilizer of `v`.
pub fn rist_witness(group: &GroupDef, v: &Vertex, radius: usize, budget: usize) -> Result<Option<Word>> {
    v.check(group.alphabet())?;
    for w in Ball::new(group, radius) {
        if is_rigid_at(group, &Automorphism::Word(w.clone()), v, budget)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
