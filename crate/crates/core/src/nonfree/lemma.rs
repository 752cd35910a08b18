//! The subset lemma: if `H < Sym(n)` is transitive and a nonempty
//! `A ⊆ {1..n}` satisfies `|gA Δ hA| <= |A|` for all `g != h` in `H`, then
//! `|A| > n/2`.
//!
//! With `x = g^-1 h` the hypothesis reads `|A ∩ xA| >= |A|/2` for every
//! `x ∈ H`, so it holds exactly when `H` lies inside
//! `P_A = {x : 2|A ∩ xA| >= |A|}`. Conjugating `H` moves `A` to any set of the
//! same size and keeps transitivity, so it suffices to take
//! `A = {0..k-1}` for each `k` and enumerate every subgroup inside `P_A`.
//! Sizes `k > n/2` satisfy the conclusion outright and are skipped.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest degree accepted by [`lemma_subsets_verify`].
pub const MAX_LEMMA_DEGREE: usize = 7;

type Perm = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCounterexample {
    pub n: usize,
    /// One-based points of `A`.
    pub set: Vec<usize>,
    /// Generators of `H` in one-line notation on `1..n`.
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCase {
    pub n: usize,
    pub k: usize,
    /// Size of `P_A`.
    pub admissible: usize,
    /// Subgroups of `Sym(n)` contained in `P_A`.
    pub subgroups: usize,
    pub transitive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub n_max: usize,
    pub cases: Vec<LemmaCase>,
    pub counterexamples: Vec<LemmaCounterexample>,
}

fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Perm = (0..n as u8).collect();
    fn heap(k: usize, cur: &mut Perm, out: &mut Vec<Perm>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k.is_multiple_of(2) {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

/// Position of `p` in the lexicographic order of `Sym(n)`.
fn lex_rank(p: &[u8]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&y| y < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// Sym(n) as a multiplication table over sorted one-line permutations.
struct SymTable {
    n: usize,
    perms: Vec<Perm>,
    /// `mul[i * len + j]` is `perms[i] ∘ perms[j]`.
    mul: Vec<u16>,
    identity: usize,
}

impl SymTable {
    fn new(n: usize) -> Self {
        let perms = all_perms(n);
        let len = perms.len();
        let mut mul = vec![0u16; len * len];
        let mut r = [0u8; MAX_LEMMA_DEGREE];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                for (slot, &x) in r.iter_mut().zip(q) {
                    *slot = p[usize::from(x)];
                }
                mul[i * len + j] = lex_rank(&r[..n]) as u16;
            }
        }
        debug_assert!(perms.iter().enumerate().all(|(i, p)| lex_rank(p) == i));
        Self { n, perms, mul, identity: 0 }
    }

    fn len(&self) -> usize {
        self.perms.len()
    }

    fn mul(&self, i: usize, j: usize) -> usize {
        usize::from(self.mul[i * self.len() + j])
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

/// Closure of `elements` under right multiplication by `gens`, abandoned as
/// soon as an element leaves `allowed`. When `elements` is a subgroup whose
/// generators are among `gens`, this is the subgroup generated by `gens`.
fn join(t: &SymTable, elements: &[usize], gens: &[usize], allowed: &Bits) -> Option<Vec<usize>> {
    let mut members = Bits::new(t.len());
    let mut list = elements.to_vec();
    for &e in elements {
        members.set(e);
    }
    let mut i = 0;
    while i < list.len() {
        let e = list[i];
        for &g in gens {
            let p = t.mul(e, g);
            if !members.get(p) {
                if !allowed.get(p) {
                    return None;
                }
                members.set(p);
                list.push(p);
            }
        }
        i += 1;
    }
    list.sort_unstable();
    Some(list)
}

fn is_transitive(t: &SymTable, gens: &[usize]) -> bool {
    let mut seen = vec![false; t.n];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = usize::from(t.perms[g][x]);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn one_based(p: &Perm) -> Vec<usize> {
    p.iter().map(|&x| usize::from(x) + 1).collect()
}

/// Every subgroup inside `P_A` for `A = {0..k-1}`, by joining cyclic
/// subgroups one at a time starting from the trivial group.
fn check_case(t: &SymTable, k: usize) -> (LemmaCase, Vec<LemmaCounterexample>) {
    let n = t.n;
    let mut allowed = Bits::new(t.len());
    let mut admissible = 0;
    for (i, p) in t.perms.iter().enumerate() {
        let overlap = p[..k].iter().filter(|&&x| usize::from(x) < k).count();
        if 2 * overlap >= k {
            allowed.set(i);
            admissible += 1;
        }
    }
    // One generator per cyclic subgroup inside P_A.
    let mut cyclic: Vec<usize> = Vec::new();
    let mut cyclic_seen: HashSet<Vec<usize>> = HashSet::new();
    for x in (0..t.len()).filter(|&x| allowed.get(x) && x != t.identity) {
        if let Some(c) = join(t, &[t.identity], &[x], &allowed) {
            if cyclic_seen.insert(c) {
                cyclic.push(x);
            }
        }
    }

    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: VecDeque<(Vec<usize>, Vec<usize>)> = VecDeque::new();
    seen.insert(vec![t.identity]);
    queue.push_back((vec![t.identity], Vec::new()));
    let mut transitive = 0;
    let mut counterexamples = Vec::new();
    while let Some((elements, gens)) = queue.pop_front() {
        if is_transitive(t, &gens) {
            transitive += 1;
            counterexamples.push(LemmaCounterexample {
                n,
                set: (1..=k).collect(),
                generators: gens.iter().map(|&g| one_based(&t.perms[g])).collect(),
            });
        }
        for &x in &cyclic {
            if elements.binary_search(&x).is_ok() {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(x);
            let Some(group) = join(t, &elements, &next_gens, &allowed) else {
                continue;
            };
            if seen.insert(group.clone()) {
                queue.push_back((group, next_gens));
            }
        }
    }
    (LemmaCase { n, k, admissible, subgroups: seen.len(), transitive }, counterexamples)
}

/// Exhaustive check of the subset lemma for `2 <= n <= n_max`.
pub fn lemma_subsets_verify(n_max: usize) -> Result<LemmaReport> {
    if n_max > MAX_LEMMA_DEGREE {
        return Err(Error::InvalidInput(format!("n_max must be at most {MAX_LEMMA_DEGREE}")));
    }
    let tables: Vec<SymTable> = (2..=n_max).map(SymTable::new).collect();
    let jobs: Vec<(&SymTable, usize)> = tables.iter().flat_map(|t| (1..=t.n / 2).map(move |k| (t, k))).collect();
    let results: Vec<(LemmaCase, Vec<LemmaCounterexample>)> = jobs.par_iter().map(|&(t, k)| check_case(t, k)).collect();
    let mut cases = Vec::new();
    let mut counterexamples = Vec::new();
    for (case, found) in results {
        cases.push(case);
        counterexamples.extend(found);
    }
    Ok(LemmaReport { n_max, cases, counterexamples })
}

/// Direct check over every two-generated subgroup of `Sym(n)` and every
/// nonempty `A`, testing the hypothesis on all pairs `g != h`. Every
/// subgroup of `Sym(n)` is two-generated for `n <= 4`, so there this is
/// exhaustive.
pub fn lemma_brute_force(n: usize) -> Vec<LemmaCounterexample> {
    let t = SymTable::new(n);
    let mut everything = Bits::new(t.len());
    for i in 0..t.len() {
        everything.set(i);
    }
    let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for x in 0..t.len() {
        for y in x..t.len() {
            let g = join(&t, &[t.identity], &[x, y], &everything).expect("closure inside Sym(n)");
            groups.entry(g).or_insert_with(|| vec![x, y]);
        }
    }
    let mut out = Vec::new();
    let mut keys: Vec<_> = groups.into_iter().collect();
    keys.sort();
    for (elements, gens) in keys {
        if !is_transitive(&t, &gens) {
            continue;
        }
        for mask in 1u32..(1 << n) {
            let image = |g: usize| -> u32 {
                (0..n).filter(|&i| mask >> i & 1 == 1).fold(0, |m, i| m | 1 << t.perms[g][i])
            };
            let size = mask.count_ones();
            let images: Vec<u32> = elements.iter().map(|&g| image(g)).collect();
            let hypothesis = images.iter().enumerate().all(|(i, a)| images[i + 1..].iter().all(|b| (a ^ b).count_ones() <= size));
            if hypothesis && 2 * size as usize <= n {
                out.push(LemmaCounterexample {
                    n,
                    set: (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect(),
                    generators: gens.iter().map(|&g| one_based(&t.perms[g])).collect(),
                });
            }
        }
    }
    out
}
