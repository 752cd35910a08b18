//! Exact measures of fixed-point sets and supports on the boundary, under the
//! uniform Bernoulli measure.
//!
//! For a finite-state element the fixed-point measure satisfies
//! `m(s) = (1/d) Σ_{x : s fixes x} m(s|_x)` over the states of its minimal
//! machine. The identity state absorbs with value 1; states that cannot reach
//! it through fixed letters get 0; the rest form a square system that is
//! strictly substochastic on its support and is solved exactly.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::automaton::MinimalAutomaton;
use crate::element::Automorphism;
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::rational::{self, serialize_q, Q};
use crate::tree::Vertex;

/// An exact rational in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct MeasureValue(#[serde(serialize_with = "serialize_q")] Q);

impl MeasureValue {
    pub fn new(value: Q) -> Option<Self> {
        (value >= Q::zero() && value <= Q::one()).then_some(Self(value))
    }

    pub fn zero() -> Self {
        Self(Q::zero())
    }

    pub fn one() -> Self {
        Self(Q::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(rational::q(num, den)).expect("ratio within [0, 1]")
    }

    pub fn value(&self) -> &Q {
        &self.0
    }

    pub fn into_inner(self) -> Q {
        self.0
    }

    pub fn complement(&self) -> Self {
        Self(Q::one() - &self.0)
    }
}

impl std::fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&rational::format_q(&self.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Acts trivially on its whole subtree: value 1.
    Trivial,
    /// Cannot reach the trivial state through fixed letters: value 0.
    Doomed,
    /// Solved from the linear system.
    Transient,
}

/// The fixed-point recursion of one element over its minimal machine.
#[derive(Clone, Debug)]
pub struct FixSystem {
    pub automaton: MinimalAutomaton,
    /// `matrix[s][t]`: fraction of letters fixed by `s` whose section is `t`.
    pub matrix: Vec<Vec<Q>>,
    pub kinds: Vec<StateKind>,
    /// Fixed-point measure of every state.
    pub solution: Vec<Q>,
}

impl FixSystem {
    pub fn from_automaton(automaton: MinimalAutomaton) -> Self {
        let n = automaton.len();
        let d = automaton.degree();
        let weight = Q::new(1.into(), (d as i64).into());
        let mut matrix = vec![vec![Q::zero(); n]; n];
        for (s, row) in matrix.iter_mut().enumerate() {
            for x in 0..d as u8 {
                if automaton.perm(s).fixes(x) {
                    row[automaton.child(s, x)] += &weight;
                }
            }
        }

        let identity = automaton.identity_state();
        // Backward reachability of the identity along fixed-letter edges.
        let mut reaches = vec![false; n];
        if let Some(id) = identity {
            reaches[id] = true;
            let mut changed = true;
            while changed {
                changed = false;
                for s in 0..n {
                    if !reaches[s] && (0..n).any(|t| reaches[t] && !matrix[s][t].is_zero()) {
                        reaches[s] = true;
                        changed = true;
                    }
                }
            }
        }
        let kinds: Vec<StateKind> = (0..n)
            .map(|s| {
                if Some(s) == identity {
                    StateKind::Trivial
                } else if reaches[s] {
                    StateKind::Transient
                } else {
                    StateKind::Doomed
                }
            })
            .collect();

        let transient: Vec<usize> = (0..n).filter(|&s| kinds[s] == StateKind::Transient).collect();
        let pos: HashMap<usize, usize> = transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut a = vec![vec![Q::zero(); transient.len()]; transient.len()];
        let mut b = vec![Q::zero(); transient.len()];
        for (i, &s) in transient.iter().enumerate() {
            a[i][i] += Q::one();
            for t in 0..n {
                if matrix[s][t].is_zero() {
                    continue;
                }
                match kinds[t] {
                    StateKind::Trivial => b[i] += &matrix[s][t],
                    StateKind::Transient => a[i][pos[&t]] -= &matrix[s][t],
                    StateKind::Doomed => {}
                }
            }
        }
        let values = rational::solve(a, b).expect("transient system is nonsingular");
        let mut solution = vec![Q::zero(); n];
        if let Some(id) = identity {
            solution[id] = Q::one();
        }
        for (i, &s) in transient.iter().enumerate() {
            solution[s] = values[i].clone();
        }
        Self { automaton, matrix, kinds, solution }
    }

    pub fn fix_measure(&self) -> MeasureValue {
        MeasureValue::new(self.solution[0].clone()).expect("fixed-point measure within [0, 1]")
    }

    /// Number of level-`k` vertices fixed by the element (upper count) and
    /// of those whose section is trivial (lower count).
    pub fn level_counts(&self, k: usize) -> (BigUint, BigUint) {
        let (upper, lower) = self.count_table(k);
        (upper[0].clone(), lower[0].clone())
    }

    /// [`level_counts`](Self::level_counts) for every state of the machine.
    pub fn count_table(&self, k: usize) -> (Vec<BigUint>, Vec<BigUint>) {
        let a = &self.automaton;
        let n = a.len();
        let identity = a.identity_state();
        let mut upper = vec![BigUint::one(); n];
        let mut lower: Vec<BigUint> = (0..n).map(|s| if Some(s) == identity { BigUint::one() } else { BigUint::zero() }).collect();
        for _ in 0..k {
            let mut nu = vec![BigUint::zero(); n];
            let mut nl = vec![BigUint::zero(); n];
            for s in 0..n {
                for x in 0..a.degree() as u8 {
                    if a.perm(s).fixes(x) {
                        let c = a.child(s, x);
                        nu[s] += &upper[c];
                        nl[s] += &lower[c];
                    }
                }
            }
            upper = nu;
            lower = nl;
        }
        (upper, lower)
    }

    /// State reached along `v` if every letter of `v` is fixed.
    pub fn fixed_state(&self, v: &Vertex) -> Option<usize> {
        let a = &self.automaton;
        let mut s = 0;
        for &x in v.letters() {
            if !a.perm(s).fixes(x) {
                return None;
            }
            s = a.child(s, x);
        }
        Some(s)
    }

    /// Exact bounds `[μ(interior at k), m_k]` around the fixed-point measure.
    pub fn level_bound(&self, k: usize) -> LevelBound {
        let (upper, lower) = self.level_counts(k);
        let total = BigUint::from(self.automaton.degree()).pow(k as u32);
        let to_measure = |c: BigUint| MeasureValue::new(Q::new(c.into(), total.clone().into())).expect("count fraction");
        LevelBound { level: k, lower: to_measure(lower), upper: to_measure(upper) }
    }

    /// Level-`k` vertices fixed with trivial section: cylinders inside Fix(g).
    pub fn fix_interior(&self, k: usize) -> Vec<Vertex> {
        let a = &self.automaton;
        let Some(identity) = a.identity_state() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack = vec![(Vertex::root(), 0usize)];
        while let Some((v, s)) = stack.pop() {
            if v.level() == k {
                if s == identity {
                    out.push(v);
                }
                continue;
            }
            if s == identity {
                for w in descendants(a.degree(), &v, k) {
                    out.push(w);
                }
                continue;
            }
            if self.solution[s].is_zero() {
                continue;
            }
            for x in (0..a.degree() as u8).rev() {
                if a.perm(s).fixes(x) {
                    stack.push((v.child(x), a.child(s, x)));
                }
            }
        }
        out.sort();
        out
    }
}

fn descendants(d: usize, v: &Vertex, k: usize) -> impl Iterator<Item = Vertex> + '_ {
    let depth = k - v.level();
    let count = d.pow(depth as u32);
    (0..count).map(move |i| v.concat(&Vertex::from_index(i, depth, d)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelBound {
    pub level: usize,
    pub lower: MeasureValue,
    pub upper: MeasureValue,
}

impl GroupDef {
    pub fn fix_system(&self, g: &Automorphism, budget: usize) -> Result<FixSystem> {
        Ok(FixSystem::from_automaton(self.minimize(g, budget)?))
    }

    /// Exact `μ(Fix(g))`.
    pub fn fix_measure(&self, g: &Automorphism, budget: usize) -> Result<MeasureValue> {
        Ok(self.fix_system(g, budget)?.fix_measure())
    }

    /// Exact `μ(supp(g)) = 1 - μ(Fix(g))`.
    pub fn supp_measure(&self, g: &Automorphism, budget: usize) -> Result<MeasureValue> {
        Ok(self.fix_measure(g, budget)?.complement())
    }

    /// `m_k(g)`: fraction of level-`k` vertices fixed by `g`.
    ///
    /// Counts by recursion over fixed letters only, memoized on
    /// `(section, remaining depth)`, so it needs no closure budget.
    pub fn fix_measure_level(&self, g: &Automorphism, k: usize) -> MeasureValue {
        let mut memo = HashMap::new();
        let count = self.count_fixed(g, k, &mut memo);
        let total = BigUint::from(self.degree()).pow(k as u32);
        MeasureValue::new(Q::new(count.into(), total.into())).expect("count fraction")
    }

    fn count_fixed(&self, g: &Automorphism, k: usize, memo: &mut HashMap<(Automorphism, usize), BigUint>) -> BigUint {
        if k == 0 {
            return BigUint::one();
        }
        if g.is_syntactic_identity() {
            return BigUint::from(self.degree()).pow(k as u32);
        }
        if let Some(c) = memo.get(&(g.clone(), k)) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for x in self.alphabet().letters() {
            let (y, sec) = self.step(g, x);
            if y == x {
                total += self.count_fixed(&sec, k - 1, memo);
            }
        }
        memo.insert((g.clone(), k), total.clone());
        total
    }

    pub fn fix_interior(&self, g: &Automorphism, k: usize, budget: usize) -> Result<Vec<Vertex>> {
        Ok(self.fix_system(g, budget)?.fix_interior(k))
    }

    /// Character value `χ(g) = μ(Fix(g))`.
    pub fn char_value(&self, g: &Automorphism, budget: usize) -> Result<MeasureValue> {
        self.fix_measure(g, budget)
    }

    /// `{χ(g_i g_j^-1)}` together with an exact semidefiniteness verdict.
    pub fn gram_psd_check(&self, elements: &[Automorphism], budget: usize) -> Result<GramReport> {
        let n = elements.len();
        let mut matrix = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = self.compose(&elements[i], &self.inverse(&elements[j]));
                let v = self.char_value(&prod, budget)?.into_inner();
                matrix[j][i] = v.clone();
                matrix[i][j] = v;
            }
        }
        let psd = rational::is_psd(&matrix);
        Ok(GramReport { matrix, psd })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    #[serde(serialize_with = "rational::serialize_q_matrix")]
    pub matrix: Vec<Vec<Q>>,
    pub psd: bool,
}

/// Measure of the cylinder union of `vertices` (all on one level).
pub fn cylinder_measure(d: usize, vertices: &[Vertex]) -> Result<MeasureValue> {
    let mut total = Q::zero();
    for v in vertices {
        total += Q::new(1.into(), BigUint::from(d).pow(v.level() as u32).into());
    }
    MeasureValue::new(total).ok_or_else(|| Error::InvalidInput("overlapping cylinders".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::DEFAULT_BUDGET;
    use crate::catalog;

    fn grig() -> GroupDef {
        catalog::load("grigorchuk").unwrap().group
    }

    #[test]
    fn grigorchuk_generator_measures() {
        let g = grig();
        for (w, num, den) in [("a", 0, 1), ("b", 1, 7), ("c", 2, 7), ("d", 4, 7), ("e", 1, 1)] {
            let el = g.parse_element(w).unwrap();
            assert_eq!(g.fix_measure(&el, DEFAULT_BUDGET).unwrap(), MeasureValue::ratio(num, den), "{w}");
        }
    }

    #[test]
    fn kinds_of_d_system() {
        let g = grig();
        let sys = g.fix_system(&g.parse_element("d").unwrap(), DEFAULT_BUDGET).unwrap();
        // d, b, c, a, e in canonical order.
        assert_eq!(sys.automaton.len(), 5);
        assert_eq!(sys.kinds.iter().filter(|k| **k == StateKind::Doomed).count(), 1);
        assert_eq!(sys.kinds.iter().filter(|k| **k == StateKind::Trivial).count(), 1);
    }

    #[test]
    fn level_measures() {
        let g = grig();
        let d = g.parse_element("d").unwrap();
        assert_eq!(g.fix_measure_level(&d, 1), MeasureValue::one());
        assert_eq!(g.fix_measure_level(&g.parse_element("ab").unwrap(), 0), MeasureValue::one());
        let interior = g.fix_interior(&d, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(interior, vec![Vertex::new(vec![0])]);
        assert_eq!(g.supp_measure(&d, DEFAULT_BUDGET).unwrap(), MeasureValue::ratio(3, 7));
    }

    #[test]
    fn identity_and_free_extremes() {
        let g = grig();
        let e = Automorphism::identity();
        assert_eq!(g.supp_measure(&e, DEFAULT_BUDGET).unwrap(), MeasureValue::zero());
        assert_eq!(g.fix_interior(&e, 3, DEFAULT_BUDGET).unwrap().len(), 8);
        let a = g.parse_element("a").unwrap();
        assert_eq!(g.supp_measure(&a, DEFAULT_BUDGET).unwrap(), MeasureValue::one());
        assert!(g.fix_interior(&a, 4, DEFAULT_BUDGET).unwrap().is_empty());
    }

    #[test]
    fn gram_of_e_and_a_is_identity_matrix() {
        let g = grig();
        let els = [Automorphism::identity(), g.parse_element("a").unwrap()];
        let r = g.gram_psd_check(&els, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.matrix, vec![vec![rational::q(1, 1), rational::q(0, 1)], vec![rational::q(0, 1), rational::q(1, 1)]]);
        assert!(r.psd);
    }
}
