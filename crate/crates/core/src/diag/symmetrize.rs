use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{Alphabet, Vertex};

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizationReport {
    pub n: usize,
    pub level: usize,
    /// Size of `S_n(A_1 × ... × A_n)` as a set of ordered tuples.
    pub lhs: usize,
    /// Size of `B^n ∖ ∪_j B_j^n`.
    pub rhs: usize,
    pub holds: bool,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn product(sets: &[&[usize]]) -> Vec<Vec<usize>> {
    sets.iter().fold(vec![Vec::new()], |acc, s| {
        acc.into_iter()
            .flat_map(|t| {
                s.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

/// Checks `S_n(A_1 × ... × A_n) = B^n ∖ ∪_j B_j^n` with `B = ∪ A_i` and
/// `B_j = B ∖ A_j`, for pairwise disjoint sets of level-`k` vertices, by
/// comparing both sides tuple by tuple over all of `V_k^n`.
pub fn symmetrization_identity_check(
    alphabet: Alphabet,
    level: usize,
    sets: &[Vec<Vertex>],
    budget: usize,
) -> Result<SymmetrizationReport> {
    let d = alphabet.size();
    let n = sets.len();
    if n == 0 {
        return Err(Error::InvalidInput("at least one set is required".into()));
    }
    let size = alphabet.level_size(level).ok_or(Error::BudgetExceeded { budget })?;
    let total = size.checked_pow(n as u32).filter(|&t| t <= budget).ok_or(Error::BudgetExceeded { budget })?;
    let mut owner: Vec<Option<usize>> = vec![None; size];
    let mut indexed: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (j, set) in sets.iter().enumerate() {
        let mut ids = Vec::new();
        for v in set {
            v.check(alphabet)?;
            if v.level() != level {
                return Err(Error::InvalidInput(format!("vertex \"{v}\" is not on level {level}")));
            }
            let i = v.index(d);
            match owner[i] {
                Some(o) if o != j => return Err(Error::InvalidInput(format!("sets {} and {} share \"{v}\"", o + 1, j + 1))),
                Some(_) => {}
                None => {
                    owner[i] = Some(j);
                    ids.push(i);
                }
            }
        }
        indexed.push(ids);
    }

    let mut lhs: HashSet<Vec<usize>> = HashSet::new();
    for sigma in permutations(n) {
        let factors: Vec<&[usize]> = sigma.iter().map(|&j| indexed[j].as_slice()).collect();
        lhs.extend(product(&factors));
    }

    let in_b = |x: usize| owner[x].is_some();
    let mut rhs = 0;
    let mut agree = true;
    let mut tuple = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut().rev() {
            *slot = c % size;
            c /= size;
        }
        let in_bn = tuple.iter().all(|&x| in_b(x));
        let in_some_bj = (0..n).any(|j| tuple.iter().all(|&x| in_b(x) && owner[x] != Some(j)));
        let right = in_bn && !in_some_bj;
        rhs += usize::from(right);
        agree &= right == lhs.contains(&tuple);
    }
    Ok(SymmetrizationReport { n, level, lhs: lhs.len(), rhs, holds: agree && lhs.len() == rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        Vertex::parse(s, Alphabet::new(2).unwrap()).unwrap()
    }

    #[test]
    fn two_singletons() {
        let r = symmetrization_identity_check(Alphabet::new(2).unwrap(), 2, &[vec![v("00")], vec![v("01")]], 1 << 20).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (2, 2));
    }

    #[test]
    fn empty_factor_and_single_set() {
        let a = Alphabet::new(2).unwrap();
        let r = symmetrization_identity_check(a, 2, &[vec![v("00"), v("11")], vec![]], 1 << 20).unwrap();
        assert!(r.holds && r.lhs == 0);
        let r = symmetrization_identity_check(a, 2, &[vec![v("00"), v("11")]], 1 << 20).unwrap();
        assert!(r.holds && r.lhs == 2);
    }

    #[test]
    fn three_sets() {
        let a = Alphabet::new(2).unwrap();
        let sets = [vec![v("000"), v("001")], vec![v("010")], vec![v("100"), v("111")]];
        let r = symmetrization_identity_check(a, 3, &sets, 1 << 20).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, 6 * 2 * 2);
    }

    #[test]
    fn overlapping_sets_rejected() {
        let a = Alphabet::new(2).unwrap();
        assert!(symmetrization_identity_check(a, 2, &[vec![v("00")], vec![v("00")]], 1 << 20).is_err());
        assert!(symmetrization_identity_check(a, 2, &[vec![v("0")]], 1 << 20).is_err());
    }
}
