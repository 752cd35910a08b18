use std::collections::BTreeMap;

use serde::Serialize;

use super::orbits::orbits;
use crate::catalog::{level_action, switch_group, MAX_SWITCH_LEVEL};
use crate::error::{Error, Result};
use crate::measure::MeasureValue;
use crate::rational::Q;
use crate::tree::Vertex;

/// `r_i = Σ_p v_p(2i) mod 2` for `i = 1..j`, where `v_p(m)` is the `m`-th
/// letter (counting from 1) of the `p`-th vertex. All vertices must be
/// binary and on the same even level `2j`.
pub fn r_invariant(tuple: &[Vertex]) -> Result<Vec<u8>> {
    let level = tuple.first().map_or(0, Vertex::level);
    if !level.is_multiple_of(2) || tuple.iter().any(|v| v.level() != level) {
        return Err(Error::InvalidInput("r-invariant needs vertices on one even level".into()));
    }
    if let Some(&x) = tuple.iter().flat_map(|v| v.letters()).find(|&&x| x > 1) {
        return Err(Error::LetterOutOfRange { letter: usize::from(x), d: 2 });
    }
    Ok((1..=level / 2)
        .map(|i| tuple.iter().map(|v| v.letters()[2 * i - 1]).fold(0, |acc, x| acc ^ x))
        .collect())
}

/// `r` of a tuple of level-`2j` vertex indices, packed with `r_1` first.
fn r_bits(j: usize, tuple: &[usize]) -> u32 {
    let level = 2 * j;
    (1..=j).fold(0, |acc, i| {
        let shift = level - 2 * i;
        let bit = tuple.iter().fold(0, |b, &x| b ^ ((x >> shift) & 1)) as u32;
        acc << 1 | bit
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RClass {
    /// `r_1 ... r_j` as a bit string.
    pub r: String,
    /// Ordered tuples of `V_2j^n` in the class.
    pub tuples: usize,
    /// Their share of `V_2j^n`.
    pub mass: MeasureValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct RInvarianceReport {
    pub j: usize,
    pub n: usize,
    pub level: usize,
    pub generators: usize,
    /// `r(g v) = r(v)` for every generator and every ordered tuple.
    pub invariant: bool,
    pub classes: Vec<RClass>,
    /// Every class has mass `2^-j`.
    pub equal_masses: bool,
    pub orbits: usize,
    /// `r` is constant on each orbit of distinct unordered tuples.
    pub constant_on_orbits: bool,
}

/// Sweeps all ordered `n`-tuples of level-`2j` vertices under the
/// generators of `switch-group(2j)`.
pub fn r_invariance_check(j: usize, n: usize, budget: usize) -> Result<RInvarianceReport> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("the r-invariant is only invariant for even n, got {n}")));
    }
    if j == 0 || 2 * j > MAX_SWITCH_LEVEL {
        return Err(Error::InvalidTruncation(2 * j));
    }
    let level = 2 * j;
    let group = switch_group(level)?.group;
    let action = level_action(&group, level)?;
    let size = 1usize << level;
    let total = size.checked_pow(n as u32).filter(|&t| t <= budget).ok_or(Error::BudgetExceeded { budget })?;

    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut invariant = true;
    let mut tuple = vec![0usize; n];
    let mut image = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut().rev() {
            *slot = c % size;
            c /= size;
        }
        let r = r_bits(j, &tuple);
        *counts.entry(r).or_default() += 1;
        for perm in &action {
            for (y, &x) in image.iter_mut().zip(&tuple) {
                *y = perm[x] as usize;
            }
            invariant &= r_bits(j, &image) == r;
        }
    }
    let classes: Vec<RClass> = counts
        .into_iter()
        .map(|(r, tuples)| RClass {
            r: format!("{r:0j$b}"),
            tuples,
            mass: MeasureValue::new(Q::new(tuples.into(), total.into())).expect("class share"),
        })
        .collect();
    let expected = Q::new(1.into(), (1u64 << j).into());
    let equal_masses = classes.len() == 1 << j && classes.iter().all(|c| *c.mass.value() == expected);

    let part = orbits(&group, n, level, budget)?;
    let mut orbit_r: Vec<Option<u32>> = vec![None; part.orbits.len()];
    let mut constant_on_orbits = true;
    for (t, &o) in part.tuples.iter().zip(&part.orbit_of) {
        let t: Vec<usize> = t.iter().map(|&x| x as usize).collect();
        let r = r_bits(j, &t);
        match orbit_r[o as usize] {
            None => orbit_r[o as usize] = Some(r),
            Some(prev) => constant_on_orbits &= prev == r,
        }
    }
    Ok(RInvarianceReport {
        j,
        n,
        level,
        generators: action.len(),
        invariant,
        classes,
        equal_masses,
        orbits: part.orbits.len(),
        constant_on_orbits,
    })
}
