use num_bigint::BigInt;
use serde::Serialize;

use crate::catalog::level_action;
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::measure::MeasureValue;
use crate::rational::Q;
use crate::tree::Vertex;

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub id: usize,
    /// Least member in vertex order.
    pub representative: Vec<Vertex>,
    pub size: usize,
    /// `size * n! / d^(kn)`.
    pub weight: MeasureValue,
}

/// Orbits of the diagonal action on unordered `n`-tuples of distinct
/// level-`k` vertices. Ids follow the order of least members.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitPartition {
    pub n: usize,
    pub level: usize,
    pub degree: usize,
    pub orbits: Vec<Orbit>,
    /// Sorted tuples of vertex indices, in lexicographic order.
    #[serde(skip)]
    pub tuples: Vec<Vec<u32>>,
    #[serde(skip)]
    pub orbit_of: Vec<u32>,
}

impl OrbitPartition {
    pub fn tuple_index(&self, tuple: &[u32]) -> Option<usize> {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).ok()
    }

    pub fn members(&self, id: usize) -> impl Iterator<Item = &[u32]> + '_ {
        self.tuples.iter().zip(&self.orbit_of).filter(move |(_, &o)| o as usize == id).map(|(t, _)| t.as_slice())
    }

    pub fn vertices(&self, tuple: &[u32]) -> Vec<Vertex> {
        tuple.iter().map(|&i| Vertex::from_index(i as usize, self.level, self.degree)).collect()
    }

    /// Mass of one tuple cylinder, `n!/d^(kn)`.
    pub fn tuple_mass(&self) -> Q {
        tuple_mass(self.degree, self.n, self.level)
    }

    /// Mass of the distinct-tuple region at this level.
    pub fn distinct_mass(&self) -> Q {
        self.tuple_mass() * Q::from_integer(self.tuples.len().into())
    }
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

pub(crate) fn tuple_mass(d: usize, n: usize, k: usize) -> Q {
    Q::new(factorial(n), BigInt::from(d).pow((k * n) as u32))
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// All sorted `n`-subsets of `0..size` in lexicographic order.
pub(crate) fn combinations(size: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n as u32).collect();
    if n > size {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n).rev().find(|&i| (cur[i] as usize) < size - n + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..n {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub(crate) fn apply_tuple(perm: &[u32], tuple: &[u32]) -> Vec<u32> {
    let mut image: Vec<u32> = tuple.iter().map(|&x| perm[x as usize]).collect();
    image.sort_unstable();
    image
}

/// Orbit partition of distinct unordered `n`-tuples at level `k`.
///
/// `budget` caps the number of tuples.
pub fn orbits(group: &GroupDef, n: usize, k: usize, budget: usize) -> Result<OrbitPartition> {
    let d = group.degree();
    if n == 0 {
        return Err(Error::InvalidInput("tuple size must be at least 1".into()));
    }
    let size = group.alphabet().level_size(k).ok_or(Error::BudgetExceeded { budget })?;
    if size < n {
        return Err(Error::InvalidInput(format!("level {k} has {size} vertices, fewer than n = {n}")));
    }
    match binomial(size, n) {
        Some(count) if count <= budget => {}
        _ => return Err(Error::BudgetExceeded { budget }),
    }
    let action = level_action(group, k)?;
    let tuples = combinations(size, n);
    let mut orbit_of = vec![u32::MAX; tuples.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..tuples.len() {
        if orbit_of[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        orbit_of[start] = id;
        stack.push(start);
        let mut count = 0;
        while let Some(i) = stack.pop() {
            count += 1;
            for perm in &action {
                let image = apply_tuple(perm, &tuples[i]);
                let j = tuples.binary_search(&image).expect("images of distinct tuples are distinct");
                if orbit_of[j] == u32::MAX {
                    orbit_of[j] = id;
                    stack.push(j);
                }
            }
        }
        sizes.push((start, count));
    }
    let mass = tuple_mass(d, n, k);
    let orbits = sizes
        .into_iter()
        .enumerate()
        .map(|(id, (start, size))| Orbit {
            id,
            representative: tuples[start].iter().map(|&i| Vertex::from_index(i as usize, k, d)).collect(),
            size,
            weight: MeasureValue::new(&mass * Q::from_integer(size.into())).expect("orbit weight"),
        })
        .collect();
    Ok(OrbitPartition { n, level: k, degree: d, orbits, tuples, orbit_of })
}
