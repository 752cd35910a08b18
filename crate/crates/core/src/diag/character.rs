use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::orbits::{factorial, orbits, OrbitPartition};
use crate::ball::Ball;
use crate::element::Automorphism;
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::measure::{FixSystem, MeasureValue};
use crate::rational::{serialize_q, Q};
use crate::tree::Vertex;

/// For every vertex of one level, how many of its descendants `depth - level`
/// levels further down are fixed by `g` (upper) and have trivial section
/// (lower).
#[derive(Clone, Debug)]
pub struct FixCounts {
    pub level: usize,
    pub depth: usize,
    pub upper: Vec<BigUint>,
    pub lower: Vec<BigUint>,
}

impl FixCounts {
    pub fn new(system: &FixSystem, d: usize, level: usize, depth: usize) -> Self {
        let (up, low) = system.count_table(depth - level);
        let size = d.pow(level as u32);
        let mut upper = Vec::with_capacity(size);
        let mut lower = Vec::with_capacity(size);
        for i in 0..size {
            match system.fixed_state(&Vertex::from_index(i, level, d)) {
                Some(s) => {
                    upper.push(up[s].clone());
                    lower.push(low[s].clone());
                }
                None => {
                    upper.push(BigUint::zero());
                    lower.push(BigUint::zero());
                }
            }
        }
        Self { level, depth, upper, lower }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterInterval {
    pub n: usize,
    pub level: usize,
    pub component: usize,
    pub depth: usize,
    pub element: String,
    pub lower: MeasureValue,
    pub upper: MeasureValue,
    /// Level-`level` tuples of the component mapped to themselves by `g`
    /// with coordinates exchanged; these are not counted as fixed.
    pub permuted: usize,
}

impl CharacterInterval {
    pub fn disjoint(&self, other: &CharacterInterval) -> bool {
        self.upper.value() < other.lower.value() || other.upper.value() < self.lower.value()
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lower.value() <= x && x <= self.upper.value()
    }
}

/// Sums of `∏ upper` and `∏ lower` over the tuples of one component.
fn component_sums(part: &OrbitPartition, component: usize, counts: &FixCounts) -> (BigUint, BigUint) {
    let tuples: Vec<&[u32]> = part.members(component).collect();
    tuples
        .par_iter()
        .map(|t| {
            let mut u = BigUint::one();
            let mut l = BigUint::one();
            for &i in t.iter() {
                u *= &counts.upper[i as usize];
                l *= &counts.lower[i as usize];
            }
            (u, l)
        })
        .reduce(|| (BigUint::zero(), BigUint::zero()), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn interval_from_counts(
    group: &GroupDef,
    part: &OrbitPartition,
    component: usize,
    g: &Automorphism,
    counts: &FixCounts,
) -> CharacterInterval {
    let d = part.degree;
    let size = part.orbits[component].size;
    let (u, l) = component_sums(part, component, counts);
    let scale = BigInt::from(size) * BigInt::from(d).pow(((counts.depth - part.level) * part.n) as u32);
    let upper = MeasureValue::new(Q::new(u.into(), scale.clone())).expect("character bound");
    let lower = MeasureValue::new(Q::new(l.into(), scale)).expect("character bound");
    let permuted = part
        .members(component)
        .filter(|t| {
            let images: Vec<u32> =
                part.vertices(t).iter().map(|v| group.image(g, v).index(d) as u32).collect();
            let mut sorted = images.clone();
            sorted.sort_unstable();
            sorted.as_slice() == *t && images.as_slice() != *t
        })
        .count();
    if permuted > 0 {
        log::debug!("component {component}: {permuted} tuples permuted among themselves, not counted as fixed");
    }
    CharacterInterval {
        n: part.n,
        level: part.level,
        component,
        depth: counts.depth,
        element: group.format(g),
        lower,
        upper,
        permuted,
    }
}

/// Exact bounds on `χ_α(g)` from the refinement of component `α` down to
/// `depth`: the lower end counts tuples whose every coordinate has trivial
/// section, the upper end tuples fixed coordinatewise.
pub fn char_interval(
    group: &GroupDef,
    part: &OrbitPartition,
    component: usize,
    g: &Automorphism,
    depth: usize,
    budget: usize,
) -> Result<CharacterInterval> {
    if component >= part.orbits.len() {
        return Err(Error::InvalidInput(format!("no component {component} at level {}", part.level)));
    }
    if depth < part.level {
        return Err(Error::InvalidInput(format!("depth {depth} is above the component level {}", part.level)));
    }
    let system = group.fix_system(g, budget)?;
    let counts = FixCounts::new(&system, part.degree, part.level, depth);
    Ok(interval_from_counts(group, part, component, g, &counts))
}

#[derive(Clone, Debug, Serialize)]
pub struct CharSumReport {
    pub n: usize,
    pub depth: usize,
    pub element: String,
    pub components: usize,
    /// `Σ c_α lower_α` and `Σ c_α upper_α`.
    #[serde(serialize_with = "serialize_q")]
    pub lower_sum: Q,
    #[serde(serialize_with = "serialize_q")]
    pub upper_sum: Q,
    /// `μ^n` of `Fix(g)^n` restricted to tuples with distinct level-`depth`
    /// prefixes, from the fixed-point measures of the sections.
    #[serde(serialize_with = "serialize_q")]
    pub exact: Q,
    #[serde(serialize_with = "serialize_q")]
    pub distinct_mass: Q,
    /// The same three values divided by `distinct_mass`.
    #[serde(serialize_with = "serialize_q")]
    pub normalized_lower: Q,
    #[serde(serialize_with = "serialize_q")]
    pub normalized_upper: Q,
    #[serde(serialize_with = "serialize_q")]
    pub normalized_exact: Q,
    pub holds: bool,
}

/// Compares the component-weighted character bounds at level `depth` with
/// an independent exact value.
///
/// The exact side assigns each level-`depth` vertex `v` the mass
/// `f_v = μ(Fix(g) ∩ X_v)`, read off the section's fixed-point measure, and
/// sums `∏ f_{v_i}` over ordered tuples of distinct vertices, which is
/// `n! e_n(f)`.
pub fn char_sum_check(group: &GroupDef, n: usize, g: &Automorphism, depth: usize, budget: usize) -> Result<CharSumReport> {
    let part = orbits(group, n, depth, budget)?;
    let d = group.degree();
    let system = group.fix_system(g, budget)?;
    let counts = FixCounts::new(&system, d, depth, depth);
    let mut lower_sum = Q::zero();
    let mut upper_sum = Q::zero();
    for o in &part.orbits {
        let iv = interval_from_counts(group, &part, o.id, g, &counts);
        lower_sum += o.weight.value() * iv.lower.value();
        upper_sum += o.weight.value() * iv.upper.value();
    }

    let cylinder = Q::new(BigInt::one(), BigInt::from(d).pow(depth as u32));
    let mut e = vec![Q::zero(); n + 1];
    e[0] = Q::one();
    for v in group.alphabet().level(depth) {
        let Some(s) = system.fixed_state(&v) else {
            continue;
        };
        let f = &cylinder * &system.solution[s];
        for j in (1..=n).rev() {
            let add = &e[j - 1] * &f;
            e[j] += add;
        }
    }
    let exact = Q::from_integer(factorial(n)) * &e[n];
    let distinct_mass = part.distinct_mass();
    let holds = lower_sum <= exact && exact <= upper_sum;
    Ok(CharSumReport {
        n,
        depth,
        element: group.format(g),
        components: part.orbits.len(),
        normalized_lower: &lower_sum / &distinct_mass,
        normalized_upper: &upper_sum / &distinct_mass,
        normalized_exact: &exact / &distinct_mass,
        lower_sum,
        upper_sum,
        exact,
        distinct_mass,
        holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRef {
    pub n: usize,
    pub id: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationPair {
    pub first: ComponentRef,
    pub second: ComponentRef,
    pub separator: Option<String>,
    pub first_interval: Option<CharacterInterval>,
    pub second_interval: Option<CharacterInterval>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub level: usize,
    pub depth: usize,
    pub radius: usize,
    pub components: Vec<ComponentRef>,
    pub pairs: Vec<SeparationPair>,
    pub unresolved: usize,
}

/// For every pair of components with `n <= n_max` at `level`, the first word
/// of the ball (shortlex) whose character intervals at `depth` are disjoint.
pub fn distinctness_search(
    group: &GroupDef,
    n_max: usize,
    level: usize,
    depth: usize,
    radius: usize,
    budget: usize,
) -> Result<SeparationReport> {
    if depth < level {
        return Err(Error::InvalidInput(format!("depth {depth} is above level {level}")));
    }
    let parts: Vec<OrbitPartition> = (1..=n_max).map(|n| orbits(group, n, level, budget)).collect::<Result<_>>()?;
    let components: Vec<ComponentRef> =
        parts.iter().flat_map(|p| p.orbits.iter().map(move |o| ComponentRef { n: p.n, id: o.id })).collect();
    let mut pairs: Vec<SeparationPair> = Vec::new();
    for (i, &a) in components.iter().enumerate() {
        for &b in &components[i + 1..] {
            pairs.push(SeparationPair { first: a, second: b, separator: None, first_interval: None, second_interval: None });
        }
    }
    let mut unresolved = pairs.len();
    for w in Ball::new(group, radius) {
        if unresolved == 0 {
            break;
        }
        let g = Automorphism::Word(w);
        let system = group.fix_system(&g, budget)?;
        let counts = FixCounts::new(&system, group.degree(), level, depth);
        let intervals: Vec<CharacterInterval> = components
            .iter()
            .map(|c| interval_from_counts(group, &parts[c.n - 1], c.id, &g, &counts))
            .collect();
        let index = |c: &ComponentRef| components.iter().position(|x| x == c).expect("listed component");
        for pair in pairs.iter_mut().filter(|p| p.separator.is_none()) {
            let (x, y) = (&intervals[index(&pair.first)], &intervals[index(&pair.second)]);
            if x.disjoint(y) {
                pair.separator = Some(x.element.clone());
                pair.first_interval = Some(x.clone());
                pair.second_interval = Some(y.clone());
                unresolved -= 1;
            }
        }
    }
    Ok(SeparationReport { level, depth, radius, components, pairs, unresolved })
}
