use std::collections::BTreeMap;

use serde::Serialize;

use super::orbits::{orbits, OrbitPartition};
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::measure::MeasureValue;
use crate::rational::Q;
use crate::tree::Vertex;

#[derive(Clone, Debug, Serialize)]
pub struct ComponentNode {
    pub level: usize,
    pub id: usize,
    /// Orbit of the truncated tuple one level up, or `None` when truncation
    /// collides coordinates (the node descends from the diagonal).
    pub parent: Option<usize>,
    pub size: usize,
    pub weight: MeasureValue,
    pub representative: Vec<Vertex>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerLevel {
    pub level: usize,
    pub components: usize,
    pub distinct_mass: MeasureValue,
    /// Mass of tuples with two coordinates in one cylinder.
    pub excluded_mass: MeasureValue,
    pub nodes: Vec<ComponentNode>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentTower {
    pub n: usize,
    pub levels: Vec<TowerLevel>,
    #[serde(skip)]
    pub partitions: Vec<OrbitPartition>,
}

fn truncate(p: &OrbitPartition, tuple: &[u32]) -> Vec<u32> {
    let d = p.degree as u32;
    let mut t: Vec<u32> = tuple.iter().map(|&i| i / d).collect();
    t.dedup();
    t
}

/// Orbit partitions for levels from the first one with `d^k >= n` up to
/// `k_max`, linked by truncation.
pub fn component_tower(group: &GroupDef, n: usize, k_max: usize, budget: usize) -> Result<ComponentTower> {
    let d = group.degree();
    let first = (1..=k_max)
        .find(|&k| group.alphabet().level_size(k).is_some_and(|s| s >= n))
        .ok_or_else(|| Error::InvalidInput(format!("no level up to {k_max} has {n} vertices")))?;
    let mut partitions: Vec<OrbitPartition> = Vec::new();
    let mut levels = Vec::new();
    for k in first..=k_max {
        let p = orbits(group, n, k, budget)?;
        let nodes = p
            .orbits
            .iter()
            .map(|o| {
                let rep: Vec<u32> = o.representative.iter().map(|v| v.index(d) as u32).collect();
                let parent = partitions.last().and_then(|prev| {
                    let t = truncate(&p, &rep);
                    (t.len() == n).then(|| prev.orbit_of[prev.tuple_index(&t).expect("distinct tuple")] as usize)
                });
                ComponentNode {
                    level: k,
                    id: o.id,
                    parent,
                    size: o.size,
                    weight: o.weight.clone(),
                    representative: o.representative.clone(),
                }
            })
            .collect();
        let distinct = p.distinct_mass();
        levels.push(TowerLevel {
            level: k,
            components: p.orbits.len(),
            excluded_mass: MeasureValue::new(Q::from_integer(1.into()) - &distinct).expect("excluded mass"),
            distinct_mass: MeasureValue::new(distinct).expect("distinct mass"),
            nodes,
        });
        partitions.push(p);
    }
    Ok(ComponentTower { n, levels, partitions })
}

impl ComponentTower {
    /// Every member of each orbit truncates into the same parent orbit, the
    /// weights of a parent's children add up to the parent's weight, and the
    /// component count never decreases.
    pub fn is_consistent(&self) -> bool {
        for (i, w) in self.partitions.windows(2).enumerate() {
            let (prev, cur) = (&w[0], &w[1]);
            let mut parent_of: Vec<Option<Option<u32>>> = vec![None; cur.orbits.len()];
            let mut child_mass: BTreeMap<u32, Q> = BTreeMap::new();
            for (t, &o) in cur.tuples.iter().zip(&cur.orbit_of) {
                let tr = truncate(cur, t);
                let parent = (tr.len() == cur.n).then(|| prev.orbit_of[prev.tuple_index(&tr).expect("distinct tuple")]);
                match parent_of[o as usize] {
                    None => parent_of[o as usize] = Some(parent),
                    Some(p) if p != parent => return false,
                    Some(_) => {}
                }
                if let Some(p) = parent {
                    *child_mass.entry(p).or_default() += cur.tuple_mass();
                }
            }
            let recorded = self.levels[i + 1].nodes.iter().map(|n| n.parent.map(|p| p as u32));
            if parent_of.iter().zip(recorded).any(|(p, r)| *p != Some(r)) {
                return false;
            }
            for o in &prev.orbits {
                if child_mass.get(&(o.id as u32)) != Some(o.weight.value()) {
                    return false;
                }
            }
            if cur.orbits.len() < prev.orbits.len() {
                return false;
            }
        }
        self.levels.iter().zip(&self.partitions).all(|(l, p)| {
            let total: Q = l.nodes.iter().map(|n| n.weight.value().clone()).sum();
            total == p.distinct_mass()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::DEFAULT_BUDGET;
    use crate::catalog;

    #[test]
    fn grigorchuk_pair_tower() {
        let g = catalog::load("grigorchuk").unwrap().group;
        let t = component_tower(&g, 2, 3, DEFAULT_BUDGET).unwrap();
        let counts: Vec<usize> = t.levels.iter().map(|l| l.components).collect();
        assert_eq!(counts[..2], [1, 2]);
        assert!(t.is_consistent());
        // The cross pairs at level 2 refine the unique level-1 pair; the
        // same-subtree pairs come from the diagonal.
        assert_eq!(t.levels[1].nodes[0].parent, None);
        assert_eq!(t.levels[1].nodes[1].parent, Some(0));
    }

    #[test]
    fn singletons_follow_level_transitivity() {
        for name in ["grigorchuk", "binary-odometer", "gupta-sidki-3"] {
            let g = catalog::load(name).unwrap().group;
            let t = component_tower(&g, 1, 4, DEFAULT_BUDGET).unwrap();
            assert!(t.levels.iter().all(|l| l.components == 1), "{name}");
            assert!(t.is_consistent());
        }
    }
}
