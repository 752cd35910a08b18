use std::collections::{HashMap, HashSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::Ball;
use crate::catalog::is_rigid_at;
use crate::element::{Automorphism, Word};
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::measure::MeasureValue;
use crate::rational::{serialize_q, Q};
use crate::tree::Vertex;

/// How many levels below the target the cover may be refined.
const MAX_EXTRA_DEPTH: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct SupportHit {
    pub vertex: Vertex,
    pub element: String,
    #[serde(skip)]
    pub word: Word,
    pub supp_measure: MeasureValue,
    /// `μ(X_v) / d`.
    pub bound: MeasureValue,
    pub bound_met: bool,
}

/// Among the words of the ball that are rigid at `v` (trivial outside `X_v`,
/// nontrivial inside), one of largest support measure; ties go to the first
/// word in shortlex order.
pub fn support_search(group: &GroupDef, v: &Vertex, radius: usize, budget: usize) -> Result<Option<SupportHit>> {
    v.check(group.alphabet())?;
    let words: Vec<Word> = Ball::new(group, radius).collect();
    let scored: Vec<Option<Q>> = words
        .par_iter()
        .map(|w| {
            let g = Automorphism::Word(w.clone());
            if is_rigid_at(group, &g, v, budget)? {
                Ok(Some(group.supp_measure(&g, budget)?.into_inner()))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, &Q)> = None;
    for (i, s) in scored.iter().enumerate() {
        if let Some(s) = s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    let Some((i, supp)) = best else {
        return Ok(None);
    };
    let d = group.degree();
    let bound = cylinder(d, v) / Q::from_integer(d.into());
    Ok(Some(SupportHit {
        vertex: v.clone(),
        element: group.format_word(&words[i]),
        word: words[i].clone(),
        supp_measure: MeasureValue::new(supp.clone()).expect("support measure"),
        bound_met: *supp >= bound,
        bound: MeasureValue::new(bound).expect("cylinder fraction"),
    }))
}

fn cylinder(d: usize, v: &Vertex) -> Q {
    Q::new(1.into(), num_bigint::BigInt::from(d).pow(v.level() as u32))
}

#[derive(Clone, Debug, Serialize)]
pub struct AnfRound {
    pub round: usize,
    pub depth: usize,
    #[serde(serialize_with = "serialize_q")]
    pub defect_before: Q,
    /// Maximal cylinders of `A` inside the fixed-point interior of the
    /// current element.
    pub cover: Vec<Vertex>,
    #[serde(serialize_with = "serialize_q")]
    pub cover_measure: Q,
    pub factors: Vec<SupportHit>,
    #[serde(serialize_with = "serialize_q")]
    pub defect_after: Q,
    /// The cover reached `d/(d+1)` of the defect and every factor met the
    /// `1/d` support bound.
    pub bound_met: bool,
    /// `defect_after <= d/(d+1) * defect_before`.
    pub decay_ok: bool,
}

/// An element supported inside the clopen set `A` whose support misses
/// `defect` of `A`'s mass.
#[derive(Clone, Debug, Serialize)]
pub struct AnfApproximation {
    pub target: Vec<Vertex>,
    #[serde(serialize_with = "serialize_q")]
    pub eps: Q,
    pub target_measure: MeasureValue,
    pub element: String,
    #[serde(skip)]
    pub word: Word,
    pub supp_measure: MeasureValue,
    pub defect: MeasureValue,
    pub achieved: bool,
    /// Depth at which `supp(g) ⊆ A` is checked.
    pub certificate_depth: usize,
    pub rounds: Vec<AnfRound>,
}

/// Drops vertices lying below another listed vertex and sorts the rest.
fn normalize_target(target: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = target
        .iter()
        .filter(|v| !target.iter().any(|u| u != *v && u.is_prefix_of(v)))
        .cloned()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    out.sort();
    out
}

fn in_target(target: &[Vertex], v: &Vertex) -> bool {
    target.iter().any(|u| u.is_prefix_of(v))
}

/// Coarsest cylinders whose union is `set` (all of `set` on level `depth`).
fn maximal_cylinders(d: usize, set: &HashSet<Vertex>, depth: usize) -> Vec<Vertex> {
    fn go(d: usize, set: &HashSet<Vertex>, depth: usize, v: Vertex, out: &mut Vec<Vertex>) -> bool {
        if v.level() == depth {
            let inside = set.contains(&v);
            if inside {
                out.push(v);
            }
            return inside;
        }
        let mark = out.len();
        let full = (0..d as u8).map(|x| go(d, set, depth, v.child(x), out)).fold(true, |a, b| a & b);
        if full {
            out.truncate(mark);
            out.push(v);
        }
        full
    }
    let mut out = Vec::new();
    go(d, set, depth, Vertex::root(), &mut out);
    out
}

/// Greedy construction of `g` with `supp(g) ⊆ A` and `μ(A ∖ supp(g)) < eps`.
///
/// Each round covers `A ∩ Fix(g_n)` from inside by maximal cylinders taken at
/// the current depth, deepening until the cover carries `d/(d+1)` of the
/// defect, and multiplies in one [`support_search`] result per cylinder.
/// The factors have disjoint supports, so the new support is the union.
pub fn anf_construct(
    group: &GroupDef,
    target: &[Vertex],
    eps: &Q,
    radius: usize,
    max_rounds: usize,
    budget: usize,
) -> Result<AnfApproximation> {
    if *eps <= Q::zero() {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    for v in target {
        v.check(group.alphabet())?;
    }
    let d = group.degree();
    let target = normalize_target(target);
    let target_measure: Q = target.iter().map(|v| cylinder(d, v)).sum();
    let ratio = Q::new(d.into(), (d + 1).into());
    let base_depth = target.iter().map(Vertex::level).max().unwrap_or(0);
    let max_depth = base_depth + MAX_EXTRA_DEPTH;

    let mut word = Word::empty();
    let mut supp = Q::zero();
    let mut depth = base_depth;
    let mut rounds = Vec::new();
    let mut cache: HashMap<Vertex, Option<SupportHit>> = HashMap::new();
    loop {
        let defect = &target_measure - &supp;
        if defect < *eps || rounds.len() == max_rounds {
            break;
        }
        let g = Automorphism::Word(word.clone());
        let threshold = &ratio * &defect;
        let (cover, cover_measure) = loop {
            if group.alphabet().level_size(depth).is_none_or(|n| n > budget) {
                return Err(Error::BudgetExceeded { budget });
            }
            let interior: HashSet<Vertex> =
                group.fix_interior(&g, depth, budget)?.into_iter().filter(|v| in_target(&target, v)).collect();
            let cover = maximal_cylinders(d, &interior, depth);
            let measure: Q = cover.iter().map(|v| cylinder(d, v)).sum();
            if measure >= threshold || depth >= max_depth {
                break (cover, measure);
            }
            depth += 1;
        };
        if cover.is_empty() {
            return Err(Error::Stalled { cylinder: target.first().cloned().unwrap_or_else(Vertex::root) });
        }

        let mut factors = Vec::with_capacity(cover.len());
        for v in &cover {
            let hit = match cache.get(v) {
                Some(hit) => hit.clone(),
                None => {
                    let hit = support_search(group, v, radius, budget)?;
                    cache.insert(v.clone(), hit.clone());
                    hit
                }
            };
            let hit = hit.ok_or_else(|| Error::Stalled { cylinder: v.clone() })?;
            word = group.multiply_words(&word, &hit.word);
            factors.push(hit);
        }
        supp = group.supp_measure(&Automorphism::Word(word.clone()), budget)?.into_inner();
        let defect_after = &target_measure - &supp;
        let bound_met = cover_measure >= threshold && factors.iter().all(|h| h.bound_met);
        let decay_ok = defect_after <= &ratio * &defect;
        if bound_met && !decay_ok {
            return Err(Error::Verification(format!(
                "round {}: defect {} exceeds d/(d+1) of {}",
                rounds.len() + 1,
                crate::rational::format_q(&defect_after),
                crate::rational::format_q(&defect)
            )));
        }
        if !bound_met {
            log::warn!("round {}: support bound not met, decay not asserted", rounds.len() + 1);
        }
        rounds.push(AnfRound {
            round: rounds.len() + 1,
            depth,
            defect_before: defect,
            cover,
            cover_measure,
            factors,
            defect_after,
            bound_met,
            decay_ok,
        });
    }
    let defect = &target_measure - &supp;
    Ok(AnfApproximation {
        element: group.format_word(&word),
        word,
        achieved: defect < *eps,
        eps: eps.clone(),
        target_measure: MeasureValue::new(target_measure).ok_or_else(|| Error::InvalidInput("target measure".into()))?,
        supp_measure: MeasureValue::new(supp).expect("support measure"),
        defect: MeasureValue::new(defect).expect("defect within [0, 1]"),
        certificate_depth: depth,
        target,
        rounds,
    })
}

/// Rechecks an approximation from scratch: the element is trivial on every
/// level-`certificate_depth` cylinder outside `A`, and its defect and
/// support measure match a fresh computation.
pub fn verify_anf(group: &GroupDef, approx: &AnfApproximation, budget: usize) -> Result<bool> {
    let g = Automorphism::Word(approx.word.clone());
    let depth = approx.certificate_depth;
    let interior: HashSet<Vertex> = group.fix_interior(&g, depth, budget)?.into_iter().collect();
    let outside_trivial = group
        .alphabet()
        .level(depth)
        .filter(|v| !in_target(&approx.target, v))
        .all(|v| interior.contains(&v));
    let supp = group.supp_measure(&g, budget)?.into_inner();
    let target_measure: Q = approx.target.iter().map(|v| cylinder(group.degree(), v)).sum();
    let defect = &target_measure - &supp;
    Ok(outside_trivial
        && supp == *approx.supp_measure.value()
        && defect == *approx.defect.value()
        && approx.achieved == (defect < approx.eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::DEFAULT_BUDGET;
    use crate::catalog;
    use crate::rational::q;

    fn grig() -> GroupDef {
        catalog::load("grigorchuk").unwrap().group
    }

    #[test]
    fn support_search_examples() {
        let g = grig();
        let hit = support_search(&g, &Vertex::new(vec![1]), 3, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(hit.element, "d");
        assert_eq!(*hit.supp_measure.value(), q(3, 7));
        assert!(hit.bound_met);
        let hit = support_search(&g, &Vertex::new(vec![0]), 3, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(hit.element, "ada");
        assert_eq!(*hit.supp_measure.value(), q(3, 7));
        let odo = catalog::load("binary-odometer").unwrap().group;
        assert!(support_search(&odo, &Vertex::new(vec![0]), 4, DEFAULT_BUDGET).unwrap().is_none());
    }

    #[test]
    fn empty_target_gives_identity() {
        let g = grig();
        let r = anf_construct(&g, &[], &q(1, 100), 3, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.element, "e");
        assert!(r.defect.value().is_zero());
        assert!(r.achieved);
        assert!(verify_anf(&g, &r, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn half_tree_target() {
        let g = grig();
        let r = anf_construct(&g, &[Vertex::new(vec![0])], &q(1, 8), 3, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.element, "ada");
        assert_eq!(*r.defect.value(), q(1, 14));
        assert_eq!(r.rounds.len(), 1);
        assert!(r.rounds[0].bound_met && r.rounds[0].decay_ok);
        assert!(verify_anf(&g, &r, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn maximal_cylinders_merge_siblings() {
        let v = |s: &[u8]| Vertex::new(s.to_vec());
        let set: HashSet<Vertex> = [v(&[0, 0]), v(&[0, 1]), v(&[1, 1])].into_iter().collect();
        assert_eq!(maximal_cylinders(2, &set, 2), vec![v(&[0]), v(&[1, 1])]);
        assert!(maximal_cylinders(2, &HashSet::new(), 2).is_empty());
    }

    #[test]
    fn nested_targets_are_merged() {
        let v = |s: &[u8]| Vertex::new(s.to_vec());
        assert_eq!(normalize_target(&[v(&[0, 1]), v(&[0]), v(&[0])]), vec![v(&[0])]);
    }
}
