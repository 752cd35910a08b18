use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::Ball;
use crate::element::{Automorphism, Word};
use crate::error::{Error, Result};
use crate::group::GroupDef;
use crate::tree::Vertex;

#[derive(Clone, Debug, Serialize)]
pub struct TnfEntry {
    pub element: String,
    #[serde(skip)]
    pub word: Word,
    pub fix_interior: Vec<Vertex>,
}

/// Elements whose level-`k` fixed-point interiors generate a Boolean algebra
/// of subsets of `V_k`. When `achieved`, that algebra is the full power set.
#[derive(Clone, Debug, Serialize)]
pub struct TnfCertificate {
    pub level: usize,
    pub radius_max: usize,
    pub achieved: bool,
    /// Length of the last element needed; minimal over the search order.
    pub radius: Option<usize>,
    /// Atoms of the generated algebra.
    pub atoms: usize,
    pub level_size: usize,
    pub elements: Vec<TnfEntry>,
}

/// Class of each vertex index after splitting by the sets in `sets`.
/// The algebra generated by the sets is the set of unions of classes.
fn atoms(level_size: usize, d: usize, sets: impl IntoIterator<Item = impl AsRef<[Vertex]>>) -> Vec<u32> {
    let mut class = vec![0u32; level_size];
    for set in sets {
        refine(&mut class, d, set.as_ref());
    }
    class
}

/// Splits every class by membership in `set`; returns the new class count.
fn refine(class: &mut [u32], d: usize, set: &[Vertex]) -> usize {
    let mut inside = vec![false; class.len()];
    for v in set {
        inside[v.index(d)] = true;
    }
    let mut ids: HashMap<(u32, bool), u32> = HashMap::new();
    for (c, &m) in class.iter_mut().zip(&inside) {
        let next = ids.len() as u32;
        *c = *ids.entry((*c, m)).or_insert(next);
    }
    ids.len()
}

fn class_count(class: &[u32]) -> usize {
    class.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// Searches the ball of radius `radius_max` in shortlex order for elements
/// whose fixed-point interiors at level `k` separate every vertex of `V_k`.
///
/// Only elements that split an existing atom are kept. Failure to separate
/// within the radius is reported through `achieved`, not as an error.
pub fn tnf_certificate(group: &GroupDef, k: usize, radius_max: usize, budget: usize) -> Result<TnfCertificate> {
    if k == 0 {
        return Err(Error::InvalidInput("certificate level must be at least 1".into()));
    }
    let d = group.degree();
    let level_size = group
        .alphabet()
        .level_size(k)
        .filter(|&n| n <= budget)
        .ok_or(Error::BudgetExceeded { budget })?;
    let mut class = vec![0u32; level_size];
    let mut classes = 1;
    let mut elements = Vec::new();
    let cert = |elements: Vec<TnfEntry>, achieved: bool, radius: Option<usize>, atoms: usize| TnfCertificate {
        level: k,
        radius_max,
        achieved,
        radius,
        atoms,
        level_size,
        elements,
    };
    if classes == level_size {
        return Ok(cert(elements, true, Some(0), classes));
    }

    let mut words = Ball::new(group, radius_max).peekable();
    while let Some(first) = words.next() {
        let len = first.len();
        let mut layer = vec![first];
        while words.peek().is_some_and(|w| w.len() == len) {
            layer.push(words.next().expect("peeked"));
        }
        let interiors: Vec<Vec<Vertex>> = layer
            .par_iter()
            .map(|w| group.fix_interior(&Automorphism::Word(w.clone()), k, budget))
            .collect::<Result<_>>()?;
        for (word, interior) in layer.into_iter().zip(interiors) {
            let next = refine(&mut class, d, &interior);
            if next > classes {
                classes = next;
                elements.push(TnfEntry { element: group.format_word(&word), word, fix_interior: interior });
                if classes == level_size {
                    return Ok(cert(elements, true, Some(len), classes));
                }
            }
        }
    }
    Ok(cert(elements, false, None, classes))
}

/// Recomputes every listed interior and the atoms they generate.
pub fn verify_tnf(group: &GroupDef, cert: &TnfCertificate, budget: usize) -> Result<bool> {
    for e in &cert.elements {
        if group.fix_interior(&Automorphism::Word(e.word.clone()), cert.level, budget)? != e.fix_interior {
            return Ok(false);
        }
    }
    let class = atoms(cert.level_size, group.degree(), cert.elements.iter().map(|e| &e.fix_interior));
    let count = class_count(&class);
    Ok(count == cert.atoms && cert.achieved == (count == cert.level_size))
}
