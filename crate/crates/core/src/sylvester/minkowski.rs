//! Minkowski summands of associahedra and their shuffles, and the check that
//! their normal fan is the sylvester fan.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{enumerate_classes, Permutation};
use crate::arith::{add, dot, neg, unit, zeros, Rational, RationalVector};
use crate::error::{Error, Result};
use crate::model::BlockStructure;

/// Finite point set; the summand is its convex hull.
pub type Summand = Vec<RationalVector>;

/// `{-e_i, ..., -e_k}` for every `1 <= i < k <= m`.
pub fn asso_summands(m: usize) -> Vec<Summand> {
    embedded_asso(m, 0, m)
}

fn embedded_asso(m: usize, offset: usize, dim: usize) -> Vec<Summand> {
    let mut out = Vec::new();
    for i in 1..=m {
        for k in i + 1..=m {
            out.push((i..=k).map(|j| neg(&unit(dim, offset + j - 1))).collect());
        }
    }
    out
}

/// Each block's associahedron summands, then the segments
/// `{e_{M_{r-1}+i}, e_{M_{s-1}+j}}` for blocks `r < s`.
pub fn shuffle_summands(blocks: &BlockStructure) -> Vec<Summand> {
    let m = blocks.m();
    let (sizes, offsets) = (blocks.sizes(), blocks.offsets());
    let mut out: Vec<Summand> = sizes
        .iter()
        .zip(offsets)
        .flat_map(|(&size, &offset)| embedded_asso(size, offset, m))
        .collect();
    for r in 0..sizes.len() {
        for s in r + 1..sizes.len() {
            for i in 1..=sizes[r] {
                for j in 1..=sizes[s] {
                    out.push(vec![
                        unit(m, offsets[r] + i - 1),
                        unit(m, offsets[s] + j - 1),
                    ]);
                }
            }
        }
    }
    out
}

/// Sum of the `omega`-maximal points of the summands.
pub fn minkowski_vertex(summands: &[Summand], omega: &[Rational]) -> Result<RationalVector> {
    let mut total = zeros(omega.len());
    for (index, summand) in summands.iter().enumerate() {
        let mut best: Option<(Rational, &RationalVector)> = None;
        let mut tied = false;
        for p in summand {
            let value = dot(omega, p);
            match &best {
                Some((b, _)) if value < *b => {}
                Some((b, _)) if value == *b => tied = true,
                _ => {
                    best = Some((value, p));
                    tied = false;
                }
            }
        }
        if tied {
            return Err(Error::NonGenericDirection(index));
        }
        if let Some((_, p)) = best {
            total = add(&total, p);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinkowskiVertex {
    pub class: Permutation,
    #[serde(with = "crate::arith::serde_q::vec")]
    pub vertex: RationalVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinkowskiReport {
    pub blocks: BlockStructure,
    pub classes: usize,
    pub distinct_vertices: usize,
    /// One vertex per class, at the canonical ranking point.
    pub vertices: Vec<MinkowskiVertex>,
    /// Members whose vertex differs from their class's.
    pub inconstant: Vec<Permutation>,
    /// Pairs of classes sharing a vertex.
    pub collisions: Vec<(Permutation, Permutation)>,
}

impl MinkowskiReport {
    pub fn pass(&self) -> bool {
        self.inconstant.is_empty()
            && self.collisions.is_empty()
            && self.distinct_vertices == self.classes
    }
}

/// Evaluates the shuffle summands at the ranking point of every member of
/// every class.
pub fn normal_fan_check(blocks: &BlockStructure) -> Result<MinkowskiReport> {
    let classes = enumerate_classes(blocks)?;
    let summands = shuffle_summands(blocks);
    let mut vertices = Vec::with_capacity(classes.len());
    let mut inconstant = Vec::new();
    let mut owner: BTreeMap<RationalVector, Permutation> = BTreeMap::new();
    let mut collisions = Vec::new();
    for cls in &classes {
        let vertex = minkowski_vertex(&summands, &cls.canonical().ranking_point())?;
        for pi in &cls.members[1..] {
            if minkowski_vertex(&summands, &pi.ranking_point())? != vertex {
                inconstant.push(pi.clone());
            }
        }
        match owner.get(&vertex) {
            Some(prev) => collisions.push((prev.clone(), cls.canonical().clone())),
            None => {
                owner.insert(vertex.clone(), cls.canonical().clone());
            }
        }
        vertices.push(MinkowskiVertex {
            class: cls.canonical().clone(),
            vertex,
        });
    }
    Ok(MinkowskiReport {
        blocks: blocks.clone(),
        classes: classes.len(),
        distinct_vertices: owner.len(),
        vertices,
        inconstant,
        collisions,
    })
}
