//! Two independent ways to list the maximal cones of a pivot fan.
//!
//! `Oracle` walks every candidate successor map (one improving neighbor per
//! non-top vertex) depth-first, abandoning a branch as soon as its partial
//! inequality system loses full dimension. `FlipBfs` starts from one sampled
//! generic weight and crosses each facet of each discovered cone.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Signed};
use rayon::prelude::*;

use super::fan::{Fan, FanCone};
use super::{
    arborescence_of, arborescence_rows, cone_of_arborescence, slope, step_scale, Arborescence,
    WeightSampler,
};
use crate::arith::{
    cones_equal, dot, interior_point, neg, primitive, scale, sub, HCone, InteriorPoint, Rational,
};
use crate::error::{Error, Result};
use crate::model::{LinearProgram, Vertex};

pub const ORACLE_CANDIDATE_CAP: u128 = 10_000_000;
const MAX_HALVINGS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Oracle,
    FlipBfs { seed: u64 },
}

pub fn enumerate_pivot_fan<P: LinearProgram + ?Sized>(
    inst: &P,
    engine: Engine,
) -> Result<Fan<Arborescence>> {
    let found = match engine {
        Engine::Oracle => oracle(inst)?,
        Engine::FlipBfs { seed } => flip_bfs(inst, seed)?,
    };
    Ok(Fan {
        dim: inst.dim(),
        cones: found
            .into_iter()
            .map(|(label, cone)| FanCone { label, cone })
            .collect(),
    })
}

/// Same arborescences, and equal cones by mutual containment.
pub fn engines_agree(a: &Fan<Arborescence>, b: &Fan<Arborescence>) -> Result<bool> {
    if a.len() != b.len() || a.labels().ne(b.labels()) {
        return Ok(false);
    }
    for (x, y) in a.cones.iter().zip(&b.cones) {
        if x.cone.rows != y.cone.rows && !cones_equal(&x.cone, &y.cone)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn oracle<P: LinearProgram + ?Sized>(inst: &P) -> Result<BTreeMap<Arborescence, HCone>> {
    let top = inst.top();
    let choices: Vec<(Vertex, Vec<Vertex>)> = inst
        .vertices()
        .into_iter()
        .filter(|v| *v != top)
        .map(|v| {
            let nb = inst.improving_neighbors(&v);
            (v, nb)
        })
        .collect();
    let candidates = choices
        .iter()
        .try_fold(1u128, |acc, (_, nb)| acc.checked_mul(nb.len() as u128))
        .unwrap_or(u128::MAX);
    if candidates > ORACLE_CANDIDATE_CAP {
        return Err(Error::SizeCap {
            size: usize::try_from(candidates).unwrap_or(usize::MAX),
            cap: ORACLE_CANDIDATE_CAP as usize,
        });
    }

    // Rows contributed by choosing `succ` at `u`.
    let c = inst.objective();
    let rows_for = |u: &Vertex, succ: &Vertex, nb: &[Vertex]| -> Vec<Vec<Rational>> {
        let pu = inst.point(u);
        let to_a = sub(&inst.point(succ), &pu);
        let gap_a = dot(c, &to_a);
        nb.iter()
            .filter(|v| *v != succ)
            .map(|v| {
                let to_v = sub(&inst.point(v), &pu);
                let gap_v = dot(c, &to_v);
                primitive(&sub(&scale(&to_a, &gap_v), &scale(&to_v, &gap_a)))
            })
            .collect()
    };

    let first_options: Vec<usize> = match choices.first() {
        Some((_, nb)) => (0..nb.len()).collect(),
        None => vec![],
    };
    let mut maps: Vec<Vec<usize>> = if choices.is_empty() {
        vec![vec![]]
    } else {
        first_options
            .par_iter()
            .map(|&k| {
                let mut out = Vec::new();
                let mut picked = vec![k];
                let rows = rows_for(&choices[0].0, &choices[0].1[k], &choices[0].1);
                if feasible(inst.dim(), &rows) {
                    descend(inst.dim(), &choices, &rows_for, &mut picked, rows, &mut out);
                }
                out
            })
            .flatten()
            .collect()
    };
    maps.sort();

    let arbs: Vec<Arborescence> = maps
        .into_iter()
        .map(|pick| {
            let mut succ: BTreeMap<Vertex, Vertex> = choices
                .iter()
                .zip(&pick)
                .map(|((u, nb), &k)| (u.clone(), nb[k].clone()))
                .collect();
            succ.insert(top.clone(), top.clone());
            Arborescence::from_map(succ)
        })
        .collect();
    let cones: Vec<(Arborescence, HCone)> = arbs
        .into_par_iter()
        .map(|a| cone_of_arborescence(inst, &a).map(|c| (a, c)))
        .collect::<Result<_>>()?;
    Ok(cones
        .into_iter()
        .filter(|(_, c)| c.witness.is_some())
        .collect())
}

fn feasible(dim: usize, rows: &[Vec<Rational>]) -> bool {
    if rows.is_empty() {
        return true;
    }
    let mut cone = HCone::new(dim, rows.to_vec()).expect("rows match dimension");
    interior_point(&mut cone) != InteriorPoint::LowerDimensional
}

fn descend<F>(
    dim: usize,
    choices: &[(Vertex, Vec<Vertex>)],
    rows_for: &F,
    picked: &mut Vec<usize>,
    rows: Vec<Vec<Rational>>,
    out: &mut Vec<Vec<usize>>,
) where
    F: Fn(&Vertex, &Vertex, &[Vertex]) -> Vec<Vec<Rational>>,
{
    let depth = picked.len();
    if depth == choices.len() {
        out.push(picked.clone());
        return;
    }
    let (u, nb) = &choices[depth];
    for k in 0..nb.len() {
        let extra = rows_for(u, &nb[k], nb);
        let mut next = rows.clone();
        let grew = !extra.is_empty();
        next.extend(extra);
        if grew && !feasible(dim, &next) {
            continue;
        }
        picked.push(k);
        descend(dim, choices, rows_for, picked, next, out);
        picked.pop();
    }
}

fn flip_bfs<P: LinearProgram + ?Sized>(
    inst: &P,
    seed: u64,
) -> Result<BTreeMap<Arborescence, HCone>> {
    let mut sampler = WeightSampler::new(inst.dim(), seed);
    let (_, start) = sampler.draw_generic(|w| arborescence_of(inst, w))?;

    let mut seen: BTreeMap<Arborescence, HCone> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(start.clone());
    seen.insert(start.clone(), realized_cone(inst, &start)?);

    while let Some(arb) = queue.pop_front() {
        let cone = seen[&arb].clone();
        let facets = cone.facets()?;
        let neighbors: Vec<Arborescence> = facets
            .par_iter()
            .map(|f| cross_facet(inst, &f.normal, &f.point))
            .collect::<Result<_>>()?;
        for next in neighbors {
            if !seen.contains_key(&next) {
                let c = realized_cone(inst, &next)?;
                seen.insert(next.clone(), c);
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

fn realized_cone<P: LinearProgram + ?Sized>(inst: &P, arb: &Arborescence) -> Result<HCone> {
    let cone = cone_of_arborescence(inst, arb)?;
    if cone.witness.is_none() {
        return Err(Error::InvalidArborescence(
            "sampled arborescence has a lower-dimensional cone".into(),
        ));
    }
    Ok(cone)
}

/// Arborescence on the far side of a facet. At the facet point `p` the
/// maximizer is chosen by slope at `p`, ties broken by slope along `-normal`,
/// which is the arborescence at `p - eps * normal` for all small `eps`. If that
/// still ties, falls back to explicit steps of halving length.
fn cross_facet<P: LinearProgram + ?Sized>(
    inst: &P,
    normal: &[Rational],
    point: &[Rational],
) -> Result<Arborescence> {
    if let Some(arb) = infinitesimal_step(inst, normal, point)? {
        return Ok(arb);
    }
    let half = Rational::new(1.into(), 2.into());
    let mut eps = Rational::one() / step_scale(normal);
    for _ in 0..MAX_HALVINGS {
        let q = sub(point, &scale(normal, &eps));
        debug_assert!(dot(normal, &q).is_negative());
        if let Ok(arb) = arborescence_of(inst, &q) {
            let rows = arborescence_rows(inst, &arb)?;
            if rows.iter().all(|r| !dot(r, point).is_negative()) {
                return Ok(arb);
            }
        }
        eps *= &half;
    }
    Err(Error::GenerationFailed(
        "could not cross a facet of the pivot fan".into(),
    ))
}

fn infinitesimal_step<P: LinearProgram + ?Sized>(
    inst: &P,
    normal: &[Rational],
    point: &[Rational],
) -> Result<Option<Arborescence>> {
    let down = neg(normal);
    let mut succ = BTreeMap::new();
    for u in inst.vertices() {
        let mut best: Option<((Rational, Rational), Vertex)> = None;
        let mut tied = false;
        for v in inst.improving_neighbors(&u) {
            let key = (slope(inst, point, &u, &v)?, slope(inst, &down, &u, &v)?);
            match &best {
                Some((b, _)) if key < *b => {}
                Some((b, _)) if key == *b => tied = true,
                _ => {
                    best = Some((key, v));
                    tied = false;
                }
            }
        }
        if tied {
            return Ok(None);
        }
        let a = best.map_or_else(|| u.clone(), |(_, v)| v);
        succ.insert(u, a);
    }
    Ok(Some(Arborescence::from_map(succ)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_product, random_simplex, BlockStructure};
    use crate::pivot::tests::{square, triangle};

    #[test]
    fn triangle_has_two_cones() {
        let tri = triangle();
        let oracle = enumerate_pivot_fan(&tri, Engine::Oracle).unwrap();
        let bfs = enumerate_pivot_fan(&tri, Engine::FlipBfs { seed: 0 }).unwrap();
        assert_eq!(oracle.len(), 2);
        assert!(engines_agree(&oracle, &bfs).unwrap());
    }

    #[test]
    fn square_has_two_cones() {
        let fan = enumerate_pivot_fan(&square(), Engine::Oracle).unwrap();
        assert_eq!(fan.len(), 2);
    }

    #[test]
    fn segment_fan_is_the_line() {
        let seg = random_simplex(1, 3).unwrap();
        for engine in [Engine::Oracle, Engine::FlipBfs { seed: 5 }] {
            let fan = enumerate_pivot_fan(&seg, engine).unwrap();
            assert_eq!(fan.len(), 1);
            assert!(fan.cones[0].cone.rows.is_empty());
        }
    }

    #[test]
    fn cube_oracle_prunes_unrealized_maps() {
        let blocks = BlockStructure::new(vec![1, 1, 1]).unwrap();
        let cube = random_product(&blocks, 1).unwrap();
        let fan = enumerate_pivot_fan(&cube, Engine::Oracle).unwrap();
        assert_eq!(fan.len(), 6);
        let bfs = enumerate_pivot_fan(&cube, Engine::FlipBfs { seed: 9 }).unwrap();
        assert!(engines_agree(&fan, &bfs).unwrap());
    }

    #[test]
    fn bfs_start_does_not_matter() {
        let inst = random_simplex(3, 1).unwrap();
        let a = enumerate_pivot_fan(&inst, Engine::FlipBfs { seed: 1 }).unwrap();
        let b = enumerate_pivot_fan(&inst, Engine::FlipBfs { seed: 2 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }
}
