//! Collections of full-dimensional cones and the exact check that they form
//! a complete fan.

use std::collections::{HashMap, HashSet};

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::RationalVector;
use crate::arith::{cone::min_over, interior_point, neg, primitive, Facet, HCone, InteriorPoint};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanCone<L> {
    pub label: L,
    #[serde(flatten)]
    pub cone: HCone,
}

/// Maximal cones, ordered by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan<L> {
    pub dim: usize,
    pub cones: Vec<FanCone<L>>,
}

impl<L> Fan<L> {
    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.cones.iter().map(|c| &c.label)
    }
}

/// Two cones sharing a facet; `normal` points into `first`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub first: usize,
    pub second: usize,
    #[serde(with = "crate::arith::serde_q::vec")]
    pub normal: RationalVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FanViolation {
    LowerDimensional {
        cone: usize,
    },
    Overlap {
        first: usize,
        second: usize,
    },
    UnmatchedFacet {
        cone: usize,
        #[serde(with = "crate::arith::serde_q::vec")]
        normal: RationalVector,
        partners: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    pub cones: usize,
    pub facets: usize,
    pub walls: Vec<Wall>,
    pub violations: Vec<FanViolation>,
}

impl FanReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies that the cones have pairwise disjoint interiors and that every
/// facet of every cone is a facet of exactly one other cone, with opposite
/// normal. Together these certify a complete fan.
pub fn check_fan<L: Sync>(fan: &Fan<L>) -> FanReport {
    let mut violations = Vec::new();
    let cones: Vec<&HCone> = fan.cones.iter().map(|c| &c.cone).collect();
    let full: Vec<usize> = (0..cones.len())
        .filter(|&i| {
            let ok = cones[i].witness.is_some();
            if !ok {
                violations.push(FanViolation::LowerDimensional { cone: i });
            }
            ok
        })
        .collect();

    let normals: Vec<HashSet<RationalVector>> = cones
        .iter()
        .map(|c| c.rows.iter().map(|r| primitive(r)).collect())
        .collect();

    let pairs: Vec<(usize, usize)> = full
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| full[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let overlaps: Vec<(usize, usize)> = pairs
        .par_iter()
        .copied()
        .filter(|&(i, j)| !interiors_disjoint(cones[i], cones[j], &normals[i], &normals[j]))
        .collect();
    violations.extend(
        overlaps
            .into_iter()
            .map(|(first, second)| FanViolation::Overlap { first, second }),
    );

    let facets: Vec<(usize, Vec<Facet>)> = full
        .par_iter()
        .map(|&i| (i, cones[i].facets().expect("full-dimensional cone")))
        .collect();
    let total_facets = facets.iter().map(|(_, f)| f.len()).sum();

    // Facet lookup by primitive normal.
    let mut by_normal: HashMap<&RationalVector, Vec<(usize, usize)>> = HashMap::new();
    for (i, fs) in &facets {
        for (k, f) in fs.iter().enumerate() {
            by_normal.entry(&f.normal).or_default().push((*i, k));
        }
    }
    let facet_of = |i: usize, k: usize| -> &Facet {
        let pos = facets.binary_search_by_key(&i, |(c, _)| *c).unwrap();
        &facets[pos].1[k]
    };

    let mut candidates = Vec::new();
    for (i, fs) in &facets {
        for (k, f) in fs.iter().enumerate() {
            if let Some(opp) = by_normal.get(&neg(&f.normal)) {
                for &(j, l) in opp {
                    if *i < j {
                        candidates.push(((*i, k), (j, l)));
                    }
                }
            }
        }
    }
    let matched: Vec<((usize, usize), (usize, usize))> = candidates
        .par_iter()
        .copied()
        .filter(|&((i, k), (j, l))| {
            facets_coincide(
                cones[i],
                facet_of(i, k),
                &normals[i],
                cones[j],
                facet_of(j, l),
                &normals[j],
            )
        })
        .collect();

    let mut partners: HashMap<(usize, usize), usize> = HashMap::new();
    let mut walls = Vec::new();
    for &(a, b) in &matched {
        *partners.entry(a).or_default() += 1;
        *partners.entry(b).or_default() += 1;
        walls.push(Wall {
            first: a.0,
            second: b.0,
            normal: facet_of(a.0, a.1).normal.clone(),
        });
    }
    for (i, fs) in &facets {
        for (k, f) in fs.iter().enumerate() {
            let count = partners.get(&(*i, k)).copied().unwrap_or(0);
            if count != 1 {
                violations.push(FanViolation::UnmatchedFacet {
                    cone: *i,
                    normal: f.normal.clone(),
                    partners: count,
                });
            }
        }
    }
    walls.sort_by_key(|a| (a.first, a.second));

    FanReport {
        cones: cones.len(),
        facets: total_facets,
        walls,
        violations,
    }
}

/// Exact test. A pair of opposite rows is a separating hyperplane; otherwise
/// the intersection is tested for an interior point.
fn interiors_disjoint(
    a: &HCone,
    b: &HCone,
    a_normals: &HashSet<RationalVector>,
    b_normals: &HashSet<RationalVector>,
) -> bool {
    if a_normals.iter().any(|n| b_normals.contains(&neg(n))) {
        return true;
    }
    let mut both = a.intersection(b);
    interior_point(&mut both) == InteriorPoint::LowerDimensional
}

/// `F_a = a ∩ {n = 0}` equals `F_b = b ∩ {n = 0}` where `n` is the normal of
/// `fa` and `-n` that of `fb`.
fn facets_coincide(
    a: &HCone,
    fa: &Facet,
    a_normals: &HashSet<RationalVector>,
    b: &HCone,
    fb: &Facet,
    b_normals: &HashSet<RationalVector>,
) -> bool {
    if !b.contains_point(&fa.point) || !a.contains_point(&fb.point) {
        return false;
    }
    facet_inside(a, fa, b, b_normals, a_normals) && facet_inside(b, fb, a, a_normals, b_normals)
}

/// `F_inner ⊆ outer`.
fn facet_inside(
    inner: &HCone,
    facet: &Facet,
    outer: &HCone,
    outer_normals: &HashSet<RationalVector>,
    inner_normals: &HashSet<RationalVector>,
) -> bool {
    let opposite = neg(&facet.normal);
    outer_normals.iter().all(|row| {
        if *row == opposite || inner_normals.contains(row) {
            return true;
        }
        !min_over(
            outer.dim,
            inner.rows.iter(),
            std::iter::once(&facet.normal),
            row,
        )
        .is_negative()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ints;

    fn cone(rows: &[&[i64]]) -> HCone {
        let dim = rows.first().map_or(1, |r| r.len());
        HCone::new(dim, rows.iter().map(|r| ints(r)).collect())
            .unwrap()
            .with_witness()
            .unwrap()
    }

    fn fan(cones: Vec<HCone>) -> Fan<usize> {
        Fan {
            dim: cones[0].dim,
            cones: cones
                .into_iter()
                .enumerate()
                .map(|(label, cone)| FanCone { label, cone })
                .collect(),
        }
    }

    #[test]
    fn two_half_planes() {
        let report = check_fan(&fan(vec![cone(&[&[2, -1]]), cone(&[&[-2, 1]])]));
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.walls.len(), 1);
        assert_eq!(report.walls[0].normal, ints(&[2, -1]));
    }

    #[test]
    fn quadrants_complete() {
        let q = |a: i64, b: i64| cone(&[&[a, 0], &[0, b]]);
        let report = check_fan(&fan(vec![q(1, 1), q(-1, 1), q(-1, -1), q(1, -1)]));
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.facets, 8);
        assert_eq!(report.walls.len(), 4);
    }

    #[test]
    fn missing_quadrant_leaves_two_facets() {
        let q = |a: i64, b: i64| cone(&[&[a, 0], &[0, b]]);
        let report = check_fan(&fan(vec![q(1, 1), q(-1, 1), q(-1, -1)]));
        let unmatched = report
            .violations
            .iter()
            .filter(|v| matches!(v, FanViolation::UnmatchedFacet { partners: 0, .. }))
            .count();
        assert_eq!(unmatched, 2);
    }

    #[test]
    fn overlapping_cones_detected() {
        let report = check_fan(&fan(vec![
            cone(&[&[1, 0]]),
            cone(&[&[0, 1]]),
            cone(&[&[-1, 0], &[0, -1]]),
        ]));
        assert!(report.violations.contains(&FanViolation::Overlap {
            first: 0,
            second: 1
        }));
    }

    #[test]
    fn subdivided_facet_is_not_matched() {
        // Upper half-plane against two lower quadrants: the x-axis facet of
        // the half-plane is covered twice but equals neither partner facet.
        let report = check_fan(&fan(vec![
            cone(&[&[0, 1]]),
            cone(&[&[0, -1], &[1, 0]]),
            cone(&[&[0, -1], &[-1, 0]]),
        ]));
        assert!(!report.pass());
    }

    #[test]
    fn whole_line_passes() {
        let mut whole = HCone::whole_space(1);
        interior_point(&mut whole);
        let report = check_fan(&fan(vec![whole]));
        assert!(report.pass());
        assert_eq!(report.facets, 0);
    }

    #[test]
    fn lower_dimensional_member_reported() {
        let flat = HCone::new(1, vec![ints(&[1]), ints(&[-1])]).unwrap();
        let report = check_fan(&fan(vec![flat]));
        assert_eq!(
            report.violations,
            vec![FanViolation::LowerDimensional { cone: 0 }]
        );
    }
}
