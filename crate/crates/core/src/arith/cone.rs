//! Homogeneous cones `{x : <a, x> >= 0 for every row a}`.
//!
//! Every LP posed here is intersected with the box `-1 <= x_i <= 1`. Cones are
//! invariant under positive scaling, so the box keeps optima finite without
//! changing any sign decision, and `x = 0` is always feasible.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{solve_lp_exact, LpConstraint, LpOutcome};
use super::{dot, neg, primitive, Rational, RationalVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HCone {
    pub dim: usize,
    #[serde(rename = "inequalities", with = "super::serde_q::mat")]
    pub rows: Vec<RationalVector>,
    #[serde(with = "super::serde_q::opt_vec")]
    pub witness: Option<RationalVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InteriorPoint {
    Witness(RationalVector),
    LowerDimensional,
}

/// A facet-defining row of a full-dimensional cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Index of the first row with this normal.
    pub row: usize,
    /// Primitive integer inward normal.
    pub normal: RationalVector,
    /// Point in the relative interior of the facet.
    pub point: RationalVector,
}

impl HCone {
    pub fn new(dim: usize, rows: Vec<RationalVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self {
            dim,
            rows,
            witness: None,
        })
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            witness: None,
        }
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|a| !dot(a, x).is_negative())
    }

    pub fn strictly_contains(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|a| dot(a, x).is_positive())
    }

    /// Cone with each row replaced by its primitive integer multiple.
    pub fn normalized(&self) -> HCone {
        HCone {
            dim: self.dim,
            rows: self.rows.iter().map(|r| primitive(r)).collect(),
            witness: self.witness.clone(),
        }
    }

    pub fn intersection(&self, other: &HCone) -> HCone {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        HCone {
            dim: self.dim,
            rows,
            witness: None,
        }
    }

    /// Attaches a witness when the cone is full-dimensional.
    pub fn with_witness(mut self) -> Option<Self> {
        match interior_point(&mut self) {
            InteriorPoint::Witness(_) => Some(self),
            InteriorPoint::LowerDimensional => None,
        }
    }

    /// The facet-defining rows, deduplicated up to positive scaling.
    pub fn facets(&self) -> Result<Vec<Facet>> {
        if self.witness.is_none() {
            return Err(Error::MissingWitness);
        }
        let normals: Vec<RationalVector> = self.rows.iter().map(|r| primitive(r)).collect();
        let mut seen = HashSet::new();
        let unique: Vec<usize> = (0..normals.len())
            .filter(|&i| seen.insert(normals[i].clone()))
            .collect();

        let mut facets = Vec::new();
        for &i in &unique {
            let others = unique.iter().filter(|&&j| j != i).map(|&j| &normals[j]);
            if let Some(point) = strict_point(self.dim, others, [&normals[i]]) {
                facets.push(Facet {
                    row: i,
                    normal: normals[i].clone(),
                    point,
                });
            }
        }
        Ok(facets)
    }

    /// Drops rows that do not define facets.
    pub fn irredundant(&self) -> Result<HCone> {
        let rows = self
            .facets()?
            .into_iter()
            .map(|f| self.rows[f.row].clone())
            .collect();
        Ok(HCone {
            dim: self.dim,
            rows,
            witness: self.witness.clone(),
        })
    }
}

/// Finds `x` with `<a, x> > 0` for every row, storing it as the witness.
pub fn interior_point(cone: &mut HCone) -> InteriorPoint {
    if cone.rows.is_empty() {
        let w = super::zeros(cone.dim);
        cone.witness = Some(w.clone());
        return InteriorPoint::Witness(w);
    }
    match strict_point(cone.dim, cone.rows.iter(), std::iter::empty()) {
        Some(w) => {
            cone.witness = Some(w.clone());
            InteriorPoint::Witness(w)
        }
        None => InteriorPoint::LowerDimensional,
    }
}

/// True iff every point of `inner` satisfies every row of `outer`.
pub fn cone_contains(outer: &HCone, inner: &HCone) -> Result<bool> {
    let witness = inner.witness.as_ref().ok_or(Error::MissingWitness)?;
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch {
            expected: outer.dim,
            found: inner.dim,
        });
    }
    let inner_normals: HashSet<RationalVector> = inner.rows.iter().map(|r| primitive(r)).collect();
    for a in &outer.rows {
        if dot(a, witness).is_negative() {
            return Ok(false);
        }
        if inner_normals.contains(&primitive(a)) {
            continue;
        }
        if min_over(inner.dim, inner.rows.iter(), std::iter::empty(), a).is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn cones_equal(a: &HCone, b: &HCone) -> Result<bool> {
    Ok(cone_contains(a, b)? && cone_contains(b, a)?)
}

fn box_constraints(dim: usize, width: usize) -> impl Iterator<Item = LpConstraint> {
    (0..dim).flat_map(move |i| {
        let mut up = vec![Rational::zero(); width];
        up[i] = Rational::one();
        let down = neg(&up);
        [
            LpConstraint::new(up, Rational::one()),
            LpConstraint::new(down, Rational::one()),
        ]
    })
}

/// Minimum of `<objective, x>` over `{x : ge rows >= 0, eq rows = 0}` within
/// the box. Always finite and at most zero.
pub fn min_over<'a>(
    dim: usize,
    ge: impl IntoIterator<Item = &'a RationalVector>,
    eq: impl IntoIterator<Item = &'a RationalVector>,
    objective: &[Rational],
) -> Rational {
    let mut cons: Vec<LpConstraint> = ge
        .into_iter()
        .map(|a| LpConstraint::new(neg(a), Rational::zero()))
        .collect();
    for a in eq {
        cons.push(LpConstraint::new(a.clone(), Rational::zero()));
        cons.push(LpConstraint::new(neg(a), Rational::zero()));
    }
    cons.extend(box_constraints(dim, dim));
    match solve_lp_exact(&neg(objective), &cons) {
        LpOutcome::Optimal { value, .. } => -value,
        other => unreachable!("bounded feasible LP returned {other:?}"),
    }
}

/// Maximizes `s` subject to `<a, x> >= s` for the strict rows, `<e, x> = 0`
/// for the equality rows, the box and `s <= 1`. Returns `x` when `s > 0`.
fn strict_point<'a>(
    dim: usize,
    strict: impl IntoIterator<Item = &'a RationalVector>,
    eq: impl IntoIterator<Item = &'a RationalVector>,
) -> Option<RationalVector> {
    let width = dim + 1;
    let extend = |a: &RationalVector, last: Rational| {
        let mut row = a.clone();
        row.push(last);
        row
    };
    let mut cons: Vec<LpConstraint> = strict
        .into_iter()
        .map(|a| LpConstraint::new(extend(&neg(a), Rational::one()), Rational::zero()))
        .collect();
    for e in eq {
        cons.push(LpConstraint::new(
            extend(e, Rational::zero()),
            Rational::zero(),
        ));
        cons.push(LpConstraint::new(
            extend(&neg(e), Rational::zero()),
            Rational::zero(),
        ));
    }
    cons.extend(box_constraints(dim, width));
    let mut cap = vec![Rational::zero(); width];
    cap[dim] = Rational::one();
    cons.push(LpConstraint::new(cap.clone(), Rational::one()));

    match solve_lp_exact(&cap, &cons) {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(dim);
            Some(point)
        }
        LpOutcome::Optimal { .. } => None,
        other => unreachable!("bounded feasible LP returned {other:?}"),
    }
}
