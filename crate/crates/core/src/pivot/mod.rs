//! Max-slope pivot rule: slopes, optimal slopes, arborescences and the cones
//! of weights that realize them.

mod enumerate;
mod fan;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{dot, int, primitive, scale, sub, HCone, Rational, RationalVector};
use crate::error::{Error, Result};
use crate::model::{LinearProgram, ProductInstance, SimplexInstance, Vertex, COORD_BOUND};

pub use enumerate::{engines_agree, enumerate_pivot_fan, Engine, ORACLE_CANDIDATE_CAP};
pub use fan::{check_fan, Fan, FanCone, FanReport, FanViolation, Wall};

/// Optimal slope at a vertex; `Bottom` is the `-infinity` of the top vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    Bottom,
    Finite(Rational),
}

impl Slope {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Slope::Finite(r) => Some(r),
            Slope::Bottom => None,
        }
    }
}

/// `<omega, v - u> / <c, v - u>`.
pub fn slope<P: LinearProgram + ?Sized>(
    inst: &P,
    omega: &[Rational],
    u: &Vertex,
    v: &Vertex,
) -> Result<Rational> {
    let diff = sub(&inst.point(v), &inst.point(u));
    let gap = dot(inst.objective(), &diff);
    if gap.is_zero() {
        return Err(Error::ZeroObjectiveDifference {
            from: u.clone(),
            to: v.clone(),
        });
    }
    Ok(dot(omega, &diff) / gap)
}

/// The maximal slope over improving neighbors of `u`, with its unique
/// maximizer. The top vertex yields `(Bottom, top)`.
pub fn best_slope<P: LinearProgram + ?Sized>(
    inst: &P,
    omega: &[Rational],
    u: &Vertex,
) -> Result<(Slope, Vertex)> {
    if !inst.is_vertex(u) {
        return Err(Error::InvalidVertex(u.clone()));
    }
    let mut best: Option<(Rational, Vertex)> = None;
    let mut tied: Option<Vertex> = None;
    for v in inst.improving_neighbors(u) {
        let r = slope(inst, omega, u, &v)?;
        match &best {
            Some((b, _)) if r < *b => {}
            Some((b, _)) if r == *b => tied = Some(v),
            _ => {
                best = Some((r, v));
                tied = None;
            }
        }
    }
    match (best, tied) {
        (None, _) => Ok((Slope::Bottom, u.clone())),
        (Some((_, first)), Some(second)) => Err(Error::NonGenericWeight {
            vertex: u.clone(),
            first,
            second,
        }),
        (Some((r, v)), None) => Ok((Slope::Finite(r), v)),
    }
}

/// Successor map of the max-slope pivot rule; the top vertex maps to itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arborescence {
    successors: BTreeMap<Vertex, Vertex>,
}

impl Arborescence {
    pub fn from_map(successors: BTreeMap<Vertex, Vertex>) -> Self {
        Self { successors }
    }

    pub fn successor(&self, v: &Vertex) -> Option<&Vertex> {
        self.successors.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, &Vertex)> {
        self.successors.iter()
    }

    /// Successor labels in vertex order.
    pub fn encoding(&self) -> Vec<Vertex> {
        self.successors.values().cloned().collect()
    }

    pub fn validate<P: LinearProgram + ?Sized>(&self, inst: &P) -> Result<()> {
        let verts = inst.vertices();
        if verts.len() != self.successors.len()
            || verts.iter().any(|v| !self.successors.contains_key(v))
        {
            return Err(Error::InvalidArborescence(
                "domain is not the vertex set".into(),
            ));
        }
        let top = inst.top();
        for (u, v) in &self.successors {
            let ok = if *u == top {
                v == u
            } else {
                inst.improving_neighbors(u).contains(v)
            };
            if !ok {
                return Err(Error::InvalidArborescence(format!(
                    "{u} -> {v} is not an improving step"
                )));
            }
        }
        Ok(())
    }
}

impl Serialize for Arborescence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.successors.len()))?;
        for (u, v) in &self.successors {
            map.serialize_entry(&u.to_string(), &v.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Arborescence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let successors = raw
            .iter()
            .map(|(k, v)| Ok((k.parse()?, v.parse()?)))
            .collect::<Result<BTreeMap<Vertex, Vertex>>>()
            .map_err(D::Error::custom)?;
        Ok(Self { successors })
    }
}

/// All optimal slopes, keyed by vertex.
pub fn optimal_slopes<P: LinearProgram + ?Sized>(
    inst: &P,
    omega: &[Rational],
) -> Result<BTreeMap<Vertex, Slope>> {
    inst.vertices()
        .into_iter()
        .map(|u| best_slope(inst, omega, &u).map(|(s, _)| (u, s)))
        .collect()
}

pub fn arborescence_of<P: LinearProgram + ?Sized>(
    inst: &P,
    omega: &[Rational],
) -> Result<Arborescence> {
    let successors = inst
        .vertices()
        .into_iter()
        .map(|u| best_slope(inst, omega, &u).map(|(_, v)| (u, v)))
        .collect::<Result<_>>()?;
    Ok(Arborescence { successors })
}

/// Complete-graph shortcut: `A(i) = min{ j > i : tau(i) > tau(j) }`. Uses only
/// the optimal slopes, never their maximizers.
pub fn arborescence_min_formula(
    inst: &SimplexInstance,
    omega: &[Rational],
) -> Result<Arborescence> {
    let tau: Vec<Slope> = optimal_slopes(inst, omega)?.into_values().collect();
    let n = tau.len();
    let successors = (1..=n)
        .map(|i| {
            let succ = (i + 1..=n).find(|&j| tau[i - 1] > tau[j - 1]).unwrap_or(i);
            (Vertex::label(i), Vertex::label(succ))
        })
        .collect();
    Ok(Arborescence { successors })
}

/// Optimal slopes and arborescence of each factor, evaluated at the factor's
/// block of `omega`.
pub fn factor_data(
    prod: &ProductInstance,
    omega: &[Rational],
) -> Result<Vec<(Vec<Slope>, Arborescence)>> {
    prod.factors()
        .iter()
        .enumerate()
        .map(|(s, f)| {
            let block = &omega[prod.coord_range(s)];
            let tau = optimal_slopes(f, block)?.into_values().collect();
            Ok((tau, arborescence_of(f, block)?))
        })
        .collect()
}

/// Product shortcut: move in the factor whose optimal slope is largest.
pub fn arborescence_product_formula(
    prod: &ProductInstance,
    omega: &[Rational],
) -> Result<Arborescence> {
    let data = factor_data(prod, omega)?;
    let mut successors = BTreeMap::new();
    for u in prod.vertices() {
        let labels = u.labels();
        let mut best: Option<usize> = None;
        for s in 0..labels.len() {
            let t = &data[s].0[labels[s] - 1];
            if *t == Slope::Bottom {
                continue;
            }
            match best {
                Some(b) if data[b].0[labels[b] - 1] == *t => {
                    let step = |k: usize| {
                        let mut w = labels.to_vec();
                        w[k] = data[k].1.successor(&Vertex::label(labels[k])).unwrap().0[0];
                        Vertex::tuple(w)
                    };
                    return Err(Error::NonGenericWeight {
                        vertex: u.clone(),
                        first: step(b),
                        second: step(s),
                    });
                }
                Some(b) if data[b].0[labels[b] - 1] > *t => {}
                _ => best = Some(s),
            }
        }
        let succ = match best {
            None => u.clone(),
            Some(r) => {
                let mut w = labels.to_vec();
                w[r] = data[r].1.successor(&Vertex::label(labels[r])).unwrap().0[0];
                Vertex::tuple(w)
            }
        };
        successors.insert(u, succ);
    }
    Ok(Arborescence { successors })
}

/// Inequality rows `rho(u, A(u)) >= rho(u, v)` for every non-top `u` and
/// improving `v != A(u)`, multiplied by `<c, A(u) - u> * <c, v - u> > 0` and
/// made primitive.
pub fn arborescence_rows<P: LinearProgram + ?Sized>(
    inst: &P,
    arb: &Arborescence,
) -> Result<Vec<RationalVector>> {
    arb.validate(inst)?;
    let c = inst.objective();
    let mut rows = Vec::new();
    for (u, a) in arb.iter() {
        if u == a {
            continue;
        }
        let pu = inst.point(u);
        let to_a = sub(&inst.point(a), &pu);
        let gap_a = dot(c, &to_a);
        for v in inst.improving_neighbors(u) {
            if v == *a {
                continue;
            }
            let to_v = sub(&inst.point(&v), &pu);
            let gap_v = dot(c, &to_v);
            let row = sub(&scale(&to_a, &gap_v), &scale(&to_v, &gap_a));
            rows.push(primitive(&row));
        }
    }
    Ok(rows)
}

/// Closed cone of weights whose arborescence is `arb`. The witness is set
/// iff the cone is full-dimensional, i.e. iff `arb` is realized.
pub fn cone_of_arborescence<P: LinearProgram + ?Sized>(
    inst: &P,
    arb: &Arborescence,
) -> Result<HCone> {
    let mut cone = HCone::new(inst.dim(), arborescence_rows(inst, arb)?)?;
    crate::arith::interior_point(&mut cone);
    Ok(cone)
}

/// Realized arborescence together with its cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotCone {
    pub arborescence: Arborescence,
    #[serde(flatten)]
    pub cone: HCone,
}

/// Seeded source of integer weights in `[-B, B]^d`.
#[derive(Debug, Clone)]
pub struct WeightSampler {
    rng: ChaCha8Rng,
    dim: usize,
}

pub const SAMPLE_RETRIES: usize = 1000;

impl WeightSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
        }
    }

    pub fn draw(&mut self) -> RationalVector {
        (0..self.dim)
            .map(|_| int(self.rng.gen_range(-COORD_BOUND..=COORD_BOUND)))
            .collect()
    }

    /// Draws until `accept` succeeds, rejecting any sample for which it
    /// returns an error.
    pub fn draw_generic<T>(
        &mut self,
        mut accept: impl FnMut(&RationalVector) -> Result<T>,
    ) -> Result<(RationalVector, T)> {
        for _ in 0..SAMPLE_RETRIES {
            let omega = self.draw();
            if let Ok(value) = accept(&omega) {
                return Ok((omega, value));
            }
        }
        Err(Error::GenerationFailed(format!(
            "no generic weight after {SAMPLE_RETRIES} draws"
        )))
    }
}

/// True iff `tau(A(u)) < tau(u)` at every non-top vertex.
pub fn descent_holds<P: LinearProgram + ?Sized>(inst: &P, omega: &[Rational]) -> Result<bool> {
    let tau = optimal_slopes(inst, omega)?;
    let arb = arborescence_of(inst, omega)?;
    let holds = arb
        .iter()
        .filter(|(u, a)| u != a)
        .all(|(u, a)| tau[a] < tau[u]);
    Ok(holds)
}

/// Largest absolute coordinate, used to keep flip steps at unit scale.
pub(crate) fn step_scale(v: &[Rational]) -> Rational {
    let m = crate::arith::abs_max(v);
    if m.is_positive() {
        m
    } else {
        int(1)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::arith::{ints, ratio};
    use crate::model::{make_product, make_simplex};

    pub(crate) fn triangle() -> SimplexInstance {
        make_simplex(
            vec![ints(&[0, 0]), ints(&[1, 0]), ints(&[0, 1])],
            ints(&[1, 2]),
        )
        .unwrap()
        .0
    }

    pub(crate) fn square() -> ProductInstance {
        let seg = |c| {
            make_simplex(vec![ints(&[0]), ints(&[1])], ints(&[c]))
                .unwrap()
                .0
        };
        make_product(vec![seg(1), seg(2)]).unwrap()
    }

    fn v(i: usize) -> Vertex {
        Vertex::label(i)
    }

    fn t(a: usize, b: usize) -> Vertex {
        Vertex::tuple(vec![a, b])
    }

    fn arb(pairs: &[(Vertex, Vertex)]) -> Arborescence {
        Arborescence::from_map(pairs.iter().cloned().collect())
    }

    #[test]
    fn slope_examples() {
        let tri = triangle();
        let w = ints(&[1, 0]);
        assert_eq!(slope(&tri, &w, &v(1), &v(2)).unwrap(), int(1));
        assert_eq!(slope(&tri, &w, &v(1), &v(3)).unwrap(), int(0));
        assert_eq!(slope(&tri, &w, &v(2), &v(3)).unwrap(), int(-1));
        // Antisymmetric formula.
        assert_eq!(slope(&tri, &w, &v(3), &v(2)).unwrap(), int(-1));
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            assert_eq!(slope(&tri, &ints(&[1, 2]), &v(a), &v(b)).unwrap(), int(1));
            assert_eq!(slope(&tri, &ints(&[0, 0]), &v(a), &v(b)).unwrap(), int(0));
        }
    }

    #[test]
    fn zero_objective_difference() {
        let err = slope(&triangle(), &ints(&[1, 0]), &v(2), &v(2)).unwrap_err();
        assert_eq!(
            err,
            Error::ZeroObjectiveDifference {
                from: v(2),
                to: v(2)
            }
        );
    }

    #[test]
    fn best_slope_examples() {
        let tri = triangle();
        assert_eq!(
            best_slope(&tri, &ints(&[1, 0]), &v(1)).unwrap(),
            (Slope::Finite(int(1)), v(2))
        );
        assert_eq!(
            best_slope(&tri, &ints(&[1, 0]), &v(3)).unwrap(),
            (Slope::Bottom, v(3))
        );
        assert_eq!(
            best_slope(&tri, &ints(&[0, 1]), &v(1)).unwrap(),
            (Slope::Finite(ratio(1, 2).unwrap()), v(3))
        );
        let err = best_slope(&tri, &ints(&[1, 2]), &v(1)).unwrap_err();
        assert_eq!(
            err,
            Error::NonGenericWeight {
                vertex: v(1),
                first: v(2),
                second: v(3)
            }
        );
        assert!(Slope::Bottom < Slope::Finite(int(-1_000_000)));
    }

    #[test]
    fn arborescence_examples() {
        let tri = triangle();
        let a = arb(&[(v(1), v(2)), (v(2), v(3)), (v(3), v(3))]);
        let b = arb(&[(v(1), v(3)), (v(2), v(3)), (v(3), v(3))]);
        assert_eq!(arborescence_of(&tri, &ints(&[1, 0])).unwrap(), a);
        assert_eq!(arborescence_of(&tri, &ints(&[0, 1])).unwrap(), b);
        assert_eq!(arborescence_min_formula(&tri, &ints(&[1, 0])).unwrap(), a);
        assert_eq!(arborescence_min_formula(&tri, &ints(&[0, 1])).unwrap(), b);

        let sq = square();
        let expected = arb(&[
            (t(1, 1), t(2, 1)),
            (t(1, 2), t(2, 2)),
            (t(2, 1), t(2, 2)),
            (t(2, 2), t(2, 2)),
        ]);
        assert_eq!(arborescence_of(&sq, &ints(&[3, 1])).unwrap(), expected);
        assert_eq!(
            arborescence_product_formula(&sq, &ints(&[3, 1])).unwrap(),
            expected
        );
    }

    #[test]
    fn product_formula_rejects_cross_factor_tie() {
        // Factor slopes 1 and 2/2 tie at (1,1).
        let err = arborescence_product_formula(&square(), &ints(&[1, 2])).unwrap_err();
        assert!(matches!(err, Error::NonGenericWeight { .. }));
        assert!(arborescence_of(&square(), &ints(&[1, 2])).is_err());
    }

    #[test]
    fn triangle_cone_rows() {
        let tri = triangle();
        let a = arb(&[(v(1), v(2)), (v(2), v(3)), (v(3), v(3))]);
        let cone = cone_of_arborescence(&tri, &a).unwrap();
        assert_eq!(cone.rows, vec![ints(&[2, -1])]);
        assert!(cone.witness.is_some());
        assert!(cone.strictly_contains(&ints(&[1, 0])));
        assert_eq!(dot(&cone.rows[0], &ints(&[1, 0])), int(2));

        let b = arb(&[(v(1), v(3)), (v(2), v(3)), (v(3), v(3))]);
        assert_eq!(
            cone_of_arborescence(&tri, &b).unwrap().rows,
            vec![ints(&[-2, 1])]
        );
    }

    #[test]
    fn invalid_arborescence_rejected() {
        let tri = triangle();
        let bad = arb(&[(v(1), v(1)), (v(2), v(3)), (v(3), v(3))]);
        assert!(matches!(
            cone_of_arborescence(&tri, &bad),
            Err(Error::InvalidArborescence(_))
        ));
        let short = arb(&[(v(1), v(2)), (v(3), v(3))]);
        assert!(short.validate(&tri).is_err());
    }

    #[test]
    fn arborescence_json_form() {
        let a = arb(&[(v(1), v(2)), (v(2), v(3)), (v(3), v(3))]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"1":"2","2":"3","3":"3"}"#);
        assert_eq!(serde_json::from_str::<Arborescence>(&json).unwrap(), a);
    }
}
