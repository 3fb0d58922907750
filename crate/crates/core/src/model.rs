//! Linear programs over polytope graphs: general instances, full-dimensional
//! simplices and Cartesian products of simplices.
//!
//! Vertices are always labeled `1..=n` by increasing objective value, so on a
//! sorted instance "improving neighbor" simply means "adjacent with a larger
//! label". Product vertices are tuples of factor labels.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{dot, int, rank, sub, Matrix, Rational, RationalVector};
use crate::error::{Error, Result};

/// Coordinate bound for generated instances.
pub const COORD_BOUND: i64 = 1_000_000;
const MAX_RETRIES: usize = 1000;

/// Vertex label: a single label for plain instances, one label per factor for
/// products. Ordering is lexicographic, which is label order for simplices
/// and row-major order for product tuples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub Vec<usize>);

impl Vertex {
    pub fn label(i: usize) -> Self {
        Vertex(vec![i])
    }

    pub fn tuple(labels: Vec<usize>) -> Self {
        Vertex(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [single] => write!(f, "{single}"),
            labels => {
                write!(f, "(")?;
                for (k, l) in labels.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s);
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad vertex label {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Vertex)
    }
}

/// The view of a linear program that the pivot machinery needs.
pub trait LinearProgram: Sync {
    fn dim(&self) -> usize;
    fn objective(&self) -> &[Rational];
    /// All vertices in canonical order.
    fn vertices(&self) -> Vec<Vertex>;
    fn is_vertex(&self, v: &Vertex) -> bool;
    fn point(&self, v: &Vertex) -> RationalVector;
    /// Adjacent vertices with strictly larger objective value, in increasing
    /// objective order.
    fn improving_neighbors(&self, v: &Vertex) -> Vec<Vertex>;
    fn top(&self) -> Vertex;

    fn objective_value(&self, v: &Vertex) -> Rational {
        dot(self.objective(), &self.point(v))
    }
}

/// Polytope graph with a generic objective, vertices sorted by objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpInstance {
    vertices: Vec<RationalVector>,
    /// 0-based adjacency, both directions.
    adjacency: Vec<BTreeSet<usize>>,
    objective: RationalVector,
}

impl LpInstance {
    /// Validates and sorts. `edges` use 1-based indices into `vertices`.
    /// Returns the instance and the map from input index (0-based) to sorted
    /// label (1-based).
    pub fn new(
        vertices: Vec<RationalVector>,
        edges: &[(usize, usize)],
        objective: RationalVector,
    ) -> Result<(Self, Vec<usize>)> {
        let d = objective.len();
        if let Some(bad) = vertices.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        let n = vertices.len();
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(Error::Parse(format!("bad edge ({a}, {b})")));
            }
        }
        let directions: Vec<RationalVector> = edges
            .iter()
            .map(|&(a, b)| sub(&vertices[b - 1], &vertices[a - 1]))
            .collect();
        let r = rank(&Matrix::new(directions, d)?);
        if r < d {
            return Err(Error::NotFullDimensional { rank: r, dim: d });
        }

        let values: Vec<Rational> = vertices.iter().map(|v| dot(&objective, v)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].cmp(&values[b]));
        if let Some(w) = order.windows(2).find(|w| values[w[0]] == values[w[1]]) {
            let (first, second) = (w[0].min(w[1]) + 1, w[0].max(w[1]) + 1);
            return Err(Error::NonGenericObjective { first, second });
        }
        let mut label_of = vec![0; n];
        for (pos, &orig) in order.iter().enumerate() {
            label_of[orig] = pos + 1;
        }

        let mut adjacency = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            let (la, lb) = (label_of[a - 1] - 1, label_of[b - 1] - 1);
            adjacency[la].insert(lb);
            adjacency[lb].insert(la);
        }
        let sorted = order.iter().map(|&i| vertices[i].clone()).collect();
        Ok((
            Self {
                vertices: sorted,
                adjacency,
                objective,
            },
            label_of,
        ))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Coordinates of vertex `label` (1-based).
    pub fn coords(&self, label: usize) -> &RationalVector {
        &self.vertices[label - 1]
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.vertices
    }

    /// Sorted edge list with 1-based labels, smaller label first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| {
                nb.iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (i + 1, j + 1))
            })
            .collect()
    }

    fn single(&self, v: &Vertex) -> Option<usize> {
        match v.labels() {
            [l] if (1..=self.len()).contains(l) => Some(*l),
            _ => None,
        }
    }
}

impl LinearProgram for LpInstance {
    fn dim(&self) -> usize {
        self.objective.len()
    }

    fn objective(&self) -> &[Rational] {
        &self.objective
    }

    fn vertices(&self) -> Vec<Vertex> {
        (1..=self.len()).map(Vertex::label).collect()
    }

    fn is_vertex(&self, v: &Vertex) -> bool {
        self.single(v).is_some()
    }

    fn point(&self, v: &Vertex) -> RationalVector {
        let l = self.single(v).expect("valid vertex");
        self.vertices[l - 1].clone()
    }

    fn improving_neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let l = self.single(v).expect("valid vertex");
        self.adjacency[l - 1]
            .iter()
            .filter(|&&j| j + 1 > l)
            .map(|&j| Vertex::label(j + 1))
            .collect()
    }

    fn top(&self) -> Vertex {
        Vertex::label(self.len())
    }
}

/// A full-dimensional simplex: `d + 1` affinely independent vertices on the
/// complete graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexInstance {
    base: LpInstance,
}

/// Builds a simplex; vertices are re-sorted by objective value. Also returns
/// the map from input index (0-based) to sorted label.
pub fn make_simplex(
    vertices: Vec<RationalVector>,
    objective: RationalVector,
) -> Result<(SimplexInstance, Vec<usize>)> {
    let d = objective.len();
    if d == 0 {
        return Err(Error::Parse("simplex must have dimension >= 1".into()));
    }
    if vertices.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: vertices.len(),
        });
    }
    let n = vertices.len();
    let edges: Vec<(usize, usize)> = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .collect();
    let (base, map) = LpInstance::new(vertices, &edges, objective)?;
    Ok((SimplexInstance { base }, map))
}

impl SimplexInstance {
    pub fn base(&self) -> &LpInstance {
        &self.base
    }

    /// Number of vertices, `m + 1`.
    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Dimension `m`.
    pub fn m(&self) -> usize {
        self.base.dim()
    }

    pub fn coords(&self, label: usize) -> &RationalVector {
        self.base.coords(label)
    }

    /// `<c, u_j - u_i>` for labels `i`, `j`.
    pub fn objective_gap(&self, i: usize, j: usize) -> Rational {
        dot(&self.base.objective, &sub(self.coords(j), self.coords(i)))
    }
}

impl LinearProgram for SimplexInstance {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn objective(&self) -> &[Rational] {
        self.base.objective()
    }
    fn vertices(&self) -> Vec<Vertex> {
        self.base.vertices()
    }
    fn is_vertex(&self, v: &Vertex) -> bool {
        self.base.is_vertex(v)
    }
    fn point(&self, v: &Vertex) -> RationalVector {
        self.base.point(v)
    }
    fn improving_neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        self.base.improving_neighbors(v)
    }
    fn top(&self) -> Vertex {
        self.base.top()
    }
}

/// Composition `(m_1, ..., m_t)` with offsets `M_0 = 0 < M_1 < ... < M_t = m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockStructure {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockStructure {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Parse(format!(
                "block sizes must be positive and nonempty, got {sizes:?}"
            )));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for s in &sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Ok(Self { sizes, offsets })
    }

    pub fn single(m: usize) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn parse(text: &str) -> Result<Self> {
        let sizes = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad block list {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn t(&self) -> usize {
        self.sizes.len()
    }

    pub fn m(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Block (0-based) containing the 1-based letter.
    pub fn block_of(&self, letter: usize) -> usize {
        debug_assert!((1..=self.m()).contains(&letter));
        self.offsets.partition_point(|&o| o < letter) - 1
    }
}

impl fmt::Display for BlockStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for BlockStructure {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        Self::parse(text)
    }
}

impl serde::Serialize for BlockStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BlockStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Cartesian product of simplices with concatenated objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductInstance {
    factors: Vec<SimplexInstance>,
    blocks: BlockStructure,
    objective: RationalVector,
    /// Coordinate offsets of each factor inside the ambient space.
    coord_offsets: Vec<usize>,
}

pub fn make_product(factors: Vec<SimplexInstance>) -> Result<ProductInstance> {
    if factors.is_empty() {
        return Err(Error::Parse("product needs at least one factor".into()));
    }
    let blocks = BlockStructure::new(factors.iter().map(SimplexInstance::m).collect())?;
    let objective: RationalVector = factors
        .iter()
        .flat_map(|f| f.objective().iter().cloned())
        .collect();
    let mut coord_offsets = vec![0];
    for f in &factors {
        coord_offsets.push(coord_offsets.last().unwrap() + f.dim());
    }
    let prod = ProductInstance {
        factors,
        blocks,
        objective,
        coord_offsets,
    };

    // Labels follow the objective order, so (a) a strict global order is
    // required and (b) it is checked on the tuple values directly.
    let verts = prod.vertices();
    let mut valued: Vec<(Rational, usize)> = verts
        .iter()
        .enumerate()
        .map(|(k, v)| (prod.objective_value(v), k))
        .collect();
    valued.sort();
    if let Some(w) = valued.windows(2).find(|w| w[0].0 == w[1].0) {
        let (a, b) = (w[0].1.min(w[1].1) + 1, w[0].1.max(w[1].1) + 1);
        return Err(Error::NonGenericObjective {
            first: a,
            second: b,
        });
    }
    Ok(prod)
}

impl ProductInstance {
    pub fn factors(&self) -> &[SimplexInstance] {
        &self.factors
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn vertex_count(&self) -> usize {
        self.factors.iter().map(SimplexInstance::n).product()
    }

    /// Coordinate range of factor `s` in the ambient space.
    pub fn coord_range(&self, s: usize) -> std::ops::Range<usize> {
        self.coord_offsets[s]..self.coord_offsets[s + 1]
    }

    /// The product as an explicit graph. Returns the instance together with
    /// the tuple carried by each sorted label (`tuples[label - 1]`).
    pub fn flatten(&self) -> Result<(LpInstance, Vec<Vertex>)> {
        let verts = self.vertices();
        let points = verts.iter().map(|v| self.point(v)).collect();
        let mut edges = Vec::new();
        for (a, u) in verts.iter().enumerate() {
            for (b, v) in verts.iter().enumerate().skip(a + 1) {
                let diff = u
                    .labels()
                    .iter()
                    .zip(v.labels())
                    .filter(|(x, y)| x != y)
                    .count();
                if diff == 1 {
                    edges.push((a + 1, b + 1));
                }
            }
        }
        let (inst, label_of) = LpInstance::new(points, &edges, self.objective.clone())?;
        let mut tuples = vec![Vertex(vec![]); verts.len()];
        for (k, v) in verts.into_iter().enumerate() {
            tuples[label_of[k] - 1] = v;
        }
        Ok((inst, tuples))
    }
}

impl LinearProgram for ProductInstance {
    fn dim(&self) -> usize {
        self.objective.len()
    }

    fn objective(&self) -> &[Rational] {
        &self.objective
    }

    fn vertices(&self) -> Vec<Vertex> {
        let mut out = vec![Vec::new()];
        for f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (1..=f.n()).map(move |i| {
                        let mut t = prefix.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        out.into_iter().map(Vertex::tuple).collect()
    }

    fn is_vertex(&self, v: &Vertex) -> bool {
        v.labels().len() == self.factors.len()
            && v.labels()
                .iter()
                .zip(&self.factors)
                .all(|(&i, f)| (1..=f.n()).contains(&i))
    }

    fn point(&self, v: &Vertex) -> RationalVector {
        v.labels()
            .iter()
            .zip(&self.factors)
            .flat_map(|(&i, f)| f.coords(i).iter().cloned())
            .collect()
    }

    fn improving_neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out: Vec<(Rational, Vertex)> = Vec::new();
        for (s, f) in self.factors.iter().enumerate() {
            let i = v.labels()[s];
            for j in i + 1..=f.n() {
                let mut t = v.labels().to_vec();
                t[s] = j;
                let gap = f.objective_gap(i, j);
                out.push((gap, Vertex::tuple(t)));
            }
        }
        out.sort();
        out.into_iter().map(|(_, w)| w).collect()
    }

    fn top(&self) -> Vertex {
        Vertex::tuple(self.factors.iter().map(SimplexInstance::n).collect())
    }
}

/// Random integer simplex in `[-B, B]^m`, deterministic in `(m, seed)`.
pub fn random_simplex(m: usize, seed: u64) -> Result<SimplexInstance> {
    if m == 0 {
        return Err(Error::Parse("simplex dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> RationalVector {
        (0..m)
            .map(|_| int(rng.gen_range(-COORD_BOUND..=COORD_BOUND)))
            .collect()
    };

    let vertices = (0..MAX_RETRIES)
        .map(|_| (0..=m).map(|_| draw(&mut rng)).collect::<Vec<_>>())
        .find(|vs| {
            let dirs = vs[1..].iter().map(|v| sub(v, &vs[0])).collect();
            rank(&Matrix::new(dirs, m).unwrap()) == m
        })
        .ok_or_else(|| Error::GenerationFailed(format!("no full-dimensional simplex (m={m})")))?;

    for _ in 0..MAX_RETRIES {
        let c = draw(&mut rng);
        match make_simplex(vertices.clone(), c) {
            Ok((inst, _)) => return Ok(inst),
            Err(Error::NonGenericObjective { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed(format!(
        "no generic objective (m={m}, seed={seed})"
    )))
}

/// Product of random simplices with factor seeds `seed, seed + 1, ...`.
pub fn random_product(blocks: &BlockStructure, seed: u64) -> Result<ProductInstance> {
    let factors = blocks
        .sizes()
        .iter()
        .enumerate()
        .map(|(s, &m)| random_simplex(m, seed + s as u64))
        .collect::<Result<Vec<_>>>()?;
    make_product(factors)
}
