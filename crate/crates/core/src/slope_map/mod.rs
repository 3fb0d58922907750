//! Slope maps of simplices and of products of simplices, and their linear
//! pieces on pivot cones.
//!
//! For a simplex the slope vector at `omega` lists the optimal slopes of the
//! non-top vertices `1..=m`. For a product it concatenates the factor slope
//! vectors, each evaluated at the factor's block of `omega`.

mod certificate;

use std::cmp::Ordering;

use num_traits::Zero;

use crate::arith::{dot, primitive, rank, sub, zeros, HCone, Matrix, Rational, RationalVector};
use crate::error::{Error, Result};
use crate::io::Instance;
use crate::model::{BlockStructure, LinearProgram, ProductInstance, SimplexInstance, Vertex};
use crate::pivot::{
    arborescence_min_formula, arborescence_product_formula, cone_of_arborescence, factor_data,
    optimal_slopes, Arborescence, Slope,
};
use crate::sylvester::Permutation;

pub use certificate::{
    projection_check, verify_isomorphism, CertificateEntry, Check, FanSummary,
    IsomorphismCertificate, ProjectionCounterexample, ProjectionReport, SampleCounterexample,
    SampleReport, VerifyOptions,
};

/// Instances carrying a slope map onto `R^m`.
pub trait SlopeDomain: LinearProgram {
    fn block_structure(&self) -> BlockStructure;

    /// The slope map at a weight generic for every factor.
    fn slope_vector(&self, omega: &[Rational]) -> Result<RationalVector>;

    /// Arborescence by the closed-form shortcut (min formula or product
    /// formula), for comparison with the definition.
    fn formula_arborescence(&self, omega: &[Rational]) -> Result<Arborescence>;

    /// `L_A`, with `slope_vector(omega) = L_A omega` on the cone of `arb`.
    fn linear_map(&self, arb: &Arborescence) -> Result<Matrix>;

    fn instance_id(&self) -> String;
}

fn finite_prefix(tau: impl IntoIterator<Item = Slope>, m: usize) -> RationalVector {
    tau.into_iter()
        .take(m)
        .map(|s| {
            s.finite()
                .cloned()
                .expect("only the top vertex has no slope")
        })
        .collect()
}

/// Row `(u_{A(i)} - u_i) / <c, u_{A(i)} - u_i>` for each non-top label `i`.
fn simplex_rows(
    inst: &SimplexInstance,
    succ: impl Fn(usize) -> usize,
) -> Result<Vec<RationalVector>> {
    (1..=inst.m())
        .map(|i| {
            let diff = sub(inst.coords(succ(i)), inst.coords(i));
            let gap = dot(inst.objective(), &diff);
            if gap.is_zero() {
                return Err(Error::InvalidArborescence(format!("{i} maps to itself")));
            }
            Ok(diff.iter().map(|x| x / &gap).collect())
        })
        .collect()
}

fn full_rank(rows: Vec<RationalVector>, m: usize, d: usize) -> Result<Matrix> {
    let l = Matrix::new(rows, d)?;
    let r = rank(&l);
    if r < m {
        return Err(Error::RankDeficient {
            rank: r,
            expected: m,
        });
    }
    Ok(l)
}

impl SlopeDomain for SimplexInstance {
    fn block_structure(&self) -> BlockStructure {
        BlockStructure::single(self.m()).expect("m >= 1")
    }

    fn slope_vector(&self, omega: &[Rational]) -> Result<RationalVector> {
        theta(self, omega)
    }

    fn formula_arborescence(&self, omega: &[Rational]) -> Result<Arborescence> {
        arborescence_min_formula(self, omega)
    }

    fn linear_map(&self, arb: &Arborescence) -> Result<Matrix> {
        arb.validate(self)?;
        let rows = simplex_rows(self, |i| arb.successor(&Vertex::label(i)).unwrap().0[0])?;
        full_rank(rows, self.m(), self.dim())
    }

    fn instance_id(&self) -> String {
        Instance::Simplex(self.clone()).digest()
    }
}

impl SlopeDomain for ProductInstance {
    fn block_structure(&self) -> BlockStructure {
        self.blocks().clone()
    }

    fn slope_vector(&self, omega: &[Rational]) -> Result<RationalVector> {
        theta_product(self, omega)
    }

    fn formula_arborescence(&self, omega: &[Rational]) -> Result<Arborescence> {
        arborescence_product_formula(self, omega)
    }

    fn linear_map(&self, arb: &Arborescence) -> Result<Matrix> {
        arb.validate(self)?;
        let d = self.dim();
        let mut rows = Vec::new();
        for (s, f) in self.factors().iter().enumerate() {
            let factor = project_to_factor(self, arb, s)?;
            let range = self.coord_range(s);
            for row in simplex_rows(f, |i| factor[i - 1])? {
                let mut full = zeros(d);
                full[range.clone()].clone_from_slice(&row);
                rows.push(full);
            }
        }
        full_rank(rows, self.blocks().m(), d)
    }

    fn instance_id(&self) -> String {
        Instance::Product(self.clone()).digest()
    }
}

/// Factor successors read off the line through the top tuple in direction
/// `s`: entry `i - 1` is the factor label that `(n_1, .., i, .., n_t)` moves
/// to. Fails if such a vertex moves in another factor.
pub fn project_to_factor(
    prod: &ProductInstance,
    arb: &Arborescence,
    s: usize,
) -> Result<Vec<usize>> {
    let top = prod.top();
    let n = prod.factors()[s].n();
    (1..=n)
        .map(|i| {
            let mut t = top.labels().to_vec();
            t[s] = i;
            let u = Vertex::tuple(t);
            let a = arb
                .successor(&u)
                .ok_or_else(|| Error::InvalidVertex(u.clone()))?;
            let moved: Vec<usize> = (0..u.labels().len())
                .filter(|&r| a.labels()[r] != u.labels()[r])
                .collect();
            match moved[..] {
                [] => Ok(i),
                [r] if r == s => Ok(a.labels()[s]),
                _ => Err(Error::InvalidArborescence(format!(
                    "{u} leaves the factor line of block {}",
                    s + 1
                ))),
            }
        })
        .collect()
}

/// `(tau(1), ..., tau(m))`.
pub fn theta(inst: &SimplexInstance, omega: &[Rational]) -> Result<RationalVector> {
    Ok(finite_prefix(
        optimal_slopes(inst, omega)?.into_values(),
        inst.m(),
    ))
}

/// Concatenated factor slope vectors. Ties between blocks are allowed here.
pub fn theta_product(prod: &ProductInstance, omega: &[Rational]) -> Result<RationalVector> {
    let data = factor_data(prod, omega)?;
    Ok(data
        .into_iter()
        .zip(prod.factors())
        .flat_map(|((tau, _), f)| finite_prefix(tau, f.m()))
        .collect())
}

/// Ascending sorting permutation: `v[pi_1] < v[pi_2] < ...`.
pub fn pi_of(v: &[Rational]) -> Result<Permutation> {
    let mut order: Vec<usize> = (1..=v.len()).collect();
    order.sort_by(|&a, &b| v[a - 1].cmp(&v[b - 1]).then(a.cmp(&b)));
    if let Some(w) = order
        .windows(2)
        .find(|w| v[w[0] - 1].cmp(&v[w[1] - 1]) == Ordering::Equal)
    {
        return Err(Error::TiedSlopes {
            first: w[0].min(w[1]),
            second: w[0].max(w[1]),
        });
    }
    Permutation::new(order)
}

pub fn cone_linear_map<I: SlopeDomain + ?Sized>(inst: &I, arb: &Arborescence) -> Result<Matrix> {
    inst.linear_map(arb)
}

/// Image `{x : M L^{-1} x >= 0}` of the cone of `arb` under `L_A`, with
/// primitive rows. The witness is the image of the cone's witness.
pub fn image_cone<I: SlopeDomain + ?Sized>(inst: &I, arb: &Arborescence) -> Result<HCone> {
    let cone = cone_of_arborescence(inst, arb)?;
    let l = inst.linear_map(arb)?;
    image_of(&cone, &l)
}

pub(crate) fn image_of(cone: &HCone, l: &Matrix) -> Result<HCone> {
    let inv = l.inverse()?;
    let rows = cone
        .rows
        .iter()
        .map(|r| {
            let row: RationalVector = (0..inv.ncols())
                .map(|j| {
                    inv.rows()
                        .iter()
                        .zip(r)
                        .fold(Rational::zero(), |acc, (inv_row, rk)| {
                            acc + rk * &inv_row[j]
                        })
                })
                .collect();
            primitive(&row)
        })
        .collect();
    let mut image = HCone::new(l.nrows(), rows)?;
    image.witness = cone.witness.as_ref().map(|w| l.mul_vec(w));
    Ok(image)
}
