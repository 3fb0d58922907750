//! End-to-end certificate that the slope map carries the pivot fan onto the
//! sylvester fan of the instance's block structure.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{image_of, pi_of, project_to_factor, SlopeDomain};
use crate::arith::{add, cones_equal, scale, HCone, Matrix, Rational, RationalVector};
use crate::error::{Error, Result};
use crate::model::{BlockStructure, LinearProgram, ProductInstance, Vertex};
use crate::pivot::{
    arborescence_of, check_fan, descent_holds, enumerate_pivot_fan, factor_data, step_scale,
    Arborescence, Engine, FanReport, WeightSampler,
};
use crate::sylvester::{class_cone, enumerate_classes, sylvester_fan, Permutation, SylvesterClass};

const MAX_HALVINGS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, pass: bool, detail: Option<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub arborescence: Arborescence,
    pub cone: HCone,
    pub linear_map: Matrix,
    /// Generic point of the cone at which the class was read off.
    #[serde(with = "crate::arith::serde_q::vec")]
    pub probe: RationalVector,
    pub permutation: Permutation,
    /// Canonical member of the matched class.
    pub class: Permutation,
    pub image: HCone,
    pub image_equals_class: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleCounterexample {
    FormulaMismatch {
        #[serde(with = "crate::arith::serde_q::vec")]
        omega: RationalVector,
    },
    DescentFails {
        #[serde(with = "crate::arith::serde_q::vec")]
        omega: RationalVector,
    },
    /// The arborescence at `omega` and the class of its slope permutation
    /// disagree with the exact matching.
    MatchingMismatch {
        #[serde(with = "crate::arith::serde_q::vec")]
        omega: RationalVector,
        class: Permutation,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub seed: u64,
    pub samples: usize,
    pub distinct_arborescences: usize,
    pub counterexamples: Vec<SampleCounterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanSummary {
    pub cones: usize,
    pub facets: usize,
    pub walls: usize,
    pub pass: bool,
    pub violations: Vec<crate::pivot::FanViolation>,
}

impl From<&FanReport> for FanSummary {
    fn from(r: &FanReport) -> Self {
        Self {
            cones: r.cones,
            facets: r.facets,
            walls: r.walls.len(),
            pass: r.pass(),
            violations: r.violations.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsomorphismCertificate {
    pub instance: String,
    pub blocks: BlockStructure,
    pub pass: bool,
    pub pivot_cones: usize,
    pub classes: usize,
    pub checks: Vec<Check>,
    pub pivot_fan: Option<FanSummary>,
    pub sylvester_fan: Option<FanSummary>,
    pub sampling: Option<SampleReport>,
    /// Sorted by arborescence.
    pub entries: Vec<CertificateEntry>,
}

/// Runs every check and records the outcome; errors become failed checks.
pub fn verify_isomorphism<I: SlopeDomain + ?Sized>(
    inst: &I,
    blocks: &BlockStructure,
    options: VerifyOptions,
) -> IsomorphismCertificate {
    let mut cert = IsomorphismCertificate {
        instance: inst.instance_id(),
        blocks: blocks.clone(),
        pass: false,
        pivot_cones: 0,
        classes: 0,
        checks: Vec::new(),
        pivot_fan: None,
        sylvester_fan: None,
        sampling: None,
        entries: Vec::new(),
    };
    if let Err(e) = run_checks(inst, blocks, options, &mut cert) {
        cert.checks
            .push(Check::new("error", false, Some(e.to_string())));
    }
    cert.pass = !cert.checks.is_empty() && cert.checks.iter().all(|c| c.pass);
    cert
}

fn run_checks<I: SlopeDomain + ?Sized>(
    inst: &I,
    blocks: &BlockStructure,
    options: VerifyOptions,
    cert: &mut IsomorphismCertificate,
) -> Result<()> {
    let own = inst.block_structure();
    let same_blocks = own == *blocks;
    cert.checks.push(Check::new(
        "blocks",
        same_blocks,
        (!same_blocks).then(|| format!("instance has blocks {own}, asked for {blocks}")),
    ));
    if !same_blocks {
        return Ok(());
    }

    let pivot = enumerate_pivot_fan(inst, Engine::Oracle)?;
    let classes = enumerate_classes(blocks)?;
    cert.pivot_cones = pivot.len();
    cert.classes = classes.len();
    let counts_equal = pivot.len() == classes.len();
    cert.checks.push(Check::new(
        "counts",
        counts_equal,
        (!counts_equal).then(|| format!("{} pivot cones, {} classes", pivot.len(), classes.len())),
    ));

    let class_of: HashMap<&Permutation, usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(k, cls)| cls.members.iter().map(move |p| (p, k)))
        .collect();

    // Per-cone work is independent; results come back in fan order.
    let entries: Vec<CertificateEntry> = pivot
        .cones
        .par_iter()
        .enumerate()
        .map(|(index, fc)| {
            certify_cone(
                inst,
                &fc.label,
                &fc.cone,
                index,
                options.seed,
                &classes,
                &class_of,
            )
        })
        .collect::<Result<_>>()?;

    let linear = entries.iter().all(|e| linear_at_witness(inst, e));
    cert.checks.push(Check::new("linearity", linear, None));

    let mut hits = vec![0usize; classes.len()];
    let index_of_canonical: HashMap<&Permutation, usize> = classes
        .iter()
        .enumerate()
        .map(|(k, c)| (c.canonical(), k))
        .collect();
    for e in &entries {
        hits[index_of_canonical[&e.class]] += 1;
    }
    let bijective = pivot.len() == classes.len() && hits.iter().all(|&h| h == 1);
    let missed: Vec<String> = classes
        .iter()
        .zip(&hits)
        .filter(|(_, &h)| h != 1)
        .map(|(c, h)| format!("{}x{h}", c.canonical()))
        .collect();
    cert.checks.push(Check::new(
        "bijection",
        bijective,
        (!missed.is_empty()).then(|| format!("classes hit other than once: {}", missed.join(" "))),
    ));

    let unequal: Vec<String> = entries
        .iter()
        .filter(|e| !e.image_equals_class)
        .map(|e| e.class.to_string())
        .collect();
    cert.checks.push(Check::new(
        "image_cones",
        unequal.is_empty(),
        (!unequal.is_empty())
            .then(|| format!("image differs from class cone for {}", unequal.join(" "))),
    ));

    let matching: BTreeMap<Arborescence, Permutation> = entries
        .iter()
        .map(|e| (e.arborescence.clone(), e.class.clone()))
        .collect();
    let sampling = sample_consistency(inst, options, &classes, &class_of, &matching)?;
    cert.checks.push(Check::new(
        "sampling",
        sampling.counterexamples.is_empty(),
        None,
    ));
    cert.sampling = Some(sampling);

    let pivot_report = check_fan(&pivot);
    let sylvester = sylvester_fan(blocks)?;
    let sylvester_report = check_fan(&sylvester);
    cert.checks
        .push(Check::new("pivot_fan", pivot_report.pass(), None));
    cert.checks
        .push(Check::new("sylvester_fan", sylvester_report.pass(), None));
    cert.pivot_fan = Some(FanSummary::from(&pivot_report));
    cert.sylvester_fan = Some(FanSummary::from(&sylvester_report));
    cert.entries = entries;
    Ok(())
}

fn certify_cone<I: SlopeDomain + ?Sized>(
    inst: &I,
    arb: &Arborescence,
    cone: &HCone,
    index: usize,
    seed: u64,
    classes: &[SylvesterClass],
    class_of: &HashMap<&Permutation, usize>,
) -> Result<CertificateEntry> {
    let l = inst.linear_map(arb)?;
    let witness = cone.witness.clone().ok_or(Error::MissingWitness)?;
    let (probe, permutation) =
        generic_probe(inst, cone, &witness, seed.wrapping_add(index as u64))?;
    let k = *class_of
        .get(&permutation)
        .ok_or_else(|| Error::InvalidArborescence(format!("{permutation} is in no class")))?;
    let class_hcone = class_cone(&classes[k])?;
    let image = image_of(cone, &l)?;
    let image_equals_class = cones_equal(&image, &class_hcone)?;
    Ok(CertificateEntry {
        arborescence: arb.clone(),
        cone: cone.clone(),
        linear_map: l,
        probe,
        permutation,
        class: classes[k].canonical().clone(),
        image,
        image_equals_class,
    })
}

/// A point of the open cone whose slope vector has distinct entries: the
/// witness itself, or the witness nudged along a seeded direction by a
/// shrinking step.
fn generic_probe<I: SlopeDomain + ?Sized>(
    inst: &I,
    cone: &HCone,
    witness: &[Rational],
    seed: u64,
) -> Result<(RationalVector, Permutation)> {
    if let Ok(pi) = inst.slope_vector(witness).and_then(|v| pi_of(&v)) {
        return Ok((witness.to_vec(), pi));
    }
    let direction = WeightSampler::new(inst.dim(), seed).draw();
    let half = Rational::new(1.into(), 2.into());
    let mut eps = Rational::one() / step_scale(&direction);
    for _ in 0..MAX_HALVINGS {
        let probe = add(witness, &scale(&direction, &eps));
        if cone.strictly_contains(&probe) {
            if let Ok(pi) = inst.slope_vector(&probe).and_then(|v| pi_of(&v)) {
                return Ok((probe, pi));
            }
        }
        eps *= &half;
    }
    Err(Error::GenerationFailed(
        "no point of the cone with distinct slopes".into(),
    ))
}

fn linear_at_witness<I: SlopeDomain + ?Sized>(inst: &I, e: &CertificateEntry) -> bool {
    let points = [Some(&e.probe), e.cone.witness.as_ref()];
    points.into_iter().flatten().all(|w| {
        inst.slope_vector(w)
            .map(|v| v == e.linear_map.mul_vec(w))
            .unwrap_or(false)
    })
}

fn sample_consistency<I: SlopeDomain + ?Sized>(
    inst: &I,
    options: VerifyOptions,
    classes: &[SylvesterClass],
    class_of: &HashMap<&Permutation, usize>,
    matching: &BTreeMap<Arborescence, Permutation>,
) -> Result<SampleReport> {
    let mut sampler = WeightSampler::new(inst.dim(), options.seed);
    let mut draws = Vec::with_capacity(options.samples);
    for _ in 0..options.samples {
        let (omega, (arb, pi)) = sampler.draw_generic(|w| {
            let arb = arborescence_of(inst, w)?;
            let pi = pi_of(&inst.slope_vector(w)?)?;
            Ok((arb, pi))
        })?;
        draws.push((omega, arb, pi));
    }
    let outcomes: Vec<(Vec<SampleCounterexample>, Arborescence)> = draws
        .into_par_iter()
        .map(|(omega, arb, pi)| {
            let mut found = Vec::new();
            if inst.formula_arborescence(&omega).ok().as_ref() != Some(&arb) {
                found.push(SampleCounterexample::FormulaMismatch {
                    omega: omega.clone(),
                });
            }
            if !descent_holds(inst, &omega).unwrap_or(false) {
                found.push(SampleCounterexample::DescentFails {
                    omega: omega.clone(),
                });
            }
            let class = classes[class_of[&pi]].canonical().clone();
            if matching.get(&arb) != Some(&class) {
                found.push(SampleCounterexample::MatchingMismatch { omega, class });
            }
            (found, arb)
        })
        .collect();
    let mut distinct = std::collections::BTreeSet::new();
    let mut counterexamples = Vec::new();
    for (found, arb) in outcomes {
        counterexamples.extend(found);
        distinct.insert(arb);
    }
    Ok(SampleReport {
        seed: options.seed,
        samples: options.samples,
        distinct_arborescences: distinct.len(),
        counterexamples,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionCounterexample {
    #[serde(with = "crate::arith::serde_q::vec")]
    pub omega: RationalVector,
    /// 1-based block.
    pub block: usize,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub samples: usize,
    pub counterexamples: Vec<ProjectionCounterexample>,
}

impl ProjectionReport {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// On the line through the top tuple in each factor direction the product
/// arborescence must move exactly as the factor arborescence does.
pub fn projection_check(
    prod: &ProductInstance,
    samples: usize,
    seed: u64,
) -> Result<ProjectionReport> {
    let mut sampler = WeightSampler::new(prod.dim(), seed);
    let mut counterexamples = Vec::new();
    for _ in 0..samples {
        let (omega, (arb, data)) =
            sampler.draw_generic(|w| Ok((arborescence_of(prod, w)?, factor_data(prod, w)?)))?;
        for (s, (_, factor_arb)) in data.iter().enumerate() {
            let projected = project_to_factor(prod, &arb, s);
            for i in 1..=prod.factors()[s].n() {
                let expected = factor_arb.successor(&Vertex::label(i)).map(|v| v.0[0]);
                let got = projected.as_ref().ok().map(|p| p[i - 1]);
                if got != expected {
                    counterexamples.push(ProjectionCounterexample {
                        omega: omega.clone(),
                        block: s + 1,
                        label: i,
                    });
                }
            }
        }
    }
    Ok(ProjectionReport {
        samples,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ints;
    use crate::model::random_simplex;
    use crate::pivot::tests::{square, triangle};

    fn quick() -> VerifyOptions {
        VerifyOptions {
            samples: 50,
            seed: 3,
        }
    }

    #[test]
    fn triangle_certificate() {
        let t = triangle();
        let cert = verify_isomorphism(&t, &BlockStructure::single(2).unwrap(), quick());
        assert!(cert.pass, "{:?}", cert.checks);
        assert_eq!((cert.pivot_cones, cert.classes), (2, 2));
        let by_arb: Vec<(String, String)> = cert
            .entries
            .iter()
            .map(|e| {
                (
                    serde_json::to_string(&e.arborescence).unwrap(),
                    e.class.to_string(),
                )
            })
            .collect();
        assert!(by_arb.contains(&(r#"{"1":"2","2":"3","3":"3"}"#.into(), "21".into())));
        assert!(by_arb.contains(&(r#"{"1":"3","2":"3","3":"3"}"#.into(), "12".into())));
    }

    #[test]
    fn pentagon_certificate() {
        let inst = random_simplex(3, 1).unwrap();
        let cert = verify_isomorphism(&inst, &BlockStructure::single(3).unwrap(), quick());
        assert!(cert.pass, "{:?}", cert.checks);
        assert_eq!(cert.pivot_cones, 5);
    }

    #[test]
    fn wrong_blocks_fail_without_panicking() {
        let cert = verify_isomorphism(&triangle(), &BlockStructure::parse("1,1").unwrap(), quick());
        assert!(!cert.pass);
        assert_eq!(cert.checks[0].name, "blocks");
    }

    #[test]
    fn square_projection() {
        let sq = square();
        let report = projection_check(&sq, 20, 1).unwrap();
        assert!(report.pass());
        let arb = arborescence_of(&sq, &ints(&[3, 1])).unwrap();
        assert_eq!(project_to_factor(&sq, &arb, 0).unwrap(), vec![2, 2]);
        assert_eq!(project_to_factor(&sq, &arb, 1).unwrap(), vec![2, 2]);
    }
}
