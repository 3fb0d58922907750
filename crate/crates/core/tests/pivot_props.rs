use pivotfan_core::arith::{add, dot, int, ints, ratio, scale, RationalVector};
use pivotfan_core::model::{random_product, random_simplex, BlockStructure, LinearProgram};
use pivotfan_core::pivot::{
    arborescence_min_formula, arborescence_of, arborescence_product_formula, check_fan,
    descent_holds, engines_agree, enumerate_pivot_fan, slope, Engine,
};
use pivotfan_core::Error;
use proptest::prelude::*;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn catalan(m: u64) -> u64 {
    binomial(2 * m, m) / (m + 1)
}

fn weight(dim: usize) -> impl Strategy<Value = RationalVector> {
    prop::collection::vec(-1_000_000i64..=1_000_000, dim).prop_map(|v| ints(&v))
}

fn simplex_case() -> impl Strategy<Value = (usize, u64, RationalVector)> {
    (1usize..=5, 1u64..=50).prop_flat_map(|(m, seed)| (Just(m), Just(seed), weight(m)))
}

fn blocks() -> impl Strategy<Value = BlockStructure> {
    prop::collection::vec(1usize..=3, 1..=3)
        .prop_filter("at most five letters", |s| s.iter().sum::<usize>() <= 5)
        .prop_map(|s| BlockStructure::new(s).unwrap())
}

fn product_case() -> impl Strategy<Value = (BlockStructure, u64, RationalVector)> {
    (blocks(), 1u64..=50).prop_flat_map(|(b, seed)| {
        let m = b.m();
        (Just(b), Just(seed), weight(m))
    })
}

fn generic<T>(r: Result<T, Error>) -> Result<T, TestCaseError> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::NonGenericWeight { .. }) => Err(TestCaseError::reject("tie")),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_sorted_and_neighbor_counts((m, seed, _w) in simplex_case()) {
        let inst = random_simplex(m, seed).unwrap();
        let vs = inst.vertices();
        prop_assert_eq!(vs.len(), m + 1);
        for pair in vs.windows(2) {
            prop_assert!(inst.objective_value(&pair[0]) < inst.objective_value(&pair[1]));
        }
        for (i, v) in vs.iter().enumerate() {
            prop_assert_eq!(inst.improving_neighbors(v).len(), m - i);
        }
    }

    #[test]
    fn product_neighbor_counts((b, seed, _w) in product_case()) {
        let prod = random_product(&b, seed).unwrap();
        let expected: usize = b.sizes().iter().map(|m| m + 1).product();
        prop_assert_eq!(prod.vertices().len(), expected);
        prop_assert_eq!(prod.dim(), b.m());
        for v in prod.vertices() {
            let gaps: usize = v.labels().iter().zip(b.sizes()).map(|(i, m)| m + 1 - i).sum();
            prop_assert_eq!(prod.improving_neighbors(&v).len(), gaps);
        }
    }

    #[test]
    fn homogeneity((m, seed, w) in simplex_case(), p in 1i64..=20, q in 1i64..=20) {
        let inst = random_simplex(m, seed).unwrap();
        let arb = generic(arborescence_of(&inst, &w))?;
        let lambda = ratio(p, q).unwrap();
        prop_assert_eq!(arborescence_of(&inst, &scale(&w, &lambda)).unwrap(), arb);
    }

    #[test]
    fn objective_shift((m, seed, w) in simplex_case(), p in -20i64..=20, q in 1i64..=20) {
        let inst = random_simplex(m, seed).unwrap();
        let arb = generic(arborescence_of(&inst, &w))?;
        let mu = ratio(p, q).unwrap();
        let shifted = add(&w, &scale(inst.objective(), &mu));
        prop_assert_eq!(arborescence_of(&inst, &shifted).unwrap(), arb);
        for u in inst.vertices() {
            for v in inst.improving_neighbors(&u) {
                let before = slope(&inst, &w, &u, &v).unwrap();
                prop_assert_eq!(slope(&inst, &shifted, &u, &v).unwrap(), before + &mu);
            }
        }
    }

    #[test]
    fn min_formula_and_descent((m, seed, w) in simplex_case()) {
        let inst = random_simplex(m, seed).unwrap();
        let arb = generic(arborescence_of(&inst, &w))?;
        prop_assert_eq!(arborescence_min_formula(&inst, &w).unwrap(), arb);
        prop_assert!(descent_holds(&inst, &w).unwrap());
    }

    #[test]
    fn product_formula_and_descent((b, seed, w) in product_case()) {
        let prod = random_product(&b, seed).unwrap();
        let arb = generic(arborescence_of(&prod, &w))?;
        let formula = generic(arborescence_product_formula(&prod, &w))?;
        prop_assert_eq!(formula, arb);
        prop_assert!(descent_holds(&prod, &w).unwrap());
    }
}

#[test]
fn catalan_counts_small() {
    for m in 1..=4 {
        let inst = random_simplex(m, 7).unwrap();
        let fan = enumerate_pivot_fan(&inst, Engine::Oracle).unwrap();
        assert_eq!(fan.len() as u64, catalan(m as u64), "m = {m}");
    }
}

#[test]
fn cube_is_a_hexagon() {
    let blocks = BlockStructure::new(vec![1, 1, 1]).unwrap();
    for seed in 1..=3 {
        let fan = enumerate_pivot_fan(&random_product(&blocks, seed).unwrap(), Engine::Oracle);
        assert_eq!(fan.unwrap().len(), 6);
    }
}

#[test]
fn witnesses_realize_their_cones() {
    let inst = random_simplex(4, 3).unwrap();
    let fan = enumerate_pivot_fan(&inst, Engine::Oracle).unwrap();
    for fc in &fan.cones {
        let w = fc.cone.witness.as_ref().unwrap();
        assert!(fc.cone.strictly_contains(w));
        assert_eq!(&arborescence_of(&inst, w).unwrap(), &fc.label);
        for row in &fc.cone.rows {
            assert!(dot(row, w) > int(0));
        }
    }
}

#[test]
fn engines_agree_small() {
    for m in 1..=3 {
        let inst = random_simplex(m, 11).unwrap();
        let a = enumerate_pivot_fan(&inst, Engine::Oracle).unwrap();
        let b = enumerate_pivot_fan(&inst, Engine::FlipBfs { seed: 5 }).unwrap();
        assert!(engines_agree(&a, &b).unwrap());
        assert!(check_fan(&a).pass());
    }
    let prod = random_product(&BlockStructure::new(vec![1, 2]).unwrap(), 4).unwrap();
    let a = enumerate_pivot_fan(&prod, Engine::Oracle).unwrap();
    let b = enumerate_pivot_fan(&prod, Engine::FlipBfs { seed: 2 }).unwrap();
    assert_eq!(a.len(), 6);
    assert!(engines_agree(&a, &b).unwrap());
}

#[test]
fn catalan_oracle_values() {
    let expected: Vec<u64> = vec![1, 1, 2, 5, 14, 42, 132];
    let computed: Vec<u64> = (0..=6).map(catalan).collect();
    assert_eq!(computed, expected);
}
