use pivotfan_core::arith::{
    cone_contains, cones_equal, dot, int, ints, rank, scale, HCone, Matrix, RationalVector,
};
use pivotfan_core::model::random_simplex;
use pivotfan_core::pivot::{enumerate_pivot_fan, Engine};
use proptest::prelude::*;
use std::sync::OnceLock;

fn matrix() -> impl Strategy<Value = Vec<RationalVector>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)
            .prop_map(|rows| rows.iter().map(|r| ints(r)).collect())
    })
}

fn pivot_cones(m: usize, seed: u64) -> Vec<HCone> {
    let fan = enumerate_pivot_fan(&random_simplex(m, seed).unwrap(), Engine::Oracle).unwrap();
    fan.cones.into_iter().map(|c| c.cone).collect()
}

fn simplex_fans() -> &'static [Vec<HCone>] {
    static FANS: OnceLock<Vec<Vec<HCone>>> = OnceLock::new();
    FANS.get_or_init(|| (1..=4).map(|seed| pivot_cones(4, seed)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_ignores_order_and_scaling(
        rows in matrix(),
        shift in 0usize..4,
        factors in prop::collection::vec((1i64..=5, any::<bool>()), 4),
    ) {
        let cols = rows[0].len();
        let before = rank(&Matrix::new(rows.clone(), cols).unwrap());
        prop_assert!(before <= rows.len().min(cols));
        let mut moved = rows.clone();
        moved.rotate_left(shift % rows.len());
        let moved: Vec<RationalVector> = moved
            .iter()
            .zip(&factors)
            .map(|(r, &(k, flip))| scale(r, &int(if flip { -k } else { k })))
            .collect();
        prop_assert_eq!(rank(&Matrix::new(moved, cols).unwrap()), before);
    }

    #[test]
    fn cone_equality_is_reflexive_and_symmetric(f in 0usize..4, a in 0usize..14, b in 0usize..14, k in 1i64..=7) {
        let cones = &simplex_fans()[f];
        let (x, y) = (&cones[a], &cones[b]);
        prop_assert!(cones_equal(x, x).unwrap());
        prop_assert_eq!(cones_equal(x, y).unwrap(), cones_equal(y, x).unwrap());
        prop_assert_eq!(cones_equal(x, y).unwrap(), a == b);
        // Rescaled rows in reverse order describe the same cone.
        let mut rows: Vec<RationalVector> = x.rows.iter().map(|r| scale(r, &int(k))).collect();
        rows.reverse();
        let same = HCone::new(x.dim, rows).unwrap().with_witness().unwrap();
        prop_assert!(cones_equal(x, &same).unwrap());
        prop_assert!(cones_equal(&same, x).unwrap());
    }
}

#[test]
fn witnesses_are_strict() {
    for seed in 1..=3 {
        for cone in pivot_cones(3, seed) {
            let w = cone.witness.as_ref().unwrap();
            assert!(cone.rows.iter().all(|a| dot(a, w) > int(0)));
        }
    }
}

#[test]
fn containment_of_a_restriction() {
    let cones = pivot_cones(3, 2);
    let cone = &cones[0];
    // Cutting through the witness keeps a full-dimensional piece.
    let w = cone.witness.as_ref().unwrap();
    let cut = vec![w[1].clone(), -w[0].clone(), int(0)];
    let piece = cone
        .intersection(&HCone::new(3, vec![cut]).unwrap())
        .with_witness()
        .unwrap();
    assert!(cone_contains(cone, &piece).unwrap());
    assert!(!cone_contains(&piece, cone).unwrap());
    assert!(!cone_contains(&cones[0], &cones[1]).unwrap());
    let mut whole = HCone::whole_space(3).with_witness().unwrap();
    assert!(cone_contains(&whole, &cones[2]).unwrap());
    assert!(!cone_contains(&cones[2], &whole).unwrap());
    whole.witness = None;
    assert!(cone_contains(&cones[2], &whole).is_err());
}
