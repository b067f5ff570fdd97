mod common;

use opstate::decompose::{self, SimplexWeights};
use opstate::fixtures;
use opstate::schema::{CoordKind, MeasurementSet};
use opstate::statespace::StateSpace;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_from_seed(seed: u64) -> (ChaCha8Rng, StateSpace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = common::random_schema(&mut rng);
    (rng, StateSpace::new(schema).unwrap())
}

proptest! {
    #![proptest_config(common::proptest_config(64))]

    #[test]
    fn impossible_sets_are_upward_closed(seed in any::<u64>()) {
        let (_, space) = space_from_seed(seed);
        let s = &space.schema;
        let all = 1u64 << s.num_measurements();
        for a in 0..all {
            for b in 0..all {
                let (a, b) = (MeasurementSet(a), MeasurementSet(b));
                if a.is_subset(b) && s.is_impossible(a) {
                    prop_assert!(s.is_impossible(b));
                }
            }
        }
    }

    #[test]
    fn coordinate_count_fills_the_subset_lattice(counts in prop::collection::vec(1usize..=3, 1..=4)) {
        let schema = fixtures::schema_with_counts(&counts, &[]);
        let coords = schema.coordinates().unwrap();
        prop_assert_eq!(1 + coords.dim(), 1usize << schema.num_outcomes());
    }

    #[test]
    fn enumeration_is_deterministic(seed in any::<u64>()) {
        let (_, a) = space_from_seed(seed);
        let (_, b) = space_from_seed(seed);
        prop_assert_eq!(a.coords.coords(), b.coords.coords());
        prop_assert_eq!(a.vertices, b.vertices);
        prop_assert_eq!(a.polytope, b.polytope);
    }

    #[test]
    fn vertices_match_truth_assignments(seed in any::<u64>()) {
        let (_, space) = space_from_seed(seed);
        let truths: Vec<Vec<f64>> = common::truth_assignments(&space.schema.outcome_counts())
            .iter()
            .map(|a| common::truth_vector(&space.schema, &space.coords, a))
            .collect();
        prop_assert_eq!(&space.vertices.points, &truths);
    }

    #[test]
    fn deterministic_vertices_are_vertices(seed in any::<u64>()) {
        let (_, space) = space_from_seed(seed);
        // the rank test is a dense SVD over every active row
        prop_assume!(space.dim() <= 64);
        for w in &space.vertices.points {
            let m = space.polytope.contains(w).unwrap();
            prop_assert!(m.inside && m.violations.is_empty());
            prop_assert!(space.polytope.is_vertex(w).unwrap().is_vertex);
            // conjunctions are products of their singles
            for c in space.coords.coords() {
                let k = space.coords.position(c.outcomes).unwrap();
                let prod: f64 = c
                    .outcomes
                    .iter()
                    .map(|b| w[space.coords.position(opstate::schema::OutcomeSet::singleton(b)).unwrap()])
                    .product();
                let want = if c.kind == CoordKind::ZeroForced { 0.0 } else { prod };
                prop_assert_eq!(w[k], want);
            }
        }
    }

    #[test]
    fn hull_states_satisfy_the_polytope_and_monotonicity(seed in any::<u64>()) {
        let (mut rng, space) = space_from_seed(seed);
        for _ in 0..16 {
            let (_, z) = common::random_hull_state(&mut rng, &space);
            prop_assert!(space.polytope.contains(&z).unwrap().inside);
            for k in space.coords.free() {
                for j in common::sub_coordinates(&space.coords, k) {
                    prop_assert!(z[k] <= z[j]);
                }
            }
        }
    }

    #[test]
    fn recompose_is_affine(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let (mut rng, space) = space_from_seed(seed);
        let n = space.vertices.len();
        let l1 = common::random_lambda(&mut rng, n);
        let l2 = common::random_lambda(&mut rng, n);
        let mixed = SimplexWeights(l1.0.iter().zip(&l2.0).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect());
        let z1 = decompose::recompose(&space.vertices, &l1).unwrap();
        let z2 = decompose::recompose(&space.vertices, &l2).unwrap();
        let z = decompose::recompose(&space.vertices, &mixed).unwrap();
        for k in 0..space.dim() {
            prop_assert!((z[k] - (alpha * z1[k] + (1.0 - alpha) * z2[k])).abs() <= 1e-12);
        }
        // against the independent mixer
        let oracle = common::mix(&space.vertices.points, &mixed.0);
        for k in 0..space.dim() {
            prop_assert!((z[k] - oracle[k]).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(common::proptest_config(16))]

    #[test]
    fn midpoints_are_not_vertices(seed in any::<u64>()) {
        let (_, space) = space_from_seed(seed);
        prop_assume!(space.dim() <= 30);
        let pts = &space.vertices.points;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let mid: Vec<f64> = pts[i].iter().zip(&pts[j]).map(|(a, b)| 0.5 * (a + b)).collect();
                prop_assert!(!space.polytope.is_vertex(&mid).unwrap().is_vertex);
            }
        }
    }
}

#[test]
fn polytope_row_counts_follow_the_schema() {
    // the hull of the deterministic vertices is smaller than the polytope
    // once fractional vertices exist
    for (schema, rows, affine, hull) in [
        (fixtures::coin(), 9, 1, 1),
        (fixtures::two_by_two(), 57, 5, 3),
        (fixtures::chsh(), 192, 16, 8),
    ] {
        let space = StateSpace::new(schema).unwrap();
        assert_eq!(space.polytope.rows.len(), rows);
        assert_eq!(space.polytope.affine_dimension().unwrap(), affine);
        assert_eq!(space.vertices.affine_dimension(), hull);
    }
}
