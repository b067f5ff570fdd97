mod common;

use opstate::decompose::{self, Decomposition};
use opstate::error::Error;
use opstate::fixtures;
use opstate::ontology::{self, Case, Membership};
use opstate::statespace::StateSpace;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A hull state, pushed outside the hull half of the time by moving it
/// beyond a random point of the polytope's bounding box.
fn mixed_state(rng: &mut ChaCha8Rng, space: &StateSpace) -> Vec<f64> {
    let (_, z) = common::random_hull_state(rng, space);
    if rng.random_bool(0.5) {
        return z.0;
    }
    z.0.iter().map(|v| v + 0.3 * (rng.random::<f64>() - 0.5)).collect()
}

proptest! {
    #![proptest_config(common::proptest_config(100))]

    #[test]
    fn feasibility_verdicts_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = StateSpace::new(common::random_schema(&mut rng)).unwrap();
        for _ in 0..10 {
            let z = mixed_state(&mut rng, &space);
            let lp = decompose::decompose_feasible(&space.vertices, &z).unwrap();
            match decompose::max_entropy_section(&space.vertices, &z) {
                Ok(sec) => {
                    prop_assert!(lp.is_feasible());
                    let back = decompose::recompose(&space.vertices, &sec.weights).unwrap();
                    for k in 0..z.len() {
                        prop_assert!((back[k] - z[k]).abs() <= 1e-8);
                    }
                }
                Err(Error::Infeasible) => {
                    let Decomposition::Infeasible { certificate } = lp else {
                        panic!("section infeasible but LP feasible");
                    };
                    let max = space.vertices.points.iter().map(|w| dot(&certificate.normal, w)).fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!(dot(&certificate.normal, &z) > max);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn joint_schemas_are_classical(counts in prop::collection::vec(1usize..=3, 1..=3), seed in any::<u64>()) {
        let space = StateSpace::new(fixtures::schema_with_counts(&counts, &[])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, z) = common::random_hull_state(&mut rng, &space);
        let m = ontology::classical_membership(&space, &z, 16).unwrap();
        let Membership::Classical { weights, .. } = m else { panic!("hull state not classical") };
        prop_assert!(weights.iter().all(|w| *w >= 0.0));
        prop_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let back = common::mix(&space.vertices.points, &weights);
        for k in 0..z.len() {
            prop_assert!((back[k] - z[k]).abs() <= 1e-8);
        }
    }

    #[test]
    fn classical_implies_no_signaling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = StateSpace::new(common::random_schema(&mut rng)).unwrap();
        let z = mixed_state(&mut rng, &space);
        let r = ontology::classify(&space, &z).unwrap();
        if r.case == Case::Case3 {
            prop_assert!(r.no_signaling.passed);
        }
    }

    #[test]
    fn certificates_separate_chsh_mixtures(p in 0.0f64..=1.0, seed in any::<u64>()) {
        let space = StateSpace::new(fixtures::chsh()).unwrap();
        let pr = fixtures::pr_box_state(&space.schema, &space.coords);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, c) = common::random_hull_state(&mut rng, &space);
        let z: Vec<f64> = pr.0.iter().zip(&c.0).map(|(a, b)| p * a + (1.0 - p) * b).collect();
        if let Membership::NonClassical { certificate } = ontology::classical_membership(&space, &z, 16).unwrap() {
            let truths = common::truth_assignments(&space.schema.outcome_counts());
            let max = truths
                .iter()
                .map(|a| dot(&certificate.normal, &common::truth_vector(&space.schema, &space.coords, a)))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(dot(&certificate.normal, &z) > max + 1e-9);
        }
    }
}

#[test]
fn interior_point_of_a_product_preimage() {
    let space = StateSpace::new(fixtures::schema_with_counts(&[3, 2], &[&[0, 1]])).unwrap();
    let z = fixtures::product_state(&space.schema, &space.coords);
    assert_eq!(decompose::preimage_dimension(&space.vertices, &z).unwrap(), Some(2));
    let sec = decompose::max_entropy_section(&space.vertices, &z).unwrap();
    for w in &sec.weights.0 {
        assert!((w - 1.0 / 6.0).abs() <= 1e-9);
    }
}

#[test]
fn boundary_state_keeps_forced_zeros() {
    let space = StateSpace::new(fixtures::two_by_two()).unwrap();
    let z = &space.vertices.points[1];
    let sec = decompose::max_entropy_section(&space.vertices, z).unwrap();
    assert_eq!(sec.support, vec![1]);
    assert!((sec.weights.0[1] - 1.0).abs() <= 1e-12);
    assert_eq!(sec.entropy, 0.0);
}
