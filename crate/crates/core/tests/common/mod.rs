//! Test oracles written independently of the library code paths they check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use opstate::decompose::SimplexWeights;
use opstate::empirical::{MeasurementFrequencies, StateVector};
use opstate::fixtures;
use opstate::schema::{CoordKind, CoordinateIndex, MeasurementSchema, MeasurementSet};
use opstate::statespace::StateSpace;
use rand::Rng;

/// 1–3 measurements with 1–3 outcomes each and random impossible sets.
pub fn random_schema<R: Rng>(rng: &mut R) -> MeasurementSchema {
    let m = rng.random_range(1..=3);
    let counts: Vec<usize> = (0..m).map(|_| rng.random_range(1..=3)).collect();
    let mut impossible: Vec<Vec<usize>> = Vec::new();
    if m >= 2 {
        for a in 0..m {
            for b in a + 1..m {
                if rng.random_bool(0.3) {
                    impossible.push(vec![a, b]);
                }
            }
        }
        if m == 3 && rng.random_bool(0.3) {
            impossible.push(vec![0, 1, 2]);
        }
    }
    let refs: Vec<&[usize]> = impossible.iter().map(|v| v.as_slice()).collect();
    fixtures::schema_with_counts(&counts, &refs)
}

/// Uniform on the simplex.
pub fn random_lambda<R: Rng>(rng: &mut R, n: usize) -> SimplexWeights {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    SimplexWeights(e.into_iter().map(|x| x / s).collect())
}

/// Mixed-radix truth assignments, rebuilt from outcome counts alone.
pub fn truth_assignments(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in counts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// Indicator vector of an assignment: a coordinate is 1 iff each of its
/// outcomes is the chosen one for its measurement.
pub fn truth_vector(schema: &MeasurementSchema, coords: &CoordinateIndex, assignment: &[usize]) -> Vec<f64> {
    coords
        .coords()
        .iter()
        .map(|c| {
            let ids: Vec<_> = c.outcomes.iter().map(|b| schema.outcome_at(b)).collect();
            let mut seen = Vec::new();
            for id in &ids {
                if seen.contains(&id.measurement) {
                    return 0.0;
                }
                seen.push(id.measurement);
            }
            if ids.iter().all(|id| assignment[id.measurement] == id.outcome) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

pub fn mix(points: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; points[0].len()];
    for (p, l) in points.iter().zip(lambda) {
        for (zi, pi) in z.iter_mut().zip(p) {
            *zi += l * pi;
        }
    }
    z
}

/// Random distribution over performed sets that reaches every measurement
/// and every possible set, turned into cumulative frequencies.
pub fn random_frequencies<R: Rng>(rng: &mut R, schema: &MeasurementSchema) -> MeasurementFrequencies {
    let mut dist: BTreeMap<MeasurementSet, f64> = BTreeMap::new();
    let mut performable: Vec<MeasurementSet> = (0..schema.num_measurements()).map(MeasurementSet::singleton).collect();
    performable.extend(schema.possible_sets());
    for s in performable {
        *dist.entry(s).or_default() += 0.05 + rng.random::<f64>();
    }
    if rng.random_bool(0.5) {
        *dist.entry(MeasurementSet::EMPTY).or_default() += rng.random::<f64>();
    }
    let total: f64 = dist.values().sum();
    dist.values_mut().for_each(|v| *v /= total);
    MeasurementFrequencies::from_performance_distribution(schema, &dist)
}

/// Solves `Σ_{ε ⊇ C} δ_ε = g(C)` for all `C` by dense LU.
pub fn dense_superset_solve(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let a = DMatrix::from_fn(n, n, |c, e| if c & e == c { 1.0 } else { 0.0 });
    let b = DVector::from_column_slice(g);
    a.lu().solve(&b).expect("zeta matrix is unitriangular").iter().copied().collect()
}

/// Random state in the convex hull of the deterministic vertices.
pub fn random_hull_state<R: Rng>(rng: &mut R, space: &StateSpace) -> (SimplexWeights, StateVector) {
    let l = random_lambda(rng, space.vertices.len());
    let z = opstate::decompose::recompose(&space.vertices, &l).unwrap();
    (l, z)
}

/// Sub-coordinates of a coordinate: every proper nonempty subset that is
/// itself a coordinate.
pub fn sub_coordinates(coords: &CoordinateIndex, k: usize) -> Vec<usize> {
    let c = coords.get(k).outcomes.0;
    let mut out = Vec::new();
    let mut s = (c - 1) & c;
    while s > 0 {
        if let Some(p) = coords.position(opstate::schema::OutcomeSet(s)) {
            out.push(p);
        }
        s = (s - 1) & c;
    }
    out
}

pub fn is_free(coords: &CoordinateIndex, k: usize) -> bool {
    coords.get(k).kind == CoordKind::Free
}

/// Null-space basis (as columns) of `a` via SVD.
pub fn null_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = a.ncols();
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.unwrap();
    let max = svd.singular_values.max();
    (0..n)
        .filter(|&k| svd.singular_values[k] <= 1e-10 * max.max(1.0))
        .map(|k| vt.row(k).transpose())
        .collect()
}

/// Fixed-seed proptest settings so every run draws the same cases.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Default::default()
    }
}
