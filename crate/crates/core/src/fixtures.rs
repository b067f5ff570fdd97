//! Ready-made schemas, tables and states: the coin, two jointly measurable
//! binary measurements, and the CHSH setting with its PR box.

use std::collections::BTreeMap;

use crate::empirical::{Atom, FrequencyTable, StateVector};
use crate::schema::{
    CoordKind, CoordinateIndex, MeasurementConfig, MeasurementSchema, MeasurementSet, OutcomeSet, SchemaConfig,
};

fn measurement(name: &str, outcomes: &[&str], values: &[f64]) -> MeasurementConfig {
    MeasurementConfig {
        name: name.into(),
        outcomes: outcomes.iter().map(|s| s.to_string()).collect(),
        values: Some(values.to_vec()),
    }
}

pub fn coin_config() -> SchemaConfig {
    SchemaConfig {
        measurements: vec![measurement("toss", &["H", "T"], &[1.0, 0.0])],
        impossible: vec![],
    }
}

/// One measurement `toss` with outcomes `H` (label 1) and `T` (label 0).
pub fn coin() -> MeasurementSchema {
    MeasurementSchema::from_config(&coin_config()).expect("coin schema")
}

/// Two jointly measurable binary measurements `a` and `b`.
pub fn two_by_two() -> MeasurementSchema {
    MeasurementSchema::from_config(&SchemaConfig {
        measurements: vec![
            measurement("a", &["0", "1"], &[1.0, -1.0]),
            measurement("b", &["0", "1"], &[1.0, -1.0]),
        ],
        impossible: vec![],
    })
    .expect("2x2 schema")
}

pub fn chsh_config() -> SchemaConfig {
    SchemaConfig {
        measurements: ["A1", "A2", "B1", "B2"]
            .iter()
            .map(|n| measurement(n, &["0", "1"], &[1.0, -1.0]))
            .collect(),
        impossible: vec![vec!["A1".into(), "A2".into()], vec!["B1".into(), "B2".into()]],
    }
}

/// Alice measures `A1` or `A2`, Bob `B1` or `B2`.
pub fn chsh() -> MeasurementSchema {
    MeasurementSchema::from_config(&chsh_config()).expect("CHSH schema")
}

/// Measurements `m0, m1, …` with the given outcome counts, labels `0..n`,
/// and the listed impossible index sets.
pub fn schema_with_counts(counts: &[usize], impossible: &[&[usize]]) -> MeasurementSchema {
    let name = |r: usize| format!("m{r}");
    MeasurementSchema::from_config(&SchemaConfig {
        measurements: counts
            .iter()
            .enumerate()
            .map(|(r, &n)| MeasurementConfig {
                name: name(r),
                outcomes: (0..n).map(|i| i.to_string()).collect(),
                values: Some((0..n).map(|i| i as f64).collect()),
            })
            .collect(),
        impossible: impossible
            .iter()
            .map(|set| set.iter().map(|&r| name(r)).collect())
            .collect(),
    })
    .expect("generated schema")
}

/// Uniform singles with product conjunctions.
pub fn product_state(schema: &MeasurementSchema, coords: &CoordinateIndex) -> StateVector {
    StateVector(
        coords
            .coords()
            .iter()
            .map(|c| match c.kind {
                CoordKind::ZeroForced => 0.0,
                _ => c
                    .outcomes
                    .iter()
                    .map(|b| 1.0 / schema.measurement(schema.outcome_at(b).measurement).outcome_count() as f64)
                    .product(),
            })
            .collect(),
    )
}

/// Binary-outcome state with every single at 1/2 and the given joint
/// probability function on free pairs; other conjunctions are zero.
pub fn half_singles_state(
    coords: &CoordinateIndex,
    schema: &MeasurementSchema,
    pair: impl Fn(usize, usize, usize, usize) -> f64,
) -> StateVector {
    StateVector(
        coords
            .coords()
            .iter()
            .map(|c| match c.kind {
                CoordKind::Single => 0.5,
                CoordKind::Free if c.outcomes.len() == 2 => {
                    let ids: Vec<_> = c.outcomes.iter().map(|b| schema.outcome_at(b)).collect();
                    pair(ids[0].measurement, ids[0].outcome, ids[1].measurement, ids[1].outcome)
                }
                _ => 0.0,
            })
            .collect(),
    )
}

/// The PR box on the CHSH schema: outcomes agree in every context except
/// `{A2,B2}`, where they always differ.
pub fn pr_box_state(schema: &MeasurementSchema, coords: &CoordinateIndex) -> StateVector {
    half_singles_state(coords, schema, |r, i, s, j| {
        let anti = r == 1 && s == 3;
        if (i == j) != anti {
            0.5
        } else {
            0.0
        }
    })
}

/// All four CHSH contexts perfectly correlated.
pub fn chsh_correlated_state(schema: &MeasurementSchema, coords: &CoordinateIndex) -> StateVector {
    half_singles_state(coords, schema, |_, i, _, j| if i == j { 0.5 } else { 0.0 })
}

/// On [`two_by_two`]: singles 1/2, pairs `(a0b0, a0b1, a1b0, a1b1) =
/// (0.4, 0.2, 0.1, 0.3)`. Its `a` marginal is 0.6, not 0.5.
pub fn marginal_mismatch_state(schema: &MeasurementSchema, coords: &CoordinateIndex) -> StateVector {
    let table = [[0.4, 0.2], [0.1, 0.3]];
    half_singles_state(coords, schema, |_, i, _, j| table[i][j])
}

fn pr_box_atoms(schema: &MeasurementSchema, skip: Option<MeasurementSet>) -> Vec<(OutcomeSet, f64)> {
    let contexts: Vec<_> = schema.possible_sets().into_iter().filter(|c| Some(*c) != skip).collect();
    let w = 1.0 / (2.0 * contexts.len() as f64);
    let mut atoms = Vec::new();
    for ctx in contexts {
        let rs: Vec<_> = ctx.iter().collect();
        let anti = rs == [1, 3];
        for i in 0..2 {
            let j = if anti { 1 - i } else { i };
            let eps = OutcomeSet::from_indices([2 * rs[0] + i, 2 * rs[1] + j]);
            atoms.push((eps, w));
        }
    }
    atoms
}

/// Exact PR-box frequencies with each context performed in 1/4 of runs.
pub fn pr_box_table(schema: &MeasurementSchema) -> FrequencyTable {
    FrequencyTable::from_outcome_weights(schema, pr_box_atoms(schema, None)).expect("PR table")
}

/// PR-box frequencies with one context never performed.
pub fn pr_box_table_without(schema: &MeasurementSchema, a: &str, b: &str) -> FrequencyTable {
    let skip = MeasurementSet::from_indices([
        schema.measurement_index(a).expect("measurement"),
        schema.measurement_index(b).expect("measurement"),
    ]);
    FrequencyTable::from_outcome_weights(schema, pr_box_atoms(schema, Some(skip))).expect("PR table")
}

/// Two tables on [`two_by_two`]: in the first, `a` is measured alone and
/// yields outcome 0 with frequency 0.8; in the second, `a` is always
/// measured jointly with `b` and yields 0 with frequency 0.6.
pub fn contextual_pair() -> (FrequencyTable, FrequencyTable) {
    let s = two_by_two();
    let a = MeasurementSet::singleton(0);
    let ab = MeasurementSet(0b11);
    let alone = FrequencyTable::analytic(
        &s,
        [
            (Atom { performed: a, outcomes: OutcomeSet::singleton(0) }, 0.8),
            (Atom { performed: a, outcomes: OutcomeSet::singleton(1) }, 0.2),
        ],
    )
    .expect("alone table");
    let mut joint = BTreeMap::new();
    for (i, pa) in [(0, 0.6), (1, 0.4)] {
        for j in 2..4 {
            joint.insert(
                Atom {
                    performed: ab,
                    outcomes: OutcomeSet::from_indices([i, j]),
                },
                pa * 0.5,
            );
        }
    }
    let joint = FrequencyTable::analytic(&s, joint).expect("joint table");
    (alone, joint)
}
