//! Rebuilds run frequencies from a state vector plus how often each set
//! of measurements is performed, then extracts the state again.

use std::collections::BTreeMap;

use opstate::empirical::{self, MeasurementFrequencies, StateVector};
use opstate::fixtures;
use opstate::schema::MeasurementSet;

fn main() -> opstate::Result<()> {
    let schema = fixtures::chsh();
    let coords = schema.coordinates()?;
    let z = fixtures::chsh_correlated_state(&schema, &coords);

    // each of the four joint contexts a quarter of the time
    let contexts: BTreeMap<MeasurementSet, f64> = schema.possible_sets().into_iter().map(|c| (c, 0.25)).collect();
    let freqs = MeasurementFrequencies::from_performance_distribution(&schema, &contexts);
    let table = empirical::reconstruct_frequencies(&schema, &coords, &z, &freqs, 20)?;
    for (atom, w) in table.weights() {
        println!("{:<28} {w}", schema.outcome_set_label(atom.outcomes));
    }
    let back: StateVector = table.extract_state(&coords)?;
    println!("round-trip error {:.1e}", opstate::linalg::max_abs_diff(&back, &z));

    // a conjunction larger than one of its singles cannot come from any table
    let mut bad = z.clone();
    let pos = coords.free()[0];
    bad.0[pos] = 0.9;
    match empirical::reconstruct_frequencies(&schema, &coords, &bad, &freqs, 20) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly reconstructed"),
    }
    Ok(())
}
