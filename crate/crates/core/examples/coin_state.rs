//! A coin tossed ten times, its state vector, and a check that the state
//! does not depend on which context a measurement was performed in.

use opstate::empirical::{self, RunRecord};
use opstate::fixtures;
use opstate::schema::{MeasurementSet, OutcomeId};

fn main() -> opstate::Result<()> {
    let coin = fixtures::coin();
    let coords = coin.coordinates()?;
    let toss = MeasurementSet::singleton(0);
    let mut runs: Vec<RunRecord> = (0..10)
        .map(|k| RunRecord {
            performed: toss,
            outcomes: vec![OutcomeId { measurement: 0, outcome: usize::from(k >= 8) }],
        })
        .collect();
    // runs where the coin is not tossed change nothing
    runs.extend((0..5).map(|_| RunRecord { performed: MeasurementSet::EMPTY, outcomes: vec![] }));

    let table = empirical::tally(&coin, &runs)?;
    let report = table.validate();
    println!("E1 {}  E2 {}", report.axiom_passed("E1"), report.axiom_passed("E2"));
    let z = table.extract_state(&coords)?;
    for (label, v) in coords.labels(&coin).iter().zip(z.iter()) {
        println!("{label:<18} {v}");
    }

    let (alone, joint) = fixtures::contextual_pair();
    let schema = alone.schema().clone();
    let two = schema.coordinates()?;
    let e3 = empirical::check_e3(&[alone, joint], &two, None)?;
    let worst = e3.worst_coordinate.map(|c| two.labels(&schema)[c].clone());
    println!("contextual pair: passed = {}, max deviation {:.2} at {:?}", e3.passed, e3.max_deviation, worst);
    Ok(())
}
