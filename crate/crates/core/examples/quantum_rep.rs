//! A Hilbert-space representation whose traces reproduce a state exactly,
//! with observables built from the outcome labels.

use opstate::decompose::SimplexWeights;
use opstate::dynamics::{CoinFlow, Flow};
use opstate::fixtures;
use opstate::quantum;
use opstate::statespace::StateSpace;

fn main() -> opstate::Result<()> {
    let coin = StateSpace::new(fixtures::coin())?;
    let rep = quantum::build_representation(&coin.schema, &coin.vertices)?;
    println!("coin: dimension {}, E_H = {:?}, E_T = {:?}", rep.dimension(), rep.projector(0, 0), rep.projector(0, 1));

    let psi = rep.state_vector(&SimplexWeights(vec![0.8, 0.2]))?;
    println!("Ψ = {:?}", psi.amplitudes);
    println!("traces {:?}", rep.trace_state(&psi)?);
    let obs = rep.observable(0)?;
    println!("spectrum {:?}, <A> = {}", obs.spectrum(), rep.expectation(&psi, &obs));
    let shifted = obs.relabel(|x| 2.0 * x + 1.0)?;
    println!("<2A+1> = {}", rep.expectation(&psi, &shifted));

    let sp = StateSpace::new(fixtures::schema_with_counts(&[2, 2, 3], &[]))?;
    let big = quantum::build_representation(&sp.schema, &sp.vertices)?;
    let cert = quantum::verify_representation(&big, 100, 0)?;
    println!("(2,2,3): dimension {}, certificate {cert:?}", big.dimension());

    let path = quantum::represent_dynamics(&rep, &Flow::Group(Box::new(CoinFlow)), &[0.5, 0.5, 0.0], &[0.0, 1.0, 2.0])?;
    for s in &path.samples {
        println!("t = {} Ψ = {:?}", s.t, s.psi.as_ref().map(|p| &p.amplitudes));
    }
    println!("group residual {:?}", path.group_residual);
    Ok(())
}
