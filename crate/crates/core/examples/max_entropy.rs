//! Decomposing states into deterministic vertices and picking the
//! maximal-entropy decomposition when there are many.

use opstate::decompose::{self, Decomposition};
use opstate::fixtures;
use opstate::statespace::StateSpace;

fn main() -> opstate::Result<()> {
    // a 3-outcome and a 2-outcome measurement that are never performed together
    let sp = StateSpace::new(fixtures::schema_with_counts(&[3, 2], &[&[0, 1]]))?;
    let z = fixtures::product_state(&sp.schema, &sp.coords);
    println!("preimage dimension {:?}", decompose::preimage_dimension(&sp.vertices, &z)?);

    let s = decompose::max_entropy_section(&sp.vertices, &z)?;
    for (label, w) in sp.vertices.labels(&sp.schema).iter().zip(s.weights.weights()) {
        println!("  {label:<12} {w:.6}");
    }
    println!(
        "entropy {:.6} after {} Newton steps; feasibility {:.1e}, KKT {:.1e}",
        s.entropy, s.iterations, s.feasibility_residual, s.kkt_residual
    );

    // move toward a vertex and watch the section follow
    let target = &sp.vertices.points[0];
    let dir: Vec<f64> = target.iter().zip(z.iter()).map(|(a, b)| a - b).collect();
    let steps = decompose::halving_schedule(0.4, 5);
    for p in decompose::section_continuity_probe(&sp.vertices, &z, &dir, &steps)? {
        println!("  t = {:<8} |σ(Z+tΔ) − σ(Z)| = {:.6}", p.t, p.distance.unwrap_or(f64::NAN));
    }

    let two = StateSpace::new(fixtures::two_by_two())?;
    let mm = fixtures::marginal_mismatch_state(&two.schema, &two.coords);
    if let Decomposition::Infeasible { certificate } = decompose::decompose_feasible(&two.vertices, &mm)? {
        println!("marginal mismatch: no decomposition (gap {:.3})", certificate.gap());
    }
    Ok(())
}
