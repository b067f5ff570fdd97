//! The PR box: inside the state polytope, no-signaling, but not a mixture
//! of truth assignments. The certificate is the CHSH inequality.

use opstate::fixtures;
use opstate::ontology::{self, Membership};
use opstate::statespace::StateSpace;

fn main() -> opstate::Result<()> {
    let sp = StateSpace::new(fixtures::chsh())?;
    let labels = sp.labels();
    let pr = fixtures::pr_box_state(&sp.schema, &sp.coords);

    let report = ontology::classify(&sp, &pr)?;
    println!("case {:?}; no-signaling checks {}", report.case, report.no_signaling.checks);
    if let Membership::NonClassical { certificate } = &report.classical_membership {
        println!("certificate: value {} against classical bound {}", certificate.value, certificate.bound);
        for (l, c) in labels.iter().zip(&certificate.normal) {
            if *c != 0.0 {
                println!("  {c:+} {l}");
            }
        }
    }

    let correlated = fixtures::chsh_correlated_state(&sp.schema, &sp.coords);
    if let Membership::Classical { witness, .. } = ontology::classical_membership(&sp, &correlated, 16)? {
        println!("perfectly correlated state is classical:");
        for (assignment, p) in witness {
            println!("  {p:.3} {assignment}");
        }
    }

    let two = StateSpace::new(fixtures::two_by_two())?;
    let mm = fixtures::marginal_mismatch_state(&two.schema, &two.coords);
    let r = ontology::classify(&two, &mm)?;
    println!("marginal mismatch: case {:?}", r.case);
    for v in &r.no_signaling.violations {
        println!("  {} vs context {:?}: residual {:+.2}", v.coordinate, v.context, v.residual);
    }
    Ok(())
}
