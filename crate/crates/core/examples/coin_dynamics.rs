//! The logistic coin flow, its group-law audit, the failure to preserve
//! mixtures, and an oscillator whose state does not fix its future.

use opstate::dynamics::{self, AuditSpec, CoinFlow, GroupFlow, Oscillator, OscillatorOnState};

fn main() -> opstate::Result<()> {
    for h in [0.7, 0.3, 0.5] {
        let z = CoinFlow.evolve(2.0, &[h, 1.0 - h, 0.0])?;
        println!("F_2({h:.1}, {:.1}, 0) = ({:.4}, {:.4}, 0)", 1.0 - h, z[0], z[1]);
    }
    let c = dynamics::check_convexity_preservation(&CoinFlow, 2.0, &[0.7, 0.3, 0.0], &[0.3, 0.7, 0.0], 0.5)?;
    println!(
        "mixture of images {:.4}, image of mixture {:.4}",
        c.mixture_of_images[0], c.image_of_mixture[0]
    );

    let spec = AuditSpec { seed: 1, ..AuditSpec::default() };
    let coin = dynamics::check_group_law(&CoinFlow, &spec)?;
    println!("coin group law: {} (max residual {:.1e})", coin.passed, coin.max_composition_residual.max(coin.max_inverse_residual));
    let fake = dynamics::check_group_law(&OscillatorOnState, &spec)?;
    println!("Z-only oscillator group law: {}", fake.passed);

    let w = dynamics::state_ambiguity(&Oscillator, &[0.5, 1.0], &[0.5, -1.0], 0.1)?;
    println!("same Z {:?}, futures {:?} and {:?}", w.z, w.futures[0], w.futures[1]);
    Ok(())
}
