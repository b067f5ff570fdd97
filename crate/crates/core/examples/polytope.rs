//! The state polytope of three schemas: constraint counts, deterministic
//! vertices, affine dimension and the vertex test.

use opstate::fixtures;
use opstate::statespace::StateSpace;

fn main() -> opstate::Result<()> {
    for (name, schema) in [("coin", fixtures::coin()), ("2x2", fixtures::two_by_two()), ("CHSH", fixtures::chsh())] {
        let sp = StateSpace::new(schema)?;
        println!(
            "{name}: dimension {}, affine dimension {}, {} rows, {} deterministic vertices",
            sp.dim(),
            sp.polytope.affine_dimension()?,
            sp.polytope.rows.len(),
            sp.vertices.len()
        );
    }

    let coin = StateSpace::new(fixtures::coin())?;
    for z in [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0]] {
        let v = coin.polytope.is_vertex(&z)?;
        println!("coin {z:?}: vertex = {} (rank {} of {})", v.is_vertex, v.rank, v.dim);
    }
    let m = coin.polytope.contains(&[0.6, 0.6, 0.0])?;
    for viol in &m.violations {
        println!("(0.6, 0.6, 0) violates {} by {:.1}", viol.label, viol.residual);
    }

    let chsh = StateSpace::new(fixtures::chsh())?;
    let pr = fixtures::pr_box_state(&chsh.schema, &chsh.coords);
    let v = chsh.polytope.is_vertex(&pr)?;
    println!("PR box: inside = {}, vertex = {}", chsh.polytope.contains(&pr)?.inside, v.is_vertex);
    Ok(())
}
