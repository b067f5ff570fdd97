//! Sample runs from the PR-box frequencies, write them as a CSV log, read
//! the log back and classify the resulting state.

use opstate::empirical;
use opstate::fixtures;
use opstate::formats;
use opstate::ontology;
use opstate::statespace::StateSpace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> opstate::Result<()> {
    let sp = StateSpace::new(fixtures::chsh())?;
    let table = fixtures::pr_box_table(&sp.schema);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let runs = table.sample_runs(4000, &mut rng);

    let path = std::env::temp_dir().join("opstate_pr_box_runs.csv");
    let file = std::fs::File::create(&path).map_err(|e| opstate::Error::Io { path: path.clone(), source: e })?;
    formats::write_run_log(&sp.schema, &runs, file)?;
    let back = formats::read_run_log(&sp.schema, &path)?;
    println!("wrote and read {} runs via {}", back.len(), path.display());

    let sampled = empirical::tally(&sp.schema, &back)?;
    println!("validation passed: {}", sampled.validate().passed());
    let z = sampled.extract_state(&sp.coords)?;
    let e3 = empirical::check_e3(&[sampled, table], &sp.coords, None)?;
    println!("sampled vs exact: max deviation {:.4} (tolerance {:.4})", e3.max_deviation, e3.tolerance);

    let report = ontology::classify(&sp, &z)?;
    // finite samples break the exact marginal identities, so expect Case1
    println!("sampled PR box: case {:?}, no-signaling max residual {:.4}", report.case, report.no_signaling.max_residual);
    Ok(())
}
