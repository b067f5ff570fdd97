//! The `opstate` command line.
//!
//! Every command prints a short summary to stdout. With `--out DIR` it also
//! writes a JSON report (tool version, config hash, tolerances, result)
//! and any CSV exports into `DIR`. Exit status: 0 success, 1 a validation
//! or verification check failed, 2 bad usage or unreadable input.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::decompose::{self, Decomposition};
use crate::dynamics::{self, AuditSpec, Flow, GroupFlow};
use crate::empirical::{self, FrequencyTable, RunRecord, StateVector};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::formats;
use crate::ontology::{self, Membership};
use crate::quantum;
use crate::schema::{MeasurementSchema, MeasurementSet, OutcomeId};
use crate::statespace::{StateSpace, DEFAULT_VERTEX_CAP, MEMBERSHIP_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "opstate", version, about = "Operational probability models: states, polytopes, ontology, dynamics, Hilbert-space representation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a run log or model against the outcome axioms and compare states across logs.
    Validate(Inputs),
    /// Extract the state vector.
    State(Inputs),
    /// Rebuild the frequency table from the state and measurement frequencies.
    Reconstruct(Inputs),
    /// Constraints, deterministic vertices, membership and vertex test.
    Polytope(Inputs),
    /// Decomposition over deterministic vertices and the max-entropy section.
    Decompose(Inputs),
    /// No-signaling and classical-membership classification.
    Ontology(Inputs),
    /// Run a flow, audit the group law and lift the trajectory.
    Simulate(SimulateArgs),
    /// Build and verify the Hilbert-space representation.
    Qrep(QrepArgs),
    /// Coin, dynamics table and PR-box walkthrough.
    Demo(DemoArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Inputs {
    /// Schema JSON.
    #[arg(long)]
    pub schema: PathBuf,
    /// Run log CSV; repeat to compare several logs.
    #[arg(long)]
    pub log: Vec<PathBuf>,
    /// Analytic model JSON.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// State vector given directly, comma separated in coordinate order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub state: Option<Vec<f64>>,
    /// Directory for reports and exports.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for the cross-log state comparison.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Cap on vertices, outcomes or measurements, depending on the command.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// One of coin, oscillator, oscillator-z, identity.
    #[arg(long, default_value = "coin")]
    pub flow: String,
    /// Time grid, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2", allow_hyphen_values = true)]
    pub grid: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct QrepArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Also export dense projector and observable matrices as CSV.
    #[arg(long)]
    pub dense: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DemoArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match run(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

struct Outcome {
    passed: bool,
    result: Value,
    tolerances: BTreeMap<&'static str, f64>,
    files: Vec<(String, String)>,
}

impl Outcome {
    fn new(passed: bool, result: Value) -> Self {
        Self {
            passed,
            result,
            tolerances: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    fn tol(mut self, name: &'static str, value: f64) -> Self {
        self.tolerances.insert(name, value);
        self
    }

    fn file(mut self, name: &str, body: String) -> Self {
        self.files.push((name.to_string(), body));
        self
    }
}

pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<i32> {
    let (name, out, seed, hash_inputs): (&str, Option<&Path>, u64, Vec<PathBuf>) = match command {
        Command::Validate(i) => ("validate", i.out.as_deref(), i.seed, input_paths(i)),
        Command::State(i) => ("state", i.out.as_deref(), i.seed, input_paths(i)),
        Command::Reconstruct(i) => ("reconstruct", i.out.as_deref(), i.seed, input_paths(i)),
        Command::Polytope(i) => ("polytope", i.out.as_deref(), i.seed, input_paths(i)),
        Command::Decompose(i) => ("decompose", i.out.as_deref(), i.seed, input_paths(i)),
        Command::Ontology(i) => ("ontology", i.out.as_deref(), i.seed, input_paths(i)),
        Command::Simulate(a) => ("simulate", a.inputs.out.as_deref(), a.inputs.seed, input_paths(&a.inputs)),
        Command::Qrep(a) => ("qrep", a.inputs.out.as_deref(), a.inputs.seed, input_paths(&a.inputs)),
        Command::Demo(a) => ("demo", a.out.as_deref(), 0, Vec::new()),
    };
    let mut summary = String::new();
    let outcome = match command {
        Command::Validate(i) => validate(i, &mut summary)?,
        Command::State(i) => state(i, &mut summary)?,
        Command::Reconstruct(i) => reconstruct(i, &mut summary)?,
        Command::Polytope(i) => polytope(i, &mut summary)?,
        Command::Decompose(i) => decompose_cmd(i, &mut summary)?,
        Command::Ontology(i) => ontology_cmd(i, &mut summary)?,
        Command::Simulate(a) => simulate(a, &mut summary)?,
        Command::Qrep(a) => qrep(a, &mut summary)?,
        Command::Demo(_) => demo(&mut summary)?,
    };
    stdout.write_all(summary.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;

    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let report = json!({
            "tool": "opstate",
            "version": env!("CARGO_PKG_VERSION"),
            "command": name,
            "config_hash": config_hash(command, &hash_inputs)?,
            "seed": seed,
            "tolerances": outcome.tolerances,
            "passed": outcome.passed,
            "result": outcome.result,
        });
        write_file(&dir.join(format!("{name}.json")), &serde_json::to_string_pretty(&report)?)?;
        for (file, body) in &outcome.files {
            write_file(&dir.join(file), body)?;
        }
    }
    Ok(if outcome.passed { EXIT_OK } else { EXIT_FAILED })
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn input_paths(i: &Inputs) -> Vec<PathBuf> {
    std::iter::once(i.schema.clone())
        .chain(i.log.iter().cloned())
        .chain(i.model.iter().cloned())
        .collect()
}

/// SHA-256 over the parsed arguments (minus the output directory) and the
/// bytes of every input file.
fn config_hash(command: &Command, inputs: &[PathBuf]) -> Result<String> {
    let mut h = Sha256::new();
    let args = match command {
        Command::Validate(i)
        | Command::State(i)
        | Command::Reconstruct(i)
        | Command::Polytope(i)
        | Command::Decompose(i)
        | Command::Ontology(i) => inputs_json(i),
        Command::Simulate(a) => json!({"inputs": inputs_json(&a.inputs), "flow": a.flow, "grid": a.grid}),
        Command::Qrep(a) => json!({"inputs": inputs_json(&a.inputs), "dense": a.dense}),
        Command::Demo(_) => json!({}),
    };
    h.update(format!("{command:?}").split('(').next().unwrap_or_default().as_bytes());
    h.update(args.to_string().as_bytes());
    for p in inputs {
        h.update(std::fs::read(p).map_err(|e| Error::io(p, e))?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn inputs_json(i: &Inputs) -> Value {
    json!({"state": i.state, "seed": i.seed, "tol": i.tol, "cap": i.cap})
}

fn load_space(i: &Inputs) -> Result<StateSpace> {
    let schema = MeasurementSchema::from_path(&i.schema)?;
    StateSpace::with_vertex_cap(schema, i.cap.unwrap_or(DEFAULT_VERTEX_CAP))
}

fn load_tables(schema: &MeasurementSchema, i: &Inputs) -> Result<Vec<FrequencyTable>> {
    let mut tables = Vec::new();
    for path in &i.log {
        let runs = formats::read_run_log(schema, path)?;
        tables.push(empirical::tally(schema, &runs)?);
    }
    if let Some(m) = &i.model {
        tables.push(formats::read_model(schema, m)?);
    }
    Ok(tables)
}

/// The state from `--state`, else from the first log or model.
fn load_state(space: &StateSpace, i: &Inputs) -> Result<StateVector> {
    if let Some(z) = &i.state {
        if z.len() != space.dim() {
            return Err(Error::Usage(format!(
                "--state has {} values but the schema has {} coordinates",
                z.len(),
                space.dim()
            )));
        }
        return Ok(StateVector(z.clone()));
    }
    let tables = load_tables(&space.schema, i)?;
    let first = tables
        .first()
        .ok_or_else(|| Error::Usage("one of --state, --log or --model is required".into()))?;
    first.extract_state(&space.coords)
}

fn labeled(labels: &[String], values: &[f64]) -> Value {
    Value::Object(labels.iter().cloned().zip(values.iter().map(|v| json!(v))).collect())
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

macro_rules! say {
    ($s:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        let _ = writeln!($s, $($arg)*);
    }};
}

fn validate(i: &Inputs, s: &mut String) -> Result<Outcome> {
    let space = load_space(i)?;
    let tables = load_tables(&space.schema, i)?;
    if tables.is_empty() {
        return Err(Error::Usage("validate needs --log or --model".into()));
    }
    let mut passed = true;
    let mut reports = Vec::new();
    for (k, t) in tables.iter().enumerate() {
        let r = t.validate();
        say!(s, "table {k}: E1 {}  E2 {}", verdict(r.axiom_passed("E1")), verdict(r.axiom_passed("E2")));
        for f in r.failures() {
            say!(s, "  {} {}: {}", f.axiom, f.condition, f.offenders.join("; "));
        }
        passed &= r.passed();
        reports.push(r);
    }
    let mut e3 = Value::Null;
    let mut tol = empirical::STATE_TOL;
    if tables.len() >= 2 && reports.iter().all(|r| r.passed()) {
        let r = empirical::check_e3(&tables, &space.coords, i.tol)?;
        tol = r.tolerance;
        let worst = r.worst_coordinate.map(|c| space.labels()[c].clone());
        say!(
            s,
            "E3 {}: max deviation {:.6} (tolerance {:.6}){}",
            verdict(r.passed),
            r.max_deviation,
            r.tolerance,
            worst.map(|w| format!(" at {w}")).unwrap_or_default()
        );
        passed &= r.passed;
        e3 = serde_json::to_value(&r)?;
    }
    Ok(Outcome::new(passed, json!({"tables": reports, "e3": e3})).tol("e3", tol))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn state(i: &Inputs, s: &mut String) -> Result<Outcome> {
    let space = load_space(i)?;
    let z = load_state(&space, i)?;
    let labels = space.labels();
    for (l, v) in labels.iter().zip(z.iter()) {
        say!(s, "{l:<24} {v:.6}");
    }
    let violations = z.invariant_violations(&space.schema, &space.coords)?;
    for v in &violations {
        say!(s, "invariant violated: {v}");
    }
    let result = json!({"labels": labels, "state": z, "coordinates": labeled(&labels, &z), "violations": violations});
    Ok(Outcome::new(violations.is_empty(), result).tol("state", empirical::STATE_TOL))
}

fn reconstruct(i: &Inputs, s: &mut String) -> Result<Outcome> {
    let space = load_space(i)?;
    let tables = load_tables(&space.schema, i)?;
    let table = tables
        .first()
        .ok_or_else(|| Error::Usage("reconstruct needs --log or --model".into()))?;
    let z = table.extract_state(&space.coords)?;
    let freqs = table.measurement_frequencies();
    let cap = i.cap.unwrap_or(empirical::DEFAULT_RECONSTRUCT_CAP);
    let rebuilt = empirical::reconstruct_frequencies(&space.schema, &space.coords, &z, &freqs, cap)?;
    let back = rebuilt.extract_state(&space.coords)?;
    let err = crate::linalg::max_abs_diff(&back, &z);
    let passed = err <= empirical::STATE_TOL;
    say!(s, "reconstructed {} atoms; state round-trip error {err:.3e} ({})", rebuilt.weights().len(), verdict(passed));
    let model = formats::model_json(&rebuilt)?;
    Ok(Outcome::new(passed, json!({"atoms": serde_json::from_str::<Value>(&model)?, "round_trip_error": err}))
        .tol("round_trip", empirical::STATE_TOL)
        .tol("negative_mass", empirical::NEGATIVE_MASS_TOL)
        .file("model.json", model))
}

fn polytope(i: &Inputs, s: &mut String) -> Result<Outcome> {
    let space = load_space(i)?;
    let labels = space.labels();
    let p = &space.polytope;
    let affine = p.affine_dimension()?;
    say!(
        s,
        "ambient dimension {}, affine dimension {affine}, {} constraints, {} deterministic vertices",
        space.dim(),
        p.rows.len(),
        space.vertices.len()
    );
    let mut result = json!({
        "ambient_dimension": space.dim(),
        "affine_dimension": affine,
        "constraints": p.rows.len(),
        "vertices": space.vertices.labels(&space.schema),
    });
    let mut passed = true;
    if i.state.is_some() || !i.log.is_empty() || i.model.is_some() {
        let z = load_state(&space, i)?;
        let m = p.contains(&z)?;
        let v = p.is_vertex(&z)?;
        say!(s, "state inside: {}; vertex: {} (active rank {} of {})", m.inside, v.is_vertex, v.rank, v.dim);
        for viol in &m.violations {
            say!(s, "  violated {} by {:.3e}", viol.label, viol.residual);
        }
        passed = m.inside;
        result["membership"] = serde_json::to_value(&m)?;
        result["vertex"] = serde_json::to_value(&v)?;
    }
    Ok(Outcome::new(passed, result)
        .tol("membership", MEMBERSHIP_TOL)
        .tol("rank", crate::linalg::RANK_TOL)
        .file("polytope.csv", formats::polytope_csv(p, &labels)?)
        .file("vertices.csv", formats::vertices_csv(&space.schema, &space.vertices, &labels)?))
}

fn decompose_cmd(i: &Inputs, s: &mut String) -> Result<Outcome> {
    let space = load_space(i)?;
    let z = load_state(&space, i)?;
    let d = decompose::decompose_feasible(&space.vertices, &z)?;
    let mut out = Outcome::new(true, json!({}))
        .tol("feasibility", decompose::FEASIBILITY_TOL)
        .tol("support", decompose::SUPPORT_TOL)
        .tol("newton_gradient", decompose::NEWTON_GRAD_TOL);
    match &d {
        Decomposition::Feasible { .. } => {
            let sigma = decompose::max_entropy_section(&space.vertices, &z)?;
            let dim = decompose::preimage_dimension(&space.vertices, &z)?;
            say!(s, "feasible; preimage dimension {}", dim.unwrap_or(0));
            say!(s, "max-entropy weights (entropy {:.6}):", sigma.entropy);
            for (l, w) in space.vertices.labels(&space.schema).iter().zip(sigma.weights.weights()) {
                if *w > 0.0 {
                    say!(s, "  {l:<32} {w:.6}");
                }
            }
            out = out.file("lambda.csv", formats::lambda_csv(&space.schema, &space.vertices, sigma.weights.weights())?);
            out.result = json!({"decomposition": d, "preimage_dimension": dim, "max_entropy": sigma});
        }
        Decomposition::Infeasible { certificate } => {
            say!(
                s,
                "infeasible: separating functional takes {:.6} on the state, at most {:.6} on every vertex",
                certificate.value,
                certificate.bound
            );
            out.result = json!({"decomposition": d});
        }
    }
    Ok(out)
}

fn ontology_cmd(i: &Inputs, s: &mut String) -> Result<Outcome> {
    let space = load_space(i)?;
    let z = load_state(&space, i)?;
    let cap = i.cap.unwrap_or(ontology::DEFAULT_MEMBERSHIP_CAP);
    let r = ontology::classify_with_cap(&space, &z, cap)?;
    say!(s, "case: {:?}", r.case);
    say!(s, "no-signaling: {} ({} checks, max residual {:.3e})", verdict(r.no_signaling.passed), r.no_signaling.checks, r.no_signaling.max_residual);
    match &r.classical_membership {
        Membership::Classical { witness, .. } => {
            say!(s, "classical: yes, witness over {} assignments", witness.len());
        }
        Membership::NonClassical { certificate } => {
            say!(s, "classical: no, certificate value {:.6} > bound {:.6}", certificate.value, certificate.bound);
        }
    }
    Ok(Outcome::new(true, serde_json::to_value(&r)?)
        .tol("no_signaling", ontology::NO_SIGNALING_TOL)
        .tol("feasibility", decompose::FEASIBILITY_TOL))
}

fn simulate(a: &SimulateArgs, s: &mut String) -> Result<Outcome> {
    let space = load_space(&a.inputs)?;
    let z0 = load_state(&space, &a.inputs)?;
    let flow = dynamics::flow_by_name(&a.flow, space.dim())?;
    let lifted = dynamics::lift_trajectory(&flow, &space.vertices, &z0, &a.grid)?;
    for l in &lifted {
        say!(s, "t = {:<8} Z = {}", l.t, fmt_vec(&l.z));
    }
    let mut result = json!({"flow": flow.name(), "trajectory": lifted});
    let mut passed = true;
    if let Flow::Group(f) = &flow {
        let spec = AuditSpec {
            grid: a.grid.clone(),
            seed: a.inputs.seed,
            ..AuditSpec::default()
        };
        let audit = dynamics::check_group_law(f.as_ref(), &spec)?;
        say!(
            s,
            "group law {}: composition {:.3e}, inverse {:.3e} over {} samples",
            verdict(audit.passed),
            audit.max_composition_residual,
            audit.max_inverse_residual,
            audit.samples
        );
        passed = audit.passed;
        result["group_law"] = serde_json::to_value(&audit)?;
    } else {
        say!(s, "trajectory flow: group law not applicable");
    }
    let samples: Vec<_> = lifted.iter().map(|l| (l.t, l.z.clone(), l.lambda.clone())).collect();
    let csv = formats::trajectory_csv(&space.labels(), &space.vertices.labels(&space.schema), &samples)?;
    Ok(Outcome::new(passed, result)
        .tol("group_law", dynamics::GROUP_LAW_TOL)
        .tol("feasibility", decompose::FEASIBILITY_TOL)
        .file("trajectory.csv", csv))
}

fn qrep(a: &QrepArgs, s: &mut String) -> Result<Outcome> {
    let space = load_space(&a.inputs)?;
    let opts = quantum::RepOptions {
        dimension_cap: a.inputs.cap.unwrap_or(quantum::DEFAULT_DIMENSION_CAP),
        ..quantum::RepOptions::default()
    };
    let rep = quantum::build_representation_with(&space.schema, &space.vertices, &opts)?;
    let cert = quantum::verify_representation(&rep, 100, a.inputs.seed)?;
    say!(
        s,
        "dimension {} ({} blocks of {}); partition {}, covering {}, max trace deviation {:.3e}",
        rep.dimension(),
        rep.num_blocks(),
        rep.block_size(),
        verdict(cert.disjoint),
        verdict(cert.covering),
        cert.max_deviation
    );
    let manifest = rep.manifest();
    let mut result = json!({"certificate": cert, "manifest": manifest});
    let mut out = Outcome::new(cert.passed, Value::Null)
        .tol("exactness", quantum::EXACTNESS_TOL)
        .file("qrep_manifest.json", serde_json::to_string_pretty(&manifest)?);
    let a_in = &a.inputs;
    if a_in.state.is_some() || !a_in.log.is_empty() || a_in.model.is_some() {
        let z = load_state(&space, a_in)?;
        match decompose::max_entropy_section(&space.vertices, &z) {
            Ok(sigma) => {
                let psi = rep.state_vector(&sigma.weights)?;
                let traces = rep.trace_state(&psi)?;
                let dev = crate::linalg::max_abs_diff(&traces, &z);
                say!(s, "state vector with {} nonzero amplitudes; traces match the state to {dev:.3e}", psi.support_size());
                result["psi"] = serde_json::to_value(&psi)?;
                result["trace_deviation"] = json!(dev);
            }
            Err(Error::Infeasible) => {
                say!(s, "state has no decomposition; no state vector");
            }
            Err(e) => return Err(e),
        }
    }
    if a.dense {
        for r in 0..space.schema.num_measurements() {
            let m = space.schema.measurement(r);
            for (k, o) in m.outcomes.iter().enumerate() {
                out = out.file(&format!("E_{}={}.csv", m.name, o), formats::matrix_csv(&rep.dense_projector(r, k))?);
            }
            if let Ok(obs) = rep.observable(r) {
                out = out.file(&format!("A_{}.csv", m.name), formats::matrix_csv(&obs.dense(rep.dimension()))?);
            }
        }
    }
    out.result = result;
    Ok(out)
}

fn demo(s: &mut String) -> Result<Outcome> {
    // coin tossed ten times: eight heads, two tails
    let coin = StateSpace::new(fixtures::coin())?;
    let toss = MeasurementSet::singleton(0);
    let runs: Vec<RunRecord> = (0..10)
        .map(|k| RunRecord {
            performed: toss,
            outcomes: vec![OutcomeId { measurement: 0, outcome: usize::from(k >= 8) }],
        })
        .collect();
    let z = empirical::tally(&coin.schema, &runs)?.extract_state(&coin.coords)?;
    say!(s, "coin state from 8 heads / 2 tails: {}", fmt_vec(&z));
    say!(
        s,
        "coin polytope: ambient dimension {}, affine dimension {}, vertices {:?}",
        coin.dim(),
        coin.polytope.affine_dimension()?,
        coin.vertices.points
    );

    say!(s, "\ncoin flow at t = 2");
    let f = dynamics::CoinFlow;
    let mut table = Vec::new();
    for h in [0.7, 0.3, 0.5] {
        let img = f.evolve(2.0, &[h, 1.0 - h, 0.0])?;
        say!(s, "  F_2{} = {}", fmt_vec(&[h, 1.0 - h, 0.0]), fmt_vec(&img));
        table.push(json!({"start": [h, 1.0 - h, 0.0], "image": img}));
    }
    let conv = dynamics::check_convexity_preservation(&f, 2.0, &[0.7, 0.3, 0.0], &[0.3, 0.7, 0.0], 0.5)?;
    say!(s, "  mixture of images   = {}", fmt_vec(&conv.mixture_of_images));
    say!(s, "  image of mixture    = {}", fmt_vec(&conv.image_of_mixture));
    say!(s, "  convexity residual  = {:.4}", conv.residual);

    say!(s, "\nPR box on the CHSH schema");
    let chsh = StateSpace::new(fixtures::chsh())?;
    let pr = fixtures::pr_box_state(&chsh.schema, &chsh.coords);
    let inside = chsh.polytope.contains(&pr)?.inside;
    let report = ontology::classify(&chsh, &pr)?;
    let feasible = decompose::decompose_feasible(&chsh.vertices, &pr)?.is_feasible();
    say!(s, "  inside state polytope: {inside}");
    say!(s, "  no-signaling: {}", verdict(report.no_signaling.passed));
    if let Membership::NonClassical { certificate } = &report.classical_membership {
        say!(s, "  classical: no (certificate {:.1} > {:.1})", certificate.value, certificate.bound);
    }
    say!(s, "  decomposable over truth assignments: {feasible}");
    say!(s, "  case: {:?}", report.case);

    Ok(Outcome::new(
        true,
        json!({
            "coin_state": z,
            "coin_flow": table,
            "convexity": conv,
            "pr_box": {"inside": inside, "decomposable": feasible, "ontology": report},
        }),
    )
    .tol("membership", MEMBERSHIP_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_from(std::iter::once("opstate").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn demo_prints_dynamics_table() {
        let (code, out, _) = run_args(&["demo"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("case: Case2"), "{out}");
        assert!(out.contains("(0.800000, 0.200000, 0.000000)"), "{out}");
    }

    #[test]
    fn unknown_command_is_usage_error() {
        let (code, _, err) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }
}
