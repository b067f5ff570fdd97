//! Reading and writing the file formats: run logs, analytic models and
//! the CSV exports.
//!
//! Run log (CSV, header required):
//!
//! ```text
//! run_id,performed,outcomes
//! 1,toss,toss=H
//! 2,,
//! 3,A1;B2,A1=0;B2=1
//! ```
//!
//! Analytic model (JSON): atom descriptor `"<performed>|<outcomes>"` to
//! weight, lists comma separated, e.g. `{"A1,B1|A1=0,B1=0": 0.125}`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::empirical::{Atom, FrequencyTable, RunRecord};
use crate::error::{Error, Result};
use crate::schema::{MeasurementSchema, MeasurementSet, OutcomeId, OutcomeSet};
use crate::statespace::{Polytope, RowKind, VertexSet};

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn split_list(s: &str, sep: char) -> impl Iterator<Item = &str> {
    s.split(sep).map(str::trim).filter(|x| !x.is_empty())
}

fn parse_performed(schema: &MeasurementSchema, s: &str, sep: char) -> std::result::Result<MeasurementSet, String> {
    let mut set = MeasurementSet::EMPTY;
    for name in split_list(s, sep) {
        let r = schema
            .measurement_index(name)
            .ok_or_else(|| format!("unknown measurement `{name}`"))?;
        set.insert(r);
    }
    Ok(set)
}

fn parse_outcomes(schema: &MeasurementSchema, s: &str, sep: char) -> std::result::Result<Vec<OutcomeId>, String> {
    split_list(s, sep)
        .map(|pair| {
            let (m, o) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected `measurement=outcome`, got `{pair}`"))?;
            schema.resolve_outcome(m.trim(), o.trim()).map_err(|e| e.to_string())
        })
        .collect()
}

/// Explains a run-level error in terms of the outcome axioms.
fn describe(e: &Error) -> String {
    match e {
        Error::MissingOutcome(_) | Error::ConflictingOutcomes(_) | Error::OutcomeWithoutMeasurement(_) => {
            format!("E2 violated: {e}")
        }
        other => other.to_string(),
    }
}

pub fn parse_run_log<R: Read>(schema: &MeasurementSchema, reader: R, source: &Path) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(performed_col), Some(outcomes_col)) = (col("performed"), col("outcomes")) else {
        return Err(Error::parse(source, 1, "header must contain `performed` and `outcomes` columns"));
    };
    let mut runs = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let performed = parse_performed(schema, field(performed_col), ';').map_err(|m| Error::parse(source, line, m))?;
        let outcomes = parse_outcomes(schema, field(outcomes_col), ';').map_err(|m| Error::parse(source, line, m))?;
        schema
            .atom_of_run(performed, &outcomes)
            .map_err(|e| Error::parse(source, line, describe(&e)))?;
        runs.push(RunRecord { performed, outcomes });
    }
    if runs.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(runs)
}

pub fn read_run_log(schema: &MeasurementSchema, path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    parse_run_log(schema, open(path)?, path)
}

pub fn write_run_log<W: Write>(schema: &MeasurementSchema, runs: &[RunRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["run_id", "performed", "outcomes"])?;
    for (k, run) in runs.iter().enumerate() {
        let performed = schema.measurement_names(run.performed).join(";");
        let outcomes = run
            .outcomes
            .iter()
            .map(|id| schema.outcome_label(*id))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([(k + 1).to_string(), performed, outcomes])?;
    }
    w.flush().map_err(|e| Error::io("<run log>", e))?;
    Ok(())
}

pub fn atom_descriptor(schema: &MeasurementSchema, atom: Atom) -> String {
    let outcomes = atom
        .outcomes
        .iter()
        .map(|b| schema.outcome_label(schema.outcome_at(b)))
        .collect::<Vec<_>>()
        .join(",");
    format!("{}|{}", schema.measurement_names(atom.performed).join(","), outcomes)
}

pub fn parse_atom_descriptor(schema: &MeasurementSchema, s: &str) -> std::result::Result<Atom, String> {
    let (performed, outcomes) = s
        .split_once('|')
        .ok_or_else(|| format!("atom `{s}` must have the form `performed|outcomes`"))?;
    let performed = parse_performed(schema, performed, ',')?;
    let mut eps = OutcomeSet::EMPTY;
    for id in parse_outcomes(schema, outcomes, ',')? {
        eps.insert(schema.bit(id));
    }
    Ok(Atom { performed, outcomes: eps })
}

pub fn parse_model(schema: &MeasurementSchema, json: &str, source: &Path) -> Result<FrequencyTable> {
    let raw: BTreeMap<String, f64> =
        serde_json::from_str(json).map_err(|e| Error::parse(source, e.line(), e.to_string()))?;
    let atoms = raw
        .into_iter()
        .map(|(k, w)| {
            parse_atom_descriptor(schema, &k)
                .map(|a| (a, w))
                .map_err(|m| Error::parse(source, 0, m))
        })
        .collect::<Result<Vec<_>>>()?;
    FrequencyTable::analytic(schema, atoms)
}

pub fn read_model(schema: &MeasurementSchema, path: impl AsRef<Path>) -> Result<FrequencyTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(schema, &text, path)
}

pub fn model_json(table: &FrequencyTable) -> Result<String> {
    let map: BTreeMap<String, f64> = table
        .weights()
        .iter()
        .map(|(a, w)| (atom_descriptor(table.schema(), *a), *w))
        .collect();
    Ok(serde_json::to_string_pretty(&map)?)
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// One row per constraint: `id,class,kind,offset` then the dense normal.
pub fn polytope_csv(polytope: &Polytope, labels: &[String]) -> Result<String> {
    let mut rows = vec![["id", "class", "kind", "offset"]
        .iter()
        .map(|s| s.to_string())
        .chain(labels.iter().cloned())
        .collect::<Vec<_>>()];
    for (k, row) in polytope.rows.iter().enumerate() {
        let mut r = vec![
            k.to_string(),
            serde_json::to_value(row.class)?.as_str().unwrap_or_default().to_string(),
            match row.kind {
                RowKind::Inequality => "le".into(),
                RowKind::Equality => "eq".into(),
            },
            fmt(row.offset),
        ];
        r.extend(row.dense_normal(polytope.dim).into_iter().map(fmt));
        rows.push(r);
    }
    csv_string(rows)
}

pub fn vertices_csv(schema: &MeasurementSchema, vertices: &VertexSet, labels: &[String]) -> Result<String> {
    let mut rows = vec![["id", "assignment"]
        .iter()
        .map(|s| s.to_string())
        .chain(labels.iter().cloned())
        .collect::<Vec<_>>()];
    for (k, (a, w)) in vertices.assignments.iter().zip(&vertices.points).enumerate() {
        let mut r = vec![k.to_string(), schema.assignment_label(a)];
        r.extend(w.iter().map(|x| fmt(*x)));
        rows.push(r);
    }
    csv_string(rows)
}

/// `assignment,weight` per vertex.
pub fn lambda_csv(schema: &MeasurementSchema, vertices: &VertexSet, weights: &[f64]) -> Result<String> {
    let mut rows = vec![vec!["assignment".to_string(), "weight".to_string()]];
    for (a, w) in vertices.assignments.iter().zip(weights) {
        rows.push(vec![schema.assignment_label(a), fmt(*w)]);
    }
    csv_string(rows)
}

/// Time, state and optional weights of one trajectory sample.
pub type TrajectoryRow = (f64, Vec<f64>, Option<Vec<f64>>);

/// `t`, the state coordinates, then one weight column per vertex (empty
/// when the sample has no decomposition).
pub fn trajectory_csv(
    coord_labels: &[String],
    vertex_labels: &[String],
    samples: &[TrajectoryRow],
) -> Result<String> {
    let mut header = vec!["t".to_string()];
    header.extend(coord_labels.iter().cloned());
    header.extend(vertex_labels.iter().map(|l| format!("lambda[{l}]")));
    let mut rows = vec![header];
    for (t, z, lambda) in samples {
        let mut r = vec![fmt(*t)];
        r.extend(z.iter().map(|x| fmt(*x)));
        match lambda {
            Some(l) => r.extend(l.iter().map(|x| fmt(*x))),
            None => r.extend(vertex_labels.iter().map(|_| String::new())),
        }
        rows.push(r);
    }
    csv_string(rows)
}

/// Dense matrix, one row per line, no header.
pub fn matrix_csv(m: &[Vec<f64>]) -> Result<String> {
    csv_string(m.iter().map(|r| r.iter().map(|x| fmt(*x)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn run_log_round_trip() {
        let s = fixtures::chsh();
        let text = "run_id,performed,outcomes\n1,A1;B2,A1=0;B2=1\n2,,\n3,A2,A2=1\n";
        let runs = parse_run_log(&s, text.as_bytes(), Path::new("log.csv")).unwrap();
        assert_eq!(runs.len(), 3);
        assert!(runs[1].performed.is_empty());
        let mut out = Vec::new();
        write_run_log(&s, &runs, &mut out).unwrap();
        let again = parse_run_log(&s, out.as_slice(), Path::new("x")).unwrap();
        assert_eq!(runs, again);
    }

    #[test]
    fn run_log_errors_name_line_and_rule() {
        let s = fixtures::coin();
        let err = parse_run_log(&s, "run_id,performed,outcomes\n1,toss,toss=H\n2,toss,\n".as_bytes(), Path::new("c.csv"))
            .unwrap_err()
            .to_string();
        assert!(err.starts_with("c.csv:3:"), "{err}");
        assert!(err.contains("E2"), "{err}");
        let err = parse_run_log(&s, "run_id,performed,outcomes\n1,toss,toss=X\n".as_bytes(), Path::new("c.csv"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown outcome"), "{err}");
        assert!(matches!(
            parse_run_log(&s, "run_id,performed,outcomes\n".as_bytes(), Path::new("c.csv")),
            Err(Error::EmptyLog)
        ));
    }

    #[test]
    fn model_round_trip() {
        let s = fixtures::chsh();
        let table = fixtures::pr_box_table(&s);
        let json = model_json(&table).unwrap();
        assert!(json.contains("\"A1,B1|A1=0,B1=0\": 0.125"));
        let back = parse_model(&s, &json, Path::new("m.json")).unwrap();
        assert_eq!(back.weights(), table.weights());
    }

    #[test]
    fn bad_model_weights() {
        let s = fixtures::coin();
        assert!(parse_model(&s, r#"{"toss|toss=H": 0.5}"#, Path::new("m")).is_err());
        assert!(parse_model(&s, r#"{"toss|toss=Q": 1.0}"#, Path::new("m")).is_err());
    }
}
