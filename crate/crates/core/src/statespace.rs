//! The state polytope: its inequality description, membership, the
//! deterministic vertices and a point-wise vertex test.
//!
//! Every row is stored as `⟨ω, f⟩ − b ≤ 0` (inequality) or `= 0`
//! (equality). A point `f` of the polytope is a vertex iff the normals of
//! its active rows span the ambient space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::schema::{CoordKind, CoordinateIndex, MeasurementSchema, OutcomeSet};

/// Residual tolerance for membership and activity.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Inequality,
    Equality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowClass {
    /// `−f_c ≤ 0`
    Nonneg,
    /// `f_i ≤ 1` for singles.
    UpperBound,
    /// A conjunction never exceeds an immediate sub-conjunction.
    Monotone,
    /// Outcomes of one measurement sum to one.
    SingleNormalization,
    /// Outcome combinations of one possible set sum to one.
    ConjunctionNormalization,
    /// Coordinates with two outcomes of one measurement vanish.
    ZeroForced,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub class: RowClass,
    pub kind: RowKind,
    /// Sparse normal `(coordinate, coefficient)`.
    pub normal: Vec<(usize, f64)>,
    pub offset: f64,
    pub label: String,
}

impl Row {
    pub fn residual(&self, f: &[f64]) -> f64 {
        self.normal.iter().map(|&(c, w)| w * f[c]).sum::<f64>() - self.offset
    }

    pub fn dense_normal(&self, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for &(c, w) in &self.normal {
            v[c] += w;
        }
        v
    }

    fn violated(&self, residual: f64) -> bool {
        match self.kind {
            RowKind::Inequality => residual > MEMBERSHIP_TOL,
            RowKind::Equality => residual.abs() > MEMBERSHIP_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    pub rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub row: usize,
    pub label: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexCertificate {
    pub is_vertex: bool,
    pub active_rows: Vec<usize>,
    pub rank: usize,
    pub dim: usize,
}

/// Builds the full row system in a fixed order: nonnegativity, upper
/// bounds, monotonicity, single normalization, conjunction normalization,
/// zero-forcing.
pub fn h_representation(schema: &MeasurementSchema, coords: &CoordinateIndex) -> Polytope {
    let labels = coords.labels(schema);
    let mut rows = Vec::new();
    for (c, label) in labels.iter().enumerate() {
        rows.push(Row {
            class: RowClass::Nonneg,
            kind: RowKind::Inequality,
            normal: vec![(c, -1.0)],
            offset: 0.0,
            label: format!("{label} >= 0"),
        });
    }
    for (c, label) in labels.iter().enumerate().take(coords.num_singles()) {
        rows.push(Row {
            class: RowClass::UpperBound,
            kind: RowKind::Inequality,
            normal: vec![(c, 1.0)],
            offset: 1.0,
            label: format!("{label} <= 1"),
        });
    }
    for (c, coord) in coords.coords().iter().enumerate().skip(coords.num_singles()) {
        for b in coord.outcomes.iter() {
            let sub = coord.outcomes.difference(OutcomeSet::singleton(b));
            let s = coords.position(sub).expect("sub-conjunctions of performable sets have coordinates");
            rows.push(Row {
                class: RowClass::Monotone,
                kind: RowKind::Inequality,
                normal: vec![(c, 1.0), (s, -1.0)],
                offset: 0.0,
                label: format!("{} <= {}", labels[c], labels[s]),
            });
        }
    }
    for r in 0..schema.num_measurements() {
        rows.push(Row {
            class: RowClass::SingleNormalization,
            kind: RowKind::Equality,
            normal: schema.outcome_mask(r).iter().map(|b| (b, 1.0)).collect(),
            offset: 1.0,
            label: format!("sum over {} = 1", schema.measurement(r).name),
        });
    }
    for set in coords.possible_sets() {
        rows.push(Row {
            class: RowClass::ConjunctionNormalization,
            kind: RowKind::Equality,
            normal: coords.free_over(*set).into_iter().map(|c| (c, 1.0)).collect(),
            offset: 1.0,
            label: format!("sum over {{{}}} = 1", schema.measurement_names(*set).join(",")),
        });
    }
    for c in coords.zero_forced() {
        rows.push(Row {
            class: RowClass::ZeroForced,
            kind: RowKind::Equality,
            normal: vec![(c, 1.0)],
            offset: 0.0,
            label: format!("{} = 0", labels[c]),
        });
    }
    Polytope {
        dim: coords.dim(),
        rows,
    }
}

impl Polytope {
    fn check_dim(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, f: &[f64]) -> Result<Membership> {
        self.check_dim(f)?;
        let violations: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let res = row.residual(f);
                row.violated(res).then(|| Violation {
                    row: i,
                    label: row.label.clone(),
                    residual: res,
                })
            })
            .collect();
        Ok(Membership {
            inside: violations.is_empty(),
            violations,
        })
    }

    /// Active rows (equalities always, inequalities with residual within
    /// tolerance of zero) and the rank of their normals.
    pub fn is_vertex(&self, f: &[f64]) -> Result<VertexCertificate> {
        if !self.contains(f)?.inside {
            return Err(Error::NotInPolytope);
        }
        let active_rows: Vec<usize> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.kind == RowKind::Equality || row.residual(f).abs() <= MEMBERSHIP_TOL)
            .map(|(i, _)| i)
            .collect();
        let normals: Vec<Vec<f64>> = active_rows.iter().map(|&i| self.rows[i].dense_normal(self.dim)).collect();
        let rank = linalg::rank(&normals, self.dim);
        Ok(VertexCertificate {
            is_vertex: rank == self.dim,
            active_rows,
            rank,
            dim: self.dim,
        })
    }

    /// Counts rows by class.
    pub fn count(&self, class: RowClass) -> usize {
        self.rows.iter().filter(|r| r.class == class).count()
    }

    /// Dimension of the affine hull: ambient dimension minus the rank of
    /// the explicit equalities and of every inequality that no point of
    /// the polytope satisfies strictly (found by one LP per inequality).
    pub fn affine_dimension(&self) -> Result<usize> {
        let mut tight: Vec<Vec<f64>> = Vec::new();
        for row in &self.rows {
            if row.kind == RowKind::Equality {
                tight.push(row.dense_normal(self.dim));
                continue;
            }
            // maximize slack b − ⟨ω, f⟩ over the polytope
            let mut lp = self.feasibility_lp();
            for &(c, w) in &row.normal {
                lp.objective[c] += w;
            }
            match lp.solve() {
                LpOutcome::Optimal(sol) => {
                    let slack = -row.residual(&sol.x);
                    if slack <= MEMBERSHIP_TOL {
                        tight.push(row.dense_normal(self.dim));
                    }
                }
                LpOutcome::Infeasible { .. } => return Err(Error::Lp("empty polytope".into())),
                LpOutcome::Unbounded => return Err(Error::Lp("unbounded slack".into())),
            }
        }
        Ok(self.dim - linalg::rank(&tight, self.dim))
    }

    fn feasibility_lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.dim);
        for row in &self.rows {
            if row.class == RowClass::Nonneg {
                continue;
            }
            let rel = match row.kind {
                RowKind::Inequality => Relation::Le,
                RowKind::Equality => Relation::Eq,
            };
            lp.add(row.dense_normal(self.dim), rel, row.offset);
        }
        lp
    }
}

/// Deterministic vertices: one chosen outcome per measurement, with every
/// conjunction consistent with the choice set to one.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    pub assignments: Vec<Vec<usize>>,
    pub points: Vec<Vec<f64>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn labels(&self, schema: &MeasurementSchema) -> Vec<String> {
        self.assignments.iter().map(|a| schema.assignment_label(a)).collect()
    }

    /// Affine dimension of the vertices' convex hull.
    pub fn affine_dimension(&self) -> usize {
        if self.points.len() < 2 {
            return 0;
        }
        let base = &self.points[0];
        let diffs: Vec<Vec<f64>> = self.points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        linalg::rank(&diffs, self.dim())
    }
}

pub fn deterministic_vertices(schema: &MeasurementSchema, coords: &CoordinateIndex, cap: usize) -> Result<VertexSet> {
    let count = schema
        .outcome_counts()
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "vertex count",
            value: count,
            cap,
        });
    }
    let assignments = schema.assignments();
    let points = assignments
        .iter()
        .map(|a| {
            let chosen = schema.assignment_outcomes(a);
            coords
                .coords()
                .iter()
                .map(|c| {
                    if c.kind != CoordKind::ZeroForced && c.outcomes.is_subset(chosen) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(VertexSet { assignments, points })
}

/// Schema with its coordinates, polytope and deterministic vertices.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub schema: MeasurementSchema,
    pub coords: CoordinateIndex,
    pub polytope: Polytope,
    pub vertices: VertexSet,
}

impl StateSpace {
    pub fn new(schema: MeasurementSchema) -> Result<Self> {
        Self::with_vertex_cap(schema, DEFAULT_VERTEX_CAP)
    }

    pub fn with_vertex_cap(schema: MeasurementSchema, cap: usize) -> Result<Self> {
        let coords = schema.coordinates()?;
        let polytope = h_representation(&schema, &coords);
        let vertices = deterministic_vertices(&schema, &coords, cap)?;
        Ok(Self {
            schema,
            coords,
            polytope,
            vertices,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn labels(&self) -> Vec<String> {
        self.coords.labels(&self.schema)
    }
}
