//! Relative-frequency models built from run logs, the axioms they must
//! satisfy, the state vector they determine, and the inverse map from a
//! state plus measurement frequencies back to the full frequency table.

use std::collections::BTreeMap;
use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{CoordKind, CoordinateIndex, MeasurementSchema, MeasurementSet, OutcomeId, OutcomeSet};

/// Tolerance on the total mass of a table.
pub const MASS_TOL: f64 = 1e-12;
/// Tolerance used by the per-measurement and per-context normalization
/// checks on state vectors.
pub const STATE_TOL: f64 = 1e-9;
/// Largest negative atom weight accepted from reconstruction.
pub const NEGATIVE_MASS_TOL: f64 = 1e-9;
/// Default cap on `M` for reconstruction (a table of `2^M` weights).
pub const DEFAULT_RECONSTRUCT_CAP: usize = 20;

/// An atom `Δ_{ε,η}`: which measurements were performed and which
/// outcomes occurred. Tallied runs always have `performed = η(ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub performed: MeasurementSet,
    pub outcomes: OutcomeSet,
}

/// One parsed run of the experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub performed: MeasurementSet,
    pub outcomes: Vec<OutcomeId>,
}

/// Associative accumulator of atom counts; partial tallies can be merged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    counts: BTreeMap<OutcomeSet, u64>,
    total: u64,
}

impl Tally {
    pub fn add(&mut self, schema: &MeasurementSchema, run: &RunRecord) -> Result<()> {
        let eps = schema.atom_of_run(run.performed, &run.outcomes)?;
        *self.counts.entry(eps).or_default() += 1;
        self.total += 1;
        Ok(())
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.total += other.total;
        self
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn into_table(self, schema: &MeasurementSchema) -> Result<FrequencyTable> {
        if self.total == 0 {
            return Err(Error::EmptyLog);
        }
        let n = self.total as f64;
        let weights = self
            .counts
            .into_iter()
            .map(|(eps, c)| {
                (
                    Atom {
                        performed: schema.measurements_of(eps),
                        outcomes: eps,
                    },
                    c as f64 / n,
                )
            })
            .collect();
        Ok(FrequencyTable {
            schema: schema.clone(),
            runs: Some(self.total),
            weights,
        })
    }
}

/// Counts runs into a frequency table.
pub fn tally<'a, I>(schema: &MeasurementSchema, runs: I) -> Result<FrequencyTable>
where
    I: IntoIterator<Item = &'a RunRecord>,
{
    let mut t = Tally::default();
    for run in runs {
        t.add(schema, run)?;
    }
    t.into_table(schema)
}

/// Relative frequencies on the atoms of the event algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    schema: MeasurementSchema,
    runs: Option<u64>,
    weights: BTreeMap<Atom, f64>,
}

impl FrequencyTable {
    /// Builds an exact (analytic) table. Weights must be nonnegative and sum
    /// to one.
    pub fn analytic(schema: &MeasurementSchema, weights: impl IntoIterator<Item = (Atom, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Atom, f64> = BTreeMap::new();
        for (atom, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeights(format!("weight {w} on atom {atom:?}")));
            }
            if w > 0.0 {
                *map.entry(atom).or_default() += w;
            }
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self {
            schema: schema.clone(),
            runs: None,
            weights: map,
        })
    }

    /// Analytic table over consistent atoms `ε` (performed set implied).
    pub fn from_outcome_weights(
        schema: &MeasurementSchema,
        weights: impl IntoIterator<Item = (OutcomeSet, f64)>,
    ) -> Result<Self> {
        Self::analytic(
            schema,
            weights.into_iter().map(|(eps, w)| {
                (
                    Atom {
                        performed: schema.measurements_of(eps),
                        outcomes: eps,
                    },
                    w,
                )
            }),
        )
    }

    pub fn schema(&self) -> &MeasurementSchema {
        &self.schema
    }

    /// Run count, or `None` for analytic tables.
    pub fn runs(&self) -> Option<u64> {
        self.runs
    }

    pub fn weights(&self) -> &BTreeMap<Atom, f64> {
        &self.weights
    }

    pub fn weight(&self, atom: Atom) -> f64 {
        self.weights.get(&atom).copied().unwrap_or(0.0)
    }

    /// `p(a_{r1} ∧ … ∧ a_{rL})`.
    pub fn p_performed(&self, set: MeasurementSet) -> f64 {
        self.weights
            .iter()
            .filter(|(a, _)| set.is_subset(a.performed))
            .map(|(_, w)| w)
            .sum()
    }

    /// `p(X_{i1} ∧ … ∧ X_{iL})`.
    pub fn p_outcomes(&self, outcomes: OutcomeSet) -> f64 {
        self.weights
            .iter()
            .filter(|(a, _)| outcomes.is_subset(a.outcomes))
            .map(|(_, w)| w)
            .sum()
    }

    /// `p(outcomes ∧ performed)`.
    pub fn p_joint(&self, outcomes: OutcomeSet, performed: MeasurementSet) -> f64 {
        self.weights
            .iter()
            .filter(|(a, _)| outcomes.is_subset(a.outcomes) && performed.is_subset(a.performed))
            .map(|(_, w)| w)
            .sum()
    }

    /// Draws `n` runs from this table.
    pub fn sample_runs<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<RunRecord> {
        let atoms: Vec<_> = self.weights.iter().collect();
        let mut cdf = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for (_, w) in &atoms {
            acc += **w;
            cdf.push(acc);
        }
        (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                let k = cdf.partition_point(|&c| c <= u).min(atoms.len() - 1);
                let a = atoms[k].0;
                RunRecord {
                    performed: a.performed,
                    outcomes: a.outcomes.iter().map(|b| self.schema.outcome_at(b)).collect(),
                }
            })
            .collect()
    }

    /// Checks the positivity and outcome-logic axioms.
    pub fn validate(&self) -> ValidationReport {
        let s = &self.schema;
        let mut checks = Vec::new();

        let unperformed: Vec<String> = (0..s.num_measurements())
            .filter(|&r| self.p_performed(MeasurementSet::singleton(r)) <= 0.0)
            .map(|r| s.measurement(r).name.clone())
            .collect();
        checks.push(Check::new("E1", "every single measurement has p(a_r) > 0", unperformed));

        let unperformed_sets: Vec<String> = s
            .possible_sets()
            .into_iter()
            .filter(|set| self.p_performed(*set) <= 0.0)
            .map(|set| format!("{{{}}}", s.measurement_names(set).join(",")))
            .collect();
        checks.push(Check::new("E1", "every possible measurement conjunction occurs", unperformed_sets));

        let performed_impossible: Vec<String> = s
            .impossible()
            .into_iter()
            .filter(|set| self.p_performed(*set) > 0.0)
            .map(|set| format!("{{{}}}", s.measurement_names(set).join(",")))
            .collect();
        checks.push(Check::new("E1", "impossible conjunctions never occur", performed_impossible));

        let mut without_measurement = Vec::new();
        let mut two_outcomes = Vec::new();
        for (atom, &w) in &self.weights {
            if w <= 0.0 {
                continue;
            }
            for r in 0..s.num_measurements() {
                let hits = atom.outcomes.intersection(s.outcome_mask(r));
                if !hits.is_empty() && !atom.performed.contains(r) {
                    without_measurement.push(format!("{} without {}", s.outcome_set_label(hits), s.measurement(r).name));
                }
                if hits.len() > 1 {
                    two_outcomes.push(s.outcome_set_label(hits));
                }
            }
        }
        without_measurement.sort();
        without_measurement.dedup();
        two_outcomes.sort();
        two_outcomes.dedup();
        checks.push(Check::new("E2", "no outcome occurs without its measurement", without_measurement));
        checks.push(Check::new("E2", "two outcomes of one measurement never co-occur", two_outcomes));

        let mut single_norm = Vec::new();
        for r in 0..s.num_measurements() {
            let pa = self.p_performed(MeasurementSet::singleton(r));
            if pa <= 0.0 {
                continue;
            }
            let total: f64 = (0..s.measurement(r).outcome_count())
                .map(|i| {
                    let bit = s.bit(OutcomeId {
                        measurement: r,
                        outcome: i,
                    });
                    self.p_joint(OutcomeSet::singleton(bit), MeasurementSet::singleton(r)) / pa
                })
                .sum();
            if (total - 1.0).abs() > MASS_TOL {
                single_norm.push(format!("{}: Σ p(X|a) = {total}", s.measurement(r).name));
            }
        }
        checks.push(Check::new("E2", "a performed measurement yields one of its outcomes", single_norm));

        let mut joint_norm = Vec::new();
        if let Ok(coords) = s.coordinates() {
            for set in coords.possible_sets() {
                let pa = self.p_performed(*set);
                if pa <= 0.0 {
                    continue;
                }
                let total: f64 = coords
                    .free_over(*set)
                    .into_iter()
                    .map(|c| self.p_joint(coords.get(c).outcomes, *set) / pa)
                    .sum();
                if (total - 1.0).abs() > MASS_TOL {
                    joint_norm.push(format!(
                        "{{{}}}: Σ p(X…|a…) = {total}",
                        s.measurement_names(*set).join(",")
                    ));
                }
            }
        }
        checks.push(Check::new(
            "E2",
            "a performed conjunction yields one outcome combination",
            joint_norm,
        ));

        ValidationReport { checks }
    }

    /// Conditional outcome frequencies given the corresponding measurements.
    pub fn extract_state(&self, coords: &CoordinateIndex) -> Result<StateVector> {
        let mut values = Vec::with_capacity(coords.dim());
        for c in coords.coords() {
            if c.kind == CoordKind::ZeroForced {
                values.push(0.0);
                continue;
            }
            let pa = self.p_performed(c.measurements);
            if pa <= 0.0 {
                return Err(Error::UnmeasuredContext(self.schema.measurement_names(c.measurements)));
            }
            values.push(self.p_joint(c.outcomes, c.measurements) / pa);
        }
        Ok(StateVector(values))
    }

    /// Like [`extract_state`](Self::extract_state) but leaves coordinates of
    /// never-performed contexts as `None`.
    pub fn extract_partial_state(&self, coords: &CoordinateIndex) -> Vec<Option<f64>> {
        coords
            .coords()
            .iter()
            .map(|c| {
                if c.kind == CoordKind::ZeroForced {
                    return Some(0.0);
                }
                let pa = self.p_performed(c.measurements);
                (pa > 0.0).then(|| self.p_joint(c.outcomes, c.measurements) / pa)
            })
            .collect()
    }

    /// Performance frequencies of every single measurement and every
    /// possible conjunction.
    pub fn measurement_frequencies(&self) -> MeasurementFrequencies {
        let mut map = BTreeMap::new();
        for r in 0..self.schema.num_measurements() {
            let s = MeasurementSet::singleton(r);
            map.insert(s, self.p_performed(s));
        }
        for s in self.schema.possible_sets() {
            map.insert(s, self.p_performed(s));
        }
        MeasurementFrequencies(map)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub axiom: String,
    pub condition: String,
    pub passed: bool,
    pub offenders: Vec<String>,
}

impl Check {
    fn new(axiom: &str, condition: &str, offenders: Vec<String>) -> Self {
        Self {
            axiom: axiom.into(),
            condition: condition.into(),
            passed: offenders.is_empty(),
            offenders,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn axiom_passed(&self, axiom: &str) -> bool {
        self.checks.iter().filter(|c| c.axiom == axiom).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The state vector `Z`, one value per coordinate of a [`CoordinateIndex`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector(pub Vec<f64>);

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

impl StateVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Lists every violated invariant: range, per-measurement and
    /// per-context normalization, zero-forced coordinates and monotonicity.
    pub fn invariant_violations(&self, schema: &MeasurementSchema, coords: &CoordinateIndex) -> Result<Vec<String>> {
        if self.len() != coords.dim() {
            return Err(Error::DimensionMismatch {
                expected: coords.dim(),
                got: self.len(),
            });
        }
        let labels = coords.labels(schema);
        let mut out = Vec::new();
        for (i, &v) in self.iter().enumerate() {
            if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&v) {
                out.push(format!("{} = {v} outside [0,1]", labels[i]));
            }
        }
        for r in 0..schema.num_measurements() {
            let mask = schema.outcome_mask(r);
            let sum: f64 = mask.iter().map(|b| self[b]).sum();
            if (sum - 1.0).abs() > STATE_TOL {
                out.push(format!("Σ over {} = {sum}", schema.measurement(r).name));
            }
        }
        for set in coords.possible_sets() {
            let sum: f64 = coords.free_over(*set).into_iter().map(|c| self[c]).sum();
            if (sum - 1.0).abs() > STATE_TOL {
                out.push(format!("Σ over {{{}}} = {sum}", schema.measurement_names(*set).join(",")));
            }
        }
        for (i, c) in coords.coords().iter().enumerate() {
            match c.kind {
                CoordKind::ZeroForced if self[i].abs() > STATE_TOL => {
                    out.push(format!("{} = {} must be 0", labels[i], self[i]));
                }
                CoordKind::Free => {
                    for b in c.outcomes.iter() {
                        let sub = c.outcomes.difference(OutcomeSet::singleton(b));
                        if let Some(j) = coords.position(sub) {
                            if self[i] > self[j] + STATE_TOL {
                                out.push(format!("{} = {} exceeds {} = {}", labels[i], self[i], labels[j], self[j]));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }
}

/// Performance frequencies `p(a_R)` keyed by measurement set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementFrequencies(pub BTreeMap<MeasurementSet, f64>);

impl MeasurementFrequencies {
    pub fn get(&self, set: MeasurementSet) -> f64 {
        self.0.get(&set).copied().unwrap_or(0.0)
    }

    /// Cumulative frequencies induced by a distribution over performed sets.
    pub fn from_performance_distribution(
        schema: &MeasurementSchema,
        dist: &BTreeMap<MeasurementSet, f64>,
    ) -> Self {
        let mut map = BTreeMap::new();
        let sets = (0..schema.num_measurements())
            .map(MeasurementSet::singleton)
            .chain(schema.possible_sets());
        for s in sets {
            let p = dist.iter().filter(|(k, _)| s.is_subset(**k)).map(|(_, v)| v).sum();
            map.insert(s, p);
        }
        MeasurementFrequencies(map)
    }

    fn validate(&self, schema: &MeasurementSchema) -> Result<()> {
        for r in 0..schema.num_measurements() {
            let p = self.get(MeasurementSet::singleton(r));
            if !(p > 0.0 && p <= 1.0 + MASS_TOL) {
                return Err(Error::InvalidFrequencies(format!(
                    "p({}) = {p} must lie in (0, 1]",
                    schema.measurement(r).name
                )));
            }
        }
        for s in schema.possible_sets() {
            let p = self.get(s);
            if p.is_nan() || p <= 0.0 {
                return Err(Error::InvalidFrequencies(format!(
                    "possible set {:?} has p = {p}",
                    schema.measurement_names(s)
                )));
            }
            for r in s.iter() {
                let sub = s.difference(MeasurementSet::singleton(r));
                let ps = self.get(sub);
                if !sub.is_empty() && p > ps + MASS_TOL {
                    return Err(Error::InvalidFrequencies(format!(
                        "p{:?} = {p} exceeds p{:?} = {ps}",
                        schema.measurement_names(s),
                        schema.measurement_names(sub)
                    )));
                }
            }
        }
        for (s, p) in &self.0 {
            if schema.is_impossible(*s) && *p != 0.0 {
                return Err(Error::InvalidFrequencies(format!(
                    "impossible set {:?} has p = {p}",
                    schema.measurement_names(*s)
                )));
            }
        }
        Ok(())
    }
}

/// Rebuilds the unique frequency table over consistent atoms that has state
/// `z` and the given measurement frequencies.
///
/// For every outcome set `C`, `Σ_{ε ⊇ C} δ_ε` must equal `Z_C · p(a_{meas C})`
/// (1 for the empty set, 0 for conflicting or impossible sets). That is a
/// superset zeta transform, inverted here in `O(M·2^M)`.
pub fn reconstruct_frequencies(
    schema: &MeasurementSchema,
    coords: &CoordinateIndex,
    z: &StateVector,
    freqs: &MeasurementFrequencies,
    cap: usize,
) -> Result<FrequencyTable> {
    let m = schema.num_outcomes();
    if m > cap {
        return Err(Error::CapExceeded {
            what: "total outcome count",
            value: m,
            cap,
        });
    }
    if z.len() != coords.dim() {
        return Err(Error::DimensionMismatch {
            expected: coords.dim(),
            got: z.len(),
        });
    }
    freqs.validate(schema)?;

    let mut g = superset_sums(schema, coords, z, freqs);
    mobius_superset(&mut g);

    let mut weights = Vec::new();
    for (eps, &d) in g.iter().enumerate() {
        if d < -NEGATIVE_MASS_TOL {
            return Err(Error::NegativeMass {
                atom: schema.outcome_set_label(OutcomeSet(eps as u64)),
                mass: d,
            });
        }
        if d > 0.0 {
            weights.push((OutcomeSet(eps as u64), d));
        }
    }
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    // renormalize away float drift of order 1e-15
    let weights = weights.into_iter().map(|(e, w)| (e, w / total));
    FrequencyTable::from_outcome_weights(schema, weights)
}

/// `g(C)` for every outcome set `C`, indexed by its bit pattern.
pub fn superset_sums(
    schema: &MeasurementSchema,
    coords: &CoordinateIndex,
    z: &StateVector,
    freqs: &MeasurementFrequencies,
) -> Vec<f64> {
    let m = schema.num_outcomes();
    let mut g = vec![0.0; 1 << m];
    g[0] = 1.0;
    for (i, c) in coords.coords().iter().enumerate() {
        if c.kind == CoordKind::ZeroForced {
            continue;
        }
        g[c.outcomes.0 as usize] = z[i] * freqs.get(c.measurements);
    }
    g
}

/// In-place inverse of the superset zeta transform
/// `f(S) = Σ_{T ⊇ S} a(T)`.
pub fn mobius_superset(f: &mut [f64]) {
    let n = f.len();
    assert!(n.is_power_of_two());
    let mut bit = 1;
    while bit < n {
        for s in 0..n {
            if s & bit == 0 {
                f[s] -= f[s | bit];
            }
        }
        bit <<= 1;
    }
}

/// In-place superset zeta transform.
pub fn zeta_superset(f: &mut [f64]) {
    let n = f.len();
    assert!(n.is_power_of_two());
    let mut bit = 1;
    while bit < n {
        for s in 0..n {
            if s & bit == 0 {
                f[s] += f[s | bit];
            }
        }
        bit <<= 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E3Report {
    pub tolerance: f64,
    /// Max pairwise deviation per coordinate, `None` where fewer than two
    /// tables measured the context.
    pub deviations: Vec<Option<f64>>,
    pub max_deviation: f64,
    pub worst_coordinate: Option<usize>,
    pub passed: bool,
}

/// Compares the states extracted from several tables of one schema.
///
/// Default tolerance is `3/√N_min` over tables built from runs, or
/// [`STATE_TOL`] when every table is analytic.
pub fn check_e3(tables: &[FrequencyTable], coords: &CoordinateIndex, tol: Option<f64>) -> Result<E3Report> {
    if tables.len() < 2 {
        return Err(Error::Usage("check_e3 needs at least two tables".into()));
    }
    let schema = tables[0].schema();
    if tables.iter().any(|t| t.schema() != schema) {
        return Err(Error::IncomparableSchemas);
    }
    let tolerance = tol.unwrap_or_else(|| {
        tables
            .iter()
            .filter_map(|t| t.runs())
            .min()
            .map(|n| 3.0 / (n as f64).sqrt())
            .unwrap_or(STATE_TOL)
    });
    let states: Vec<_> = tables.iter().map(|t| t.extract_partial_state(coords)).collect();
    let mut deviations = Vec::with_capacity(coords.dim());
    let mut max_deviation: f64 = 0.0;
    let mut worst = None;
    for c in 0..coords.dim() {
        let vals: Vec<f64> = states.iter().filter_map(|s| s[c]).collect();
        if vals.len() < 2 {
            deviations.push(None);
            continue;
        }
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let d = hi - lo;
        if d > max_deviation {
            max_deviation = d;
            worst = Some(c);
        }
        deviations.push(Some(d));
    }
    Ok(E3Report {
        tolerance,
        passed: max_deviation <= tolerance,
        deviations,
        max_deviation,
        worst_coordinate: worst,
    })
}
