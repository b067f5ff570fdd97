//! Measurement setup and the combinatorial index sets derived from it.
//!
//! Outcomes are numbered globally: measurement order first, then outcome
//! order inside a measurement. That numbering is the bit order of every
//! [`OutcomeSet`], including the atom vectors produced by
//! [`MeasurementSchema::atom_of_run`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of measurements.
pub const MAX_MEASUREMENTS: usize = 20;
/// Largest supported total outcome count for coordinate enumeration.
pub const MAX_OUTCOMES: usize = 24;

/// Bit set over measurement indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementSet(pub u64);

/// Bit set over global outcome indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeSet(pub u64);

macro_rules! bitset_impl {
    ($ty:ident) => {
        impl $ty {
            pub const EMPTY: Self = Self(0);

            pub fn singleton(i: usize) -> Self {
                Self(1 << i)
            }

            pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
                Self(it.into_iter().fold(0, |acc, i| acc | (1 << i)))
            }

            pub fn contains(self, i: usize) -> bool {
                self.0 >> i & 1 == 1
            }

            pub fn insert(&mut self, i: usize) {
                self.0 |= 1 << i;
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            pub fn union(self, other: Self) -> Self {
                Self(self.0 | other.0)
            }

            pub fn intersection(self, other: Self) -> Self {
                Self(self.0 & other.0)
            }

            pub fn difference(self, other: Self) -> Self {
                Self(self.0 & !other.0)
            }

            /// Member indices in increasing order.
            pub fn iter(self) -> impl Iterator<Item = usize> {
                let mut bits = self.0;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        None
                    } else {
                        let i = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        Some(i)
                    }
                })
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter()).finish()
            }
        }
    };
}

bitset_impl!(MeasurementSet);
bitset_impl!(OutcomeSet);

/// Outcome `outcome` of measurement `measurement`, both zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeId {
    pub measurement: usize,
    pub outcome: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub name: String,
    pub outcomes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// On-disk schema description.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SchemaConfig {
    pub measurements: Vec<MeasurementConfig>,
    #[serde(default)]
    pub impossible: Vec<Vec<String>>,
}

impl SchemaConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub outcomes: Vec<String>,
    pub values: Option<Vec<f64>>,
}

impl Measurement {
    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }
}

/// Measurements, their outcomes and the upward-closed family of jointly
/// unperformable measurement sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSchema {
    measurements: Vec<Measurement>,
    impossible: BTreeSet<MeasurementSet>,
    offsets: Vec<usize>,
    total_outcomes: usize,
}

impl MeasurementSchema {
    pub fn from_config(config: &SchemaConfig) -> Result<Self> {
        if config.measurements.is_empty() {
            return Err(Error::NoMeasurements);
        }
        if config.measurements.len() > MAX_MEASUREMENTS {
            return Err(Error::CapExceeded {
                what: "measurement count",
                value: config.measurements.len(),
                cap: MAX_MEASUREMENTS,
            });
        }
        let mut names = HashMap::new();
        let mut measurements = Vec::with_capacity(config.measurements.len());
        for (r, m) in config.measurements.iter().enumerate() {
            if names.insert(m.name.clone(), r).is_some() {
                return Err(Error::DuplicateMeasurement(m.name.clone()));
            }
            if m.outcomes.is_empty() {
                return Err(Error::NoOutcomes(m.name.clone()));
            }
            let mut seen = BTreeSet::new();
            for o in &m.outcomes {
                if !seen.insert(o.as_str()) {
                    return Err(Error::DuplicateOutcome {
                        measurement: m.name.clone(),
                        outcome: o.clone(),
                    });
                }
            }
            if let Some(values) = &m.values {
                if values.len() != m.outcomes.len() {
                    return Err(Error::LabelCountMismatch {
                        measurement: m.name.clone(),
                        labels: values.len(),
                        outcomes: m.outcomes.len(),
                    });
                }
                for (i, a) in values.iter().enumerate() {
                    if values[..i].contains(a) {
                        return Err(Error::DuplicateLabel {
                            measurement: m.name.clone(),
                            label: *a,
                        });
                    }
                }
            }
            measurements.push(Measurement {
                name: m.name.clone(),
                outcomes: m.outcomes.clone(),
                values: m.values.clone(),
            });
        }

        let mut offsets = Vec::with_capacity(measurements.len());
        let mut total = 0;
        for m in &measurements {
            offsets.push(total);
            total += m.outcome_count();
        }
        if total > 64 {
            return Err(Error::CapExceeded {
                what: "total outcome count",
                value: total,
                cap: 64,
            });
        }

        let mut generators = Vec::new();
        for set in &config.impossible {
            let mut mask = MeasurementSet::EMPTY;
            for name in set {
                let r = *names
                    .get(name)
                    .ok_or_else(|| Error::UnknownMeasurement(name.clone()))?;
                mask.insert(r);
            }
            if mask.len() < 2 {
                return Err(Error::ImpossibleTooSmall(set.clone()));
            }
            generators.push(mask);
        }
        let m = measurements.len();
        let impossible = (0u64..1 << m)
            .map(MeasurementSet)
            .filter(|s| generators.iter().any(|g| g.is_subset(*s)))
            .collect();

        Ok(Self {
            measurements,
            impossible,
            offsets,
            total_outcomes: total,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_config(&SchemaConfig::from_json_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config(&SchemaConfig::from_path(path)?)
    }

    pub fn to_config(&self) -> SchemaConfig {
        let minimal: Vec<_> = self
            .impossible
            .iter()
            .filter(|s| !self.impossible.iter().any(|t| t != *s && t.is_subset(**s)))
            .map(|s| self.measurement_names(*s))
            .collect();
        SchemaConfig {
            measurements: self
                .measurements
                .iter()
                .map(|m| MeasurementConfig {
                    name: m.name.clone(),
                    outcomes: m.outcomes.clone(),
                    values: m.values.clone(),
                })
                .collect(),
            impossible: minimal,
        }
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn measurement(&self, r: usize) -> &Measurement {
        &self.measurements[r]
    }

    pub fn num_measurements(&self) -> usize {
        self.measurements.len()
    }

    /// Total outcome count `M`.
    pub fn num_outcomes(&self) -> usize {
        self.total_outcomes
    }

    pub fn outcome_counts(&self) -> Vec<usize> {
        self.measurements.iter().map(Measurement::outcome_count).collect()
    }

    pub fn measurement_index(&self, name: &str) -> Option<usize> {
        self.measurements.iter().position(|m| m.name == name)
    }

    pub fn outcome_index(&self, measurement: usize, outcome: &str) -> Option<usize> {
        self.measurements[measurement]
            .outcomes
            .iter()
            .position(|o| o == outcome)
    }

    /// Global bit position of an outcome.
    pub fn bit(&self, id: OutcomeId) -> usize {
        self.offsets[id.measurement] + id.outcome
    }

    pub fn outcome_at(&self, bit: usize) -> OutcomeId {
        let measurement = self.offsets.partition_point(|&o| o <= bit) - 1;
        OutcomeId {
            measurement,
            outcome: bit - self.offsets[measurement],
        }
    }

    /// Every outcome bit of measurement `r`.
    pub fn outcome_mask(&self, r: usize) -> OutcomeSet {
        let n = self.measurements[r].outcome_count();
        OutcomeSet(((1u64 << n) - 1) << self.offsets[r])
    }

    /// Distinct measurements touched by an outcome set.
    pub fn measurements_of(&self, outcomes: OutcomeSet) -> MeasurementSet {
        MeasurementSet::from_indices(outcomes.iter().map(|b| self.outcome_at(b).measurement))
    }

    pub fn all_measurements(&self) -> MeasurementSet {
        MeasurementSet((1u64 << self.num_measurements()) - 1)
    }

    /// The closed family of impossible sets, sorted by size then bits.
    pub fn impossible(&self) -> Vec<MeasurementSet> {
        let mut v: Vec<_> = self.impossible.iter().copied().collect();
        v.sort_by_key(|s| (s.len(), lex_key(*s)));
        v
    }

    pub fn is_impossible(&self, set: MeasurementSet) -> bool {
        self.impossible.contains(&set)
    }

    /// Non-empty and not impossible. Singletons are always performable.
    pub fn is_performable(&self, set: MeasurementSet) -> bool {
        !set.is_empty() && !self.impossible.contains(&set)
    }

    /// Possible conjunctions of at least two measurements, by size then
    /// lexicographically.
    pub fn possible_sets(&self) -> Vec<MeasurementSet> {
        let m = self.num_measurements();
        let mut out = Vec::new();
        for k in 2..=m {
            for combo in combinations(m, k) {
                let s = MeasurementSet::from_indices(combo);
                if !self.is_impossible(s) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn measurement_names(&self, set: MeasurementSet) -> Vec<String> {
        set.iter().map(|r| self.measurements[r].name.clone()).collect()
    }

    /// `name=outcome` for one outcome.
    pub fn outcome_label(&self, id: OutcomeId) -> String {
        let m = &self.measurements[id.measurement];
        format!("{}={}", m.name, m.outcomes[id.outcome])
    }

    /// `{a=x,b=y}` style description of an outcome set.
    pub fn outcome_set_label(&self, set: OutcomeSet) -> String {
        let parts: Vec<_> = set
            .iter()
            .map(|b| self.outcome_label(self.outcome_at(b)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Maps one run to its atom `ε`: bit `(r, i)` set iff outcome `i` of
    /// measurement `r` occurred. The performed set is implied by the bits.
    pub fn atom_of_run(&self, performed: MeasurementSet, outcomes: &[OutcomeId]) -> Result<OutcomeSet> {
        let mut eps = OutcomeSet::EMPTY;
        for id in outcomes {
            let m = self
                .measurements
                .get(id.measurement)
                .ok_or_else(|| Error::UnknownMeasurement(format!("#{}", id.measurement)))?;
            if id.outcome >= m.outcome_count() {
                return Err(Error::UnknownOutcome {
                    measurement: m.name.clone(),
                    outcome: format!("#{}", id.outcome),
                });
            }
            if !performed.contains(id.measurement) {
                return Err(Error::OutcomeWithoutMeasurement(m.name.clone()));
            }
            let bit = self.bit(*id);
            if !eps.intersection(self.outcome_mask(id.measurement)).is_empty() {
                if eps.contains(bit) {
                    continue;
                }
                return Err(Error::ConflictingOutcomes(m.name.clone()));
            }
            eps.insert(bit);
        }
        for r in performed.iter() {
            if r >= self.num_measurements() {
                return Err(Error::UnknownMeasurement(format!("#{r}")));
            }
            if eps.intersection(self.outcome_mask(r)).is_empty() {
                return Err(Error::MissingOutcome(self.measurements[r].name.clone()));
            }
        }
        Ok(eps)
    }

    /// Name-based form of [`atom_of_run`](Self::atom_of_run).
    pub fn atom_of_named_run(&self, performed: &[&str], outcomes: &[(&str, &str)]) -> Result<OutcomeSet> {
        let mut perf = MeasurementSet::EMPTY;
        for name in performed {
            perf.insert(
                self.measurement_index(name)
                    .ok_or_else(|| Error::UnknownMeasurement(name.to_string()))?,
            );
        }
        let ids = outcomes
            .iter()
            .map(|(m, o)| self.resolve_outcome(m, o))
            .collect::<Result<Vec<_>>>()?;
        self.atom_of_run(perf, &ids)
    }

    pub fn resolve_outcome(&self, measurement: &str, outcome: &str) -> Result<OutcomeId> {
        let r = self
            .measurement_index(measurement)
            .ok_or_else(|| Error::UnknownMeasurement(measurement.to_string()))?;
        let i = self
            .outcome_index(r, outcome)
            .ok_or_else(|| Error::UnknownOutcome {
                measurement: measurement.to_string(),
                outcome: outcome.to_string(),
            })?;
        Ok(OutcomeId {
            measurement: r,
            outcome: i,
        })
    }

    /// Enumerates the state-vector coordinates.
    pub fn coordinates(&self) -> Result<CoordinateIndex> {
        CoordinateIndex::new(self)
    }

    /// One outcome per measurement for every assignment, in mixed-radix
    /// order with the last measurement varying fastest.
    pub fn assignments(&self) -> Vec<Vec<usize>> {
        let counts = self.outcome_counts();
        let total: usize = counts.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut cur = vec![0; counts.len()];
        for _ in 0..total {
            out.push(cur.clone());
            for r in (0..counts.len()).rev() {
                cur[r] += 1;
                if cur[r] < counts[r] {
                    break;
                }
                cur[r] = 0;
            }
        }
        out
    }

    /// Outcome bits selected by an assignment.
    pub fn assignment_outcomes(&self, assignment: &[usize]) -> OutcomeSet {
        OutcomeSet::from_indices(assignment.iter().enumerate().map(|(r, &i)| {
            self.bit(OutcomeId {
                measurement: r,
                outcome: i,
            })
        }))
    }

    pub fn assignment_label(&self, assignment: &[usize]) -> String {
        assignment
            .iter()
            .enumerate()
            .map(|(r, &i)| {
                self.outcome_label(OutcomeId {
                    measurement: r,
                    outcome: i,
                })
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn lex_key(set: MeasurementSet) -> Vec<usize> {
    set.iter().collect()
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let next = {
            let c = cur.as_mut().unwrap();
            let mut i = k;
            loop {
                if i == 0 {
                    break false;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break true;
                }
            }
        };
        if !next || k == 0 {
            cur = None;
        }
        Some(out)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordKind {
    Single,
    Free,
    ZeroForced,
}

/// One coordinate of the state vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub outcomes: OutcomeSet,
    pub measurements: MeasurementSet,
    pub kind: CoordKind,
}

/// Singles in schema order followed by conjunctions ordered by size, then
/// lexicographically by outcome bits.
#[derive(Clone, Debug)]
pub struct CoordinateIndex {
    coords: Vec<Coordinate>,
    num_singles: usize,
    possible_sets: Vec<MeasurementSet>,
    lookup: HashMap<OutcomeSet, usize>,
}

impl CoordinateIndex {
    pub fn new(schema: &MeasurementSchema) -> Result<Self> {
        let total = schema.num_outcomes();
        if total > MAX_OUTCOMES {
            return Err(Error::CapExceeded {
                what: "total outcome count",
                value: total,
                cap: MAX_OUTCOMES,
            });
        }
        let mut coords = Vec::new();
        for bit in 0..total {
            let id = schema.outcome_at(bit);
            coords.push(Coordinate {
                outcomes: OutcomeSet::singleton(bit),
                measurements: MeasurementSet::singleton(id.measurement),
                kind: CoordKind::Single,
            });
        }
        for k in 2..=total {
            for combo in combinations(total, k) {
                let outcomes = OutcomeSet::from_indices(combo);
                let measurements = schema.measurements_of(outcomes);
                if !schema.is_performable(measurements) {
                    continue;
                }
                let kind = if measurements.len() == outcomes.len() {
                    CoordKind::Free
                } else {
                    CoordKind::ZeroForced
                };
                coords.push(Coordinate {
                    outcomes,
                    measurements,
                    kind,
                });
            }
        }
        let lookup = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.outcomes, i))
            .collect();
        Ok(Self {
            coords,
            num_singles: total,
            possible_sets: schema.possible_sets(),
            lookup,
        })
    }

    /// Ambient dimension of state vectors.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> &Coordinate {
        &self.coords[i]
    }

    pub fn singles(&self) -> &[Coordinate] {
        &self.coords[..self.num_singles]
    }

    pub fn conjunctions(&self) -> &[Coordinate] {
        &self.coords[self.num_singles..]
    }

    pub fn num_singles(&self) -> usize {
        self.num_singles
    }

    pub fn possible_sets(&self) -> &[MeasurementSet] {
        &self.possible_sets
    }

    pub fn position(&self, outcomes: OutcomeSet) -> Option<usize> {
        self.lookup.get(&outcomes).copied()
    }

    /// Positions of the free conjunctions whose measurement set is `set`.
    pub fn free_over(&self, set: MeasurementSet) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == CoordKind::Free && c.measurements == set)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn zero_forced(&self) -> Vec<usize> {
        self.positions_of(CoordKind::ZeroForced)
    }

    pub fn free(&self) -> Vec<usize> {
        self.positions_of(CoordKind::Free)
    }

    fn positions_of(&self, kind: CoordKind) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Human-readable coordinate names.
    pub fn labels(&self, schema: &MeasurementSchema) -> Vec<String> {
        self.coords
            .iter()
            .map(|c| schema.outcome_set_label(c.outcomes))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn coin_schema_dimensions() {
        let s = fixtures::coin();
        assert_eq!(s.num_outcomes(), 2);
        let c = s.coordinates().unwrap();
        assert_eq!(c.singles().len(), 2);
        assert_eq!(c.conjunctions().len(), 1);
        assert_eq!(c.conjunctions()[0].kind, CoordKind::ZeroForced);
        assert_eq!(c.dim(), 3);
    }

    #[test]
    fn two_joint_measurements_enumeration() {
        let s = fixtures::two_by_two();
        let c = s.coordinates().unwrap();
        assert_eq!(c.singles().len(), 4);
        assert_eq!(c.conjunctions().len(), 11);
        assert_eq!(c.free().len(), 4);
        assert_eq!(c.zero_forced().len(), 7);
        // size order, then lexicographic
        let sizes: Vec<_> = c.conjunctions().iter().map(|k| k.outcomes.len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(c.conjunctions()[0].outcomes, OutcomeSet::from_indices([0, 1]));
        assert_eq!(c.conjunctions()[1].outcomes, OutcomeSet::from_indices([0, 2]));
    }

    #[test]
    fn chsh_closure_and_coordinates() {
        let s = fixtures::chsh();
        let imp = s.impossible();
        let by_size = |k| imp.iter().filter(|x| x.len() == k).count();
        assert_eq!(by_size(2), 2);
        assert_eq!(by_size(3), 4);
        assert_eq!(by_size(4), 1);
        assert_eq!(s.possible_sets().len(), 4);
        let c = s.coordinates().unwrap();
        assert_eq!(c.free().len(), 16);
        assert!(c.conjunctions().iter().all(|k| k.kind != CoordKind::Free || k.outcomes.len() == 2));
        assert_eq!(c.dim(), 48);
    }

    #[test]
    fn rejects_bad_configs() {
        let singleton = r#"{"measurements":[{"name":"A1","outcomes":["0","1"]}],"impossible":[["A1"]]}"#;
        assert!(matches!(
            MeasurementSchema::from_json_str(singleton),
            Err(Error::ImpossibleTooSmall(_))
        ));
        let dup = r#"{"measurements":[{"name":"a","outcomes":["x"]},{"name":"a","outcomes":["y"]}]}"#;
        assert!(matches!(
            MeasurementSchema::from_json_str(dup),
            Err(Error::DuplicateMeasurement(_))
        ));
        let labels = r#"{"measurements":[{"name":"a","outcomes":["x","y"],"values":[1,1]}]}"#;
        assert!(matches!(
            MeasurementSchema::from_json_str(labels),
            Err(Error::DuplicateLabel { .. })
        ));
        let unknown = r#"{"measurements":[{"name":"a","outcomes":["x"]}],"impossible":[["a","b"]]}"#;
        assert!(matches!(
            MeasurementSchema::from_json_str(unknown),
            Err(Error::UnknownMeasurement(_))
        ));
    }

    #[test]
    fn atoms_of_runs() {
        let coin = fixtures::coin();
        assert_eq!(
            coin.atom_of_named_run(&["toss"], &[("toss", "H")]).unwrap(),
            OutcomeSet(0b01)
        );
        assert!(matches!(
            coin.atom_of_named_run(&["toss"], &[("toss", "H"), ("toss", "T")]),
            Err(Error::ConflictingOutcomes(_))
        ));
        assert!(matches!(
            coin.atom_of_named_run(&["toss"], &[]),
            Err(Error::MissingOutcome(_))
        ));
        assert!(matches!(
            coin.atom_of_named_run(&[], &[("toss", "T")]),
            Err(Error::OutcomeWithoutMeasurement(_))
        ));
        assert_eq!(coin.atom_of_named_run(&[], &[]).unwrap(), OutcomeSet::EMPTY);

        let chsh = fixtures::chsh();
        let eps = chsh
            .atom_of_named_run(&["A1", "B2"], &[("A1", "0"), ("B2", "1")])
            .unwrap();
        assert_eq!(eps.len(), 2);
        assert!(eps.contains(0));
        assert!(eps.contains(7));
    }

    #[test]
    fn count_identity_without_impossible_sets() {
        for counts in [vec![2], vec![2, 2], vec![3, 2], vec![2, 2, 2], vec![3, 1, 2]] {
            let s = fixtures::schema_with_counts(&counts, &[]);
            let c = s.coordinates().unwrap();
            assert_eq!(1 + c.dim(), 1 << s.num_outcomes());
        }
    }

    #[test]
    fn upward_closure_by_enumeration() {
        let s = fixtures::schema_with_counts(&[2, 2, 2, 2, 2], &[&[0, 1], &[2, 3, 4]]);
        let imp = s.impossible();
        for a in &imp {
            for b in 0u64..1 << 5 {
                let b = MeasurementSet(b);
                if a.is_subset(b) {
                    assert!(s.is_impossible(b));
                }
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = fixtures::chsh().coordinates().unwrap();
        let b = fixtures::chsh().coordinates().unwrap();
        assert_eq!(a.coords(), b.coords());
    }

    #[test]
    fn combinations_lex_order() {
        let v: Vec<_> = combinations(4, 2).collect();
        assert_eq!(v, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }
}
