//! A real Hilbert-space representation in which every coordinate of a
//! state is a trace `tr(P_Ψ E)`.
//!
//! There is one block per deterministic vertex θ; each block has a basis of
//! outcome tuples `(j_1, …, j_m)`. Inside block θ the outcome `X_i^r` owns
//! the tuples with `j_r = i` when θ picks `i` for measurement `r`; tuples
//! not owned by any outcome of `r` are given to a default outcome `i_0(r)`.
//! Every projector is a coordinate subspace and is stored as a sorted set
//! of basis indices.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::{self, SimplexWeights};
use crate::dynamics::Flow;
use crate::error::{Error, Result};
use crate::schema::{CoordinateIndex, MeasurementSchema, OutcomeSet};
use crate::statespace::VertexSet;

pub const DEFAULT_DIMENSION_CAP: usize = 1_000_000;
pub const EXACTNESS_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RepOptions {
    /// `i_0(r)` per measurement; the last outcome when `None`.
    pub default_outcomes: Option<Vec<usize>>,
    /// When false the unowned tuples are left out of every projector, which
    /// breaks the covering property. Only useful to exercise the verifier.
    pub absorb_complement: bool,
    pub dimension_cap: usize,
}

impl Default for RepOptions {
    fn default() -> Self {
        Self {
            default_outcomes: None,
            absorb_complement: true,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuantumRep {
    schema: MeasurementSchema,
    coords: CoordinateIndex,
    vertices: VertexSet,
    counts: Vec<usize>,
    strides: Vec<usize>,
    block_size: usize,
    default_outcomes: Vec<usize>,
    /// `projectors[r][i]`: sorted basis indices of `E_i^r`.
    projectors: Vec<Vec<Vec<usize>>>,
}

pub fn build_representation(schema: &MeasurementSchema, vertices: &VertexSet) -> Result<QuantumRep> {
    build_representation_with(schema, vertices, &RepOptions::default())
}

pub fn build_representation_with(
    schema: &MeasurementSchema,
    vertices: &VertexSet,
    options: &RepOptions,
) -> Result<QuantumRep> {
    let counts = schema.outcome_counts();
    let m = counts.len();
    let block_size = counts.iter().product::<usize>();
    let dimension = vertices.len().saturating_mul(block_size);
    if dimension > options.dimension_cap {
        return Err(Error::CapExceeded {
            what: "Hilbert space dimension",
            value: dimension,
            cap: options.dimension_cap,
        });
    }
    let default_outcomes = match &options.default_outcomes {
        Some(d) => {
            if d.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: d.len() });
            }
            for (r, &i) in d.iter().enumerate() {
                if i >= counts[r] {
                    return Err(Error::UnknownOutcome {
                        measurement: schema.measurement(r).name.clone(),
                        outcome: i.to_string(),
                    });
                }
            }
            d.clone()
        }
        None => counts.iter().map(|n| n - 1).collect(),
    };
    // last measurement varies fastest, matching the vertex order
    let mut strides = vec![1; m];
    for r in (0..m.saturating_sub(1)).rev() {
        strides[r] = strides[r + 1] * counts[r + 1];
    }

    let mut projectors: Vec<Vec<Vec<usize>>> = counts.iter().map(|&n| vec![Vec::new(); n]).collect();
    for (theta, assignment) in vertices.assignments.iter().enumerate() {
        let offset = theta * block_size;
        for tuple in 0..block_size {
            for r in 0..m {
                let j = (tuple / strides[r]) % counts[r];
                let owner = if j == assignment[r] {
                    Some(j)
                } else if options.absorb_complement {
                    Some(default_outcomes[r])
                } else {
                    None
                };
                if let Some(i) = owner {
                    projectors[r][i].push(offset + tuple);
                }
            }
        }
    }
    Ok(QuantumRep {
        schema: schema.clone(),
        coords: schema.coordinates()?,
        vertices: vertices.clone(),
        counts,
        strides,
        block_size,
        default_outcomes,
        projectors,
    })
}

/// Sparse real amplitudes over the global basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeVector {
    pub dimension: usize,
    pub amplitudes: BTreeMap<usize, f64>,
}

impl AmplitudeVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.values().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn support_size(&self) -> usize {
        self.amplitudes.values().filter(|a| **a != 0.0).count()
    }

    /// Largest coordinate difference.
    pub fn distance(&self, other: &AmplitudeVector) -> f64 {
        let keys: std::collections::BTreeSet<_> = self.amplitudes.keys().chain(other.amplitudes.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let a = self.amplitudes.get(k).copied().unwrap_or(0.0);
                let b = other.amplitudes.get(k).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl QuantumRep {
    pub fn dimension(&self) -> usize {
        self.vertices.len() * self.block_size
    }

    pub fn num_blocks(&self) -> usize {
        self.vertices.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn default_outcomes(&self) -> &[usize] {
        &self.default_outcomes
    }

    pub fn schema(&self) -> &MeasurementSchema {
        &self.schema
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// Basis indices of `E_i^r`.
    pub fn projector(&self, r: usize, i: usize) -> &[usize] {
        &self.projectors[r][i]
    }

    /// `(θ, tuple)` of a global basis index.
    pub fn split_index(&self, index: usize) -> (usize, Vec<usize>) {
        let theta = index / self.block_size;
        let tuple = index % self.block_size;
        let digits = (0..self.counts.len())
            .map(|r| (tuple / self.strides[r]) % self.counts[r])
            .collect();
        (theta, digits)
    }

    fn in_projector(&self, r: usize, i: usize, index: usize) -> bool {
        self.projectors[r][i].binary_search(&index).is_ok()
    }

    /// Basis index of block θ's own tuple.
    pub fn diagonal_index(&self, theta: usize) -> usize {
        let a = &self.vertices.assignments[theta];
        theta * self.block_size + a.iter().zip(&self.strides).map(|(j, s)| j * s).sum::<usize>()
    }

    /// `Ψ = Σ_θ √λ_θ ψ_θ` with `ψ_θ` the basis vector of block θ's own tuple.
    pub fn state_vector(&self, lambda: &SimplexWeights) -> Result<AmplitudeVector> {
        if lambda.len() != self.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vertices.len(),
                got: lambda.len(),
            });
        }
        let amplitudes = lambda
            .0
            .iter()
            .enumerate()
            .filter(|(_, l)| **l > 0.0)
            .map(|(theta, l)| (self.diagonal_index(theta), l.sqrt()))
            .collect();
        Ok(AmplitudeVector {
            dimension: self.dimension(),
            amplitudes,
        })
    }

    /// The same map viewed as a bijection from the simplex onto the
    /// nonnegative part of the span of the `ψ_θ`.
    pub fn o_map(&self, lambda: &SimplexWeights) -> Result<AmplitudeVector> {
        self.state_vector(lambda)
    }

    /// Inverse of [`o_map`](Self::o_map): squared amplitudes per block.
    pub fn weights_of(&self, psi: &AmplitudeVector) -> SimplexWeights {
        let mut w = vec![0.0; self.vertices.len()];
        for (&k, a) in &psi.amplitudes {
            w[k / self.block_size] += a * a;
        }
        SimplexWeights(w)
    }

    /// `tr(P_Ψ E)` for `E` the meet of the outcome projectors in `outcomes`.
    pub fn trace_probability(&self, psi: &AmplitudeVector, outcomes: OutcomeSet) -> Result<f64> {
        if outcomes.is_empty() {
            return Err(Error::UnknownCoordinate("{}".into()));
        }
        if outcomes.iter().any(|b| b >= self.schema.num_outcomes()) {
            return Err(Error::UnknownCoordinate(format!("{:#b}", outcomes.0)));
        }
        let ids: Vec<_> = outcomes.iter().map(|b| self.schema.outcome_at(b)).collect();
        Ok(psi
            .amplitudes
            .iter()
            .filter(|(&k, _)| ids.iter().all(|id| self.in_projector(id.measurement, id.outcome, k)))
            .map(|(_, a)| a * a)
            .sum::<f64>()
            + 0.0)
    }

    /// Traces of every coordinate, in coordinate order.
    pub fn trace_state(&self, psi: &AmplitudeVector) -> Result<Vec<f64>> {
        self.coords
            .coords()
            .iter()
            .map(|c| self.trace_probability(psi, c.outcomes))
            .collect()
    }

    pub fn observable(&self, r: usize) -> Result<Observable> {
        let m = self.schema.measurement(r);
        let labels = m.values.clone().ok_or_else(|| Error::MissingLabels(m.name.clone()))?;
        Ok(Observable {
            measurement: r,
            name: m.name.clone(),
            labels,
            projectors: self.projectors[r].clone(),
        })
    }

    /// `Σ_i α_i tr(P_Ψ E_i)`.
    pub fn expectation(&self, psi: &AmplitudeVector, obs: &Observable) -> f64 {
        obs.labels
            .iter()
            .zip(&obs.projectors)
            .map(|(alpha, proj)| {
                alpha
                    * psi
                        .amplitudes
                        .iter()
                        .filter(|(k, _)| proj.binary_search(k).is_ok())
                        .map(|(_, a)| a * a)
                        .sum::<f64>()
            })
            .sum()
    }

    /// Dense `dimension × dimension` matrix of `E_i^r`.
    pub fn dense_projector(&self, r: usize, i: usize) -> Vec<Vec<f64>> {
        let n = self.dimension();
        let mut m = vec![vec![0.0; n]; n];
        for &k in &self.projectors[r][i] {
            m[k][k] = 1.0;
        }
        m
    }

    pub fn manifest(&self) -> Manifest {
        let s = &self.schema;
        Manifest {
            dimension: self.dimension(),
            block_size: self.block_size,
            blocks: (0..self.vertices.len())
                .map(|theta| Block {
                    theta,
                    assignment: s.assignment_label(&self.vertices.assignments[theta]),
                    offset: theta * self.block_size,
                    state_index: self.diagonal_index(theta),
                })
                .collect(),
            default_outcomes: (0..self.counts.len())
                .map(|r| {
                    let m = s.measurement(r);
                    (m.name.clone(), m.outcomes[self.default_outcomes[r]].clone())
                })
                .collect(),
            projectors: (0..self.counts.len())
                .flat_map(|r| {
                    (0..self.counts[r]).map(move |i| {
                        let id = crate::schema::OutcomeId { measurement: r, outcome: i };
                        (s.outcome_label(id), self.projectors[r][i].clone())
                    })
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub theta: usize,
    pub assignment: String,
    pub offset: usize,
    pub state_index: usize,
}

/// JSON export of a representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dimension: usize,
    pub block_size: usize,
    pub blocks: Vec<Block>,
    pub default_outcomes: BTreeMap<String, String>,
    pub projectors: BTreeMap<String, Vec<usize>>,
}

/// `A_r = Σ_i α_i E_i^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub measurement: usize,
    pub name: String,
    pub labels: Vec<f64>,
    pub projectors: Vec<Vec<usize>>,
}

impl Observable {
    /// Eigenvalues: the labels of outcomes with a nonzero eigenspace.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .labels
            .iter()
            .zip(&self.projectors)
            .filter(|(_, p)| !p.is_empty())
            .map(|(l, _)| *l)
            .collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }

    /// `f(A_r)`: same eigenspaces, labels mapped by `f`.
    pub fn relabel(&self, f: impl Fn(f64) -> f64) -> Result<Observable> {
        let labels: Vec<f64> = self.labels.iter().map(|&x| f(x)).collect();
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::NonInjectiveRelabel(self.name.clone()));
            }
        }
        Ok(Observable { labels, ..self.clone() })
    }

    pub fn dense(&self, dimension: usize) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; dimension]; dimension];
        for (alpha, proj) in self.labels.iter().zip(&self.projectors) {
            for &k in proj {
                m[k][k] = *alpha;
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepCertificate {
    /// Projectors of one measurement never share a basis index.
    pub disjoint: bool,
    /// Projectors of one measurement cover the whole basis.
    pub covering: bool,
    pub samples: usize,
    /// `max |tr(P_Ψ E_C) − Z_C|` over samples and coordinates.
    pub max_deviation: f64,
    pub passed: bool,
}

/// Exact partition checks plus trace-versus-state agreement on random
/// weights.
pub fn verify_representation(rep: &QuantumRep, samples: usize, seed: u64) -> Result<RepCertificate> {
    let n = rep.dimension();
    let mut disjoint = true;
    let mut covering = true;
    for proj in &rep.projectors {
        let mut hits = vec![0u32; n];
        for set in proj {
            for &k in set {
                hits[k] += 1;
            }
        }
        disjoint &= hits.iter().all(|&h| h <= 1);
        covering &= hits.iter().all(|&h| h >= 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..samples {
        let lambda = random_weights(&mut rng, rep.vertices.len());
        let z = decompose::recompose(&rep.vertices, &lambda)?;
        let psi = rep.state_vector(&lambda)?;
        for (t, zc) in rep.trace_state(&psi)?.iter().zip(z.iter()) {
            max_deviation = max_deviation.max((t - zc).abs());
        }
    }
    Ok(RepCertificate {
        disjoint,
        covering,
        samples,
        max_deviation,
        passed: disjoint && covering && max_deviation <= EXACTNESS_TOL,
    })
}

/// Uniform draw from the simplex.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SimplexWeights {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    SimplexWeights(e.into_iter().map(|x| x / total).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiSample {
    pub t: f64,
    pub z: Vec<f64>,
    pub psi: Option<AmplitudeVector>,
    pub norm_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiPath {
    pub samples: Vec<PsiSample>,
    pub max_norm_residual: f64,
    /// `max |Ψ(t+s) − G_s(Ψ(t))|` over consecutive grid points, for group
    /// flows.
    pub group_residual: Option<f64>,
}

/// `Ψ(t) = O(σ(Z(t)))` along a flow.
pub fn represent_dynamics(rep: &QuantumRep, flow: &Flow, z0: &[f64], grid: &[f64]) -> Result<PsiPath> {
    let lift = |z: &[f64]| -> Result<Option<AmplitudeVector>> {
        match decompose::max_entropy_section(&rep.vertices, z) {
            Ok(s) => rep.o_map(&s.weights).map(Some),
            Err(Error::Infeasible) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let path = flow.trajectory(z0, grid)?;
    let mut samples = Vec::with_capacity(grid.len());
    let mut max_norm_residual: f64 = 0.0;
    for (&t, z) in grid.iter().zip(path) {
        let psi = lift(&z)?;
        let norm_residual = psi.as_ref().map(|p| (p.norm() - 1.0).abs());
        if let Some(r) = norm_residual {
            max_norm_residual = max_norm_residual.max(r);
        }
        samples.push(PsiSample { t, z, psi, norm_residual });
    }
    let group_residual = match flow {
        Flow::Group(f) => {
            let mut worst: f64 = 0.0;
            for pair in samples.windows(2) {
                let (Some(a), Some(b)) = (&pair[0].psi, &pair[1].psi) else {
                    continue;
                };
                // G_s = O ∘ σ ∘ F_s ∘ D ∘ O⁻¹
                let z = decompose::recompose(&rep.vertices, &rep.weights_of(a))?;
                let moved = f.evolve(pair[1].t - pair[0].t, &z)?;
                if let Some(g) = lift(&moved)? {
                    worst = worst.max(g.distance(b));
                }
            }
            Some(worst)
        }
        Flow::Trajectory(_) => None,
    };
    Ok(PsiPath {
        samples,
        max_norm_residual,
        group_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CoinFlow;
    use crate::fixtures;
    use crate::statespace::StateSpace;

    fn rep(s: MeasurementSchema) -> (StateSpace, QuantumRep) {
        let sp = StateSpace::new(s).unwrap();
        let q = build_representation(&sp.schema, &sp.vertices).unwrap();
        (sp, q)
    }

    #[test]
    fn coin_blocks() {
        let (_, q) = rep(fixtures::coin());
        assert_eq!(q.dimension(), 4);
        // block 0 is the H vertex; its T tuple goes to the default outcome T
        assert_eq!(q.projector(0, 0), &[0]);
        assert_eq!(q.projector(0, 1), &[1, 2, 3]);
        let (_, q) = rep(fixtures::two_by_two());
        assert_eq!(q.dimension(), 16);
    }

    #[test]
    fn coin_traces() {
        let (_, q) = rep(fixtures::coin());
        let psi = q.state_vector(&SimplexWeights(vec![0.8, 0.2])).unwrap();
        assert_eq!(psi.amplitudes[&0], 0.8f64.sqrt());
        assert_eq!(psi.amplitudes[&3], 0.2f64.sqrt());
        assert!((q.trace_probability(&psi, OutcomeSet::singleton(0)).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(q.trace_probability(&psi, OutcomeSet(0b11)).unwrap(), 0.0);
        let obs = q.observable(0).unwrap();
        assert!((q.expectation(&psi, &obs) - 0.8).abs() < 1e-15);
        let f = obs.relabel(|x| 2.0 * x + 1.0).unwrap();
        assert!((q.expectation(&psi, &f) - 2.6).abs() < 1e-15);
        assert!(matches!(obs.relabel(|_| 1.0), Err(Error::NonInjectiveRelabel(_))));
        assert_eq!(obs.spectrum(), vec![0.0, 1.0]);
    }

    #[test]
    fn uniform_pair_trace() {
        let (sp, q) = rep(fixtures::two_by_two());
        let psi = q.state_vector(&SimplexWeights::uniform(4)).unwrap();
        assert!(psi.amplitudes.values().all(|a| *a == 0.5));
        let c = sp.schema.atom_of_named_run(&["a", "b"], &[("a", "0"), ("b", "0")]).unwrap();
        assert!((q.trace_probability(&psi, c).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn verifier() {
        for s in [fixtures::coin(), fixtures::chsh(), fixtures::schema_with_counts(&[2, 2, 3], &[])] {
            let (_, q) = rep(s);
            let c = verify_representation(&q, 100, 1).unwrap();
            assert!(c.passed, "{c:?}");
        }
        let sp = StateSpace::new(fixtures::coin()).unwrap();
        let opts = RepOptions {
            absorb_complement: false,
            ..RepOptions::default()
        };
        let q = build_representation_with(&sp.schema, &sp.vertices, &opts).unwrap();
        let c = verify_representation(&q, 10, 1).unwrap();
        assert!(c.disjoint && !c.covering && !c.passed);
    }

    #[test]
    fn dimension_cap() {
        let sp = StateSpace::new(fixtures::chsh()).unwrap();
        let opts = RepOptions {
            dimension_cap: 100,
            ..RepOptions::default()
        };
        assert!(matches!(
            build_representation_with(&sp.schema, &sp.vertices, &opts),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn coin_dynamics_amplitudes() {
        let (_, q) = rep(fixtures::coin());
        let flow = Flow::Group(Box::new(CoinFlow));
        let path = represent_dynamics(&q, &flow, &[0.5, 0.5, 0.0], &[0.0, 2.0]).unwrap();
        let psi = path.samples[1].psi.as_ref().unwrap();
        assert!((psi.amplitudes[&0] - 0.27f64.sqrt()).abs() < 0.01);
        assert!((psi.amplitudes[&3] - 0.73f64.sqrt()).abs() < 0.01);
        assert!(path.max_norm_residual < 1e-12);
        assert!(path.group_residual.unwrap() < 1e-9);
    }
}
