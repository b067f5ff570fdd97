//! Barycentric coordinates over the deterministic vertices: the map
//! `λ ↦ Σ λ_θ w_θ`, feasibility of its preimage, and the maximal-entropy
//! choice of preimage.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::empirical::StateVector;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::statespace::VertexSet;

/// Residual allowed between `Σ λ w` and the target state.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// A vertex weight whose maximum over the preimage is below this is
/// treated as forced to zero.
pub const SUPPORT_TOL: f64 = 1e-9;
pub const NEWTON_GRAD_TOL: f64 = 1e-13;
pub const NEWTON_MAX_ITER: usize = 200;

/// Weights `λ_θ` over a [`VertexSet`], in vertex order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexWeights(pub Vec<f64>);

impl SimplexWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Self(v)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `−Σ λ ln λ`.
    pub fn entropy(&self) -> f64 {
        entropy(&self.0)
    }

    /// Number of strictly positive weights.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|w| **w > 0.0).count()
    }
}

pub fn entropy(weights: &[f64]) -> f64 {
    -weights.iter().filter(|w| **w > 0.0).map(|w| w * w.ln()).sum::<f64>()
}

/// `Σ λ_θ w_θ`.
pub fn recompose(vertices: &VertexSet, lambda: &SimplexWeights) -> Result<StateVector> {
    if lambda.len() != vertices.len() {
        return Err(Error::DimensionMismatch {
            expected: vertices.len(),
            got: lambda.len(),
        });
    }
    let mut z = vec![0.0; vertices.dim()];
    for (w, &l) in vertices.points.iter().zip(&lambda.0) {
        if l == 0.0 {
            continue;
        }
        for (zi, wi) in z.iter_mut().zip(w) {
            *zi += l * wi;
        }
    }
    Ok(StateVector(z))
}

/// A hyperplane separating a state from every deterministic vertex:
/// `normal·w ≤ bound` for all vertices, `normal·Z = value > bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub normal: Vec<f64>,
    pub bound: f64,
    pub value: f64,
}

impl Separation {
    pub fn gap(&self) -> f64 {
        self.value - self.bound
    }

    fn from_farkas(vertices: &VertexSet, z: &[f64], rows: &[usize], farkas: &[f64]) -> Self {
        let mut normal = vec![0.0; z.len()];
        for (k, &c) in rows.iter().enumerate() {
            normal[c] = farkas[k];
        }
        Self::with_normal(vertices, z, normal)
    }

    pub(crate) fn with_normal(vertices: &VertexSet, z: &[f64], normal: Vec<f64>) -> Self {
        let bound = vertices
            .points
            .iter()
            .map(|w| linalg::dot(&normal, w))
            .fold(f64::NEG_INFINITY, f64::max);
        let value = linalg::dot(&normal, z);
        Self { normal, bound, value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Decomposition {
    Feasible { weights: SimplexWeights, residual: f64 },
    Infeasible { certificate: Separation },
}

impl Decomposition {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Decomposition::Feasible { .. })
    }
}

fn check_dim(vertices: &VertexSet, z: &[f64]) -> Result<()> {
    if z.len() != vertices.dim() {
        return Err(Error::DimensionMismatch {
            expected: vertices.dim(),
            got: z.len(),
        });
    }
    Ok(())
}

/// Coordinates that carry a constraint: some vertex or the state is
/// nonzero there.
fn active_coordinates(vertices: &VertexSet, z: &[f64]) -> Vec<usize> {
    (0..z.len())
        .filter(|&c| z[c] != 0.0 || vertices.points.iter().any(|w| w[c] != 0.0))
        .collect()
}

fn preimage_lp(vertices: &VertexSet, z: &[f64], rows: &[usize]) -> LinearProgram {
    let n = vertices.len();
    let mut lp = LinearProgram::new(n);
    for &c in rows {
        lp.add(vertices.points.iter().map(|w| w[c]).collect(), Relation::Eq, z[c]);
    }
    lp.add(vec![1.0; n], Relation::Eq, 1.0);
    lp
}

fn residual(vertices: &VertexSet, lambda: &[f64], z: &[f64]) -> f64 {
    let mut r: f64 = 0.0;
    for c in 0..z.len() {
        let v: f64 = vertices.points.iter().zip(lambda).map(|(w, l)| w[c] * l).sum();
        r = r.max((v - z[c]).abs());
    }
    r
}

fn clean(mut x: Vec<f64>) -> Vec<f64> {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x
}

/// Finds one `λ` in the simplex with `Σ λ w = Z`, or a separating
/// hyperplane built from the phase-1 dual ray.
pub fn decompose_feasible(vertices: &VertexSet, z: &[f64]) -> Result<Decomposition> {
    check_dim(vertices, z)?;
    let rows = active_coordinates(vertices, z);
    match preimage_lp(vertices, z, &rows).solve() {
        LpOutcome::Optimal(sol) => {
            let weights = clean(sol.x);
            let res = residual(vertices, &weights, z);
            if res > FEASIBILITY_TOL {
                return Err(Error::Numerical(format!("decomposition residual {res:.3e}")));
            }
            Ok(Decomposition::Feasible {
                weights: SimplexWeights(weights),
                residual: res,
            })
        }
        LpOutcome::Infeasible { farkas } => Ok(Decomposition::Infeasible {
            certificate: Separation::from_farkas(vertices, z, &rows, &farkas),
        }),
        LpOutcome::Unbounded => Err(Error::Lp("feasibility problem reported unbounded".into())),
    }
}

/// Vertices that carry positive weight in some point of the preimage,
/// plus one feasible point. `None` when the preimage is empty.
pub fn preimage_support(vertices: &VertexSet, z: &[f64]) -> Result<Option<(Vec<usize>, Vec<f64>)>> {
    check_dim(vertices, z)?;
    let rows = active_coordinates(vertices, z);
    let base = preimage_lp(vertices, z, &rows);
    let feasible = match base.solve() {
        LpOutcome::Optimal(sol) => clean(sol.x),
        LpOutcome::Infeasible { .. } => return Ok(None),
        LpOutcome::Unbounded => return Err(Error::Lp("feasibility problem reported unbounded".into())),
    };
    let n = vertices.len();
    let mut in_support: Vec<bool> = feasible.iter().map(|&v| v > SUPPORT_TOL).collect();
    let mut interior = feasible.clone();
    let mut count = 1.0;
    for theta in 0..n {
        if in_support[theta] {
            continue;
        }
        let mut lp = base.clone();
        lp.objective[theta] = -1.0;
        if let LpOutcome::Optimal(sol) = lp.solve() {
            if sol.x[theta] > SUPPORT_TOL {
                let x = clean(sol.x);
                for (k, v) in x.iter().enumerate() {
                    if *v > SUPPORT_TOL {
                        in_support[k] = true;
                    }
                }
                // running average stays feasible and moves toward the
                // relative interior
                for (a, b) in interior.iter_mut().zip(&x) {
                    *a = (*a * count + b) / (count + 1.0);
                }
                count += 1.0;
            }
        }
    }
    let support = (0..n).filter(|&k| in_support[k]).collect();
    Ok(Some((support, interior)))
}

/// Dimension of the preimage polytope, or `None` when it is empty.
pub fn preimage_dimension(vertices: &VertexSet, z: &[f64]) -> Result<Option<usize>> {
    let Some((support, _)) = preimage_support(vertices, z)? else {
        return Ok(None);
    };
    let mut rows: Vec<Vec<f64>> = (0..z.len())
        .map(|c| support.iter().map(|&k| vertices.points[k][c]).collect())
        .collect();
    rows.push(vec![1.0; support.len()]);
    Ok(Some(support.len() - linalg::rank(&rows, support.len())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxEntropy {
    pub weights: SimplexWeights,
    pub entropy: f64,
    /// Vertices allowed positive weight.
    pub support: Vec<usize>,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// `max |Σ λ w − Z|`.
    pub feasibility_residual: f64,
    /// Distance of `ln λ` (on the support) from the span of the constraint
    /// rows; zero at the entropy maximizer.
    pub kkt_residual: f64,
}

/// The maximal-entropy point of the preimage of `z`.
///
/// Weights forced to zero are removed first by per-vertex LPs. On the
/// remaining support the maximizer is `λ ∝ exp(Vᵀy)` where the rows of `V`
/// are an orthonormal basis of the centered constraint rows; `y` minimizes
/// the convex dual `log Σ exp(Vᵀy) − y·t` by damped Newton steps.
pub fn max_entropy_section(vertices: &VertexSet, z: &[f64]) -> Result<MaxEntropy> {
    let (support, start) = preimage_support(vertices, z)?.ok_or(Error::Infeasible)?;
    let n = support.len();

    // centered constraint rows on the support
    let mean_free = DMatrix::from_fn(z.len(), n, |c, j| {
        let col_mean = support.iter().map(|&k| vertices.points[k][c]).sum::<f64>() / n as f64;
        vertices.points[support[j]][c] - col_mean
    });
    let basis = linalg::row_space_basis(&mean_free);
    let q = basis.len();
    let v = DMatrix::from_fn(q, n, |i, j| basis[i][j]);
    let start_s = DVector::from_iterator(n, support.iter().map(|&k| start[k]));
    let target = &v * &start_s;

    let softmax = |y: &DVector<f64>| -> (DVector<f64>, f64) {
        let s = v.transpose() * y;
        let max = s.max();
        let e = s.map(|x| (x - max).exp());
        let sum = e.sum();
        (e / sum, max + sum.ln())
    };
    let dual = |y: &DVector<f64>| -> f64 { softmax(y).1 - y.dot(&target) };

    let mut y = DVector::zeros(q);
    let mut iterations = 0;
    let mut grad_norm = 0.0;
    if q > 0 {
        let grad_at = |y: &DVector<f64>| -> (DVector<f64>, DVector<f64>) {
            let (lam, _) = softmax(y);
            let g = &v * &lam - &target;
            (lam, g)
        };
        loop {
            let (lam, grad) = grad_at(&y);
            grad_norm = grad.norm();
            if grad_norm <= NEWTON_GRAD_TOL || iterations >= NEWTON_MAX_ITER {
                break;
            }
            let cov = DMatrix::from_diagonal(&lam) - &lam * lam.transpose();
            let hess = &v * cov * v.transpose();
            let step = match hess.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                // Hessian lost definiteness numerically; fall back to gradient
                None => -grad.clone(),
            };
            let full = &y + &step;
            if grad_norm < 1e-6 {
                // quadratic region: dual values differ below rounding, so
                // judge the full step by its gradient instead
                if grad_at(&full).1.norm() < grad_norm {
                    y = full;
                    iterations += 1;
                    continue;
                }
            }
            let f0 = dual(&y);
            let slope = grad.dot(&step);
            let mut alpha = 1.0;
            let mut next = full;
            while dual(&next) > f0 + 1e-4 * alpha * slope && alpha > 1e-12 {
                alpha *= 0.5;
                next = &y + &step * alpha;
            }
            y = next;
            iterations += 1;
        }
    }
    let (lam_s, _) = softmax(&y);
    let mut weights = vec![0.0; vertices.len()];
    for (j, &k) in support.iter().enumerate() {
        weights[k] = lam_s[j];
    }
    let feasibility_residual = residual(vertices, &weights, z);
    if grad_norm > 1e-6 || feasibility_residual > FEASIBILITY_TOL {
        return Err(Error::Numerical(format!(
            "max-entropy Newton stalled: gradient {grad_norm:.3e}, residual {feasibility_residual:.3e}"
        )));
    }

    // KKT: ln λ on the support lies in span{rows of W_S, 1}
    let constraint = DMatrix::from_fn(z.len() + 1, n, |c, j| {
        if c < z.len() {
            vertices.points[support[j]][c]
        } else {
            1.0
        }
    });
    let span = linalg::row_space_basis(&constraint);
    let log_l: Vec<f64> = lam_s.iter().map(|l| l.ln()).collect();
    let mut proj = vec![0.0; n];
    for u in &span {
        let c = linalg::dot(u, &log_l);
        for (p, ui) in proj.iter_mut().zip(u) {
            *p += c * ui;
        }
    }
    let scale = log_l.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let kkt_residual = linalg::max_abs_diff(&proj, &log_l) / scale;

    let weights = SimplexWeights(weights);
    Ok(MaxEntropy {
        entropy: weights.entropy(),
        weights,
        support,
        iterations,
        gradient_norm: grad_norm,
        feasibility_residual,
        kkt_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeStep {
    pub t: f64,
    /// `‖σ(Z + tΔ) − σ(Z)‖₁`, or `None` if the probe point has no
    /// decomposition.
    pub distance: Option<f64>,
}

/// Distances between the section at `z` and at `z + tΔ` for each `t`.
pub fn section_continuity_probe(
    vertices: &VertexSet,
    z: &[f64],
    direction: &[f64],
    steps: &[f64],
) -> Result<Vec<ProbeStep>> {
    check_dim(vertices, direction)?;
    let base = max_entropy_section(vertices, z)?;
    steps
        .iter()
        .map(|&t| {
            let moved: Vec<f64> = z.iter().zip(direction).map(|(a, d)| a + t * d).collect();
            match max_entropy_section(vertices, &moved) {
                Ok(s) => Ok(ProbeStep {
                    t,
                    distance: Some(
                        s.weights
                            .0
                            .iter()
                            .zip(&base.weights.0)
                            .map(|(a, b)| (a - b).abs())
                            .sum(),
                    ),
                }),
                Err(Error::Infeasible) => Ok(ProbeStep { t, distance: None }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// `t₀, t₀/2, t₀/4, …` with `count` entries.
pub fn halving_schedule(t0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 / (1u64 << k) as f64).collect()
}
