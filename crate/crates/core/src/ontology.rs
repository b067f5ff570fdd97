//! Which kind of hidden-variable story a state admits: none beyond its own
//! contexts (`Case1`), a no-signaling one (`Case2`), or a mixture of
//! deterministic truth assignments (`Case3`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decompose::{self, Decomposition, Separation};
use crate::empirical::StateVector;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::schema::CoordKind;
use crate::statespace::StateSpace;

pub const NO_SIGNALING_TOL: f64 = 1e-9;
pub const DEFAULT_MEMBERSHIP_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingViolation {
    /// The coordinate being marginalized to, e.g. `{a=0}`.
    pub coordinate: String,
    /// The larger context summed over, e.g. `a,b`.
    pub context: Vec<String>,
    /// `Σ Z_D − Z_C`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoSignaling {
    pub passed: bool,
    pub checks: usize,
    pub max_residual: f64,
    pub violations: Vec<SignalingViolation>,
}

/// Every coordinate equals the marginal of each larger possible context:
/// `Σ_{D ⊇ C, meas(D) = T} Z_D = Z_C` for singles and free conjunctions
/// `C` and possible sets `T ⊋ meas(C)`.
pub fn check_no_signaling(space: &StateSpace, z: &[f64]) -> Result<NoSignaling> {
    if z.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: z.len(),
        });
    }
    let coords = &space.coords;
    let mut report = NoSignaling {
        passed: true,
        checks: 0,
        max_residual: 0.0,
        violations: Vec::new(),
    };
    let contexts = coords.possible_sets();
    for (i, c) in coords.coords().iter().enumerate() {
        if c.kind == CoordKind::ZeroForced {
            continue;
        }
        for &t in contexts {
            if t == c.measurements || !c.measurements.is_subset(t) {
                continue;
            }
            let sum: f64 = coords
                .free_over(t)
                .into_iter()
                .filter(|&k| c.outcomes.is_subset(coords.get(k).outcomes))
                .map(|k| z[k])
                .sum();
            let residual = sum - z[i];
            report.checks += 1;
            report.max_residual = report.max_residual.max(residual.abs());
            if residual.abs() > NO_SIGNALING_TOL {
                report.passed = false;
                report.violations.push(SignalingViolation {
                    coordinate: space.schema.outcome_set_label(c.outcomes),
                    context: space.schema.measurement_names(t),
                    residual,
                });
            }
        }
    }
    Ok(report)
}

/// Answer of the classical-membership LP.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    /// Weights over truth assignments (keyed by assignment label, zero
    /// weights omitted) reproducing every coordinate.
    Classical {
        witness: BTreeMap<String, f64>,
        weights: Vec<f64>,
        residual: f64,
    },
    /// A linear functional on the coordinates whose value on the state
    /// exceeds its maximum over all truth assignments.
    NonClassical { certificate: Separation },
}

impl Membership {
    pub fn is_classical(&self) -> bool {
        matches!(self, Membership::Classical { .. })
    }
}

/// Is `z` a mixture of truth assignments (one outcome per measurement)?
/// Such assignments are exactly the deterministic vertices.
pub fn classical_membership(space: &StateSpace, z: &[f64], cap: usize) -> Result<Membership> {
    let m = space.schema.num_measurements();
    if m > cap {
        return Err(Error::CapExceeded {
            what: "measurements for classical membership",
            value: m,
            cap,
        });
    }
    match decompose::decompose_feasible(&space.vertices, z)? {
        Decomposition::Feasible { weights, residual } => {
            let labels = space.vertices.labels(&space.schema);
            let witness = labels
                .into_iter()
                .zip(&weights.0)
                .filter(|(_, w)| **w > 0.0)
                .map(|(l, w)| (l, *w))
                .collect();
            Ok(Membership::Classical {
                witness,
                weights: weights.0,
                residual,
            })
        }
        Decomposition::Infeasible { certificate } => Ok(Membership::NonClassical {
            certificate: max_violation(space, z).unwrap_or(certificate),
        }),
    }
}

/// The most violated inequality `c·w ≤ t` with coefficients in `[−1, 1]`
/// on the free conjunction coordinates.
fn max_violation(space: &StateSpace, z: &[f64]) -> Option<Separation> {
    let free = space.coords.free();
    let k = free.len();
    // variables: c (k entries, free sign) then t (free)
    let mut lp = LinearProgram::new(k + 1);
    lp.free = vec![true; k + 1];
    for (j, &c) in free.iter().enumerate() {
        lp.objective[j] = -z[c];
    }
    lp.objective[k] = 1.0;
    for w in &space.vertices.points {
        let mut row: Vec<f64> = free.iter().map(|&c| w[c]).collect();
        row.push(-1.0);
        lp.add(row, Relation::Le, 0.0);
    }
    for j in 0..k {
        let mut row = vec![0.0; k + 1];
        row[j] = 1.0;
        lp.add(row.clone(), Relation::Le, 1.0);
        lp.add(row, Relation::Ge, -1.0);
    }
    let LpOutcome::Optimal(sol) = lp.solve() else {
        return None;
    };
    let mut normal = vec![0.0; z.len()];
    for (j, &c) in free.iter().enumerate() {
        // snap LP noise so certificates print cleanly
        let v = sol.x[j];
        normal[c] = if (v - v.round()).abs() < 1e-9 { v.round() } else { v };
    }
    let sep = Separation::with_normal(&space.vertices, z, normal);
    (sep.gap() > 1e-9).then_some(sep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Contextual: some marginal depends on the context.
    Case1,
    /// No-signaling but not a mixture of truth assignments.
    Case2,
    /// Mixture of deterministic truth assignments.
    Case3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OntologyReport {
    pub case: Case,
    pub no_signaling: NoSignaling,
    pub classical_membership: Membership,
}

pub fn classify(space: &StateSpace, z: &[f64]) -> Result<OntologyReport> {
    classify_with_cap(space, z, DEFAULT_MEMBERSHIP_CAP)
}

pub fn classify_with_cap(space: &StateSpace, z: &[f64], cap: usize) -> Result<OntologyReport> {
    let no_signaling = check_no_signaling(space, z)?;
    let classical_membership = classical_membership(space, z, cap)?;
    let case = if classical_membership.is_classical() {
        Case::Case3
    } else if no_signaling.passed {
        Case::Case2
    } else {
        Case::Case1
    };
    Ok(OntologyReport {
        case,
        no_signaling,
        classical_membership,
    })
}

/// Coordinates reproduced by a witness: `Σ_θ p_θ w_θ`.
pub fn witness_marginals(space: &StateSpace, weights: &[f64]) -> StateVector {
    let mut z = vec![0.0; space.dim()];
    for (w, p) in space.vertices.points.iter().zip(weights) {
        for (zi, wi) in z.iter_mut().zip(w) {
            *zi += p * wi;
        }
    }
    StateVector(z)
}

/// The CHSH functional for two parties with two binary measurements each:
/// `+1` on agreeing and `−1` on disagreeing pair coordinates, with signs
/// flipped in `anti_context`. Its maximum over truth assignments is 2.
pub fn chsh_functional(space: &StateSpace, anti_context: (&str, &str)) -> Result<Vec<f64>> {
    let schema = &space.schema;
    let a = schema
        .measurement_index(anti_context.0)
        .ok_or_else(|| Error::UnknownMeasurement(anti_context.0.into()))?;
    let b = schema
        .measurement_index(anti_context.1)
        .ok_or_else(|| Error::UnknownMeasurement(anti_context.1.into()))?;
    let mut normal = vec![0.0; space.dim()];
    for k in space.coords.free() {
        let c = space.coords.get(k);
        if c.outcomes.len() != 2 {
            continue;
        }
        let ids: Vec<_> = c.outcomes.iter().map(|bit| schema.outcome_at(bit)).collect();
        let agree = ids[0].outcome == ids[1].outcome;
        let flip = ids[0].measurement == a && ids[1].measurement == b;
        normal[k] = if agree != flip { 1.0 } else { -1.0 };
    }
    Ok(normal)
}

/// `max_θ c·w_θ`.
pub fn assignment_maximum(space: &StateSpace, normal: &[f64]) -> f64 {
    space
        .vertices
        .points
        .iter()
        .map(|w| linalg::dot(normal, w))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::statespace::StateSpace;

    fn space(s: crate::schema::MeasurementSchema) -> StateSpace {
        StateSpace::new(s).unwrap()
    }

    #[test]
    fn no_signaling_examples() {
        let sp = space(fixtures::two_by_two());
        let z = fixtures::half_singles_state(&sp.coords, &sp.schema, |_, i, _, j| if i == j { 0.5 } else { 0.0 });
        assert!(check_no_signaling(&sp, &z).unwrap().passed);

        let mm = fixtures::marginal_mismatch_state(&sp.schema, &sp.coords);
        let r = check_no_signaling(&sp, &mm).unwrap();
        assert!(!r.passed);
        let first = &r.violations[0];
        assert_eq!(first.coordinate, "{a=0}");
        assert!((first.residual - 0.1).abs() < 1e-12);

        let chsh = space(fixtures::chsh());
        let pr = fixtures::pr_box_state(&chsh.schema, &chsh.coords);
        let r = check_no_signaling(&chsh, &pr).unwrap();
        assert!(r.passed);
        // each of 8 singles sits in 2 contexts
        assert_eq!(r.checks, 16);
    }

    #[test]
    fn vertices_are_classical() {
        let sp = space(fixtures::chsh());
        for (k, w) in sp.vertices.points.iter().enumerate() {
            let r = classify(&sp, w).unwrap();
            assert_eq!(r.case, Case::Case3);
            let Membership::Classical { weights, .. } = r.classical_membership else { unreachable!() };
            assert!((weights[k] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn correlated_chsh_state_is_classical() {
        let sp = space(fixtures::chsh());
        let z = fixtures::chsh_correlated_state(&sp.schema, &sp.coords);
        let Membership::Classical { witness, weights, .. } = classical_membership(&sp, &z, 16).unwrap() else {
            panic!("not classical")
        };
        assert_eq!(witness.len(), 2);
        assert!(linalg::max_abs_diff(&witness_marginals(&sp, &weights).0, &z) < 1e-9);
    }

    #[test]
    fn pr_box_is_case_two_with_chsh_violation() {
        let sp = space(fixtures::chsh());
        let pr = fixtures::pr_box_state(&sp.schema, &sp.coords);
        let r = classify(&sp, &pr).unwrap();
        assert_eq!(r.case, Case::Case2);
        let Membership::NonClassical { certificate } = &r.classical_membership else { unreachable!() };
        assert!(certificate.value > certificate.bound + 1e-9);
        assert!((assignment_maximum(&sp, &certificate.normal) - certificate.bound).abs() < 1e-12);
        assert!((certificate.value - 4.0).abs() < 1e-9);
        assert!((certificate.bound - 2.0).abs() < 1e-9);

        let chsh = chsh_functional(&sp, ("A2", "B2")).unwrap();
        assert!((linalg::dot(&chsh, &pr) - 4.0).abs() < 1e-12);
        assert!((assignment_maximum(&sp, &chsh) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_mismatch_is_case_one() {
        let sp = space(fixtures::two_by_two());
        let mm = fixtures::marginal_mismatch_state(&sp.schema, &sp.coords);
        assert_eq!(classify(&sp, &mm).unwrap().case, Case::Case1);
    }

    #[test]
    fn membership_cap() {
        let sp = space(fixtures::chsh());
        let z = fixtures::chsh_correlated_state(&sp.schema, &sp.coords);
        assert!(matches!(
            classical_membership(&sp, &z, 3),
            Err(Error::CapExceeded { .. })
        ));
    }
}
