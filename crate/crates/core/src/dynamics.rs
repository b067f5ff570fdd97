//! Time evolution of states and audits of the group law and of convexity.
//!
//! A [`Flow`] is either a group map `(t, Z) ↦ Z(t)` or a trajectory rule
//! that carries extra internal state because `Z` alone does not fix the
//! future.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose;
use crate::error::{Error, Result};
use crate::linalg;
use crate::statespace::VertexSet;

pub const GROUP_LAW_TOL: f64 = 1e-9;
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const DEFAULT_AUDIT_DRAWS: usize = 50;
pub const DEFAULT_AUDIT_TMAX: f64 = 10.0;

/// A map claimed to satisfy `F_0 = id` and `F_{t+s} = F_s ∘ F_t`.
pub trait GroupFlow {
    fn name(&self) -> &str;
    fn evolve(&self, t: f64, z: &[f64]) -> Result<Vec<f64>>;
    /// A random point of the flow's domain, for audits.
    fn sample_state(&self, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// A rule whose future depends on internal state beyond `Z`.
pub trait TrajectoryFlow {
    fn name(&self) -> &str;
    /// Internal state used when only `Z` is given.
    fn default_internal(&self, z: &[f64]) -> Result<Vec<f64>>;
    /// Evolves internal state by `t`, returning `(Z(t), internal(t))`.
    fn evolve(&self, t: f64, internal: &[f64]) -> Result<(Vec<f64>, Vec<f64>)>;
}

pub enum Flow {
    Group(Box<dyn GroupFlow>),
    Trajectory(Box<dyn TrajectoryFlow>),
}

impl Flow {
    pub fn name(&self) -> &str {
        match self {
            Flow::Group(f) => f.name(),
            Flow::Trajectory(f) => f.name(),
        }
    }

    /// `Z(t)` for each grid time, starting from `z0` at time 0.
    pub fn trajectory(&self, z0: &[f64], grid: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self {
            Flow::Group(f) => grid.iter().map(|&t| f.evolve(t, z0)).collect(),
            Flow::Trajectory(f) => {
                let start = f.default_internal(z0)?;
                grid.iter().map(|&t| f.evolve(t, &start).map(|(z, _)| z)).collect()
            }
        }
    }
}

fn coin_state(z: &[f64]) -> Result<f64> {
    if z.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: z.len() });
    }
    let h = z[0];
    if !(0.2 - 1e-12..=0.8 + 1e-12).contains(&h) {
        return Err(Error::OutsideFlowDomain(format!("z_H = {h}")));
    }
    Ok(h.clamp(0.2, 0.8))
}

/// The logistic coin flow on the segment `0.2 ≤ z_H ≤ 0.8`:
/// `F_t(z_H) = 0.8 − 0.6·u/(u + (1−u)e^{−t})`, `u = (0.8 − z_H)/0.6`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CoinFlow;

impl CoinFlow {
    pub fn heads(t: f64, z_h: f64) -> f64 {
        let u = ((0.8 - z_h) / 0.6).clamp(0.0, 1.0);
        let v = u / (u + (1.0 - u) * (-t).exp());
        0.8 - 0.6 * v
    }
}

impl GroupFlow for CoinFlow {
    fn name(&self) -> &str {
        "coin"
    }

    fn evolve(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        let h = Self::heads(t, coin_state(z)?);
        Ok(vec![h, 1.0 - h, 0.0])
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let h = 0.2 + 0.6 * rng.random::<f64>();
        vec![h, 1.0 - h, 0.0]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityFlow {
    pub dim: usize,
}

impl GroupFlow for IdentityFlow {
    fn name(&self) -> &str {
        "identity"
    }

    fn evolve(&self, _t: f64, z: &[f64]) -> Result<Vec<f64>> {
        Ok(z.to_vec())
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.dim).map(|_| rng.random::<f64>()).collect()
    }
}

/// `Z(t) = c + e^{−rate·t}(Z − c)`: an affine contraction toward `c`.
#[derive(Clone, Debug)]
pub struct ContractionFlow {
    pub center: Vec<f64>,
    pub rate: f64,
}

impl GroupFlow for ContractionFlow {
    fn name(&self) -> &str {
        "contraction"
    }

    fn evolve(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                got: z.len(),
            });
        }
        let k = (-self.rate * t).exp();
        Ok(z.iter().zip(&self.center).map(|(x, c)| c + k * (x - c)).collect())
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.center.iter().map(|c| c + rng.random::<f64>() - 0.5).collect()
    }
}

/// Triangle wave in `z_H` between 0.2 and 0.8 at unit speed. Internal
/// state is `(z_H, direction)` with direction `+1` (up) or `−1` (down).
#[derive(Clone, Copy, Debug, Default)]
pub struct Oscillator;

const LOW: f64 = 0.2;
const HIGH: f64 = 0.8;
const SPAN: f64 = HIGH - LOW;

impl Oscillator {
    /// `(z_H, direction)` after time `t`.
    pub fn step(z_h: f64, direction: f64, t: f64) -> (f64, f64) {
        // position along one period of length 2·SPAN, starting at LOW going up
        let phase = if direction > 0.0 { z_h - LOW } else { SPAN + (HIGH - z_h) };
        let p = (phase + t).rem_euclid(2.0 * SPAN);
        if p < SPAN {
            (LOW + p, 1.0)
        } else {
            (HIGH - (p - SPAN), -1.0)
        }
    }
}

impl TrajectoryFlow for Oscillator {
    fn name(&self) -> &str {
        "oscillator"
    }

    fn default_internal(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![coin_state(z)?, -1.0])
    }

    fn evolve(&self, t: f64, internal: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let [h, dir] = internal else {
            return Err(Error::DimensionMismatch { expected: 2, got: internal.len() });
        };
        let (h, dir) = Self::step(coin_state(&[*h, 1.0 - h, 0.0])?, *dir, t);
        Ok((vec![h, 1.0 - h, 0.0], vec![h, dir]))
    }
}

/// The oscillator forced into a map on `Z` alone by always assuming the
/// downward direction. It is not a group.
#[derive(Clone, Copy, Debug, Default)]
pub struct OscillatorOnState;

impl GroupFlow for OscillatorOnState {
    fn name(&self) -> &str {
        "oscillator-z"
    }

    fn evolve(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        let (h, _) = Oscillator::step(coin_state(z)?, -1.0, t);
        Ok(vec![h, 1.0 - h, 0.0])
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        CoinFlow.sample_state(rng)
    }
}

pub const FLOW_NAMES: [&str; 4] = ["coin", "oscillator", "oscillator-z", "identity"];

/// Flows selectable by name. `dim` sizes the identity flow.
pub fn flow_by_name(name: &str, dim: usize) -> Result<Flow> {
    Ok(match name {
        "coin" => Flow::Group(Box::new(CoinFlow)),
        "oscillator" => Flow::Trajectory(Box::new(Oscillator)),
        "oscillator-z" => Flow::Group(Box::new(OscillatorOnState)),
        "identity" => Flow::Group(Box::new(IdentityFlow { dim })),
        other => {
            return Err(Error::Usage(format!(
                "unknown flow `{other}` (expected one of {})",
                FLOW_NAMES.join(", ")
            )))
        }
    })
}

/// Sampling plan for [`check_group_law`]: every `(t, s)` pair from `grid`
/// plus `draws` random pairs with `|t|, |s| ≤ t_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditSpec {
    pub grid: Vec<f64>,
    pub draws: usize,
    pub t_max: f64,
    pub seed: u64,
}

impl Default for AuditSpec {
    fn default() -> Self {
        Self {
            grid: Vec::new(),
            draws: DEFAULT_AUDIT_DRAWS,
            t_max: DEFAULT_AUDIT_TMAX,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSample {
    pub t: f64,
    pub s: f64,
    pub z: Vec<f64>,
    /// `max |F_{t+s}(Z) − F_s(F_t(Z))|`
    pub composition: f64,
    /// `max |F_{−t}(F_t(Z)) − Z|`
    pub inverse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLawReport {
    pub flow: String,
    pub samples: usize,
    pub max_composition_residual: f64,
    pub max_inverse_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub worst: Option<GroupSample>,
}

pub fn check_group_law(flow: &dyn GroupFlow, spec: &AuditSpec) -> Result<GroupLawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for &t in &spec.grid {
        for &s in &spec.grid {
            pairs.push((t, s));
        }
    }
    for _ in 0..spec.draws {
        let t = spec.t_max * (2.0 * rng.random::<f64>() - 1.0);
        let s = spec.t_max * (2.0 * rng.random::<f64>() - 1.0);
        pairs.push((t, s));
    }
    let mut report = GroupLawReport {
        flow: flow.name().to_string(),
        samples: pairs.len(),
        max_composition_residual: 0.0,
        max_inverse_residual: 0.0,
        tolerance: GROUP_LAW_TOL,
        passed: true,
        worst: None,
    };
    let mut worst = -1.0;
    for (t, s) in pairs {
        let z = flow.sample_state(&mut rng);
        let zt = flow.evolve(t, &z)?;
        let composition = linalg::max_abs_diff(&flow.evolve(t + s, &z)?, &flow.evolve(s, &zt)?);
        let inverse = linalg::max_abs_diff(&flow.evolve(-t, &zt)?, &z);
        report.max_composition_residual = report.max_composition_residual.max(composition);
        report.max_inverse_residual = report.max_inverse_residual.max(inverse);
        let r = composition.max(inverse);
        if r > worst {
            worst = r;
            report.worst = Some(GroupSample { t, s, z, composition, inverse });
        }
    }
    report.passed = report.max_composition_residual <= GROUP_LAW_TOL && report.max_inverse_residual <= GROUP_LAW_TOL;
    Ok(report)
}

/// Two internal states with the same `Z` whose futures differ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityWitness {
    pub z: Vec<f64>,
    pub t: f64,
    pub futures: [Vec<f64>; 2],
    pub distance: f64,
}

/// Evolves two internal states that share `Z` and reports how far apart
/// they end up.
pub fn state_ambiguity(flow: &dyn TrajectoryFlow, a: &[f64], b: &[f64], t: f64) -> Result<AmbiguityWitness> {
    let (za, _) = flow.evolve(0.0, a)?;
    let (zb, _) = flow.evolve(0.0, b)?;
    if linalg::max_abs_diff(&za, &zb) > 1e-12 {
        return Err(Error::Usage("internal states do not share the same Z".into()));
    }
    let (fa, _) = flow.evolve(t, a)?;
    let (fb, _) = flow.evolve(t, b)?;
    Ok(AmbiguityWitness {
        distance: linalg::max_abs_diff(&fa, &fb),
        z: za,
        t,
        futures: [fa, fb],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub t: f64,
    pub alpha: f64,
    pub image_of_mixture: Vec<f64>,
    pub mixture_of_images: Vec<f64>,
    pub residual: f64,
    pub preserved: bool,
}

pub fn check_convexity_preservation(
    flow: &dyn GroupFlow,
    t: f64,
    z1: &[f64],
    z2: &[f64],
    alpha: f64,
) -> Result<ConvexityReport> {
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| alpha * x + (1.0 - alpha) * y).collect() };
    let image_of_mixture = flow.evolve(t, &mix(z1, z2))?;
    let mixture_of_images = mix(&flow.evolve(t, z1)?, &flow.evolve(t, z2)?);
    let residual = linalg::max_abs_diff(&image_of_mixture, &mixture_of_images);
    Ok(ConvexityReport {
        t,
        alpha,
        image_of_mixture,
        mixture_of_images,
        residual,
        preserved: residual <= CONVEXITY_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedSample {
    pub t: f64,
    pub z: Vec<f64>,
    /// `σ(Z(t))`, absent when `Z(t)` has no decomposition.
    pub lambda: Option<Vec<f64>>,
    /// `max |recompose(λ) − Z(t)|`.
    pub residual: Option<f64>,
}

/// Samples `Z(t)` along the flow and lifts each point to `σ(Z(t))`.
pub fn lift_trajectory(flow: &Flow, vertices: &VertexSet, z0: &[f64], grid: &[f64]) -> Result<Vec<LiftedSample>> {
    let path = flow.trajectory(z0, grid)?;
    grid.iter()
        .zip(path)
        .map(|(&t, z)| match decompose::max_entropy_section(vertices, &z) {
            Ok(s) => Ok(LiftedSample {
                t,
                residual: Some(s.feasibility_residual),
                lambda: Some(s.weights.0),
                z,
            }),
            Err(Error::Infeasible) => Ok(LiftedSample {
                t,
                z,
                lambda: None,
                residual: None,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::statespace::StateSpace;

    #[test]
    fn coin_flow_appendix_values() {
        let z = CoinFlow.evolve(2.0, &[0.7, 0.3, 0.0]).unwrap();
        assert!((z[0] - 0.44).abs() < 0.005 && (z[1] - 0.56).abs() < 0.005);
        let z = CoinFlow.evolve(2.0, &[0.5, 0.5, 0.0]).unwrap();
        assert!((z[0] - 0.27).abs() < 0.005);
        assert_eq!(CoinFlow.evolve(0.0, &[0.37, 0.63, 0.0]).unwrap()[0], 0.37);
    }

    #[test]
    fn coin_flow_closed_form() {
        // u = 1/6 at z_H = 0.7: v = 1/(1 + 5e^{-2})
        let v = 1.0 / (1.0 + 5.0 * (-2.0f64).exp());
        let z = CoinFlow.evolve(2.0, &[0.7, 0.3, 0.0]).unwrap();
        assert!((z[0] - (0.8 - 0.6 * v)).abs() < 1e-15);
    }

    #[test]
    fn coin_flow_endpoints_and_domain() {
        for t in [-5.0, 0.3, 7.0] {
            assert!((CoinFlow.evolve(t, &[0.8, 0.2, 0.0]).unwrap()[0] - 0.8).abs() < 1e-12);
            assert!((CoinFlow.evolve(t, &[0.2, 0.8, 0.0]).unwrap()[0] - 0.2).abs() < 1e-12);
        }
        assert!(matches!(CoinFlow.evolve(1.0, &[0.9, 0.1, 0.0]), Err(Error::OutsideFlowDomain(_))));
    }

    #[test]
    fn oscillator_examples() {
        let (h, d) = Oscillator::step(0.8, -1.0, 0.6);
        assert!((h - 0.2).abs() < 1e-12 && d > 0.0);
        let (h, d) = Oscillator::step(0.5, -1.0, 0.6);
        assert!((h - 0.5).abs() < 1e-12 && d > 0.0);
        // a full period returns to the starting state
        let (h, d) = Oscillator::step(0.5, -1.0, 1.2);
        assert!((h - 0.5).abs() < 1e-12 && d < 0.0);
        assert_eq!(Oscillator::step(0.5, 1.0, 0.0), (0.5, 1.0));
    }

    #[test]
    fn group_law_audits() {
        let spec = AuditSpec { seed: 7, ..AuditSpec::default() };
        let r = check_group_law(&CoinFlow, &spec).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.samples, 50);
        assert!(check_group_law(&IdentityFlow { dim: 3 }, &spec).unwrap().passed);
        assert!(!check_group_law(&OscillatorOnState, &spec).unwrap().passed);
    }

    #[test]
    fn oscillator_state_is_not_enough() {
        let w = state_ambiguity(&Oscillator, &[0.5, 1.0], &[0.5, -1.0], 0.1).unwrap();
        assert!((w.distance - 0.2).abs() < 1e-12);
    }

    #[test]
    fn coin_flow_breaks_mixtures() {
        let r = check_convexity_preservation(&CoinFlow, 2.0, &[0.7, 0.3, 0.0], &[0.3, 0.7, 0.0], 0.5).unwrap();
        assert!((r.mixture_of_images[0] - 0.33).abs() < 0.005);
        assert!((r.image_of_mixture[0] - 0.27).abs() < 0.005);
        assert!((r.residual - 0.06).abs() < 0.005);
        assert!(!r.preserved);
        let r = check_convexity_preservation(&CoinFlow, 0.0, &[0.7, 0.3, 0.0], &[0.3, 0.7, 0.0], 0.5).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn coin_lift_matches_state() {
        let sp = StateSpace::new(fixtures::coin()).unwrap();
        let flow = Flow::Group(Box::new(CoinFlow));
        let lifted = lift_trajectory(&flow, &sp.vertices, &[0.8, 0.2, 0.0], &[0.0, 1.0, 2.0]).unwrap();
        for s in lifted {
            let l = s.lambda.unwrap();
            assert!((l[0] - s.z[0]).abs() < 1e-9 && (l[1] - s.z[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_flow_name() {
        assert!(flow_by_name("coin", 3).is_ok());
        assert!(matches!(flow_by_name("nope", 3), Err(Error::Usage(_))));
    }
}
