//! Executable axioms. Each checker samples a seeded workload and either
//! passes or stops at the first violation, returning a witness that can be
//! replayed through the public evaluation and transform operations.
//!
//! Trials are generated sequentially from the seed and evaluated in
//! fixed-size blocks in parallel; the first violating trial in index order
//! wins, so reports do not depend on scheduling.

mod search;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characterization::{conjecture1_predicate, CONJECTURE_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{lp_dist, rotate, scale, translate, PlaneRotation, Point, Profile, SpaceConfig};
use crate::harness::profiles::{generate_profiles, rng, BoxSampler, AUX_STREAM};
use crate::mechanisms::MechanismSpec;

pub use search::{grid_search, misreport_search, MisreportSearchResult, MIN_STEP};

/// Sampling workload and thresholds shared by every checker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub box_lo: f64,
    pub box_hi: f64,
    pub num_profiles: usize,
    pub seed: u64,
    /// Violation threshold (absolute gain, or scaled deviation).
    pub tolerance: f64,
    pub grid_points_per_axis: usize,
    pub refine_iters: usize,
    /// Agents per sampled profile for families without a fixed arity.
    pub agents: Option<usize>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            box_lo: -10.0,
            box_hi: 10.0,
            num_profiles: 1000,
            seed: 42,
            tolerance: 1e-7,
            grid_points_per_axis: 11,
            refine_iters: 40,
            agents: None,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.box_lo.is_finite() && self.box_hi.is_finite() && self.box_lo < self.box_hi) {
            return bad(format!("box [{}, {}] is empty or unbounded", self.box_lo, self.box_hi));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.grid_points_per_axis < 3 || self.grid_points_per_axis.is_multiple_of(2) {
            return bad(format!(
                "grid_points_per_axis must be odd and >= 3, got {}",
                self.grid_points_per_axis
            ));
        }
        if self.refine_iters == 0 {
            return bad("refine_iters must be positive".into());
        }
        if self.num_profiles == 0 {
            return bad("num_profiles must be positive".into());
        }
        if self.agents == Some(0) {
            return bad("agents must be positive".into());
        }
        Ok(())
    }

    /// Number of agents to sample for `spec`.
    pub fn agents_for(&self, spec: &MechanismSpec) -> Result<usize> {
        let n = match (spec.fixed_arity(), self.agents) {
            (Some(fixed), Some(n)) if n != fixed => {
                return Err(Error::Unsupported(format!(
                    "{spec} needs exactly {fixed} agents, configured {n}"
                )))
            }
            (Some(fixed), _) => fixed,
            (None, Some(n)) => n,
            (None, None) => spec.min_agents().max(3),
        };
        if n < spec.min_agents() {
            return Err(Error::Unsupported(format!(
                "{spec} needs at least {} agents, configured {n}",
                spec.min_agents()
            )));
        }
        Ok(n)
    }

    fn width(&self) -> f64 {
        self.box_hi - self.box_lo
    }
}

/// Registry of checkable properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Strategyproofness,
    Unanimity,
    TranslationInvariance,
    Scalability,
    Anonymity,
    RotationInvariance,
    ContinuityLipschitz,
    #[serde(rename = "output_at_agent_1d")]
    OutputAtAgent1d,
    PullStability,
    Conjecture1,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Strategyproofness,
        Property::Unanimity,
        Property::TranslationInvariance,
        Property::Scalability,
        Property::Anonymity,
        Property::RotationInvariance,
        Property::ContinuityLipschitz,
        Property::OutputAtAgent1d,
        Property::PullStability,
        Property::Conjecture1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Strategyproofness => "strategyproofness",
            Property::Unanimity => "unanimity",
            Property::TranslationInvariance => "translation_invariance",
            Property::Scalability => "scalability",
            Property::Anonymity => "anonymity",
            Property::RotationInvariance => "rotation_invariance",
            Property::ContinuityLipschitz => "continuity_lipschitz",
            Property::OutputAtAgent1d => "output_at_agent_1d",
            Property::PullStability => "pull_stability",
            Property::Conjecture1 => "conjecture1",
        }
    }

    /// Whether the check is defined for `space`.
    pub fn applies_to(self, space: &SpaceConfig) -> bool {
        match self {
            Property::RotationInvariance => space.m() >= 2,
            Property::OutputAtAgent1d => space.m() == 1,
            _ => true,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::UnknownProperty(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            other => Err(Error::InvalidConfig(format!("verdict must be pass or fail, got `{other}`"))),
        }
    }
}

/// Concrete counterexample: the profile plus what was done to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub profile: Profile,
    pub detail: WitnessDetail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessDetail {
    Misreport { agent: usize, misreport: Point, true_cost: f64, misreport_cost: f64, gain: f64 },
    Unanimity { output: Point, deviation: f64 },
    Translation { translation: Point, expected: Point, actual: Point, deviation: f64 },
    Scaling { factor: f64, expected: Point, actual: Point, deviation: f64 },
    Permutation { permutation: Vec<usize>, expected: Point, actual: Point, deviation: f64 },
    Rotation { rotation: PlaneRotation, expected: Point, actual: Point, deviation: f64 },
    Lipschitz { agent: usize, perturbed: Point, cost: f64, perturbed_cost: f64, distance: f64, excess: f64 },
    Interior { output: Point, min_distance: f64 },
    PullStability { agent: usize, lambda: f64, moved: Point, expected: Point, actual: Point, deviation: f64 },
    Conjecture { output: Point, pair: [usize; 2], residual: f64 },
}

impl WitnessDetail {
    /// The violation magnitude recorded at detection time.
    pub fn magnitude(&self) -> f64 {
        match self {
            WitnessDetail::Misreport { gain, .. } => *gain,
            WitnessDetail::Unanimity { deviation, .. }
            | WitnessDetail::Translation { deviation, .. }
            | WitnessDetail::Scaling { deviation, .. }
            | WitnessDetail::Permutation { deviation, .. }
            | WitnessDetail::Rotation { deviation, .. }
            | WitnessDetail::PullStability { deviation, .. } => *deviation,
            WitnessDetail::Lipschitz { excess, .. } => *excess,
            WitnessDetail::Interior { min_distance, .. } => *min_distance,
            WitnessDetail::Conjecture { residual, .. } => residual.abs(),
        }
    }
}

/// Verdict of one (mechanism, property) check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub mechanism: MechanismSpec,
    pub verdict: Verdict,
    /// Trials executed; on failure, the 1-based index of the violating trial.
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

impl PropertyReport {
    /// Re-derives the violation magnitude of the witness from scratch using
    /// only public evaluation and transform operations. `None` for passes.
    pub fn replay(&self, space: &SpaceConfig) -> Result<Option<f64>> {
        self.witness.as_ref().map(|w| replay_witness(&self.mechanism, space, w)).transpose()
    }
}

/// Scaled max-norm gap `max_i |e_i - a_i| / max(1, max_i |e_i|)`.
pub fn deviation(expected: &Point, actual: &Point) -> f64 {
    let gap = expected.coords().iter().zip(actual.coords()).map(|(e, a)| (e - a).abs()).fold(0.0, f64::max);
    let scale = expected.coords().iter().fold(1.0f64, |m, e| m.max(e.abs()));
    gap / scale
}

/// Recomputes the violation magnitude encoded by `witness`.
pub fn replay_witness(spec: &MechanismSpec, space: &SpaceConfig, witness: &Witness) -> Result<f64> {
    let p = &witness.profile;
    let f = |q: &Profile| spec.evaluate(q, space);
    match &witness.detail {
        WitnessDetail::Misreport { agent, misreport, .. } => {
            let truth = p.agent(*agent);
            let honest = crate::geometry::lp_distance(truth, &f(p)?, space)?;
            let lied = f(&p.with_agent(*agent, misreport.clone()))?;
            Ok(honest - crate::geometry::lp_distance(truth, &lied, space)?)
        }
        WitnessDetail::Unanimity { .. } => {
            if p.agents().iter().any(|a| a != p.agent(0)) {
                return Err(Error::Domain("unanimity witness is not unanimous".into()));
            }
            Ok(deviation(p.agent(0), &f(p)?))
        }
        WitnessDetail::Translation { translation, .. } => {
            let expected = f(p)?.add(translation);
            Ok(deviation(&expected, &f(&translate(p, translation)?)?))
        }
        WitnessDetail::Scaling { factor, .. } => {
            let expected = f(p)?.scaled(*factor);
            Ok(deviation(&expected, &f(&scale(p, *factor)?)?))
        }
        WitnessDetail::Permutation { permutation, .. } => {
            check_permutation(permutation, p.len())?;
            Ok(deviation(&f(p)?, &f(&p.permuted(permutation))?))
        }
        WitnessDetail::Rotation { rotation, .. } => {
            let expected = rotation.apply(&f(p)?)?;
            Ok(deviation(&expected, &f(&rotate(p, rotation)?)?))
        }
        WitnessDetail::Lipschitz { agent, perturbed, .. } => {
            let cost = crate::geometry::lp_distance(p.agent(*agent), &f(p)?, space)?;
            let moved = p.with_agent(*agent, perturbed.clone());
            let moved_cost = crate::geometry::lp_distance(perturbed, &f(&moved)?, space)?;
            let dist = crate::geometry::lp_distance(p.agent(*agent), perturbed, space)?;
            Ok((cost - moved_cost).abs() - dist)
        }
        WitnessDetail::Interior { .. } => {
            let w = f(p)?;
            p.agents()
                .iter()
                .map(|a| crate::geometry::lp_distance(a, &w, space))
                .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
        }
        WitnessDetail::PullStability { agent, lambda, .. } => {
            let w = f(p)?;
            let a = p.agent(*agent);
            let moved = a.add(&w.sub(a).scaled(*lambda));
            Ok(deviation(&w, &f(&p.with_agent(*agent, moved))?))
        }
        WitnessDetail::Conjecture { .. } => {
            let outcome = conjecture1_predicate(p, &f(p)?)?;
            Ok(outcome.residual.abs())
        }
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Domain("permutation length differs from profile size".into()));
    }
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

const BLOCK: usize = 64;

/// Evaluates trials in order-preserving parallel blocks and returns the
/// number of trials consumed plus the first witness, if any.
fn first_violation<T, F>(trials: &[T], eval: F) -> (usize, Option<Witness>)
where
    T: Sync,
    F: Fn(&T) -> Option<Witness> + Sync,
{
    for (b, block) in trials.chunks(BLOCK).enumerate() {
        let results: Vec<Option<Witness>> = block.par_iter().map(&eval).collect();
        if let Some((k, w)) = results.into_iter().enumerate().find_map(|(k, w)| w.map(|w| (k, w))) {
            return (b * BLOCK + k + 1, Some(w));
        }
    }
    (trials.len(), None)
}

/// Everything a checker needs once inputs have been validated.
struct Campaign<'a> {
    spec: &'a MechanismSpec,
    space: &'a SpaceConfig,
    cfg: &'a CheckConfig,
    n: usize,
}

impl<'a> Campaign<'a> {
    fn new(
        spec: &'a MechanismSpec,
        space: &'a SpaceConfig,
        cfg: &'a CheckConfig,
        property: Property,
    ) -> Result<Self> {
        cfg.validate()?;
        if !property.applies_to(space) {
            return Err(Error::Unsupported(format!("{property} is not defined for m = {}", space.m())));
        }
        if let Some(m) = spec.fixed_dimension() {
            if m != space.m() {
                return Err(Error::Unsupported(format!(
                    "{spec} is defined only for m = {m}, got m = {}",
                    space.m()
                )));
            }
        }
        let n = cfg.agents_for(spec)?;
        Ok(Campaign { spec, space, cfg, n })
    }

    fn profiles(&self) -> Vec<Profile> {
        generate_profiles(self.space, self.n, self.cfg).take(self.cfg.num_profiles).collect()
    }

    fn aux(&self) -> BoxSampler {
        BoxSampler::new(self.cfg.box_lo, self.cfg.box_hi, rng(self.cfg.seed, AUX_STREAM))
    }

    fn f(&self, profile: &Profile) -> Point {
        self.spec.evaluate_unchecked(profile)
    }

    fn dist(&self, a: &Point, b: &Point) -> f64 {
        lp_dist(a.coords(), b.coords(), self.space.p())
    }

    fn report(&self, property: Property, (trials, witness): (usize, Option<Witness>)) -> PropertyReport {
        PropertyReport {
            property,
            mechanism: *self.spec,
            verdict: if witness.is_some() { Verdict::Fail } else { Verdict::Pass },
            trials,
            seed: self.cfg.seed,
            tolerance: self.cfg.tolerance,
            witness,
        }
    }

    /// Witness builder for equality-style checks.
    fn compare(
        &self,
        profile: &Profile,
        expected: Point,
        actual: Point,
        detail: impl FnOnce(Point, Point, f64) -> WitnessDetail,
    ) -> Option<Witness> {
        let dev = deviation(&expected, &actual);
        (dev > self.cfg.tolerance)
            .then(|| Witness { profile: profile.clone(), detail: detail(expected, actual, dev) })
    }
}

/// No agent can reduce its distance to the facility by misreporting.
pub fn check_strategyproofness(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::Strategyproofness)?;
    let profiles = c.profiles();
    let outcome = first_violation(&profiles, |p| {
        (0..p.len()).find_map(|agent| {
            let r = search::search(spec, p, agent, space, cfg, true);
            (r.gain > cfg.tolerance).then(|| Witness {
                profile: p.clone(),
                detail: WitnessDetail::Misreport {
                    agent,
                    misreport: r.best_misreport,
                    true_cost: r.true_cost,
                    misreport_cost: r.best_cost,
                    gain: r.gain,
                },
            })
        })
    });
    Ok(c.report(Property::Strategyproofness, outcome))
}

/// Identical reports force the facility onto the common point.
pub fn check_unanimity(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::Unanimity)?;
    let trials: Vec<Profile> =
        c.profiles().into_iter().map(|p| Profile::from_raw(vec![p.agent(0).clone(); c.n])).collect();
    let outcome = first_violation(&trials, |p| {
        c.compare(p, p.agent(0).clone(), c.f(p), |_, output, deviation| WitnessDetail::Unanimity {
            output,
            deviation,
        })
    });
    Ok(c.report(Property::Unanimity, outcome))
}

/// f(P + t) = f(P) + t, with t drawn per coordinate from ±(box width).
pub fn check_translation_invariance(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::TranslationInvariance)?;
    let mut aux = c.aux();
    let w = cfg.width();
    let trials: Vec<(Profile, Point)> = c
        .profiles()
        .into_iter()
        .map(|p| {
            let t = Point::from_raw((0..space.m()).map(|_| aux.rng().random_range(-w..w)).collect());
            (p, t)
        })
        .collect();
    let outcome =
        first_violation(&trials, |(p, t)| {
            let moved = translate(p, t).expect("dimension checked");
            c.compare(p, c.f(p).add(t), c.f(&moved), |expected, actual, deviation| {
                WitnessDetail::Translation { translation: t.clone(), expected, actual, deviation }
            })
        });
    Ok(c.report(Property::TranslationInvariance, outcome))
}

/// f(kP) = k f(P) for k log-uniform in [1e-2, 1e2].
pub fn check_scalability(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::Scalability)?;
    let mut aux = c.aux();
    let trials: Vec<(Profile, f64)> =
        c.profiles().into_iter().map(|p| (p, 10f64.powf(aux.rng().random_range(-2.0..=2.0)))).collect();
    let outcome =
        first_violation(&trials, |(p, k)| {
            let scaled = scale(p, *k).expect("positive factor");
            c.compare(p, c.f(p).scaled(*k), c.f(&scaled), |expected, actual, deviation| {
                WitnessDetail::Scaling { factor: *k, expected, actual, deviation }
            })
        });
    Ok(c.report(Property::Scalability, outcome))
}

/// Output unchanged under a random non-identity permutation of the agents.
pub fn check_anonymity(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::Anonymity)?;
    let mut aux = c.aux();
    let trials: Vec<(Profile, Vec<usize>)> = c
        .profiles()
        .into_iter()
        .map(|p| {
            let mut perm: Vec<usize> = (0..c.n).collect();
            perm.shuffle(aux.rng());
            if c.n > 1 && perm.iter().enumerate().all(|(i, &j)| i == j) {
                perm.rotate_left(1);
            }
            (p, perm)
        })
        .collect();
    let outcome = first_violation(&trials, |(p, perm)| {
        c.compare(p, c.f(p), c.f(&p.permuted(perm)), |expected, actual, deviation| {
            WitnessDetail::Permutation { permutation: perm.clone(), expected, actual, deviation }
        })
    });
    Ok(c.report(Property::Anonymity, outcome))
}

/// Rotating all reports in a coordinate plane rotates the output identically.
pub fn check_rotation_invariance(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::RotationInvariance)?;
    let m = space.m();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut aux = c.aux();
    let trials: Vec<(Profile, PlaneRotation)> = c
        .profiles()
        .into_iter()
        .map(|p| {
            let (i, j) = pairs[aux.rng().random_range(0..pairs.len())];
            let theta = aux.rng().random_range(0.0..std::f64::consts::TAU);
            let center = aux.point(m);
            (p, PlaneRotation::new(i, j, theta, center).expect("valid plane"))
        })
        .collect();
    let outcome = first_violation(&trials, |(p, r)| {
        let expected = r.apply(&c.f(p)).expect("dimension checked");
        let actual = c.f(&rotate(p, r).expect("dimension checked"));
        c.compare(p, expected, actual, |expected, actual, deviation| WitnessDetail::Rotation {
            rotation: r.clone(),
            expected,
            actual,
            deviation,
        })
    });
    Ok(c.report(Property::RotationInvariance, outcome))
}

/// Cost as a function of one agent's own location is 1-Lipschitz:
/// |u(A_i) - u(A_i')| <= d(A_i, A_i').
pub fn check_continuity_lipschitz(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::ContinuityLipschitz)?;
    let mut aux = c.aux();
    let w = cfg.width();
    let trials: Vec<(Profile, usize, Point)> = c
        .profiles()
        .into_iter()
        .map(|p| {
            let agent = aux.rng().random_range(0..c.n);
            // Perturbation radius spans three decades below the box width.
            let r = w * 10f64.powf(aux.rng().random_range(-3.0..=0.0));
            let perturbed = Point::from_raw(
                p.agent(agent).coords().iter().map(|&x| x + aux.rng().random_range(-r..=r)).collect(),
            );
            (p, agent, perturbed)
        })
        .collect();
    let outcome = first_violation(&trials, |(p, agent, perturbed)| {
        let a = p.agent(*agent);
        let cost = c.dist(a, &c.f(p));
        let perturbed_cost = c.dist(perturbed, &c.f(&p.with_agent(*agent, perturbed.clone())));
        let distance = c.dist(a, perturbed);
        let excess = (cost - perturbed_cost).abs() - distance;
        (excess > cfg.tolerance).then(|| Witness {
            profile: p.clone(),
            detail: WitnessDetail::Lipschitz {
                agent: *agent,
                perturbed: perturbed.clone(),
                cost,
                perturbed_cost,
                distance,
                excess,
            },
        })
    });
    Ok(c.report(Property::ContinuityLipschitz, outcome))
}

/// In one dimension the facility sits on some agent's report.
pub fn check_output_at_agent_1d(spec: &MechanismSpec, cfg: &CheckConfig) -> Result<PropertyReport> {
    check_output_at_agent(spec, &SpaceConfig::euclidean(1)?, cfg)
}

fn check_output_at_agent(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::OutputAtAgent1d)?;
    let profiles = c.profiles();
    let outcome = first_violation(&profiles, |p| {
        let output = c.f(p);
        let min_distance = p.agents().iter().map(|a| c.dist(a, &output)).fold(f64::INFINITY, f64::min);
        (min_distance > cfg.tolerance)
            .then(|| Witness { profile: p.clone(), detail: WitnessDetail::Interior { output, min_distance } })
    });
    Ok(c.report(Property::OutputAtAgent1d, outcome))
}

/// Moving an agent toward the facility along the segment leaves the facility
/// in place.
pub fn check_pull_stability(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::PullStability)?;
    let mut aux = c.aux();
    let trials: Vec<(Profile, usize, f64)> = c
        .profiles()
        .into_iter()
        .map(|p| {
            let agent = aux.rng().random_range(0..c.n);
            let lambda = aux.rng().random_range(0.0..=1.0);
            (p, agent, lambda)
        })
        .collect();
    let outcome = first_violation(&trials, |(p, agent, lambda)| {
        let w = c.f(p);
        let a = p.agent(*agent);
        let moved = a.add(&w.sub(a).scaled(*lambda));
        let actual = c.f(&p.with_agent(*agent, moved.clone()));
        c.compare(p, w, actual, |expected, actual, deviation| WitnessDetail::PullStability {
            agent: *agent,
            lambda: *lambda,
            moved,
            expected,
            actual,
            deviation,
        })
    });
    Ok(c.report(Property::PullStability, outcome))
}

/// Some pair of agents (possibly the same agent twice) subtends a right angle
/// at the facility, in the Euclidean inner product.
pub fn check_conjecture1(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    let c = Campaign::new(spec, space, cfg, Property::Conjecture1)?;
    let profiles = c.profiles();
    let outcome = first_violation(&profiles, |p| {
        let output = c.f(p);
        let o = conjecture1_predicate(p, &output).expect("dimension checked");
        (!o.holds).then(|| Witness {
            profile: p.clone(),
            detail: WitnessDetail::Conjecture { output, pair: o.pair, residual: o.residual },
        })
    });
    let mut report = c.report(Property::Conjecture1, outcome);
    report.tolerance = CONJECTURE_TOLERANCE;
    Ok(report)
}

/// Dispatches to the checker for `property`.
pub fn run_check(
    property: Property,
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<PropertyReport> {
    match property {
        Property::Strategyproofness => check_strategyproofness(spec, space, cfg),
        Property::Unanimity => check_unanimity(spec, space, cfg),
        Property::TranslationInvariance => check_translation_invariance(spec, space, cfg),
        Property::Scalability => check_scalability(spec, space, cfg),
        Property::Anonymity => check_anonymity(spec, space, cfg),
        Property::RotationInvariance => check_rotation_invariance(spec, space, cfg),
        Property::ContinuityLipschitz => check_continuity_lipschitz(spec, space, cfg),
        Property::OutputAtAgent1d => check_output_at_agent(spec, space, cfg),
        Property::PullStability => check_pull_stability(spec, space, cfg),
        Property::Conjecture1 => check_conjecture1(spec, space, cfg),
    }
}
