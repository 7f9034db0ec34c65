//! Numerical form of the two-agent characterization: the Euclidean
//! orthogonality residual, the L_p first-order residual pair with an
//! independent finite-difference oracle, the pairwise right-angle predicate
//! for n agents, and the maximum-cost lower-bound experiment.
//!
//! Sign convention. With A = -x, B = x, W = y (see
//! [`center_two_agent`](crate::geometry::center_two_agent)) the first residual
//! is `r_g = Σ (x_i+y_i)(x_i-y_i)|x_i-y_i|^(p-2)`. At p = 2 this is
//! `Σ (x_i² - y_i²) = -⟨W-A, W-B⟩`, i.e. `r_g = -orthogonality_residual`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{center_two_agent, dot, lp_dist, lp_distance, Point, Profile, SpaceConfig};
use crate::harness::profiles::generate_profiles;
use crate::mechanisms::MechanismSpec;
use crate::properties::{check_conjecture1, deviation, CheckConfig, PropertyReport};

/// Summands whose base |x_i ± y_i| falls below this contribute zero.
pub const KINK_EPS: f64 = 1e-12;
/// Step of the central-difference oracle.
pub const FD_STEP: f64 = 1e-6;
/// Absolute threshold on |⟨A_i - W, A_j - W⟩| for the pairwise predicate.
pub const CONJECTURE_TOLERANCE: f64 = 1e-9;

/// The two first-order residuals of a two-agent output in L_p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualPair {
    pub r_g: f64,
    pub r_h: f64,
}

impl ResidualPair {
    /// The residual with the larger magnitude (ties favour `r_g`).
    pub fn dominant(&self) -> f64 {
        if self.r_h.abs() > self.r_g.abs() {
            self.r_h
        } else {
            self.r_g
        }
    }
}

/// ⟨W - A, W - B⟩; zero iff W lies on the sphere with diameter AB.
pub fn orthogonality_residual(a: &Point, b: &Point, w: &Point) -> Result<f64> {
    let m = a.dim();
    b.check_dim(m)?;
    w.check_dim(m)?;
    Ok(w.sub(a).dot(&w.sub(b)))
}

/// Residual divided by d_p(A, B)^p, which makes it invariant under scaling;
/// zero when A = B.
pub fn normalized_residual(raw: f64, a: &Point, b: &Point, space: &SpaceConfig) -> Result<f64> {
    let d = lp_distance(a, b, space)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(raw / d.powf(space.p()))
}

/// z·|z|^(p-2), continuous for p > 1; exactly z at p = 2.
fn signed_pow(z: f64, p: f64) -> f64 {
    if p == 2.0 {
        z
    } else if z.abs() < KINK_EPS {
        0.0
    } else {
        z * (z.abs().ln() * (p - 2.0)).exp()
    }
}

/// Both first-order sums, evaluated term by term as written.
pub fn lp_residuals(a: &Point, b: &Point, w: &Point, space: &SpaceConfig) -> Result<ResidualPair> {
    a.check_dim(space.m())?;
    let (x, y) = center_two_agent(a, b, w)?;
    let p = space.p();
    let (mut r_g, mut r_h) = (0.0, 0.0);
    for (&xi, &yi) in x.coords().iter().zip(y.coords()) {
        r_g += (xi + yi) * signed_pow(xi - yi, p);
        r_h += (xi - yi) * signed_pow(xi + yi, p);
    }
    Ok(ResidualPair { r_g, r_h })
}

/// (|c + h d|^p - |c - h d|^p) without cancellation when |h d| is small
/// next to |c|.
fn symmetric_power_gap(c: f64, hd: f64, p: f64) -> f64 {
    if c != 0.0 && hd.abs() <= 0.5 * c.abs() {
        let t = hd / c;
        c.abs().powf(p) * ((p * t.ln_1p()).exp_m1() - (p * (-t).ln_1p()).exp_m1())
    } else {
        (c + hd).abs().powf(p) - (c - hd).abs().powf(p)
    }
}

/// Central-difference estimate of -G'(0) and -H'(0), where
/// G(α) = Σ|y_i - x_i + α(y_i + x_i)|^p / p is the p-th power distance from B
/// to the point W + α(W - A), and H(β) likewise from A along W + β(W - B).
/// The negation matches the orientation of [`lp_residuals`].
pub fn residual_via_finite_difference(
    a: &Point,
    b: &Point,
    w: &Point,
    space: &SpaceConfig,
) -> Result<ResidualPair> {
    a.check_dim(space.m())?;
    let (x, y) = center_two_agent(a, b, w)?;
    let p = space.p();
    let h = FD_STEP;
    let central = |base: &dyn Fn(f64, f64) -> (f64, f64)| {
        let gap: f64 = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(&xi, &yi)| {
                let (c, d) = base(xi, yi);
                symmetric_power_gap(c, h * d, p)
            })
            .sum();
        gap / (2.0 * h * p)
    };
    let g_prime = central(&|xi, yi| (yi - xi, yi + xi));
    let h_prime = central(&|xi, yi| (yi + xi, yi - xi));
    Ok(ResidualPair { r_g: -g_prime, r_h: -h_prime })
}

/// Result of the pairwise right-angle predicate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureOutcome {
    pub holds: bool,
    /// Minimizing pair (i <= j), 0-based.
    pub pair: [usize; 2],
    /// ⟨A_i - W, A_j - W⟩ for that pair.
    pub residual: f64,
}

/// True iff some pair (i, j), i = j allowed, has |⟨A_i - W, A_j - W⟩| within
/// [`CONJECTURE_TOLERANCE`].
pub fn conjecture1_predicate(profile: &Profile, w: &Point) -> Result<ConjectureOutcome> {
    w.check_dim(profile.dim())?;
    let rel: Vec<Point> = profile.agents().iter().map(|a| a.sub(w)).collect();
    let mut best = ConjectureOutcome { holds: false, pair: [0, 0], residual: f64::INFINITY };
    for i in 0..rel.len() {
        for j in i..rel.len() {
            let r = dot(rel[i].coords(), rel[j].coords());
            if r.abs() < best.residual.abs() {
                best.pair = [i, j];
                best.residual = r;
            }
        }
    }
    best.holds = best.residual.abs() <= CONJECTURE_TOLERANCE;
    Ok(best)
}

/// Runs the pairwise predicate on general-median outputs over 3-agent
/// Euclidean profiles in dimension `m`. In m = 3 the stream opens with the
/// counterexample profile.
pub fn median_fits_conjecture_scan(m: usize, cfg: &CheckConfig) -> Result<PropertyReport> {
    let cfg = CheckConfig { agents: Some(3), ..cfg.clone() };
    check_conjecture1(&MechanismSpec::GeneralMedian, &SpaceConfig::euclidean(m)?, &cfg)
}

/// max_i d_p(A_i, W).
pub fn max_cost(profile: &Profile, w: &Point, space: &SpaceConfig) -> Result<f64> {
    profile.agents().iter().map(|a| lp_distance(a, w, space)).try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

/// Optimal two-agent maximum cost, d_p(A, B)/2 (attained at the midpoint).
pub fn optimal_max_cost_two_agents(a: &Point, b: &Point, space: &SpaceConfig) -> Result<f64> {
    Ok(lp_distance(a, b, space)? / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub mechanism_max_cost: f64,
    pub optimal_max_cost: f64,
    pub ratio: f64,
}

/// A sampled pair where the facility moved after the first agent was placed
/// on the original output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityViolation {
    pub a: Point,
    pub b: Point,
    pub w: Point,
    /// f(W, B); stability requires this to equal W.
    pub replayed: Point,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundOutcome {
    /// Largest ratio seen; `None` if every sampled output coincided with B.
    pub worst: Option<RatioResult>,
    pub profiles: usize,
    /// Profiles with W != B that entered the ratio computation.
    pub nondegenerate: usize,
    pub stability_violations: usize,
    pub first_violation: Option<StabilityViolation>,
}

impl LowerBoundOutcome {
    pub fn stable(&self) -> bool {
        self.stability_violations == 0
    }
}

/// For sampled (A, B): W = f(A, B); if W != B, re-run the mechanism on
/// (W, B). A strategyproof mechanism must keep the facility at W (an agent
/// truly at W could otherwise misreport A), so the maximum cost on (W, B) is
/// d(W, B), twice the optimum d(W, B)/2.
pub fn lower_bound_experiment(
    spec: &MechanismSpec,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<LowerBoundOutcome> {
    cfg.validate()?;
    if spec.min_agents() > 2 || spec.fixed_arity().is_some_and(|n| n != 2) {
        return Err(Error::Unsupported(format!("{spec} is not a two-agent mechanism")));
    }
    let two = CheckConfig { agents: Some(2), ..cfg.clone() };
    let mut outcome = LowerBoundOutcome {
        worst: None,
        profiles: 0,
        nondegenerate: 0,
        stability_violations: 0,
        first_violation: None,
    };
    for profile in generate_profiles(space, 2, &two).take(cfg.num_profiles) {
        outcome.profiles += 1;
        let a = profile.agent(0);
        let b = profile.agent(1);
        let w = spec.evaluate(&profile, space)?;
        if lp_dist(w.coords(), b.coords(), space.p()) <= cfg.tolerance {
            continue;
        }
        outcome.nondegenerate += 1;
        let moved = Profile::new(vec![w.clone(), b.clone()])?;
        let replayed = spec.evaluate(&moved, space)?;
        let dev = deviation(&w, &replayed);
        if dev > 1e-9 {
            outcome.stability_violations += 1;
            if outcome.first_violation.is_none() {
                outcome.first_violation = Some(StabilityViolation {
                    a: a.clone(),
                    b: b.clone(),
                    w: w.clone(),
                    replayed: replayed.clone(),
                    deviation: dev,
                });
            }
        }
        let mechanism_max_cost = max_cost(&moved, &replayed, space)?;
        let optimal_max_cost = optimal_max_cost_two_agents(&w, b, space)?;
        let ratio = mechanism_max_cost / optimal_max_cost;
        if outcome.worst.is_none_or(|r| ratio > r.ratio) {
            outcome.worst = Some(RatioResult { mechanism_max_cost, optimal_max_cost, ratio });
        }
    }
    Ok(outcome)
}
