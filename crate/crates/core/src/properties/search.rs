//! Adversarial misreport search: a coarse grid over the sampling box followed
//! by compass (pattern) search with step halving around the best grid cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lp_dist, Point, Profile, SpaceConfig};
use crate::mechanisms::MechanismSpec;

use super::CheckConfig;

/// Step size below which pattern search stops regardless of `refine_iters`.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MisreportSearchResult {
    pub agent_index: usize,
    /// Distance from the agent's true location to the truthful outcome.
    pub true_cost: f64,
    pub best_misreport: Point,
    /// Distance from the true location to the outcome under `best_misreport`.
    pub best_cost: f64,
    /// `true_cost - best_cost`; positive means lying pays.
    pub gain: f64,
}

/// Cost of agent `agent` (at its true location) as a function of its report.
pub(crate) struct MisreportObjective<'a> {
    spec: &'a MechanismSpec,
    work: Profile,
    agent: usize,
    truth: Point,
    p: f64,
}

impl<'a> MisreportObjective<'a> {
    pub(crate) fn new(spec: &'a MechanismSpec, profile: &Profile, agent: usize, p: f64) -> Self {
        MisreportObjective { spec, work: profile.clone(), agent, truth: profile.agent(agent).clone(), p }
    }

    pub(crate) fn cost(&mut self, report: &[f64]) -> f64 {
        self.work.agent_mut(self.agent).coords_mut().copy_from_slice(report);
        let w = self.spec.evaluate_unchecked(&self.work);
        lp_dist(self.truth.coords(), w.coords(), self.p)
    }

    pub(crate) fn truthful_cost(&mut self) -> f64 {
        let truth = self.truth.clone();
        self.cost(truth.coords())
    }
}

fn validate(
    spec: &MechanismSpec,
    profile: &Profile,
    agent_index: usize,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<()> {
    cfg.validate()?;
    spec.check_profile(profile, space)?;
    if agent_index >= profile.len() {
        return Err(Error::Domain(format!(
            "agent index {agent_index} out of range for {} agents",
            profile.len()
        )));
    }
    Ok(())
}

/// Grid stage followed by compass refinement.
pub fn misreport_search(
    spec: &MechanismSpec,
    profile: &Profile,
    agent_index: usize,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<MisreportSearchResult> {
    validate(spec, profile, agent_index, space, cfg)?;
    Ok(search(spec, profile, agent_index, space, cfg, true))
}

/// Grid stage only.
pub fn grid_search(
    spec: &MechanismSpec,
    profile: &Profile,
    agent_index: usize,
    space: &SpaceConfig,
    cfg: &CheckConfig,
) -> Result<MisreportSearchResult> {
    validate(spec, profile, agent_index, space, cfg)?;
    Ok(search(spec, profile, agent_index, space, cfg, false))
}

pub(crate) fn search(
    spec: &MechanismSpec,
    profile: &Profile,
    agent: usize,
    space: &SpaceConfig,
    cfg: &CheckConfig,
    refine: bool,
) -> MisreportSearchResult {
    let m = space.m();
    let mut objective = MisreportObjective::new(spec, profile, agent, space.p());
    let true_cost = objective.truthful_cost();

    let g = cfg.grid_points_per_axis;
    let (lo, hi) = (cfg.box_lo, cfg.box_hi);
    let node = |k: usize| {
        if k + 1 == g {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (g - 1) as f64
        }
    };

    let mut index = vec![0usize; m];
    let mut candidate = vec![lo; m];
    let mut best = candidate.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        for (c, &k) in candidate.iter_mut().zip(&index) {
            *c = node(k);
        }
        let c = objective.cost(&candidate);
        if c < best_cost {
            best_cost = c;
            best.copy_from_slice(&candidate);
        }
        // Odometer increment over the m axes.
        let mut axis = 0;
        while axis < m {
            index[axis] += 1;
            if index[axis] < g {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
        if axis == m {
            break;
        }
    }

    if refine {
        let mut step = (hi - lo) / (g - 1) as f64;
        let mut halvings = 0;
        while halvings < cfg.refine_iters && step >= MIN_STEP {
            let mut moved = false;
            'poll: for axis in 0..m {
                for dir in [1.0, -1.0] {
                    candidate.copy_from_slice(&best);
                    candidate[axis] += dir * step;
                    if !(lo..=hi).contains(&candidate[axis]) {
                        continue;
                    }
                    let c = objective.cost(&candidate);
                    if c < best_cost {
                        best_cost = c;
                        best.copy_from_slice(&candidate);
                        moved = true;
                        break 'poll;
                    }
                }
            }
            if !moved {
                step *= 0.5;
                halvings += 1;
            }
        }
    }

    MisreportSearchResult {
        agent_index: agent,
        true_cost,
        best_misreport: Point::from_raw(best),
        best_cost,
        gain: true_cost - best_cost,
    }
}
