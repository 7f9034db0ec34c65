//! Seeded profile generation.
//!
//! Every stream starts with deterministic corner cases, then continues with
//! i.i.d. uniform draws from the sampling box. Random state comes from a
//! ChaCha8 generator keyed by the seed, so streams are reproducible across
//! platforms and crate versions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, Profile, SpaceConfig};
use crate::properties::CheckConfig;

/// ChaCha stream used for profile draws.
pub(crate) const PROFILE_STREAM: u64 = 0;
/// ChaCha stream used for per-trial auxiliary draws (agents, perturbations,
/// rotations, permutations).
pub(crate) const AUX_STREAM: u64 = 1;

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draws inside the box `[lo, hi]^m`.
pub(crate) struct BoxSampler {
    lo: f64,
    hi: f64,
    rng: ChaCha8Rng,
}

impl BoxSampler {
    pub(crate) fn new(lo: f64, hi: f64, rng: ChaCha8Rng) -> Self {
        BoxSampler { lo, hi, rng }
    }

    pub(crate) fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub(crate) fn coord(&mut self) -> f64 {
        self.rng.random_range(self.lo..self.hi)
    }

    pub(crate) fn point(&mut self, m: usize) -> Point {
        Point::from_raw((0..m).map(|_| self.coord()).collect())
    }

    pub(crate) fn profile(&mut self, n: usize, m: usize) -> Profile {
        Profile::from_raw((0..n).map(|_| self.point(m)).collect())
    }
}

/// The three-agent profile whose coordinate-wise median is the origin while
/// no two agents subtend a right angle there.
pub fn median_counterexample() -> Profile {
    Profile::from_rows(&[&[0.0, 1.0, -1.0], &[-1.0, 0.0, 1.0], &[1.0, -1.0, 0.0]])
        .expect("fixture is well formed")
}

/// Deterministic corner cases for `n` agents in `m` dimensions inside the
/// box: the median counterexample (m = 3, n = 3), coincident agents, agents
/// differing along a single axis (one fixture per axis), and agents on a
/// common diagonal.
pub fn fixtures(space: &SpaceConfig, n: usize, lo: f64, hi: f64) -> Vec<Profile> {
    let m = space.m();
    let width = hi - lo;
    let center = lo + width / 2.0;
    let mut out = Vec::new();
    if m == 3 && n == 3 {
        out.push(median_counterexample());
    }
    let c = Point::from_raw(vec![lo + 0.3 * width; m]);
    out.push(Profile::from_raw(vec![c; n]));
    // Offsets spread over a quarter of the box on either side of the center.
    let offset = |k: usize| {
        if n == 1 {
            0.0
        } else {
            width * (0.25 - 0.5 * k as f64 / (n - 1) as f64)
        }
    };
    for axis in 0..m {
        let agents = (0..n)
            .map(|k| {
                let mut coords = vec![center; m];
                coords[axis] += offset(k);
                Point::from_raw(coords)
            })
            .collect();
        out.push(Profile::from_raw(agents));
    }
    if m >= 2 {
        let agents = (0..n).map(|k| Point::from_raw(vec![center + offset(k); m])).collect();
        out.push(Profile::from_raw(agents));
    }
    out
}

/// Fixtures followed by uniform draws; infinite.
pub struct ProfileStream {
    fixtures: std::vec::IntoIter<Profile>,
    sampler: BoxSampler,
    n: usize,
    m: usize,
}

impl Iterator for ProfileStream {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        Some(self.fixtures.next().unwrap_or_else(|| self.sampler.profile(self.n, self.m)))
    }
}

/// Seeded stream of `agents`-agent profiles for `space` in the configured box.
pub fn generate_profiles(space: &SpaceConfig, agents: usize, cfg: &CheckConfig) -> ProfileStream {
    ProfileStream {
        fixtures: fixtures(space, agents, cfg.box_lo, cfg.box_hi).into_iter(),
        sampler: BoxSampler::new(cfg.box_lo, cfg.box_hi, rng(cfg.seed, PROFILE_STREAM)),
        n: agents,
        m: space.m(),
    }
}
