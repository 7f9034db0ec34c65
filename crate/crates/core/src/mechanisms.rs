//! The mechanism catalog: dictatorship, the coordinate-wise general median,
//! the three anonymous two-agent families of the 2-D Euclidean plane, and a
//! midpoint baseline that is deliberately not strategyproof.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Profile, SpaceConfig};

/// Which extreme a C1 coordinate takes: `0` is min, `1` is max.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extreme {
    Min,
    Max,
}

impl Extreme {
    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Extreme::Min),
            1 => Ok(Extreme::Max),
            _ => Err(Error::Domain(format!("C1 parameter must be 0 or 1, got {bit}"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Extreme::Min => 0,
            Extreme::Max => 1,
        }
    }

    fn pick(self, a: f64, b: f64) -> f64 {
        match self {
            Extreme::Min => a.min(b),
            Extreme::Max => a.max(b),
        }
    }
}

/// Nonzero finite slope parameter of the C2/C3 families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slope(f64);

impl Slope {
    pub fn new(value: f64) -> Result<Self> {
        if value == 0.0 || !value.is_finite() {
            return Err(Error::Domain(format!("slope parameter must be finite and nonzero, got {value}")));
        }
        Ok(Slope(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A mechanism family together with its parameters.
///
/// The compact text form is `family(:param(,param)*)?`, e.g. `dictator:0`,
/// `c1:1,1`, `c2:1.5`, `c3:-2`, `median`, `midpoint`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MechanismSpec {
    Dictator(usize),
    GeneralMedian,
    C1(Extreme, Extreme),
    C2(Slope),
    C3(Slope),
    Midpoint,
}

impl MechanismSpec {
    pub fn c1(u: u8, v: u8) -> Result<Self> {
        Ok(MechanismSpec::C1(Extreme::from_bit(u)?, Extreme::from_bit(v)?))
    }

    pub fn c2(u: f64) -> Result<Self> {
        Ok(MechanismSpec::C2(Slope::new(u)?))
    }

    pub fn c3(v: f64) -> Result<Self> {
        Ok(MechanismSpec::C3(Slope::new(v)?))
    }

    /// Number of agents the family is defined for, if fixed.
    pub fn fixed_arity(&self) -> Option<usize> {
        match self {
            MechanismSpec::C1(..) | MechanismSpec::C2(_) | MechanismSpec::C3(_) | MechanismSpec::Midpoint => {
                Some(2)
            }
            MechanismSpec::Dictator(_) | MechanismSpec::GeneralMedian => None,
        }
    }

    /// Fixed dimension requirement, if any.
    pub fn fixed_dimension(&self) -> Option<usize> {
        match self {
            MechanismSpec::C1(..) | MechanismSpec::C2(_) | MechanismSpec::C3(_) => Some(2),
            _ => None,
        }
    }

    /// Smallest admissible number of agents.
    pub fn min_agents(&self) -> usize {
        match self {
            MechanismSpec::Dictator(i) => i + 1,
            MechanismSpec::GeneralMedian => 1,
            _ => 2,
        }
    }

    /// Whether this mechanism is known to be
    /// strategyproof (everything except the midpoint baseline).
    pub fn is_strategyproof(&self) -> bool {
        !matches!(self, MechanismSpec::Midpoint)
    }

    /// Validates that `profile` and `space` are admissible inputs.
    pub fn check_profile(&self, profile: &Profile, space: &SpaceConfig) -> Result<()> {
        profile.check_dim(space.m())?;
        if let Some(m) = self.fixed_dimension() {
            if space.m() != m {
                return Err(Error::Unsupported(format!(
                    "{self} is defined only for m = {m}, got m = {}",
                    space.m()
                )));
            }
        }
        if let Some(n) = self.fixed_arity() {
            if profile.len() != n {
                return Err(Error::Unsupported(format!(
                    "{self} needs exactly {n} agents, got {}",
                    profile.len()
                )));
            }
        }
        if profile.len() < self.min_agents() {
            return Err(Error::Unsupported(format!(
                "{self} needs at least {} agents, got {}",
                self.min_agents(),
                profile.len()
            )));
        }
        Ok(())
    }

    /// Facility location chosen for `profile`.
    pub fn evaluate(&self, profile: &Profile, space: &SpaceConfig) -> Result<Point> {
        self.check_profile(profile, space)?;
        Ok(self.evaluate_unchecked(profile))
    }

    /// Same as [`evaluate`](Self::evaluate) without arity/dimension checks.
    pub(crate) fn evaluate_unchecked(&self, profile: &Profile) -> Point {
        let agents = profile.agents();
        match *self {
            MechanismSpec::Dictator(i) => agents[i].clone(),
            MechanismSpec::GeneralMedian => general_median(agents),
            MechanismSpec::C1(u, v) => to_point(c1(u, v, xy(&agents[0]), xy(&agents[1]))),
            MechanismSpec::C2(u) => to_point(c2(u.0, xy(&agents[0]), xy(&agents[1]))),
            MechanismSpec::C3(v) => to_point(c3(v.0, xy(&agents[0]), xy(&agents[1]))),
            MechanismSpec::Midpoint => crate::geometry::midpoint(&agents[0], &agents[1]),
        }
    }
}

impl fmt::Display for MechanismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanismSpec::Dictator(i) => write!(f, "dictator:{i}"),
            MechanismSpec::GeneralMedian => write!(f, "median"),
            MechanismSpec::C1(u, v) => write!(f, "c1:{},{}", u.bit(), v.bit()),
            MechanismSpec::C2(u) => write!(f, "c2:{}", u.0),
            MechanismSpec::C3(v) => write!(f, "c3:{}", v.0),
            MechanismSpec::Midpoint => write!(f, "midpoint"),
        }
    }
}

impl FromStr for MechanismSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let input = s.trim();
        let bad =
            |reason: &str| Error::InvalidMechanism { input: input.to_string(), reason: reason.to_string() };
        let (family, params) = match input.split_once(':') {
            Some((f, p)) => (f, Some(p)),
            None => (input, None),
        };
        let params: Vec<&str> = match params {
            Some(p) => p.split(',').map(str::trim).collect(),
            None => Vec::new(),
        };
        let real = |t: &str| -> Result<f64> {
            t.parse::<f64>().map_err(|_| bad(&format!("`{t}` is not a decimal number")))
        };
        let arity = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(bad(&format!("expected {n} parameter(s), got {}", params.len())))
            }
        };
        let wrap = |e: Error| bad(&e.to_string());
        match family {
            "dictator" => {
                arity(1)?;
                let i = params[0]
                    .parse::<usize>()
                    .map_err(|_| bad("dictator index must be a non-negative integer"))?;
                Ok(MechanismSpec::Dictator(i))
            }
            "median" => arity(0).map(|_| MechanismSpec::GeneralMedian),
            "midpoint" => arity(0).map(|_| MechanismSpec::Midpoint),
            "c1" => {
                arity(2)?;
                let bit = |t: &str| -> Result<u8> {
                    match t {
                        "0" => Ok(0),
                        "1" => Ok(1),
                        _ => Err(bad("C1 parameters must be 0 or 1")),
                    }
                };
                MechanismSpec::c1(bit(params[0])?, bit(params[1])?).map_err(wrap)
            }
            "c2" => {
                arity(1)?;
                MechanismSpec::c2(real(params[0])?).map_err(wrap)
            }
            "c3" => {
                arity(1)?;
                MechanismSpec::c3(real(params[0])?).map_err(wrap)
            }
            _ => Err(bad("unknown family")),
        }
    }
}

impl TryFrom<String> for MechanismSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MechanismSpec> for String {
    fn from(m: MechanismSpec) -> Self {
        m.to_string()
    }
}

type Xy = (f64, f64);

fn xy(p: &Point) -> Xy {
    (p[0], p[1])
}

fn to_point((x, y): Xy) -> Point {
    Point::from_raw(vec![x, y])
}

fn check_planar(a: &Point, b: &Point) -> Result<()> {
    a.check_dim(2)?;
    b.check_dim(2)
}

/// (u, v)-C1: coordinate-wise max or min of the two reports.
pub fn eval_c1(u: Extreme, v: Extreme, a: &Point, b: &Point) -> Result<Point> {
    check_planar(a, b)?;
    Ok(to_point(c1(u, v, xy(a), xy(b))))
}

fn c1(u: Extreme, v: Extreme, a: Xy, b: Xy) -> Xy {
    if a == b {
        return a;
    }
    (u.pick(a.0, b.0), v.pick(a.1, b.1))
}

/// (u)-C2 with u != 0.
///
/// With the agents ordered so that x_A <= x_B (ties broken on y), the
/// facility is the foot of the perpendicular from B onto the line of slope
/// `u` through A whenever the slope R of AB lies in the closed band spanned
/// by u and -1/u. Past the band edge R = u the foot has reached B, so the
/// facility stays at B; past the edge R = -1/u it has reached A and stays
/// there. Vertical pairs take the larger (u > 0) or smaller (u < 0) report.
pub fn eval_c2(u: Slope, a: &Point, b: &Point) -> Result<Point> {
    check_planar(a, b)?;
    Ok(to_point(c2(u.0, xy(a), xy(b))))
}

fn c2(u: f64, a: Xy, b: Xy) -> Xy {
    if a == b {
        return a;
    }
    let (a, b) = if (a.0, a.1) <= (b.0, b.1) { (a, b) } else { (b, a) };
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    if dx == 0.0 {
        let y = if u > 0.0 { a.1.max(b.1) } else { a.1.min(b.1) };
        return (a.0, y);
    }
    // dx > 0 here.
    let r = dy / dx;
    let perp = -1.0 / u;
    let (lo, hi) = if u > 0.0 { (perp, u) } else { (u, perp) };
    if r > hi {
        return if hi == u { b } else { a };
    }
    if r < lo {
        return if lo == u { b } else { a };
    }
    let t = (dx + u * dy) / (1.0 + u * u);
    (a.0 + t, a.1 + u * t)
}

/// (v)-C3: C2 with the roles of the two coordinates exchanged.
pub fn eval_c3(v: Slope, a: &Point, b: &Point) -> Result<Point> {
    check_planar(a, b)?;
    Ok(to_point(c3(v.0, xy(a), xy(b))))
}

fn c3(v: f64, a: Xy, b: Xy) -> Xy {
    let swap = |p: Xy| (p.1, p.0);
    swap(c2(v, swap(a), swap(b)))
}

/// Coordinate-wise median; for an even count the larger middle value.
pub fn eval_general_median(profile: &Profile) -> Point {
    general_median(profile.agents())
}

fn general_median(agents: &[Point]) -> Point {
    let n = agents.len();
    let m = agents[0].dim();
    let mut column = vec![0.0; n];
    let coords = (0..m)
        .map(|k| {
            for (slot, a) in column.iter_mut().zip(agents) {
                *slot = a[k];
            }
            // Index n/2 is the middle for odd n and the upper middle for even n.
            *column.select_nth_unstable_by(n / 2, f64::total_cmp).1
        })
        .collect();
    Point::from_raw(coords)
}

/// Arithmetic mean of two reports (non-strategyproof baseline).
pub fn eval_midpoint(a: &Point, b: &Point) -> Result<Point> {
    b.check_dim(a.dim())?;
    Ok(crate::geometry::midpoint(a, b))
}

/// Free-function form of [`MechanismSpec::evaluate`].
pub fn evaluate(spec: &MechanismSpec, profile: &Profile, space: &SpaceConfig) -> Result<Point> {
    spec.evaluate(profile, space)
}
