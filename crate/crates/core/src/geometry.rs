//! L_p vector-space primitives: points, profiles, distances and the affine
//! maps (translation, positive scaling, plane rotation) that the axioms are
//! stated against.
//!
//! Every transformation returns a new value; nothing here mutates its input.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in R^m. All coordinates are finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        if coords.is_empty() {
            return Err(Error::Domain("a point needs at least one coordinate".into()));
        }
        Ok(Point(coords))
    }

    /// Caller guarantees finiteness (results of arithmetic on finite inputs).
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    pub fn origin(m: usize) -> Self {
        Point(vec![0.0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, k: f64) -> Point {
        Point(self.0.iter().map(|a| a * k).collect())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    pub(crate) fn check_dim(&self, m: usize) -> Result<()> {
        if self.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, found: self.dim() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The ordered list of reported locations, one per agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Profile(Vec<Point>);

impl Profile {
    pub fn new(agents: Vec<Point>) -> Result<Self> {
        let first =
            agents.first().ok_or_else(|| Error::Domain("a profile needs at least one agent".into()))?;
        let m = first.dim();
        for a in &agents[1..] {
            a.check_dim(m)?;
        }
        Ok(Profile(agents))
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        Profile::new(rows.iter().map(|r| Point::new(r.to_vec())).collect::<Result<_>>()?)
    }

    pub(crate) fn from_raw(agents: Vec<Point>) -> Self {
        Profile(agents)
    }

    /// Number of agents n.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0[0].dim()
    }

    pub fn agents(&self) -> &[Point] {
        &self.0
    }

    pub fn agent(&self, i: usize) -> &Point {
        &self.0[i]
    }

    /// Copy with agent `i` replaced by `report`.
    pub fn with_agent(&self, i: usize, report: Point) -> Profile {
        let mut agents = self.0.clone();
        agents[i] = report;
        Profile(agents)
    }

    pub(crate) fn agent_mut(&mut self, i: usize) -> &mut Point {
        &mut self.0[i]
    }

    /// Reorders agents so that new position `k` holds old agent `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Profile {
        Profile(perm.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub(crate) fn check_dim(&self, m: usize) -> Result<()> {
        self.0[0].check_dim(m)
    }
}

impl TryFrom<Vec<Point>> for Profile {
    type Error = Error;

    fn try_from(agents: Vec<Point>) -> Result<Self> {
        Profile::new(agents)
    }
}

impl From<Profile> for Vec<Point> {
    fn from(p: Profile) -> Self {
        p.0
    }
}

/// Dimension `m` and exponent `p` of the ambient L_p space, 1 < p < ∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct SpaceConfig {
    m: usize,
    p: f64,
}

#[derive(Deserialize)]
struct RawSpace {
    m: usize,
    p: f64,
}

impl TryFrom<RawSpace> for SpaceConfig {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceConfig::new(raw.m, raw.p)
    }
}

impl SpaceConfig {
    pub fn new(m: usize, p: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidSpace(format!("exponent must satisfy 1 < p < inf, got {p}")));
        }
        Ok(SpaceConfig { m, p })
    }

    pub fn euclidean(m: usize) -> Result<Self> {
        SpaceConfig::new(m, 2.0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_euclidean(&self) -> bool {
        self.p == 2.0
    }
}

impl fmt::Display for SpaceConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.m, self.p)
    }
}

impl std::str::FromStr for SpaceConfig {
    type Err = Error;

    /// Parses the `m,p` form used on the command line.
    fn from_str(s: &str) -> Result<Self> {
        let (m, p) =
            s.split_once(',').ok_or_else(|| Error::InvalidSpace(format!("expected `m,p`, got `{s}`")))?;
        let m = m.trim().parse().map_err(|_| Error::InvalidSpace(format!("bad dimension `{m}`")))?;
        let p = p.trim().parse().map_err(|_| Error::InvalidSpace(format!("bad exponent `{p}`")))?;
        SpaceConfig::new(m, p)
    }
}

/// Rotation by `theta` radians in the (axis_i, axis_j) coordinate plane about
/// `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneRotation {
    axis_i: usize,
    axis_j: usize,
    theta: f64,
    center: Point,
}

impl PlaneRotation {
    pub fn new(axis_i: usize, axis_j: usize, theta: f64, center: Point) -> Result<Self> {
        if axis_i == axis_j {
            return Err(Error::Domain(format!("rotation axes must differ, both are {axis_i}")));
        }
        let m = center.dim();
        if m < 2 {
            return Err(Error::Unsupported("rotations need m >= 2".into()));
        }
        if axis_i >= m || axis_j >= m {
            return Err(Error::Domain(format!(
                "rotation axes ({axis_i}, {axis_j}) out of range for m = {m}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Domain("rotation angle must be finite".into()));
        }
        Ok(PlaneRotation { axis_i, axis_j, theta, center })
    }

    pub fn about_origin(m: usize, axis_i: usize, axis_j: usize, theta: f64) -> Result<Self> {
        PlaneRotation::new(axis_i, axis_j, theta, Point::origin(m))
    }

    pub fn axes(&self) -> (usize, usize) {
        (self.axis_i, self.axis_j)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn apply(&self, pt: &Point) -> Result<Point> {
        pt.check_dim(self.center.dim())?;
        let (s, c) = self.theta.sin_cos();
        let (i, j) = (self.axis_i, self.axis_j);
        let mut out = pt.0.clone();
        let di = pt[i] - self.center[i];
        let dj = pt[j] - self.center[j];
        out[i] = self.center[i] + c * di - s * dj;
        out[j] = self.center[j] + s * di + c * dj;
        Ok(Point(out))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// L_p distance on raw slices; caller has checked dimensions.
pub(crate) fn lp_dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    }
    // Factor out the largest component so |d/scale|^p stays in range.
    let scale = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| ((x - y).abs() / scale).powf(p)).sum();
    scale * sum.powf(1.0 / p)
}

pub fn lp_distance(a: &Point, b: &Point, space: &SpaceConfig) -> Result<f64> {
    a.check_dim(space.m)?;
    b.check_dim(space.m)?;
    Ok(lp_dist(&a.0, &b.0, space.p))
}

pub fn translate(pts: &Profile, t: &Point) -> Result<Profile> {
    t.check_dim(pts.dim())?;
    Ok(Profile(pts.0.iter().map(|a| a.add(t)).collect()))
}

/// Multiplies every coordinate by `k`; only positive factors are admissible.
pub fn scale(pts: &Profile, k: f64) -> Result<Profile> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("scale factor must be positive, got {k}")));
    }
    Ok(Profile(pts.0.iter().map(|a| a.scaled(k)).collect()))
}

pub fn rotate(pts: &Profile, r: &PlaneRotation) -> Result<Profile> {
    Ok(Profile(pts.0.iter().map(|a| r.apply(a)).collect::<Result<_>>()?))
}

/// Re-centers a two-agent instance so that A = -x, B = x and W = y.
///
/// Returns `(x, y)` with `x = (b - a)/2` and `y = w - (a + b)/2`.
pub fn center_two_agent(a: &Point, b: &Point, w: &Point) -> Result<(Point, Point)> {
    let m = a.dim();
    b.check_dim(m)?;
    w.check_dim(m)?;
    let x = a.0.iter().zip(&b.0).map(|(a, b)| (b - a) / 2.0).collect();
    let y = a.0.iter().zip(&b.0).zip(&w.0).map(|((a, b), w)| w - (a + b) / 2.0).collect();
    Ok((Point(x), Point(y)))
}

/// Midpoint of `a` and `b`, the point `center_two_agent` translates to the
/// origin.
pub fn midpoint(a: &Point, b: &Point) -> Point {
    Point(a.0.iter().zip(&b.0).map(|(a, b)| (a + b) / 2.0).collect())
}
