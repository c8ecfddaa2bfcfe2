//! Planar geometry for bistatic-range localization.
//!
//! A bistatic range (BR) is the length of the path transmitter → target →
//! receiver. A noiseless BR puts the target on an ellipse with the
//! transmitter and receiver as foci; a BR known up to `±rho` puts it in an
//! elliptic annulus. The feasible set is the intersection of all annuli.

use std::fmt;

use log::debug;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("scenario needs at least one transmitter and one receiver (got M={m}, L={l})")]
    EmptyScenario { m: usize, l: usize },
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("range matrix is {got_m}x{got_l}, scenario expects {m}x{l}")]
    DimensionMismatch {
        m: usize,
        l: usize,
        got_m: usize,
        got_l: usize,
    },
    #[error("error bound must be finite and non-negative, got {0}")]
    InvalidBound(f64),
    #[error("transmitter {tx} coincides with receiver {rx}")]
    DegenerateEllipse { tx: usize, rx: usize },
    #[error("grid step must be positive and finite, got {0}")]
    InvalidGridStep(f64),
    #[error("empty feasible sample: no grid point of the box satisfies every range bound")]
    EmptyFeasibleSample,
}

/// A point (or vector) in the plane, in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(&self, other: &Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (*self - *other).norm()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.x, self.y)
    }
}

/// Known transmitter and receiver positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "transmitters_m")]
    pub transmitters: Vec<Point2>,
    #[serde(rename = "receivers_m")]
    pub receivers: Vec<Point2>,
}

impl Scenario {
    pub fn new(transmitters: Vec<Point2>, receivers: Vec<Point2>) -> Result<Self, GeometryError> {
        let s = Self {
            transmitters,
            receivers,
        };
        s.validate()?;
        Ok(s)
    }

    /// The three-transmitter, four-receiver layout used throughout the
    /// experiments (target at (100, 100)).
    pub fn reference() -> Self {
        Self {
            transmitters: vec![
                Point2::new(-200.0, -300.0),
                Point2::new(-200.0, 300.0),
                Point2::new(200.0, 300.0),
            ],
            receivers: vec![
                Point2::new(-450.0, -450.0),
                Point2::new(450.0, 450.0),
                Point2::new(0.0, 600.0),
                Point2::new(600.0, 0.0),
            ],
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.transmitters.is_empty() || self.receivers.is_empty() {
            return Err(GeometryError::EmptyScenario {
                m: self.m(),
                l: self.l(),
            });
        }
        if !self.transmitters.iter().all(Point2::is_finite) {
            return Err(GeometryError::NonFinite("transmitters"));
        }
        if !self.receivers.iter().all(Point2::is_finite) {
            return Err(GeometryError::NonFinite("receivers"));
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate) but also rejects transmitter/receiver
    /// pairs at identical coordinates, whose "ellipse" degenerates to a circle
    /// with no interior focus separation.
    pub fn validate_strict(&self) -> Result<(), GeometryError> {
        self.validate()?;
        for (tx, t) in self.transmitters.iter().enumerate() {
            for (rx, s) in self.receivers.iter().enumerate() {
                if t == s {
                    return Err(GeometryError::DegenerateEllipse { tx, rx });
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.transmitters.len()
    }

    pub fn l(&self) -> usize {
        self.receivers.len()
    }

    /// Noiseless M×L range matrix for a target at `x`.
    pub fn ranges_for(&self, x: Point2) -> DMatrix<f64> {
        DMatrix::from_fn(self.m(), self.l(), |m, l| {
            bistatic_range(x, self.transmitters[m], self.receivers[l])
        })
    }

    /// Centroid of every transmitter and receiver.
    pub fn centroid(&self) -> Point2 {
        let n = (self.m() + self.l()) as f64;
        let sum = self
            .transmitters
            .iter()
            .chain(&self.receivers)
            .fold(Point2::default(), |acc, p| acc + *p);
        sum * (1.0 / n)
    }

    /// Applies `f` to every sensor position.
    pub fn map_positions(&self, f: impl Fn(Point2) -> Point2) -> Scenario {
        Scenario {
            transmitters: self.transmitters.iter().map(|p| f(*p)).collect(),
            receivers: self.receivers.iter().map(|p| f(*p)).collect(),
        }
    }
}

/// Observed ranges with a symmetric error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    pub ranges: DMatrix<f64>,
    pub rho: f64,
}

impl MeasurementSet {
    pub fn new(ranges: DMatrix<f64>, rho: f64) -> Result<Self, GeometryError> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(GeometryError::InvalidBound(rho));
        }
        if !ranges.iter().all(|r| r.is_finite()) {
            return Err(GeometryError::NonFinite("ranges"));
        }
        Ok(Self { ranges, rho })
    }

    pub fn check_dims(&self, scenario: &Scenario) -> Result<(), GeometryError> {
        let (got_m, got_l) = self.ranges.shape();
        if got_m != scenario.m() || got_l != scenario.l() {
            return Err(GeometryError::DimensionMismatch {
                m: scenario.m(),
                l: scenario.l(),
                got_m,
                got_l,
            });
        }
        Ok(())
    }

    pub fn lower(&self, m: usize, l: usize) -> f64 {
        self.ranges[(m, l)] - self.rho
    }

    pub fn upper(&self, m: usize, l: usize) -> f64 {
        self.ranges[(m, l)] + self.rho
    }
}

/// `‖x − t‖ + ‖x − s‖`.
pub fn bistatic_range(x: Point2, t: Point2, s: Point2) -> f64 {
    x.distance(&t) + x.distance(&s)
}

/// Interval bounds used for membership, with lower bounds below the focal
/// distance clamped up to it (no point can have a smaller BR).
fn membership_bounds(scenario: &Scenario, meas: &MeasurementSet) -> Vec<(usize, usize, f64, f64)> {
    let mut out = Vec::with_capacity(scenario.m() * scenario.l());
    for (m, t) in scenario.transmitters.iter().enumerate() {
        for (l, s) in scenario.receivers.iter().enumerate() {
            let focal = t.distance(s);
            let mut lo = meas.lower(m, l);
            if lo < focal {
                debug!(
                    "clamping lower bound of pair ({m},{l}) from {lo} to focal distance {focal}"
                );
                lo = focal;
            }
            out.push((m, l, lo, meas.upper(m, l)));
        }
    }
    out
}

fn contains_with(z: Point2, scenario: &Scenario, bounds: &[(usize, usize, f64, f64)]) -> bool {
    bounds.iter().all(|&(m, l, lo, hi)| {
        let r = bistatic_range(z, scenario.transmitters[m], scenario.receivers[l]);
        lo <= r && r <= hi
    })
}

/// Whether `z` lies in every closed elliptic annulus.
pub fn feasible_set_contains(
    z: Point2,
    scenario: &Scenario,
    meas: &MeasurementSet,
) -> Result<bool, GeometryError> {
    meas.check_dims(scenario)?;
    let bounds = membership_bounds(scenario, meas);
    Ok(contains_with(z, scenario, &bounds))
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point2,
    pub max: Point2,
}

impl BoundingBox {
    pub fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn square(center: Point2, half_width: f64) -> Self {
        let h = Point2::new(half_width, half_width);
        Self::new(center - h, center + h)
    }
}

/// Result of the brute-force Chebyshev-center search.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub center: Point2,
    pub radius: f64,
    /// Number of feasible grid samples.
    pub feasible_count: usize,
}

/// Brute-force Chebyshev center of the feasible set, sampled on a grid.
///
/// Candidates are restricted to the same grid as the samples. Intended as a
/// test reference, not for production use.
pub fn chebyshev_oracle(
    scenario: &Scenario,
    meas: &MeasurementSet,
    bbox: BoundingBox,
    grid_step: f64,
) -> Result<OracleResult, GeometryError> {
    meas.check_dims(scenario)?;
    let bounds = membership_bounds(scenario, meas);
    chebyshev_oracle_with(bbox, grid_step, |z| contains_with(z, scenario, &bounds))
}

/// Grid Chebyshev center for an arbitrary membership predicate.
pub fn chebyshev_oracle_with(
    bbox: BoundingBox,
    grid_step: f64,
    contains: impl Fn(Point2) -> bool,
) -> Result<OracleResult, GeometryError> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(GeometryError::InvalidGridStep(grid_step));
    }
    let nx = ((bbox.max.x - bbox.min.x) / grid_step + 1e-9).floor() as usize + 1;
    let ny = ((bbox.max.y - bbox.min.y) / grid_step + 1e-9).floor() as usize + 1;
    let at = |i: usize, j: usize| {
        Point2::new(
            bbox.min.x + i as f64 * grid_step,
            bbox.min.y + j as f64 * grid_step,
        )
    };

    // (i, j) of feasible samples, in lexicographic order.
    let mut feasible = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            if contains(at(i, j)) {
                feasible.push((i, j));
            }
        }
    }
    if feasible.is_empty() {
        return Err(GeometryError::EmptyFeasibleSample);
    }

    // The farthest sample from any candidate is a hull vertex, and the
    // minimax center lies within the samples' bounding box.
    let hull = convex_hull(&feasible);
    let (i_lo, i_hi) = feasible
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &(i, _)| (lo.min(i), hi.max(i)));
    let (j_lo, j_hi) = feasible
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &(_, j)| (lo.min(j), hi.max(j)));

    let mut best: Option<((usize, usize), f64)> = None;
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            let worst_sq = hull
                .iter()
                .map(|&(hi, hj)| {
                    let dx = i as f64 - hi as f64;
                    let dy = j as f64 - hj as f64;
                    dx * dx + dy * dy
                })
                .fold(0.0, f64::max);
            // Strict improvement keeps the lexicographically first candidate on ties.
            if best.is_none_or(|(_, b)| worst_sq < b) {
                best = Some(((i, j), worst_sq));
            }
        }
    }
    let ((i, j), worst_sq) = best.expect("at least one candidate");
    Ok(OracleResult {
        center: at(i, j),
        radius: worst_sq.sqrt() * grid_step,
        feasible_count: feasible.len(),
    })
}

/// Andrew's monotone chain on integer grid coordinates. Input must be sorted
/// lexicographically.
fn convex_hull(points: &[(usize, usize)]) -> Vec<(usize, usize)> {
    if points.len() < 3 {
        return points.to_vec();
    }
    let cross = |o: (usize, usize), a: (usize, usize), b: (usize, usize)| -> i64 {
        let (ox, oy) = (o.0 as i64, o.1 as i64);
        (a.0 as i64 - ox) * (b.1 as i64 - oy) - (a.1 as i64 - oy) * (b.0 as i64 - ox)
    };
    let mut lower: Vec<(usize, usize)> = Vec::new();
    for &p in points {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(usize, usize)> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
