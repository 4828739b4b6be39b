//! Delone-set representations and the constructive extension lemmas.
//!
//! Infinite Delone sets are only ever handled through two finite
//! representations:
//!
//! * [`WindowedPointSet`]: the points inside a cube `Q(S) = [-S, S]^d`,
//!   optionally continued outside the cube by a crystallographic tail.
//! * [`CrystallographicSet`]: a cubic lattice `a·Z^d` plus a finite motif in
//!   the centred fundamental cell `[-a/2, a/2)^d`.
//!
//! Point coordinates are copied bit-exactly by every construction, so set
//! equality is plain coordinate equality after [`sort_canonical`].

mod construct;
mod fill;
pub mod io;
mod random;
pub(crate) mod spatial;
mod verify;

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};

pub use construct::{crystallographic_extension, glue, per_lattice_check, GlueOutput};
pub use fill::{maximal_separated_fill, FillDomain};
pub use random::{random_crystal, random_delone};
pub use verify::{packing_violation, verify_covering, verify_packing, CoveringCertificate};

/// Relative slack applied to every separation test, so that lattices such as
/// `0.8·Z` whose decimal coordinates round differently still count as
/// `2r`-separated.
pub const SEPARATION_SLACK: f64 = 1e-9;

/// Upper limit on the number of points a single enumeration may produce.
pub const MAX_ENUMERATION: usize = 20_000_000;

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(d: usize) -> Self {
        Point(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// Largest absolute coordinate.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// Lexicographic order on coordinates using `total_cmp`.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point(vec![x])
    }
}

/// Sorts points lexicographically; the canonical form for set comparisons.
pub fn sort_canonical(points: &mut [Point]) {
    points.sort_by(|a, b| a.lex_cmp(b));
}

pub(crate) fn check_finite(points: &[Point], d: usize) -> Result<()> {
    for p in points {
        if p.dim() != d {
            return Err(Error::InvalidInput(format!(
                "point {:?} has dimension {}, expected {d}",
                p.0,
                p.dim()
            )));
        }
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite coordinate in {:?}", p.0)));
        }
    }
    Ok(())
}

/// Packing radius `r`, covering radius `R` and ambient dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeloneParams {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub d: usize,
}

impl DeloneParams {
    pub fn new(r: f64, big_r: f64, d: usize) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && big_r.is_finite() && r <= big_r) {
            return Err(Error::InvalidInput(format!(
                "need 0 < r <= R, got r = {r}, R = {big_r}"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(DeloneParams { r, big_r, d })
    }

    /// The constructions need `2r <= R`.
    pub fn require_construction(&self) -> Result<()> {
        if 2.0 * self.r > self.big_r {
            return Err(Error::Precondition(format!(
                "constructions need 2r <= R, got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        Ok(())
    }

    /// Largest pitch for which a `2r`-maximal grid fill certifies covering
    /// radius `R`, i.e. `2r + pitch·sqrt(d) <= R`.
    pub fn max_certified_pitch(&self) -> f64 {
        (self.big_r - 2.0 * self.r) / (self.d as f64).sqrt()
    }
}

/// The closed cube `Q(S) = [-S, S]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub half_width: f64,
}

impl Cube {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cube half-width must be positive, got {half_width}"
            )));
        }
        Ok(Cube { half_width })
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.0.iter().all(|x| x.abs() <= self.half_width)
    }
}

/// The flat torus `R^d / aZ^d` with its quotient Euclidean metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusMetric {
    pub period: f64,
    pub d: usize,
}

impl TorusMetric {
    pub fn new(period: f64, d: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) || d == 0 {
            return Err(Error::InvalidInput(format!("invalid torus: period {period}, d {d}")));
        }
        Ok(TorusMetric { period, d })
    }

    /// Reduces a coordinate difference into `[-a/2, a/2]`.
    #[inline]
    pub fn wrap(&self, x: f64) -> f64 {
        x - self.period * (x / self.period).round()
    }

    pub fn dist2(&self, p: &Point, q: &Point) -> f64 {
        p.0.iter()
            .zip(&q.0)
            .map(|(a, b)| {
                let w = self.wrap(a - b);
                w * w
            })
            .sum()
    }

    pub fn dist(&self, p: &Point, q: &Point) -> f64 {
        self.dist2(p, q).sqrt()
    }
}

/// Anything that can list its points inside a cube.
pub trait PointSet {
    fn dim(&self) -> usize;

    fn params(&self) -> DeloneParams;

    /// Half-width of the largest cube on which the set is fully determined
    /// (`f64::INFINITY` for periodic sets and sets with a tail).
    fn known_half_width(&self) -> f64;

    /// All points in the closed cube `Q(s)`, in canonical order.
    fn points_in_cube(&self, s: f64) -> Result<Vec<Point>>;

    fn require_known(&self, s: f64) -> Result<()> {
        let known = self.known_half_width();
        if known < s {
            return Err(Error::InsufficientWindow {
                required: s,
                available: known,
            });
        }
        Ok(())
    }

    /// Points in the open Euclidean ball `U_radius(0)`.
    fn points_in_ball(&self, radius: f64) -> Result<Vec<Point>> {
        let r2 = radius * radius;
        Ok(self
            .points_in_cube(radius)?
            .into_iter()
            .filter(|p| p.norm2() < r2)
            .collect())
    }
}

/// A crystallographic Delone set `a·Z^d + motif`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystallographicSet {
    pub period: f64,
    pub motif: Vec<Point>,
    pub params: DeloneParams,
}

impl CrystallographicSet {
    /// Builds the set; the motif is stored as given, see [`per_lattice_check`]
    /// for representation consistency.
    pub fn new(period: f64, motif: Vec<Point>, params: DeloneParams) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        check_finite(&motif, params.d)?;
        Ok(CrystallographicSet { period, motif, params })
    }

    /// `a·Z` shifted by `offset` (d = 1); the offset is reduced into the cell.
    pub fn lattice_1d(period: f64, offset: f64, params: DeloneParams) -> Result<Self> {
        let torus = TorusMetric::new(period, 1)?;
        let mut m = torus.wrap(offset);
        if m >= period / 2.0 {
            m -= period;
        }
        CrystallographicSet::new(period, vec![Point(vec![m])], params)
    }

    pub fn torus(&self) -> TorusMetric {
        TorusMetric {
            period: self.period,
            d: self.params.d,
        }
    }

    fn estimate_count(&self, s: f64) -> f64 {
        let per_axis = (2.0 * s / self.period).floor() + 2.0;
        self.motif.len() as f64 * per_axis.powi(self.params.d as i32)
    }
}

impl PointSet for CrystallographicSet {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn params(&self) -> DeloneParams {
        self.params
    }

    fn known_half_width(&self) -> f64 {
        f64::INFINITY
    }

    fn points_in_cube(&self, s: f64) -> Result<Vec<Point>> {
        if self.estimate_count(s) > MAX_ENUMERATION as f64 {
            return Err(Error::Resource(format!(
                "enumerating a period-{} set on Q({s}) exceeds {MAX_ENUMERATION} points",
                self.period
            )));
        }
        let a = self.period;
        let d = self.params.d;
        let mut out = Vec::new();
        for m in &self.motif {
            // admissible lattice indices per axis
            let ranges: Vec<(i64, i64)> =
                m.0.iter()
                    .map(|&x| (((-s - x) / a).ceil() as i64 - 1, ((s - x) / a).floor() as i64 + 1))
                    .collect();
            let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            'outer: loop {
                let coords: Vec<f64> = (0..d)
                    .map(|i| {
                        if idx[i] == 0 {
                            m.0[i]
                        } else {
                            m.0[i] + idx[i] as f64 * a
                        }
                    })
                    .collect();
                if coords.iter().all(|x| x.abs() <= s) {
                    out.push(Point(coords));
                }
                for i in (0..d).rev() {
                    if idx[i] < ranges[i].1 {
                        idx[i] += 1;
                        continue 'outer;
                    }
                    idx[i] = ranges[i].0;
                }
                break;
            }
        }
        sort_canonical(&mut out);
        Ok(out)
    }
}

/// The restriction of a Delone set to a cube, optionally continued outside
/// the cube by a crystallographic tail.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedPointSet {
    pub points: Vec<Point>,
    pub window: Cube,
    pub params: DeloneParams,
    /// Behaviour strictly outside the window.
    pub tail: Option<CrystallographicSet>,
}

impl WindowedPointSet {
    pub fn new(points: Vec<Point>, window: Cube, params: DeloneParams) -> Result<Self> {
        check_finite(&points, params.d)?;
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(Error::InvalidInput(format!(
                "point {:?} lies outside the window Q({})",
                p.0, window.half_width
            )));
        }
        let mut points = points;
        sort_canonical(&mut points);
        Ok(WindowedPointSet {
            points,
            window,
            params,
            tail: None,
        })
    }

    pub fn with_tail(mut self, tail: CrystallographicSet) -> Result<Self> {
        if tail.params.d != self.params.d {
            return Err(Error::InvalidInput("tail dimension differs from the set".into()));
        }
        self.tail = Some(tail);
        Ok(self)
    }
}

impl PointSet for WindowedPointSet {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn params(&self) -> DeloneParams {
        self.params
    }

    fn known_half_width(&self) -> f64 {
        if self.tail.is_some() {
            f64::INFINITY
        } else {
            self.window.half_width
        }
    }

    fn points_in_cube(&self, s: f64) -> Result<Vec<Point>> {
        self.require_known(s)?;
        let mut out: Vec<Point> = self.points.iter().filter(|p| p.sup_norm() <= s).cloned().collect();
        if let Some(tail) = &self.tail {
            if s > self.window.half_width {
                out.extend(tail.points_in_cube(s)?.into_iter().filter(|p| !self.window.contains(p)));
            }
        }
        sort_canonical(&mut out);
        Ok(out)
    }
}

/// Either representation; what the file formats carry.
#[derive(Debug, Clone, PartialEq)]
pub enum DeloneSet {
    Windowed(WindowedPointSet),
    Crystal(CrystallographicSet),
}

impl DeloneSet {
    pub fn as_point_set(&self) -> &dyn PointSet {
        match self {
            DeloneSet::Windowed(w) => w,
            DeloneSet::Crystal(c) => c,
        }
    }
}

impl PointSet for DeloneSet {
    fn dim(&self) -> usize {
        self.as_point_set().dim()
    }

    fn params(&self) -> DeloneParams {
        self.as_point_set().params()
    }

    fn known_half_width(&self) -> f64 {
        self.as_point_set().known_half_width()
    }

    fn points_in_cube(&self, s: f64) -> Result<Vec<Point>> {
        self.as_point_set().points_in_cube(s)
    }
}
