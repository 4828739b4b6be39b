//! The natural topology on closed subsets of `R^d`.
//!
//! Sets are compactified by adding the point at infinity and mapped to the
//! unit sphere `S^d` by the stereographic projection
//! `j(x) = (2x, |x|^2 - 1) / (1 + |x|^2)`, `j(∞) = (0, …, 0, 1)`; the distance
//! `δ(F, G)` is the Hausdorff distance of the images, capped at 1.
//!
//! Two identities drive everything here:
//!
//! * `|j(x) - j(∞)| = 2 / sqrt(1 + |x|^2)`, so points outside the ball of
//!   radius `T` lie within `2/T` of the pole, which belongs to every image;
//! * `|j(x) - j(y)| = 2|x - y| / sqrt((1 + |x|^2)(1 + |y|^2))`.
//!
//! [`natural_distance`] evaluates δ on the part of the sets inside
//! `T = 4/tol`, which changes the value by at most `tol/2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::spatial::SpatialHash;
use crate::geometry::{Point, PointSet, MAX_ENUMERATION};

/// A unit vector of `R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    pub coords: Vec<f64>,
}

impl SpherePoint {
    pub fn dist(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Image of `∞`.
pub fn north_pole(d: usize) -> SpherePoint {
    let mut coords = vec![0.0; d + 1];
    coords[d] = 1.0;
    SpherePoint { coords }
}

/// Stereographic image of a finite point.
pub fn stereographic(x: &Point) -> SpherePoint {
    let n2 = x.norm2();
    let denom = 1.0 + n2;
    let mut coords: Vec<f64> = x.0.iter().map(|c| 2.0 * c / denom).collect();
    coords.push((n2 - 1.0) / denom);
    SpherePoint { coords }
}

/// `|j(x) - j(∞)|`.
pub fn pole_distance(x: &Point) -> f64 {
    2.0 / (1.0 + x.norm2()).sqrt()
}

/// `|j(x) - j(y)|`, evaluated without forming the sphere points.
pub fn chordal_distance(x: &Point, y: &Point) -> f64 {
    2.0 * x.dist(y) / ((1.0 + x.norm2()) * (1.0 + y.norm2())).sqrt()
}

/// Image on the sphere of `F ∩ U_T(0)` together with `∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactifiedSet {
    pub sphere_points: Vec<SpherePoint>,
    pub truncation_radius: f64,
    /// Bound on the distance from any omitted point's image to the pole.
    pub truncation_error: f64,
}

pub fn compactify(set: &dyn PointSet, truncation_radius: f64) -> Result<CompactifiedSet> {
    set.require_known(truncation_radius)?;
    let mut sphere_points = vec![north_pole(set.dim())];
    sphere_points.extend(set.points_in_ball(truncation_radius)?.iter().map(stereographic));
    Ok(CompactifiedSet {
        sphere_points,
        truncation_radius,
        truncation_error: 2.0 / truncation_radius,
    })
}

/// `min(1, Hausdorff distance)` between finite subsets of the sphere,
/// computed over all pairs.
pub fn hausdorff_capped(a: &[SpherePoint], b: &[SpherePoint]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("Hausdorff distance of an empty set".into()));
    }
    let directed = |from: &[SpherePoint], to: &[SpherePoint]| {
        from.iter()
            .map(|p| to.iter().map(|q| p.dist(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)).min(1.0))
}

/// A truncated evaluation of δ with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalDistance {
    pub value: f64,
    pub error_bound: f64,
}

fn hash_cell(set: &dyn PointSet) -> f64 {
    2.0 * set.params().r
}

/// `sup_{a ∈ A∪{∞}} dist(j(a), j(B ∪ {∞}))` for finite `A`, `B`.
///
/// `a` is processed by increasing norm: once the distance to the pole drops
/// below the running maximum no later point can raise it.
fn directed_spherical(a: &[Point], b: &SpatialHash) -> f64 {
    let mut order: Vec<(f64, usize)> = a.iter().enumerate().map(|(i, p)| (p.norm2(), i)).collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut h: f64 = 0.0;
    for (n2, i) in order {
        let x = &a[i];
        let to_pole = 2.0 / (1.0 + n2).sqrt();
        if to_pole <= h {
            break;
        }
        let nx = n2.sqrt();
        let fx = 1.0 + n2;
        let lower = |t: f64| 2.0 * t / (fx * (1.0 + (nx + t) * (nx + t))).sqrt();
        let best = match b.nearest_by(x, &|y| chordal_distance(x, y), &|t| lower(t).min(to_pole)) {
            Some((_, c)) => c.min(to_pole),
            None => to_pole,
        };
        h = h.max(best);
    }
    h
}

/// δ(F, G) on the part of the sets inside `T = 4/tol`; the returned bound
/// `tol/2` covers the truncation.
pub fn natural_distance(f: &dyn PointSet, g: &dyn PointSet, tol: f64) -> Result<NaturalDistance> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    if f.dim() != g.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    let t = 4.0 / tol;
    f.require_known(t)?;
    g.require_known(t)?;
    let fp = f.points_in_ball(t)?;
    let gp = g.points_in_ball(t)?;
    if fp.len() + gp.len() > MAX_ENUMERATION {
        return Err(Error::Resource(format!(
            "truncation at radius {t} holds {} points",
            fp.len() + gp.len()
        )));
    }
    let d = f.dim();
    let fh = SpatialHash::from_points(d, hash_cell(f), &fp);
    let gh = SpatialHash::from_points(d, hash_cell(g), &gp);
    let (hf, hg) = rayon::join(|| directed_spherical(&fp, &gh), || directed_spherical(&gp, &fh));
    Ok(NaturalDistance {
        value: hf.max(hg).min(1.0),
        error_bound: tol / 2.0,
    })
}

fn directed_euclidean(a: &[Point], b: &SpatialHash) -> f64 {
    a.iter()
        .map(|p| b.nearest(p).map_or(f64::INFINITY, |(_, dist)| dist))
        .fold(0.0, f64::max)
}

/// Euclidean Hausdorff distance between `F ∩ U_L(0)` and `G ∩ U_L(0)`.
pub fn local_hausdorff(f: &dyn PointSet, g: &dyn PointSet, big_l: f64) -> Result<f64> {
    if !(big_l > 0.0 && big_l.is_finite()) {
        return Err(Error::InvalidInput(format!("L must be positive, got {big_l}")));
    }
    if f.dim() != g.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    let fp = f.points_in_ball(big_l)?;
    let gp = g.points_in_ball(big_l)?;
    if fp.is_empty() || gp.is_empty() {
        return Err(Error::EmptyRestriction { radius: big_l });
    }
    let d = f.dim();
    let fh = SpatialHash::from_points(d, hash_cell(f), &fp);
    let gh = SpatialHash::from_points(d, hash_cell(g), &gp);
    Ok(directed_euclidean(&fp, &gh).max(directed_euclidean(&gp, &fh)))
}

/// Largest `2|x - y| / |j(x) - j(y)|` over distinct sample pairs in
/// `U_L(0)`; always at most `1 + L^2`.
pub fn chordal_constant(samples: &[Point], big_l: f64) -> f64 {
    let inside: Vec<&Point> = samples.iter().filter(|p| p.norm() < big_l).collect();
    let mut c: f64 = 0.0;
    for (i, x) in inside.iter().enumerate() {
        for y in &inside[..i] {
            let chord = chordal_distance(x, y);
            if chord > 0.0 {
                c = c.max(2.0 * x.dist(y) / chord);
            }
        }
    }
    c
}

/// One `(l, L, ε)` level of a convergence check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub l: f64,
    pub big_l: f64,
    pub eps: f64,
}

/// One CSV row: element `n` of the sequence compared at radius `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub big_l: f64,
    /// `f64::INFINITY` when exactly one restriction is empty.
    pub local_hausdorff: f64,
    pub delta: f64,
    pub delta_error_bound: f64,
}

/// Condition (i): a point of `ω` and the distances from it to the nearest
/// point of each `ω_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTrack {
    pub x: Point,
    pub distances: Vec<f64>,
    /// The last distance is at most the level's `ε`.
    pub converges: bool,
}

/// Condition (ii) failure witness: a point of the last `ω_n` away from `ω`
/// that has been shadowed (within `ε`) by the trailing `persistence`
/// elements of the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SpuriousCluster {
    pub y: Point,
    pub distance_to_omega: f64,
    pub persistence: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: Level,
    /// Label of the first element from which on `local_hausdorff <= ε`.
    pub n0: Option<usize>,
    pub tracks: Vec<PointTrack>,
    pub spurious: Vec<SpuriousCluster>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub levels: Vec<LevelReport>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,L,local_hausdorff,delta,delta_error_bound\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.big_l, r.local_hausdorff, r.delta, r.delta_error_bound
            ));
        }
        out
    }
}

fn local_or_empty(f: &dyn PointSet, g: &dyn PointSet, big_l: f64) -> Result<f64> {
    match local_hausdorff(f, g, big_l) {
        Err(Error::EmptyRestriction { .. }) => {
            let ef = f.points_in_ball(big_l)?.is_empty();
            let eg = g.points_in_ball(big_l)?.is_empty();
            Ok(if ef && eg { 0.0 } else { f64::INFINITY })
        }
        other => other,
    }
}

fn nearest_distance(points: &[Point], d: usize, cell: f64, q: &Point) -> f64 {
    SpatialHash::from_points(d, cell, points)
        .nearest(q)
        .map_or(f64::INFINITY, |(_, dist)| dist)
}

/// Local and natural-topology convergence of `sequence` (labelled elements,
/// in order) towards `omega`.
pub fn convergence_report(
    sequence: &[(usize, &(dyn PointSet + Sync))],
    omega: &(dyn PointSet + Sync),
    levels: &[Level],
    tol: f64,
) -> Result<ConvergenceReport> {
    let d = omega.dim();
    if let Some((n, _)) = sequence.iter().find(|(_, s)| s.dim() != d) {
        return Err(Error::InvalidInput(format!("element {n} has a different dimension")));
    }
    for lv in levels {
        if !(lv.big_l > 0.0 && lv.eps >= 0.0 && lv.l <= lv.big_l) {
            return Err(Error::InvalidInput(format!("invalid level {lv:?}")));
        }
    }

    // per element: delta and the local distances at every level
    let per_elem: Vec<(NaturalDistance, Vec<f64>)> = sequence
        .par_iter()
        .map(|(_, s)| -> Result<_> {
            let delta = natural_distance(*s, omega, tol)?;
            let local = levels
                .iter()
                .map(|lv| local_or_empty(*s, omega, lv.big_l))
                .collect::<Result<Vec<_>>>()?;
            Ok((delta, local))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for ((n, _), (delta, local)) in sequence.iter().zip(&per_elem) {
        for (lv, &lh) in levels.iter().zip(local) {
            rows.push(ReportRow {
                n: *n,
                big_l: lv.big_l,
                local_hausdorff: lh,
                delta: delta.value,
                delta_error_bound: delta.error_bound,
            });
        }
    }

    let mut level_reports = Vec::new();
    for (k, lv) in levels.iter().enumerate() {
        let mut n0 = None;
        for (i, (n, _)) in sequence.iter().enumerate().rev() {
            if per_elem[i].1[k] <= lv.eps {
                n0 = Some(*n);
            } else {
                break;
            }
        }

        let cell = 2.0 * omega.params().r;
        let omega_pts = omega.points_in_ball(lv.big_l)?;
        let elem_pts: Vec<Vec<Point>> = sequence
            .iter()
            .map(|(_, s)| s.points_in_ball(lv.big_l))
            .collect::<Result<_>>()?;
        let elem_hashes: Vec<SpatialHash> = elem_pts.iter().map(|p| SpatialHash::from_points(d, cell, p)).collect();
        let tracks = omega_pts
            .iter()
            .map(|x| {
                let distances: Vec<f64> = elem_hashes
                    .iter()
                    .map(|h| h.nearest(x).map_or(f64::INFINITY, |(_, dist)| dist))
                    .collect();
                let converges = distances.last().is_some_and(|&t| t <= lv.eps);
                PointTrack {
                    x: x.clone(),
                    distances,
                    converges,
                }
            })
            .collect();

        let mut spurious = Vec::new();
        if let Some(last) = elem_pts.last() {
            for y in last {
                let dist = nearest_distance(&omega_pts, d, cell, y);
                if dist <= lv.eps {
                    continue;
                }
                let persistence = elem_hashes
                    .iter()
                    .rev()
                    .take_while(|h| h.nearest(y).is_some_and(|(_, t)| t <= lv.eps))
                    .count();
                spurious.push(SpuriousCluster {
                    y: y.clone(),
                    distance_to_omega: dist,
                    persistence,
                });
            }
        }
        level_reports.push(LevelReport {
            level: *lv,
            n0,
            tracks,
            spurious,
        });
    }
    Ok(ConvergenceReport {
        rows,
        levels: level_reports,
    })
}
