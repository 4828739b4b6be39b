//! `(r, R)` verification: packing by exact pair scan, covering by a
//! certified grid scan.

use super::spatial::SpatialHash;
use super::{check_finite, Cube, Point, SEPARATION_SLACK};
use crate::error::{Error, Result};

/// First pair (in index order) closer than `2r`, with its distance.
pub fn packing_violation(points: &[Point], r: f64) -> Result<Option<(usize, usize, f64)>> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("packing radius must be positive, got {r}")));
    }
    let Some(first) = points.first() else {
        return Ok(None);
    };
    let d = first.dim();
    check_finite(points, d)?;
    let sep = 2.0 * r;
    let radius = sep * (1.0 - SEPARATION_SLACK).sqrt();
    let mut hash = SpatialHash::new(d, sep);
    for (i, p) in points.iter().enumerate() {
        if let Some(j) = hash.any_closer_than(p, radius, None) {
            return Ok(Some((j, i, points[j].dist(p))));
        }
        hash.insert(p.clone());
    }
    Ok(None)
}

/// True iff the open balls `U_r(x)` are pairwise disjoint, i.e. all distinct
/// points are at least `2r` apart (equality allowed).
pub fn verify_packing(points: &[Point], r: f64) -> Result<bool> {
    Ok(packing_violation(points, r)?.is_none())
}

/// Outcome of a covering scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringCertificate {
    /// Every grid node lies within `R` of some point.
    pub covered: bool,
    /// Largest node-to-nearest-point distance seen (capped scan: nodes with
    /// nothing within `R` contribute `f64::INFINITY`).
    pub max_node_distance: f64,
    /// Actual node spacing used (at most the requested pitch).
    pub spacing: f64,
    /// Certified covering radius over the region: `max_node_distance +
    /// spacing·sqrt(d)/2`. Meaningful only when `covered`.
    pub certified_radius: f64,
    /// An uncovered node, if any.
    pub witness: Option<Point>,
}

/// Checks that every node of a grid over `region` is within `big_r` of some
/// point. A pass certifies covering radius `<= big_r + pitch·sqrt(d)/2`.
pub fn verify_covering(points: &[Point], big_r: f64, region: Cube, pitch: f64) -> Result<CoveringCertificate> {
    if !(pitch > 0.0) || !(big_r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "pitch and R must be positive, got pitch = {pitch}, R = {big_r}"
        )));
    }
    let s = region.half_width;
    let n = (2.0 * s / pitch).ceil().max(1.0) as usize;
    let spacing = 2.0 * s / n as f64;
    let Some(first) = points.first() else {
        return Ok(CoveringCertificate {
            covered: false,
            max_node_distance: f64::INFINITY,
            spacing,
            certified_radius: f64::INFINITY,
            witness: Some(Point(vec![-s])),
        });
    };
    let d = first.dim();
    check_finite(points, d)?;
    // only points that can reach the region matter
    let reach = s + big_r;
    let relevant: Vec<Point> = points.iter().filter(|p| p.sup_norm() <= reach).cloned().collect();
    let hash = SpatialHash::from_points(d, big_r, &relevant);
    let coord = |k: usize| if k == n { s } else { -s + k as f64 * spacing };

    let mut idx = vec![0usize; d];
    let mut max_dist: f64 = 0.0;
    let mut witness = None;
    'scan: loop {
        let node = Point(idx.iter().map(|&k| coord(k)).collect());
        match hash.nearest_within(&node, big_r) {
            Some(dist) => max_dist = max_dist.max(dist),
            None => {
                max_dist = f64::INFINITY;
                witness = Some(node);
                break 'scan;
            }
        }
        for i in (0..d).rev() {
            if idx[i] < n {
                idx[i] += 1;
                continue 'scan;
            }
            idx[i] = 0;
        }
        break;
    }
    let covered = witness.is_none();
    Ok(CoveringCertificate {
        covered,
        max_node_distance: max_dist,
        spacing,
        certified_radius: max_dist + spacing * (d as f64).sqrt() / 2.0,
        witness,
    })
}
