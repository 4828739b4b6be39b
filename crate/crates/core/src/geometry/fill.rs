//! Greedy maximal separated fill over a candidate grid.
//!
//! Candidates are the nodes of an axis-aligned grid scanned in lexicographic
//! order; a candidate is accepted when it is at least `min_sep` away from
//! every point kept so far. The output is maximal with respect to the grid,
//! so every accepted-region node ends up within `min_sep` of the output.

use super::spatial::SpatialHash;
use super::{check_finite, Cube, Point, TorusMetric, SEPARATION_SLACK};
use crate::error::{Error, Result};

/// Where candidates come from and which metric separates them.
#[derive(Debug, Clone, PartialEq)]
pub enum FillDomain {
    /// The torus `R^d / aZ^d`, candidates in the cell `[-a/2, a/2)^d`,
    /// skipping those inside `exclude`.
    Torus { metric: TorusMetric, exclude: Option<Cube> },
    /// Euclidean candidates in `outer` (a cube of `R^d`), skipping those
    /// inside `inner`.
    Shell { outer: Cube, inner: Option<Cube>, d: usize },
}

impl FillDomain {
    pub fn dim(&self) -> usize {
        match self {
            FillDomain::Torus { metric, .. } => metric.d,
            FillDomain::Shell { d, .. } => *d,
        }
    }
}

/// Returns `seed` followed by the accepted grid candidates.
///
/// `seed` must already be `min_sep`-separated in the domain metric and the
/// pitch must satisfy `pitch <= min_sep / 4`.
pub fn maximal_separated_fill(seed: &[Point], domain: &FillDomain, min_sep: f64, pitch: f64) -> Result<Vec<Point>> {
    if !(min_sep > 0.0) || !(pitch > 0.0) {
        return Err(Error::InvalidInput(format!(
            "min_sep and pitch must be positive, got {min_sep}, {pitch}"
        )));
    }
    if pitch > min_sep / 4.0 {
        return Err(Error::Precondition(format!(
            "pitch {pitch} exceeds min_sep/4 = {}",
            min_sep / 4.0
        )));
    }
    let d = domain.dim();
    check_finite(seed, d)?;
    let radius = min_sep * (1.0 - SEPARATION_SLACK).sqrt();
    let mut hash = match domain {
        FillDomain::Torus { metric, .. } => SpatialHash::torus(*metric, min_sep),
        FillDomain::Shell { .. } => SpatialHash::new(d, min_sep),
    };
    for (i, p) in seed.iter().enumerate() {
        if let Some(j) = hash.any_closer_than(p, radius, None) {
            return Err(Error::Precondition(format!(
                "seed points {j} and {i} are closer than {min_sep}"
            )));
        }
        hash.insert(p.clone());
    }

    let (lo, n, spacing, closed, exclude) = match domain {
        FillDomain::Torus { metric, exclude } => {
            let n = (metric.period / pitch).ceil() as usize;
            (-metric.period / 2.0, n, metric.period / n as f64, false, *exclude)
        }
        FillDomain::Shell { outer, inner, .. } => {
            let s = outer.half_width;
            let n = (2.0 * s / pitch).ceil() as usize;
            (-s, n, 2.0 * s / n as f64, true, *inner)
        }
    };
    // closed grids include the upper face
    let last = if closed { n } else { n - 1 };
    let coord = |k: usize| {
        if closed && k == n {
            -lo
        } else {
            lo + k as f64 * spacing
        }
    };

    let mut idx = vec![0usize; d];
    'scan: loop {
        let cand = Point(idx.iter().map(|&k| coord(k)).collect());
        let excluded = exclude.is_some_and(|c| c.contains(&cand));
        if !excluded && hash.any_closer_than(&cand, radius, None).is_none() {
            hash.insert(cand);
        }
        for i in (0..d).rev() {
            if idx[i] < last {
                idx[i] += 1;
                continue 'scan;
            }
            idx[i] = 0;
        }
        break;
    }
    Ok(hash.points().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{verify_covering, verify_packing, CrystallographicSet, DeloneParams, PointSet};

    fn torus(a: f64) -> FillDomain {
        FillDomain::Torus {
            metric: TorusMetric::new(a, 1).unwrap(),
            exclude: None,
        }
    }

    fn line(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::from(x)).collect()
    }

    fn torus_periodic_check(points: &[Point], a: f64, r: f64, cover: f64, pitch: f64) -> bool {
        let params = DeloneParams::new(r, cover.max(r), 1).unwrap();
        let c = CrystallographicSet::new(a, points.to_vec(), params).unwrap();
        let pts = c.points_in_cube(a / 2.0 + cover + 1.0).unwrap();
        verify_packing(&pts, r).unwrap()
            && verify_covering(&pts, cover, Cube::new(a / 2.0).unwrap(), pitch)
                .unwrap()
                .covered
    }

    #[test]
    fn saturated_seed_is_unchanged() {
        let seed = line(&[0.0, 0.8, 1.6, 2.4, 3.2]);
        let out = maximal_separated_fill(&seed, &torus(4.0), 0.8, 0.05).unwrap();
        assert_eq!(out, seed);
    }

    #[test]
    fn empty_seed_on_torus() {
        let out = maximal_separated_fill(&[], &torus(4.0), 0.8, 0.05).unwrap();
        assert!(out.len() >= 4);
        assert!(torus_periodic_check(&out, 4.0, 0.4, 0.85, 0.05 / 16.0));
    }

    #[test]
    fn fill_adds_far_point() {
        let out = maximal_separated_fill(&line(&[0.0]), &torus(2.0), 0.8, 0.05).unwrap();
        assert!(out.len() > 1);
        let t = TorusMetric::new(2.0, 1).unwrap();
        assert!(out[1..].iter().any(|p| t.dist(p, &out[0]) >= 0.8));
    }

    #[test]
    fn fill_is_idempotent() {
        let domain = FillDomain::Torus {
            metric: TorusMetric::new(5.3, 2).unwrap(),
            exclude: None,
        };
        let once = maximal_separated_fill(&[], &domain, 0.8, 0.1).unwrap();
        let twice = maximal_separated_fill(&once, &domain, 0.8, 0.1).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn bad_seed_is_precondition_error() {
        let e = maximal_separated_fill(&line(&[0.0, 0.5]), &torus(4.0), 0.8, 0.05);
        assert!(matches!(e, Err(Error::Precondition(_))));
        // wrap-around conflict
        let e = maximal_separated_fill(&line(&[-1.9, 1.8]), &torus(4.0), 0.8, 0.05);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn coarse_pitch_rejected() {
        let e = maximal_separated_fill(&[], &torus(4.0), 0.8, 0.3);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn shell_fill_respects_exclusion() {
        let domain = FillDomain::Shell {
            outer: Cube::new(3.0).unwrap(),
            inner: Some(Cube::new(1.0).unwrap()),
            d: 2,
        };
        let out = maximal_separated_fill(&[], &domain, 0.8, 0.05).unwrap();
        assert!(out.iter().all(|p| p.sup_norm() > 1.0 && p.sup_norm() <= 3.0));
        assert!(verify_packing(&out, 0.4).unwrap());
    }

    #[test]
    fn fill_is_deterministic() {
        let domain = FillDomain::Shell {
            outer: Cube::new(4.0).unwrap(),
            inner: None,
            d: 1,
        };
        let a = maximal_separated_fill(&line(&[0.1]), &domain, 0.8, 0.07).unwrap();
        let b = maximal_separated_fill(&line(&[0.1]), &domain, 0.8, 0.07).unwrap();
        assert_eq!(a, b);
    }
}
