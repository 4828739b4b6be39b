//! Periodic extension and gluing of Delone sets.

use super::fill::{maximal_separated_fill, FillDomain};
use super::spatial::SpatialHash;
use super::{
    sort_canonical, verify_covering, CrystallographicSet, Cube, DeloneParams, Point, PointSet, TorusMetric,
    WindowedPointSet, SEPARATION_SLACK,
};
use crate::error::{Error, Result};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Whether `2r + pitch·sqrt(d) <= R`, i.e. a grid-maximal `2r` fill is
/// guaranteed to cover at radius `R`.
fn margin_certifies(params: &DeloneParams, pitch: f64) -> bool {
    2.0 * params.r + pitch * (params.d as f64).sqrt() <= params.big_r
}

fn refine_pitch(params: &DeloneParams, pitch: f64) -> Error {
    Error::RefinePitch {
        pitch,
        required: params.max_certified_pitch().max(0.0),
        margin: params.big_r - 2.0 * params.r,
    }
}

/// A crystallographic set of period `2(S + R + r)` that coincides with
/// `omega` on `Q(S)`.
///
/// The motif is `omega ∩ Q(S + R)` (coordinates copied unchanged) completed
/// by a grid-maximal `2r`-separated fill of the torus outside `Q(S)`.
/// When the pitch is too coarse for the margin `R - 2r` to absorb, the
/// covering is checked a posteriori and a [`Error::RefinePitch`] is returned
/// if it fails.
pub fn crystallographic_extension(omega: &dyn PointSet, s: f64, pitch: f64) -> Result<CrystallographicSet> {
    check_positive("S", s)?;
    check_positive("pitch", pitch)?;
    let params = omega.params();
    params.require_construction()?;
    let DeloneParams { r, big_r, d } = params;
    omega.require_known(s + big_r)?;

    let period = 2.0 * (s + big_r + r);
    let seed = omega.points_in_cube(s + big_r)?;
    let domain = FillDomain::Torus {
        metric: TorusMetric::new(period, d)?,
        exclude: Some(Cube::new(s)?),
    };
    let mut motif = maximal_separated_fill(&seed, &domain, 2.0 * r, pitch)?;
    sort_canonical(&mut motif);
    let crystal = CrystallographicSet::new(period, motif, params)?;

    if !margin_certifies(&params, pitch) {
        let pts = crystal.points_in_cube(period / 2.0 + big_r + pitch)?;
        let cert = verify_covering(&pts, big_r, Cube::new(period / 2.0)?, pitch / 4.0)?;
        if !cert.covered {
            return Err(refine_pitch(&params, pitch));
        }
    }
    Ok(crystal)
}

/// Result of [`glue`].
#[derive(Debug, Clone, PartialEq)]
pub struct GlueOutput {
    /// The glued set: explicit points in `Q(S + 2R + r)`, `gamma` outside.
    pub set: WindowedPointSet,
    /// Grid points added by the fill; all lie in `Q(S + 2R + r) \ Q(S)`.
    pub added: Vec<Point>,
    /// Points of `gamma` in the transition shell that conflicted with the
    /// retained part of `omega` and were removed.
    pub dropped: Vec<Point>,
}

/// A Delone set equal to `omega` on `Q(S)` and to `gamma` outside
/// `Q(S + 2R + r)`.
///
/// Starts from `omega ∩ Q(S + R)` together with the points of `gamma`
/// outside `Q(S + R + r)`, dropping those `gamma` points that come closer
/// than `2r` to the retained part of `omega` (they all lie inside
/// `Q(S + R + 2r)`), then fills `Q(S + 2R + r) \ Q(S)` greedily.
pub fn glue(omega: &dyn PointSet, gamma: &CrystallographicSet, s: f64, pitch: f64) -> Result<GlueOutput> {
    check_positive("S", s)?;
    check_positive("pitch", pitch)?;
    let params = omega.params();
    params.require_construction()?;
    let DeloneParams { r, big_r, d } = params;
    if gamma.params.d != d {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: omega has d = {d}, gamma has d = {}",
            gamma.params.d
        )));
    }
    omega.require_known(s + big_r)?;

    let outer = s + 2.0 * big_r + r;
    let sep = 2.0 * r;
    let core = omega.points_in_cube(s + big_r)?;
    let core_hash = SpatialHash::from_points(d, sep, &core);
    let radius = sep * (1.0 - SEPARATION_SLACK).sqrt();

    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for y in gamma.points_in_cube(outer + sep)? {
        if y.sup_norm() <= s + big_r + r {
            continue;
        }
        if core_hash.any_closer_than(&y, radius, None).is_some() {
            debug_assert!(y.sup_norm() <= outer);
            dropped.push(y);
        } else {
            kept.push(y);
        }
    }

    let mut seed = core;
    seed.extend(kept);
    let n_seed = seed.len();
    let domain = FillDomain::Shell {
        outer: Cube::new(outer)?,
        inner: Some(Cube::new(s)?),
        d,
    };
    let all = maximal_separated_fill(&seed, &domain, sep, pitch)?;
    let added = all[n_seed..].to_vec();

    let window = Cube::new(outer)?;
    let inside: Vec<Point> = all.into_iter().filter(|p| window.contains(p)).collect();
    let set = WindowedPointSet::new(inside, window, params)?.with_tail(gamma.clone())?;

    if !margin_certifies(&params, pitch) {
        let region = Cube::new(outer + big_r)?;
        let pts = set.points_in_cube(region.half_width + big_r + pitch)?;
        if !verify_covering(&pts, big_r, region, pitch / 4.0)?.covered {
            return Err(refine_pitch(&params, pitch));
        }
    }
    Ok(GlueOutput { set, added, dropped })
}

/// Checks that the motif is a consistent description of a lattice-periodic
/// set: finite coordinates inside the cell `[-a/2, a/2)^d`, no two motif
/// points congruent modulo `aZ^d`, and translation by `a` along every axis
/// mapping the motif onto itself after reduction to the cell.
pub fn per_lattice_check(rho: &CrystallographicSet) -> bool {
    let a = rho.period;
    let d = rho.params.d;
    if !(a > 0.0 && a.is_finite()) {
        return false;
    }
    let half = a / 2.0;
    let tol = 1e-9 * a;
    let torus = TorusMetric { period: a, d };
    let in_cell = |p: &Point| p.dim() == d && p.0.iter().all(|&x| x.is_finite() && -half <= x && x < half);
    if !rho.motif.iter().all(in_cell) {
        return false;
    }
    for (i, p) in rho.motif.iter().enumerate() {
        if rho.motif[..i].iter().any(|q| torus.dist(p, q) <= tol) {
            return false;
        }
    }
    // reduce(m + a e_i) must land back on a motif point
    let reduce = |x: f64| {
        let y = x - a * (x / a).round();
        if y >= half {
            y - a
        } else {
            y
        }
    };
    rho.motif.iter().all(|m| {
        (0..d).all(|axis| {
            let shifted: Vec<f64> =
                m.0.iter()
                    .enumerate()
                    .map(|(k, &x)| if k == axis { reduce(x + a) } else { x })
                    .collect();
            let shifted = Point(shifted);
            rho.motif.iter().any(|q| q.dist(&shifted) <= tol)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{verify_packing, DeloneSet};

    fn params(r: f64, big_r: f64, d: usize) -> DeloneParams {
        DeloneParams::new(r, big_r, d).unwrap()
    }

    fn integers_in(half: f64, p: DeloneParams) -> WindowedPointSet {
        let k = half.floor() as i64;
        let pts = (-k..=k).map(|i| Point::from(i as f64)).collect();
        WindowedPointSet::new(pts, Cube::new(half).unwrap(), p).unwrap()
    }

    fn coords(points: &[Point]) -> Vec<f64> {
        points.iter().map(|p| p.0[0]).collect()
    }

    #[test]
    fn extension_period_and_agreement() {
        let p = params(0.4, 0.9, 1);
        let omega = integers_in(4.2, p);
        let rho = crystallographic_extension(&omega, 3.0, 0.05).unwrap();
        assert_eq!(rho.period, 2.0 * (3.0 + 0.9 + 0.4));
        let inside = rho.points_in_cube(3.0).unwrap();
        assert_eq!(coords(&inside), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(per_lattice_check(&rho));
        let pts = rho.points_in_cube(rho.period / 2.0 + 2.0).unwrap();
        assert!(verify_packing(&pts, 0.4).unwrap());
        let cert = verify_covering(&pts, 0.9, Cube::new(rho.period / 2.0).unwrap(), 0.01).unwrap();
        assert!(cert.covered);
    }

    #[test]
    fn extension_of_empty_set() {
        let p = params(0.4, 1.0, 1);
        let omega = WindowedPointSet::new(vec![], Cube::new(5.0).unwrap(), p).unwrap();
        let rho = crystallographic_extension(&omega, 2.0, 0.05).unwrap();
        assert!(rho.points_in_cube(2.0).unwrap().is_empty());
        assert!(!rho.motif.is_empty());
        assert!(per_lattice_check(&rho));
    }

    #[test]
    fn extension_needs_window() {
        let p = params(0.4, 0.9, 1);
        let omega = integers_in(3.5, p);
        let e = crystallographic_extension(&omega, 3.0, 0.05).unwrap_err();
        assert_eq!(
            e,
            Error::InsufficientWindow {
                required: 3.9,
                available: 3.5
            }
        );
    }

    #[test]
    fn extension_reports_required_pitch() {
        let p = params(0.4, 0.85, 1);
        let omega = integers_in(5.0, p);
        // margin 0.05: pitch 0.1 cannot be certified a priori; a coarse grid
        // leaves a covering hole somewhere or succeeds a posteriori
        match crystallographic_extension(&omega, 3.0, 0.1) {
            Ok(rho) => {
                let pts = rho.points_in_cube(rho.period).unwrap();
                assert!(
                    verify_covering(&pts, 0.85, Cube::new(rho.period / 2.0).unwrap(), 0.01)
                        .unwrap()
                        .covered
                );
            }
            Err(Error::RefinePitch { required, .. }) => assert!((required - 0.05).abs() < 1e-12),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn extension_rejects_tight_params() {
        let omega = integers_in(5.0, params(0.5, 0.9, 1));
        assert!(matches!(
            crystallographic_extension(&omega, 3.0, 0.05),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn glue_of_integers_is_integers() {
        let p = params(0.4, 0.8, 1);
        let omega = integers_in(10.0, p);
        let gamma = CrystallographicSet::lattice_1d(1.0, 0.0, p).unwrap();
        let out = glue(&omega, &gamma, 3.3, 0.05).unwrap();
        assert!(out.added.is_empty());
        assert!(out.dropped.is_empty());
        let pts = out.set.points_in_cube(9.0).unwrap();
        assert_eq!(coords(&pts), (-9..=9).map(|k| k as f64).collect::<Vec<_>>());
    }

    #[test]
    fn glue_agrees_inside_and_outside() {
        let p = params(0.4, 1.0, 1);
        let omega = WindowedPointSet::new(
            (-6..=6).map(|k| Point::from(k as f64 * 1.3)).collect(),
            Cube::new(8.0).unwrap(),
            p,
        )
        .unwrap();
        let gamma = CrystallographicSet::lattice_1d(1.7, 0.35, p).unwrap();
        let s = 2.5;
        let out = glue(&omega, &gamma, s, 0.05).unwrap();
        let outer = s + 2.0 + 0.4;
        assert_eq!(out.set.points_in_cube(s).unwrap(), omega.points_in_cube(s).unwrap());
        let far = 20.0;
        let ours: Vec<Point> = out
            .set
            .points_in_cube(far)
            .unwrap()
            .into_iter()
            .filter(|q| q.sup_norm() > outer)
            .collect();
        let theirs: Vec<Point> = gamma
            .points_in_cube(far)
            .unwrap()
            .into_iter()
            .filter(|q| q.sup_norm() > outer)
            .collect();
        assert_eq!(ours, theirs);
        assert!(out.added.iter().all(|q| q.sup_norm() > s && q.sup_norm() <= outer));
        let pts = out.set.points_in_cube(far).unwrap();
        assert!(verify_packing(&pts, 0.4).unwrap());
        assert!(
            verify_covering(&pts, 1.0, Cube::new(far - 1.0).unwrap(), 0.01)
                .unwrap()
                .covered
        );
    }

    #[test]
    fn per_lattice_examples() {
        let p = params(0.2, 0.5, 1);
        let z = CrystallographicSet::new(1.0, vec![Point::from(0.0)], p).unwrap();
        assert!(per_lattice_check(&z));
        let half = CrystallographicSet::new(1.0, vec![Point::from(0.0), Point::from(-0.5)], p).unwrap();
        assert!(per_lattice_check(&half));
        // a translated copy of 0 slipped into the motif
        let corrupted =
            CrystallographicSet::new(1.0, vec![Point::from(0.0), Point::from(-0.5), Point::from(1.0)], p).unwrap();
        assert!(!per_lattice_check(&corrupted));
        let dup =
            CrystallographicSet::new(1.0, vec![Point::from(0.0), Point::from(-0.5), Point::from(0.0)], p).unwrap();
        assert!(!per_lattice_check(&dup));
    }

    #[test]
    fn extension_in_two_dimensions() {
        let p = params(0.4, 1.0, 2);
        let omega = crate::geometry::random_delone(p, 6.0, 3, 0.05).unwrap();
        let rho = crystallographic_extension(&omega, 3.0, 0.05).unwrap();
        assert_eq!(rho.points_in_cube(3.0).unwrap(), omega.points_in_cube(3.0).unwrap());
        let pts = rho.points_in_cube(rho.period / 2.0 + 1.5).unwrap();
        assert!(verify_packing(&pts, 0.4).unwrap());
        assert!(
            verify_covering(&pts, 1.0, Cube::new(rho.period / 2.0).unwrap(), 0.05)
                .unwrap()
                .covered
        );
        let _ = DeloneSet::Crystal(rho);
    }
}
