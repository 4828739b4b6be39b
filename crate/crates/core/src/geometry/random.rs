//! Seeded random Delone sets: random sequential adsorption followed by a
//! grid-maximal completion, so the covering radius is controlled by the
//! fill pitch rather than by luck.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fill::{maximal_separated_fill, FillDomain};
use super::spatial::SpatialHash;
use super::{
    sort_canonical, CrystallographicSet, Cube, DeloneParams, Point, TorusMetric, WindowedPointSet, SEPARATION_SLACK,
};
use crate::error::{Error, Result};

/// Random adsorption attempts per unit of `(2r)^d` volume.
const ATTEMPTS_PER_CELL: f64 = 4.0;

fn adsorb(rng: &mut ChaCha8Rng, hash: &mut SpatialHash, d: usize, lo: f64, hi: f64, sep: f64) -> Result<()> {
    let cells = ((hi - lo) / sep).powi(d as i32);
    let attempts = (cells * ATTEMPTS_PER_CELL).ceil();
    if attempts > super::MAX_ENUMERATION as f64 {
        return Err(Error::Resource(format!("random sampling would need {attempts} draws")));
    }
    let radius = sep * (1.0 - SEPARATION_SLACK).sqrt();
    for _ in 0..attempts as usize {
        let p = Point((0..d).map(|_| rng.random_range(lo..hi)).collect());
        if hash.any_closer_than(&p, radius, None).is_none() {
            hash.insert(p);
        }
    }
    Ok(())
}

/// Checks the fill can certify the covering radius: the grid-maximal fill
/// leaves every point of the region within `2r + pitch·sqrt(d)/2`.
fn check_pitch(params: &DeloneParams, pitch: f64) -> Result<()> {
    params.require_construction()?;
    let need = 2.0 * params.r + pitch * (params.d as f64).sqrt() / 2.0;
    if !(pitch > 0.0) || need > params.big_r {
        return Err(Error::RefinePitch {
            pitch,
            required: 2.0 * params.max_certified_pitch().max(0.0),
            margin: params.big_r - 2.0 * params.r,
        });
    }
    Ok(())
}

/// A random `(r, R)` set on `Q(half_width)`, reproducible from `seed`.
pub fn random_delone(params: DeloneParams, half_width: f64, seed: u64, pitch: f64) -> Result<WindowedPointSet> {
    check_pitch(&params, pitch)?;
    let window = Cube::new(half_width)?;
    let d = params.d;
    let sep = 2.0 * params.r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hash = SpatialHash::new(d, sep);
    adsorb(&mut rng, &mut hash, d, -half_width, half_width, sep)?;
    let domain = FillDomain::Shell {
        outer: window,
        inner: None,
        d,
    };
    let points = maximal_separated_fill(hash.points(), &domain, sep, pitch)?;
    WindowedPointSet::new(points, window, params)
}

/// A random crystallographic `(r, R)` set of the given period.
pub fn random_crystal(params: DeloneParams, period: f64, seed: u64, pitch: f64) -> Result<CrystallographicSet> {
    check_pitch(&params, pitch)?;
    let metric = TorusMetric::new(period, params.d)?;
    let sep = 2.0 * params.r;
    if period < 2.0 * sep {
        return Err(Error::Precondition(format!(
            "period {period} is too small for separation {sep}"
        )));
    }
    let d = params.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hash = SpatialHash::torus(metric, sep);
    adsorb(&mut rng, &mut hash, d, -period / 2.0, period / 2.0, sep)?;
    let domain = FillDomain::Torus { metric, exclude: None };
    let mut motif = maximal_separated_fill(hash.points(), &domain, sep, pitch)?;
    sort_canonical(&mut motif);
    CrystallographicSet::new(period, motif, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{per_lattice_check, verify_covering, verify_packing, PointSet};

    #[test]
    fn random_delone_is_delone() {
        for d in 1..=2 {
            let p = DeloneParams::new(0.4, 1.0, d).unwrap();
            let w = random_delone(p, 5.0, 7, 0.05).unwrap();
            assert!(verify_packing(&w.points, 0.4).unwrap());
            assert!(
                verify_covering(&w.points, 1.0, Cube::new(5.0).unwrap(), 0.02)
                    .unwrap()
                    .covered
            );
        }
    }

    #[test]
    fn random_delone_is_reproducible() {
        let p = DeloneParams::new(0.3, 1.0, 1).unwrap();
        assert_eq!(
            random_delone(p, 20.0, 1, 0.05).unwrap(),
            random_delone(p, 20.0, 1, 0.05).unwrap()
        );
        assert_ne!(
            random_delone(p, 20.0, 1, 0.05).unwrap(),
            random_delone(p, 20.0, 2, 0.05).unwrap()
        );
    }

    #[test]
    fn random_crystal_is_periodic_delone() {
        let p = DeloneParams::new(0.4, 1.0, 1).unwrap();
        let c = random_crystal(p, 7.3, 3, 0.05).unwrap();
        assert!(per_lattice_check(&c));
        let pts = c.points_in_cube(12.0).unwrap();
        assert!(verify_packing(&pts, 0.4).unwrap());
        assert!(
            verify_covering(&pts, 1.0, Cube::new(10.0).unwrap(), 0.01)
                .unwrap()
                .covered
        );
    }

    #[test]
    fn coarse_pitch_is_refused() {
        let p = DeloneParams::new(0.4, 0.8, 1).unwrap();
        assert!(matches!(random_delone(p, 5.0, 0, 0.05), Err(Error::RefinePitch { .. })));
    }
}
