use delone_core::geometry::{
    crystallographic_extension, glue, io, packing_violation, per_lattice_check, random_crystal, random_delone,
    verify_covering, verify_packing, CrystallographicSet, Cube, DeloneParams, DeloneSet, Point, PointSet,
};
use delone_core::Error;
use proptest::prelude::*;

fn params(r: f64, big_r: f64, d: usize) -> DeloneParams {
    DeloneParams::new(r, big_r, d).unwrap()
}

/// All-pairs minimum distance, the reference for the bucketed scan.
fn brute_min_distance(points: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[..i] {
            best = best.min(p.dist(q));
        }
    }
    best
}

/// Largest distance from a grid node of `region` to the nearest point, by
/// exhaustive search.
fn brute_covering_radius(points: &[Point], s: f64, step: f64) -> f64 {
    let n = (2.0 * s / step).ceil() as usize;
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let x = -s + 2.0 * s * i as f64 / n as f64;
        let nearest = points.iter().map(|p| (p.0[0] - x).abs()).fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    worst
}

#[test]
fn packing_scan_matches_all_pairs() {
    let p = params(0.4, 1.0, 2);
    let set = random_delone(p, 6.0, 11, 0.05).unwrap();
    let mut pts = set.points.clone();
    assert!(brute_min_distance(&pts) >= 0.8 * (1.0 - 1e-9));
    assert!(verify_packing(&pts, 0.4).unwrap());
    // push one point towards a neighbour
    let q = Point(vec![pts[0].0[0] + 0.5, pts[0].0[1]]);
    pts.push(q);
    let (i, j, dist) = packing_violation(&pts, 0.4).unwrap().expect("violation");
    assert!(dist < 0.8);
    assert!((pts[i].dist(&pts[j]) - dist).abs() < 1e-15);
}

#[test]
fn covering_matches_exhaustive_scan() {
    let p = params(0.4, 1.0, 1);
    let set = random_delone(p, 20.0, 3, 0.05).unwrap();
    let cert = verify_covering(&set.points, 1.0, Cube::new(19.0).unwrap(), 0.01).unwrap();
    assert!(cert.covered);
    let brute = brute_covering_radius(&set.points, 19.0, cert.spacing);
    assert!((brute - cert.max_node_distance).abs() < 1e-12);
}

#[test]
fn integer_lattice_cover() {
    let p = params(0.4, 0.8, 1);
    let z = CrystallographicSet::lattice_1d(1.0, 0.0, p).unwrap();
    let pts = z.points_in_cube(12.0).unwrap();
    assert!(verify_packing(&pts, 0.4).unwrap());
    let cert = verify_covering(&pts, 0.8, Cube::new(10.0).unwrap(), 0.1).unwrap();
    assert!(cert.covered);
    assert!(cert.certified_radius <= 0.5 + 0.05 + 1e-12);
}

#[test]
fn extension_reports_insufficient_window() {
    let p = params(0.4, 1.0, 1);
    let omega = random_delone(p, 3.5, 1, 0.05).unwrap();
    match crystallographic_extension(&omega, 2.9, 0.05) {
        Err(Error::InsufficientWindow { required, available }) => {
            assert!((required - 3.9).abs() < 1e-12);
            assert_eq!(available, 3.5);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn extension_in_two_dimensions() {
    let p = params(0.4, 1.0, 2);
    let omega = random_delone(p, 5.0, 21, 0.05).unwrap();
    let rho = crystallographic_extension(&omega, 2.0, 0.05).unwrap();
    assert_eq!(omega.points_in_cube(2.0).unwrap(), rho.points_in_cube(2.0).unwrap());
    let pts = rho.points_in_cube(rho.period).unwrap();
    assert!(verify_packing(&pts, 0.4).unwrap());
    assert!(
        verify_covering(&pts, 1.0, Cube::new(rho.period / 2.0).unwrap(), 0.05)
            .unwrap()
            .covered
    );
    assert!(per_lattice_check(&rho));
}

#[test]
fn json_round_trip() {
    let p = params(0.4, 1.0, 1);
    let omega = DeloneSet::Windowed(random_delone(p, 8.0, 2, 0.05).unwrap());
    let back = io::point_set_from_json(&io::point_set_to_json(&omega, None)).unwrap();
    assert_eq!(back, omega);
    let crystal = DeloneSet::Crystal(random_crystal(p, 6.0, 4, 0.05).unwrap());
    let back = io::point_set_from_json(&io::point_set_to_json(&crystal, None)).unwrap();
    assert_eq!(back, crystal);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_agrees_and_is_delone(seed in 0u64..10_000, s in 1.0f64..6.0) {
        let p = params(0.4, 1.0, 1);
        let omega = random_delone(p, s + 3.0, seed, 0.05).unwrap();
        let rho = crystallographic_extension(&omega, s, 0.05).unwrap();
        prop_assert_eq!(omega.points_in_cube(s).unwrap(), rho.points_in_cube(s).unwrap());
        prop_assert!((rho.period - 2.0 * (s + 1.4)).abs() < 1e-12);
        let pts = rho.points_in_cube(2.0 * rho.period).unwrap();
        prop_assert!(brute_min_distance(&pts) >= 0.8 * (1.0 - 1e-9));
        prop_assert!(brute_covering_radius(&pts, rho.period, 0.01) <= 1.0);
        prop_assert!(per_lattice_check(&rho));
    }

    #[test]
    fn glue_agrees_on_both_sides(seed in 0u64..10_000, s in 1.0f64..6.0, offset in -0.5f64..0.5) {
        let p = params(0.4, 1.0, 1);
        let omega = random_delone(p, s + 3.0, seed, 0.05).unwrap();
        let gamma = random_crystal(p, 5.0, seed ^ 0x5eed, 0.05).unwrap();
        let gamma = CrystallographicSet::new(
            gamma.period,
            gamma.motif.iter().map(|x| Point(vec![x.0[0] + offset])).collect(),
            p,
        ).unwrap();
        let out = glue(&omega, &gamma, s, 0.05).unwrap();
        let outer = s + 2.0 + 0.4;
        prop_assert_eq!(out.set.points_in_cube(s).unwrap(), omega.points_in_cube(s).unwrap());
        let far = |set: &dyn PointSet| -> Vec<Point> {
            set.points_in_cube(outer + 10.0).unwrap().into_iter().filter(|x| x.sup_norm() > outer).collect()
        };
        prop_assert_eq!(far(&out.set), far(&gamma));
        for a in &out.added {
            prop_assert!(a.sup_norm() > s && a.sup_norm() <= outer);
        }
        let pts = out.set.points_in_cube(outer + 10.0).unwrap();
        prop_assert!(brute_min_distance(&pts) >= 0.8 * (1.0 - 1e-9));
        prop_assert!(brute_covering_radius(&pts, outer + 8.0, 0.01) <= 1.0);
    }

    #[test]
    fn packing_is_monotone_in_r(seed in 0u64..10_000, r in 0.05f64..0.6) {
        let p = params(0.4, 1.0, 1);
        let pts = random_delone(p, 10.0, seed, 0.05).unwrap().points;
        if verify_packing(&pts, r).unwrap() {
            prop_assert!(verify_packing(&pts, 0.9 * r).unwrap());
        }
        prop_assert_eq!(verify_packing(&pts, r).unwrap(), brute_min_distance(&pts) >= 2.0 * r * (1.0f64 - 1e-9).sqrt());
    }
}
