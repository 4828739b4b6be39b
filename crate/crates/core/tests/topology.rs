use delone_core::geometry::{
    crystallographic_extension, random_delone, CrystallographicSet, DeloneParams, Point, PointSet, WindowedPointSet,
};
use delone_core::topology::{convergence_report, local_hausdorff, natural_distance, Level};
use proptest::prelude::*;

/// Image on the unit sphere in `R^{d+1}`, written out independently.
fn sphere(x: &[f64]) -> Vec<f64> {
    let n2: f64 = x.iter().map(|c| c * c).sum();
    let mut out: Vec<f64> = x.iter().map(|c| 2.0 * c / (1.0 + n2)).collect();
    out.push((n2 - 1.0) / (n2 + 1.0));
    out
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Hausdorff distance of `j(F ∩ U_T) ∪ {N}` and `j(G ∩ U_T) ∪ {N}` by
/// checking every pair.
fn brute_delta(f: &dyn PointSet, g: &dyn PointSet, t: f64) -> f64 {
    let d = f.dim();
    let mut pole = vec![0.0; d];
    pole.push(1.0);
    let lift = |s: &dyn PointSet| -> Vec<Vec<f64>> {
        let mut v: Vec<Vec<f64>> = s.points_in_ball(t).unwrap().iter().map(|p| sphere(&p.0)).collect();
        v.push(pole.clone());
        v
    };
    let (a, b) = (lift(f), lift(g));
    let directed = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|x| b.iter().map(|y| euclid(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(&a, &b).max(directed(&b, &a))
}

fn p1() -> DeloneParams {
    DeloneParams::new(0.4, 1.0, 1).unwrap()
}

#[test]
fn matches_brute_force_in_one_and_two_dimensions() {
    let tol = 0.25;
    let t = 4.0 / tol;
    for seed in 0..6 {
        let a = random_delone(p1(), t + 1.0, seed, 0.05).unwrap();
        let b = random_delone(p1(), t + 1.0, seed + 100, 0.05).unwrap();
        let fast = natural_distance(&a, &b, tol).unwrap();
        assert!((fast.value - brute_delta(&a, &b, t)).abs() < 1e-14);
        assert_eq!(fast.error_bound, tol / 2.0);
    }
    let p2 = DeloneParams::new(0.4, 1.0, 2).unwrap();
    let a = random_delone(p2, t + 1.0, 1, 0.05).unwrap();
    let b = random_delone(p2, t + 1.0, 2, 0.05).unwrap();
    let fast = natural_distance(&a, &b, tol).unwrap();
    assert!((fast.value - brute_delta(&a, &b, t)).abs() < 1e-14);
}

#[test]
fn empty_set_is_at_the_pole() {
    let empty = WindowedPointSet::new(vec![], delone_core::geometry::Cube::new(50.0).unwrap(), p1()).unwrap();
    let origin = WindowedPointSet::new(
        vec![Point(vec![0.0])],
        delone_core::geometry::Cube::new(50.0).unwrap(),
        p1(),
    )
    .unwrap();
    // j(0) is the south pole, at chordal distance 2 from the north pole;
    // the metric is capped at 1
    assert_eq!(natural_distance(&empty, &origin, 0.1).unwrap().value, 1.0);
    assert_eq!(natural_distance(&empty, &empty, 0.1).unwrap().value, 0.0);
}

#[test]
fn extension_schedule_converges() {
    let tol = 1e-3;
    let omega = random_delone(p1(), 4.0 / tol + 10.0, 42, 0.05).unwrap();
    let schedule = [5usize, 10, 20, 40];
    let sets: Vec<CrystallographicSet> = schedule
        .iter()
        .map(|&n| crystallographic_extension(&omega, n as f64, 0.05).unwrap())
        .collect();
    let mut last = f64::INFINITY;
    for (&n, rho) in schedule.iter().zip(&sets) {
        let nf = n as f64;
        let delta = natural_distance(rho, &omega, tol).unwrap();
        assert!(delta.value <= 2.0 / (1.0 + nf * nf).sqrt() + tol);
        assert!(delta.value <= last);
        last = delta.value;
        for l in 1..=n {
            assert_eq!(local_hausdorff(rho, &omega, l as f64).unwrap(), 0.0);
        }
    }
    let seq: Vec<(usize, &(dyn PointSet + Sync))> = schedule
        .iter()
        .zip(&sets)
        .map(|(&n, s)| (n, s as &(dyn PointSet + Sync)))
        .collect();
    let levels = [
        Level {
            l: 2.0,
            big_l: 4.0,
            eps: 0.1,
        },
        Level {
            l: 8.0,
            big_l: 16.0,
            eps: 0.1,
        },
    ];
    let report = convergence_report(&seq, &omega, &levels, tol).unwrap();
    assert_eq!(report.rows.len(), schedule.len() * levels.len());
    assert_eq!(report.levels[0].n0, Some(5));
    assert_eq!(report.levels[1].n0, Some(20));
    assert!(report.levels.iter().all(|lv| lv.spurious.is_empty()));
    assert!(report
        .to_csv()
        .starts_with("n,L,local_hausdorff,delta,delta_error_bound\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn metric_axioms(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000) {
        let tol = 1e-2;
        let mk = |s| random_delone(p1(), 4.0 / tol + 1.0, s, 0.05).unwrap();
        let (a, b, c) = (mk(s1), mk(s2), mk(s3));
        let ab = natural_distance(&a, &b, tol).unwrap().value;
        let ba = natural_distance(&b, &a, tol).unwrap().value;
        let bc = natural_distance(&b, &c, tol).unwrap().value;
        let ac = natural_distance(&a, &c, tol).unwrap().value;
        prop_assert_eq!(ab, ba);
        prop_assert!(ac <= ab + bc + 2.0 * tol);
        prop_assert!(ab <= 1.0 && ac <= 1.0 && bc <= 1.0);
        prop_assert_eq!(natural_distance(&a, &a, tol).unwrap().value, 0.0);
    }
}
