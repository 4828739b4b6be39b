//! Uniform bucket grid for neighbour queries, Euclidean or toroidal.

use std::collections::HashMap;

use super::{Point, TorusMetric};

pub(crate) struct SpatialHash {
    cell: f64,
    d: usize,
    torus: Option<(TorusMetric, i64)>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    points: Vec<Point>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl SpatialHash {
    /// Euclidean grid with the given cell size.
    pub fn new(d: usize, cell: f64) -> Self {
        SpatialHash {
            cell,
            d,
            torus: None,
            buckets: HashMap::new(),
            points: Vec::new(),
            lo: vec![i64::MAX; d],
            hi: vec![i64::MIN; d],
        }
    }

    /// Grid on the torus; cells are at least `min_cell` wide and tile the
    /// period exactly.
    pub fn torus(metric: TorusMetric, min_cell: f64) -> Self {
        let n = ((metric.period / min_cell).floor() as i64).max(1);
        let mut h = SpatialHash::new(metric.d, metric.period / n as f64);
        h.torus = Some((metric, n));
        h
    }

    pub fn from_points(d: usize, cell: f64, points: &[Point]) -> Self {
        let mut h = SpatialHash::new(d, cell);
        for p in points {
            h.insert(p.clone());
        }
        h
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn key(&self, p: &Point) -> Vec<i64> {
        match &self.torus {
            None => p.0.iter().map(|x| (x / self.cell).floor() as i64).collect(),
            Some((m, n)) => {
                p.0.iter()
                    .map(|x| {
                        let k = ((x - m.period * (x / m.period).floor()) / self.cell).floor() as i64;
                        k.rem_euclid(*n)
                    })
                    .collect()
            }
        }
    }

    pub fn insert(&mut self, p: Point) -> usize {
        let key = self.key(&p);
        for ((lo, hi), &k) in self.lo.iter_mut().zip(&mut self.hi).zip(&key) {
            *lo = (*lo).min(k);
            *hi = (*hi).max(k);
        }
        let idx = self.points.len();
        self.points.push(p);
        self.buckets.entry(key).or_default().push(idx);
        idx
    }

    fn dist2(&self, p: &Point, q: &Point) -> f64 {
        match &self.torus {
            None => p.dist2(q),
            Some((m, _)) => m.dist2(p, q),
        }
    }

    /// Calls `f` for every stored index in cells whose Chebyshev distance
    /// from `center` is exactly `ring`.
    fn visit_ring(&self, center: &[i64], ring: i64, f: &mut dyn FnMut(usize)) {
        let d = self.d;
        let mut off = vec![-ring; d];
        let mut seen: Vec<Vec<i64>> = Vec::new();
        loop {
            if off.iter().any(|o| o.abs() == ring) {
                let mut key: Vec<i64> = center.iter().zip(&off).map(|(c, o)| c + o).collect();
                if let Some((_, n)) = &self.torus {
                    for k in key.iter_mut() {
                        *k = k.rem_euclid(*n);
                    }
                    if seen.contains(&key) {
                        if !advance(&mut off, ring) {
                            break;
                        }
                        continue;
                    }
                    seen.push(key.clone());
                }
                if let Some(b) = self.buckets.get(&key) {
                    for &i in b {
                        f(i);
                    }
                }
            }
            if !advance(&mut off, ring) {
                break;
            }
        }
    }

    /// True iff some stored point lies at distance `>= 0` and `< radius`
    /// (with `radius <= cell`), excluding `skip`.
    pub fn any_closer_than(&self, q: &Point, radius: f64, skip: Option<usize>) -> Option<usize> {
        debug_assert!(radius <= self.cell * (1.0 + 1e-12));
        let center = self.key(q);
        let r2 = radius * radius;
        let mut hit = None;
        for ring in 0..=1 {
            self.visit_ring(&center, ring, &mut |i| {
                if hit.is_none() && Some(i) != skip && self.dist2(q, &self.points[i]) < r2 {
                    hit = Some(i);
                }
            });
            if hit.is_some() {
                break;
            }
        }
        hit
    }

    /// Smallest distance to a stored point, if one lies within `radius`
    /// (`radius <= cell`).
    pub fn nearest_within(&self, q: &Point, radius: f64) -> Option<f64> {
        debug_assert!(radius <= self.cell * (1.0 + 1e-12));
        let center = self.key(q);
        let mut best = f64::INFINITY;
        for ring in 0..=1 {
            self.visit_ring(&center, ring, &mut |i| {
                best = best.min(self.dist2(q, &self.points[i]));
            });
        }
        let best = best.sqrt();
        (best <= radius).then_some(best)
    }

    /// Nearest stored point under a custom metric. `lower_bound(t)` must bound
    /// the metric from below for every point at Euclidean distance `>= t`
    /// from `q`. Euclidean grids only.
    pub fn nearest_by(
        &self,
        q: &Point,
        metric: &dyn Fn(&Point) -> f64,
        lower_bound: &dyn Fn(f64) -> f64,
    ) -> Option<(usize, f64)> {
        debug_assert!(self.torus.is_none());
        if self.points.is_empty() {
            return None;
        }
        let center = self.key(q);
        // rings beyond this reach no populated cell
        let max_ring = (0..self.d)
            .map(|i| (center[i] - self.lo[i]).abs().max((self.hi[i] - center[i]).abs()))
            .max()
            .unwrap_or(0);
        let mut best: Option<(usize, f64)> = None;
        let mut ring = 0;
        while ring <= max_ring {
            self.visit_ring(&center, ring, &mut |i| {
                let m = metric(&self.points[i]);
                if best.is_none_or(|(bi, bm)| m < bm || (m == bm && i < bi)) {
                    best = Some((i, m));
                }
            });
            if let Some((_, bm)) = best {
                if lower_bound(ring as f64 * self.cell) >= bm {
                    break;
                }
            }
            ring += 1;
        }
        best
    }

    /// Euclidean nearest neighbour.
    pub fn nearest(&self, q: &Point) -> Option<(usize, f64)> {
        self.nearest_by(q, &|p| p.dist(q), &|t| t)
    }
}

/// Odometer step over `[-ring, ring]^d`.
fn advance(off: &mut [i64], ring: i64) -> bool {
    for o in off.iter_mut().rev() {
        if *o < ring {
            *o += 1;
            return true;
        }
        *o = -ring;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_matches_brute_force() {
        let pts: Vec<Point> = (0..50)
            .map(|i| Point(vec![(i as f64 * 0.37).sin() * 10.0, (i as f64 * 1.3).cos() * 7.0]))
            .collect();
        let h = SpatialHash::from_points(2, 0.9, &pts);
        for k in 0..30 {
            let q = Point(vec![k as f64 - 15.0, (k as f64).sqrt() - 2.0]);
            let (_, d) = h.nearest(&q).unwrap();
            let brute = pts.iter().map(|p| p.dist(&q)).fold(f64::INFINITY, f64::min);
            assert_eq!(d, brute);
        }
    }

    #[test]
    fn torus_neighbours_wrap() {
        let m = TorusMetric::new(4.0, 1).unwrap();
        let mut h = SpatialHash::torus(m, 0.8);
        h.insert(Point::from(-1.95));
        assert!(h.any_closer_than(&Point::from(1.9), 0.8, None).is_some());
        assert!(h.any_closer_than(&Point::from(1.0), 0.8, None).is_none());
    }

    #[test]
    fn tiny_torus_visits_each_cell_once() {
        let m = TorusMetric::new(1.0, 2).unwrap();
        let mut h = SpatialHash::torus(m, 0.8);
        h.insert(Point(vec![0.0, 0.0]));
        let mut count = 0;
        h.visit_ring(&[0, 0], 1, &mut |_| count += 1);
        h.visit_ring(&[0, 0], 0, &mut |_| count += 1);
        // a single cell wraps onto itself; the ring visit dedupes but ring 0
        // and ring 1 both land on it
        assert_eq!(count, 2);
    }
}
