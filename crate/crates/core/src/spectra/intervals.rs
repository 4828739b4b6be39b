//! Finite unions of intervals on the energy axis.

/// An interval with endpoint flags; `open_lo`/`open_hi` mark excluded ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            open_lo: false,
            open_hi: false,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            open_lo: true,
            open_hi: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sorted, disjoint intervals separated by gaps wider than `tau_merge`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    pub tau_merge: f64,
}

impl IntervalSet {
    pub fn empty(tau_merge: f64) -> Self {
        IntervalSet {
            intervals: Vec::new(),
            tau_merge,
        }
    }

    /// Union of closed intervals; pieces whose gap is at most `tau_merge`
    /// are merged.
    pub fn from_closed(mut pieces: Vec<(f64, f64)>, tau_merge: f64) -> Self {
        pieces.retain(|p| p.0 <= p.1);
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut intervals: Vec<Interval> = Vec::new();
        for (lo, hi) in pieces {
            match intervals.last_mut() {
                Some(last) if lo - last.hi <= tau_merge => last.hi = last.hi.max(hi),
                _ => intervals.push(Interval::closed(lo, hi)),
            }
        }
        IntervalSet { intervals, tau_merge }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Number of bounded gaps between consecutive intervals.
    pub fn gap_count(&self) -> usize {
        self.intervals.len().saturating_sub(1)
    }

    /// Distance from `x` to the closure of the set (`∞` when empty).
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| {
                if iv.lo <= x && x <= iv.hi {
                    0.0
                } else {
                    (x - iv.lo).abs().min((x - iv.hi).abs())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` belongs to the set, honouring open endpoints.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals
            .iter()
            .any(|iv| (iv.lo < x || (!iv.open_lo && iv.lo == x)) && (x < iv.hi || (!iv.open_hi && iv.hi == x)))
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::width).sum()
    }

    /// `E_low,E_high,open_low,open_high` rows with header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("E_low,E_high,open_low,open_high\n");
        for iv in &self.intervals {
            s.push_str(&format!("{},{},{},{}\n", iv.lo, iv.hi, iv.open_lo, iv.open_hi));
        }
        s
    }
}

/// `interior(a) \ b` as open intervals.
fn interior_minus(a: &IntervalSet, b: &IntervalSet) -> Vec<Interval> {
    let mut out = Vec::new();
    for iv in a.intervals() {
        let mut lo = iv.lo;
        for cut in b.intervals() {
            if cut.hi <= lo || cut.lo >= iv.hi {
                continue;
            }
            if cut.lo > lo {
                out.push(Interval::open(lo, cut.lo));
            }
            lo = lo.max(cut.hi);
        }
        if lo < iv.hi {
            out.push(Interval::open(lo, iv.hi));
        }
    }
    out
}

/// `(int B₁ \ B₂) ∪ (int B₂ \ B₁)`: a union of open intervals. Pieces no
/// wider than the merge tolerance are discarded as discretization noise.
pub fn u_interval(b1: &IntervalSet, b2: &IntervalSet) -> IntervalSet {
    let tau = b1.tau_merge.max(b2.tau_merge);
    let mut pieces = interior_minus(b1, b2);
    pieces.extend(interior_minus(b2, b1));
    pieces.retain(|iv| iv.width() > tau);
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    IntervalSet {
        intervals: pieces,
        tau_merge: tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merging() {
        let s = IntervalSet::from_closed(vec![(2.0, 3.0), (0.0, 1.0), (1.0 + 1e-9, 1.5)], 1e-8);
        assert_eq!(s.intervals(), &[Interval::closed(0.0, 1.5), Interval::closed(2.0, 3.0)]);
        assert_eq!(s.gap_count(), 1);
        assert_eq!(s.distance(1.75), 0.25);
        assert_eq!(s.distance(2.5), 0.0);
    }

    #[test]
    fn u_examples() {
        let b1 = IntervalSet::from_closed(vec![(0.0, 1.0)], 0.0);
        let b2 = IntervalSet::from_closed(vec![(0.0, 1.0), (2.0, 3.0)], 0.0);
        assert!(u_interval(&b1, &b1).is_empty());
        let u = u_interval(&b1, &b2);
        assert_eq!(u.intervals(), &[Interval::open(2.0, 3.0)]);
        assert!(!u.contains(2.0) && u.contains(2.5));
        assert!(u.to_csv().ends_with("2,3,true,true\n"));
    }

    #[test]
    fn u_of_overlapping_bands() {
        let b1 = IntervalSet::from_closed(vec![(0.0, 2.0), (3.0, 5.0)], 0.0);
        let b2 = IntervalSet::from_closed(vec![(1.0, 4.0)], 0.0);
        let u = u_interval(&b1, &b2);
        assert_eq!(
            u.intervals(),
            &[
                Interval::open(0.0, 1.0),
                Interval::open(2.0, 3.0),
                Interval::open(4.0, 5.0)
            ]
        );
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        proptest::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..6)
            .prop_map(|v| IntervalSet::from_closed(v.into_iter().map(|(a, w)| (a, a + w)).collect(), 0.0))
    }

    proptest! {
        #[test]
        fn u_is_symmetric_and_vanishes_on_diagonal(a in arb_set(), b in arb_set()) {
            prop_assert!(u_interval(&a, &a).is_empty());
            prop_assert_eq!(u_interval(&a, &b), u_interval(&b, &a));
        }

        #[test]
        fn u_avoids_both_closures_where_both_present(a in arb_set(), b in arb_set(), x in -10.0f64..13.0) {
            let u = u_interval(&a, &b);
            if u.contains(x) {
                let in_a = a.distance(x) == 0.0;
                let in_b = b.distance(x) == 0.0;
                prop_assert!(in_a != in_b);
            }
        }
    }
}
