//! Band structure of periodic 1-D operators from the discriminant
//! `D(E) = tr M(E)` of the one-period transfer matrix.
//!
//! With `p` nodes per period, the spectrum is `{E : |D(E)| <= 2}`, a union
//! of `p` bands, `D` being monotone across each band. The eigenvalues
//! `μ_1 < … < μ_{p-1}` of the cell with Dirichlet walls at nodes `-1` and
//! `p - 1` are the zeros of `M_21`; there `M_11·M_22 = 1`, so `|D(μ_j)| >= 2`
//! and every `μ_j` lies in the closure of a gap. Band `j` therefore lies in
//! `[μ_{j-1}, μ_j]` (with outer brackets below and above the spectrum); its
//! edges are found by bisection on `|D| <= 2` from an interior point.
//! That test is evaluated as `(M_11 - M_22)² + 4·M_12·M_21 <= 0`.

use super::{assemble, sample_potential, Boundary, Grid1D, IntervalSet, Potential};
use crate::error::{Error, Result};
use crate::geometry::{CrystallographicSet, PointSet};

// Double-double helpers: a value is `hi + lo` with `|lo| <= ulp(hi)/2`.
type Dd = (f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    (s, b - (s - a))
}

/// `a·x - y`.
fn dd_axmy(a: f64, x: Dd, y: Dd) -> Dd {
    let p = a * x.0;
    let perr = a.mul_add(x.0, -p);
    let (s, serr) = two_sum(p, -y.0);
    quick_two_sum(s, serr + perr + a.mul_add(x.1, -y.1))
}

/// `S_{p-1} ⋯ S_0` with `S_i = [[2 + h²(V_i - E), -1], [1, 0]]`.
///
/// Every factor has determinant exactly 1 whatever the rounding of its
/// corner entry, so the product is accumulated in double-double arithmetic
/// and rounded once at the end; the entries grow like the number of steps.
pub fn transfer_matrix(e: f64, cell_v: &[f64], h: f64) -> [[f64; 2]; 2] {
    let h2 = h * h;
    let mut m: [[Dd; 2]; 2] = [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]];
    for &v in cell_v {
        let a = 2.0 + h2 * (v - e);
        m = [[dd_axmy(a, m[0][0], m[1][0]), dd_axmy(a, m[0][1], m[1][1])], m[0]];
    }
    let mut out = [
        [m[0][0].0 + m[0][0].1, m[0][1].0 + m[0][1].1],
        [m[1][0].0 + m[1][0].1, m[1][1].0 + m[1][1].1],
    ];
    restore_unit_determinant(&mut out);
    out
}

/// Rounding four entries of size `|M|` moves the determinant by up to
/// `~ε·|M|²`; re-solving `det = 1` for the entry opposite the largest one
/// (a change of about one ulp) brings it back to the last bit.
fn restore_unit_determinant(m: &mut [[f64; 2]; 2]) {
    let (i, j) = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .max_by(|a, b| m[a.0][a.1].abs().total_cmp(&m[b.0][b.1].abs()))
        .expect("four entries");
    let pivot = m[i][j];
    if pivot == 0.0 {
        return;
    }
    let (oi, oj) = (1 - i, 1 - j);
    // the other diagonal pair: det = ±(pivot·m[oi][oj]) ∓ (m[i][oj]·m[oi][j])
    let sign = if i == j { 1.0 } else { -1.0 };
    let (a, b) = (m[i][oj], m[oi][j]);
    let p = a * b;
    let perr = a.mul_add(b, -p);
    // pivot·x = sign·1 + a·b, evaluated with the product kept exact
    let (s, serr) = two_sum(sign, p);
    m[oi][oj] = (s + (serr + perr)) / pivot;
}

/// `tr M(E)`.
pub fn discriminant(e: f64, cell_v: &[f64], h: f64) -> f64 {
    let m = transfer_matrix(e, cell_v, h);
    m[0][0] + m[1][1]
}

/// `D² - 4`, evaluated as `(M_11 - M_22)² + 4·M_12·M_21` (equal to it since
/// `det M = 1`). Near a closed gap both terms are tiny, so the sign is
/// resolved far more sharply than by forming `|D| - 2`.
fn band_indicator(e: f64, cell_v: &[f64], h: f64) -> f64 {
    let m = transfer_matrix(e, cell_v, h);
    let diff = m[0][0] - m[1][1];
    diff.mul_add(diff, 4.0 * m[0][1] * m[1][0])
}

/// Bands together with the grid actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub bands: IntervalSet,
    /// Spacing dividing the period exactly.
    pub h_used: f64,
    /// Nodes per period.
    pub steps: usize,
    /// Whether `h_used` differs from the requested spacing.
    pub adjusted: bool,
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, tol: f64, pred_hi: F) -> f64 {
    // invariant: !pred_hi(lo), pred_hi(hi)
    while hi - lo > tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred_hi(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bands of the periodic operator whose one-period potential samples are
/// `cell_v`, restricted to `[a, b]`, edges to tolerance `tol`; gaps of width
/// at most `10·tol` are merged.
pub fn bands_from_cell(cell_v: &[f64], h: f64, window: (f64, f64), tol: f64) -> Result<IntervalSet> {
    let (a, b) = window;
    if cell_v.is_empty() || !(h > 0.0) || !(a <= b) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "invalid band request: {} samples, h = {h}, window [{a}, {b}], tol = {tol}",
            cell_v.len()
        )));
    }
    if cell_v.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite potential sample".into()));
    }
    let p = cell_v.len();
    let vmin = cell_v.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = cell_v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let outer_lo = vmin - 1.0;
    let outer_hi = vmax + 4.0 / (h * h) + 1.0;
    let dirichlet = if p > 1 {
        Some(assemble(&cell_v[..p - 1], h, Boundary::Dirichlet)?)
    } else {
        None
    };
    let count = |e: f64| dirichlet.as_ref().map_or(0, |t| t.eig_count(e));
    let mu = |j: usize| -> Result<f64> {
        match j {
            0 => Ok(outer_lo),
            j if j == p => Ok(outer_hi),
            j => dirichlet.as_ref().expect("p > 1").kth_eigenvalue(j - 1, 0.0),
        }
    };
    let d = |e: f64| discriminant(e, cell_v, h);
    let in_band = |e: f64| band_indicator(e, cell_v, h) <= 0.0;

    let first = count(a) + 1;
    let last = (count(b) + 1).min(p);
    let mut pieces = Vec::new();
    let mut left = mu(first - 1)?;
    for j in first..=last {
        let right = mu(j)?;
        let (dl, dr) = (d(left), d(right));
        // an interior point of the band: bisect on the sign of D
        let inside = if in_band(left) {
            left
        } else if in_band(right) {
            right
        } else {
            if dl.signum() == dr.signum() {
                return Err(Error::Precondition(format!(
                    "discriminant does not change sign on [{left}, {right}]"
                )));
            }
            let (mut lo, mut hi) = (left, right);
            loop {
                let mid = 0.5 * (lo + hi);
                let dm = d(mid);
                if mid <= lo || mid >= hi || in_band(mid) {
                    break mid;
                }
                if dm.signum() == dl.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        };
        // a bracket can sit arbitrarily close to a genuine edge, so no
        // roundoff allowance is granted; closed gaps come out as slivers
        // below the merge width
        let lo_edge = if in_band(left) {
            left
        } else {
            bisect(left, inside, tol, in_band)
        };
        let hi_edge = if in_band(right) {
            right
        } else {
            bisect(inside, right, tol, |e| !in_band(e))
        };
        if lo_edge <= b && hi_edge >= a {
            pieces.push((lo_edge.max(a), hi_edge.min(b)));
        }
        left = right;
    }
    Ok(IntervalSet::from_closed(pieces, 10.0 * tol))
}

/// Bands of `H(γ)` in `[a, b]` for a 1-D crystallographic `γ`. The spacing
/// is adjusted to `a_γ / round(a_γ / h)` so that it divides the period, and
/// the cell nodes are `0, h', …, a_γ - h'`.
pub fn bands(
    gamma: &CrystallographicSet,
    v: &Potential,
    h: f64,
    window: (f64, f64),
    tol: f64,
) -> Result<BandStructure> {
    if gamma.dim() != 1 {
        return Err(Error::InvalidInput(
            "band structure is computed in dimension 1 only".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    let period = gamma.period;
    let steps = ((period / h).round() as usize).max(1);
    let h_used = period / steps as f64;
    let grid = Grid1D::from_origin(0.0, h_used, steps)?;
    let cell_v = sample_potential(gamma, v, &grid)?;
    Ok(BandStructure {
        bands: bands_from_cell(&cell_v, h_used, window, tol)?,
        h_used,
        steps,
        adjusted: (h_used - h).abs() > 1e-12 * h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DeloneParams;

    fn det(m: [[f64; 2]; 2]) -> f64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[test]
    fn one_free_step() {
        let m = transfer_matrix(3.0, &[0.0], 0.5);
        assert_eq!(m, [[2.0 - 0.25 * 3.0, -1.0], [1.0, 0.0]]);
    }

    #[test]
    fn free_trace_at_zero() {
        for p in [1, 2, 7, 50] {
            assert_eq!(discriminant(0.0, &vec![0.0; p], 0.02), 2.0);
        }
    }

    #[test]
    fn free_bands_fill() {
        let s = bands_from_cell(&[0.0; 50], 0.02, (0.0, 10.0), 1e-9).unwrap();
        assert_eq!(s.len(), 1);
        let iv = s.intervals()[0];
        assert!(iv.lo.abs() <= 1e-6 && (iv.hi - 10.0).abs() <= 1e-6);
    }

    #[test]
    fn determinant_is_one() {
        let v: Vec<f64> = (0..100).map(|i| -((i as f64) * 0.1).sin().abs()).collect();
        for k in 0..50 {
            let e = -1.0 + 0.6 * k as f64;
            let m = transfer_matrix(e, &v, 0.02);
            // roundoff scales with the entry size and the number of steps
            let scale = m.iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()));
            assert!((det(m) - 1.0).abs() <= 4.0 * f64::EPSILON * v.len() as f64 * scale * scale);
        }
    }

    #[test]
    fn well_on_odd_integers_opens_gaps() {
        let p = DeloneParams::new(0.4, 1.0, 1).unwrap();
        let odd = CrystallographicSet::lattice_1d(2.0, 1.0, p).unwrap();
        let bs = bands(&odd, &Potential::default_well(), 0.02, (0.0, 30.0), 1e-9).unwrap();
        assert!(bs.bands.gap_count() >= 1);
        assert!(!bs.adjusted);
        assert_eq!(bs.steps, 100);
    }

    #[test]
    fn shift_moves_edges() {
        let v: Vec<f64> = (0..40)
            .map(|i| if (10..20).contains(&i) { -3.0 } else { 0.0 })
            .collect();
        let shifted: Vec<f64> = v.iter().map(|x| x + 0.75).collect();
        let b0 = bands_from_cell(&v, 0.05, (-5.0, 40.0), 1e-10).unwrap();
        let b1 = bands_from_cell(&shifted, 0.05, (-5.0 + 0.75, 40.0 + 0.75), 1e-10).unwrap();
        assert_eq!(b0.len(), b1.len());
        for (x, y) in b0.intervals().iter().zip(b1.intervals()) {
            assert!((x.lo + 0.75 - y.lo).abs() < 1e-8 && (x.hi + 0.75 - y.hi).abs() < 1e-8);
        }
    }

    #[test]
    fn adjusts_incommensurate_spacing() {
        let p = DeloneParams::new(0.4, 1.0, 1).unwrap();
        let z = CrystallographicSet::lattice_1d(1.0, 0.0, p).unwrap();
        let bs = bands(&z, &Potential::default_well(), 0.03, (0.0, 5.0), 1e-8).unwrap();
        assert!(bs.adjusted);
        assert_eq!(bs.steps, 33);
    }
}
