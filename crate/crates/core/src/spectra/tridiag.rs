//! Symmetric tridiagonal operators and Sturm-sequence bisection.

use super::{sample_potential, Grid1D, Potential};
use crate::error::{Error, Result};
use crate::geometry::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Zero boundary values just outside the first and last node.
    Dirichlet,
    /// One period of a periodic operator; only the transfer-matrix path
    /// uses it.
    PeriodicCell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub h: f64,
    pub boundary: Boundary,
    pub grid: Grid1D,
}

/// `diag = 2/h² + V`, `offdiag = -1/h²` on the grid `0, h, …`.
pub fn assemble(v: &[f64], h: f64, boundary: Boundary) -> Result<TridiagonalOperator> {
    if v.is_empty() {
        return Err(Error::InvalidInput("empty potential".into()));
    }
    assemble_on(Grid1D::from_origin(0.0, h, v.len())?, v, boundary)
}

pub fn assemble_on(grid: Grid1D, v: &[f64], boundary: Boundary) -> Result<TridiagonalOperator> {
    if v.len() != grid.n {
        return Err(Error::InvalidInput(format!(
            "{} potential samples for {} nodes",
            v.len(),
            grid.n
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite potential sample".into()));
    }
    let h = grid.h;
    let k = 1.0 / (h * h);
    Ok(TridiagonalOperator {
        diag: v.iter().map(|&x| 2.0 * k + x).collect(),
        offdiag: vec![-k; grid.n - 1],
        h,
        boundary,
        grid,
    })
}

/// Dirichlet discretization of `H(ω)` on the nodes of `grid`.
pub fn truncated_operator(omega: &dyn PointSet, v: &Potential, grid: Grid1D) -> Result<TridiagonalOperator> {
    let samples = sample_potential(omega, v, &grid)?;
    assemble_on(grid, &samples, Boundary::Dirichlet)
}

impl TridiagonalOperator {
    /// Builds an operator from explicit entries (Dirichlet, unit grid).
    pub fn from_entries(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "need n >= 1 diagonal and n - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let grid = Grid1D::from_origin(0.0, 1.0, diag.len())?;
        Ok(TridiagonalOperator {
            diag,
            offdiag,
            h: 1.0,
            boundary: Boundary::Dirichlet,
            grid,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn require_dirichlet(&self) -> Result<()> {
        if self.boundary != Boundary::Dirichlet {
            return Err(Error::Precondition("operation needs Dirichlet boundary".into()));
        }
        Ok(())
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Largest absolute Gershgorin bound, a cheap `‖T‖` estimate.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    fn pivmin(&self) -> f64 {
        let e2 = self.offdiag.iter().fold(1.0f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * e2
    }

    /// Number of eigenvalues `< e` (Sturm count with tiny-pivot replacement).
    pub fn eig_count(&self, e: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - e;
        for i in 0..self.len() {
            if i > 0 {
                let off = self.offdiag[i - 1];
                q = (self.diag[i] - e) - off * off / q;
            }
            // a vanishing pivot is nudged upwards, so an eigenvalue equal
            // to `e` is not counted as lying below it
            if q.abs() < pivmin {
                q = pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn stop_width(tol: f64, lo: f64, hi: f64) -> f64 {
        tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()))
    }

    /// The `k`-th smallest eigenvalue (0-based) to absolute tolerance `tol`
    /// (`tol = 0` bisects to machine precision).
    pub fn kth_eigenvalue(&self, k: usize, tol: f64) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::InvalidInput(format!("eigenvalue index {k} out of range")));
        }
        let (glo, ghi) = self.gershgorin();
        let pad = 2.0 * f64::EPSILON * glo.abs().max(ghi.abs()) + self.pivmin();
        let (mut lo, mut hi) = (glo - pad, ghi + pad);
        for _ in 0..256 {
            if hi - lo <= Self::stop_width(tol, lo, hi) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eig_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// All eigenvalues in `[a, b)` as `(value, multiplicity)`, located to
    /// absolute tolerance `tol`; multiplicities sum to
    /// `eig_count(b) - eig_count(a)`.
    pub fn eigs_in(&self, a: f64, b: f64, tol: f64) -> Result<Vec<(f64, usize)>> {
        self.require_dirichlet()?;
        if !(a <= b) || !(tol >= 0.0) {
            return Err(Error::InvalidInput(format!("invalid window [{a}, {b}) or tol {tol}")));
        }
        let mut out = Vec::new();
        // depth-first, left to right, so output is sorted
        let mut stack = vec![(a, b, self.eig_count(a), self.eig_count(b))];
        while let Some((lo, hi, clo, chi)) = stack.pop() {
            if chi == clo {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            if hi - lo <= Self::stop_width(tol, lo, hi) || mid <= lo || mid >= hi {
                out.push((mid, chi - clo));
                continue;
            }
            let cmid = self.eig_count(mid);
            stack.push((mid, hi, cmid, chi));
            stack.push((lo, mid, clo, cmid));
        }
        Ok(out)
    }

    /// Eigenvalues in `[a, b)` listed with multiplicity.
    pub fn eigenvalues_in(&self, a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
        Ok(self
            .eigs_in(a, b, tol)?
            .into_iter()
            .flat_map(|(e, m)| std::iter::repeat_n(e, m))
            .collect())
    }

    /// `T·x` for a real vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}
