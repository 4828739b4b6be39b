//! Discretized one-dimensional Delone Hamiltonians
//! `H(ω) = -Δ + Σ_{x ∈ ω} v(· - x)`.
//!
//! The Laplacian is the 3-point stencil on a uniform grid. Finite
//! truncations use Dirichlet walls just outside the first and last node and
//! are handled as symmetric tridiagonal matrices; periodic operators are
//! handled only through the transfer matrix over one period. Every spectral
//! statement made here is about this discrete model, which approximates the
//! continuum operator.

mod bands;
mod experiment;
mod intervals;
mod potential;
mod resolvent;
mod spectral_measure;
mod tridiag;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use bands::{bands, bands_from_cell, discriminant, transfer_matrix, BandStructure};
pub use experiment::{
    approximation_experiment, bump_state, ApproximationPath, ExperimentRow, ExperimentSpec, EXPERIMENT_CSV_HEADER,
};
pub use intervals::{u_interval, Interval, IntervalSet};
pub use potential::{sample_potential, Potential};
pub use resolvent::{resolvent_vec, srs_distance};
pub use spectral_measure::{spectral_measure, spectral_measure_capped, DEFAULT_SPECTRAL_CAP};
pub use tridiag::{assemble, assemble_on, truncated_operator, Boundary, TridiagonalOperator};

/// Nodes `x0, x0 + h, …, x1` of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub x1: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid1D {
    /// Grid over `[x0, x1]` with `N = round((x1 - x0)/h) + 1` nodes; the
    /// spacing is adjusted so that the last node is exactly `x1`.
    pub fn new(x0: f64, x1: f64, h: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && x1 > x0 && h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid grid [{x0}, {x1}] with h = {h}")));
        }
        let n = ((x1 - x0) / h).round() as usize + 1;
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "grid [{x0}, {x1}] with h = {h} has fewer than 2 nodes"
            )));
        }
        Ok(Grid1D {
            x0,
            x1,
            h: (x1 - x0) / (n - 1) as f64,
            n,
        })
    }

    /// `n` nodes `x0 + i·h`.
    pub fn from_origin(x0: f64, h: f64, n: usize) -> Result<Self> {
        if !(x0.is_finite() && h > 0.0 && h.is_finite()) || n == 0 {
            return Err(Error::InvalidInput(format!(
                "invalid grid origin {x0}, h = {h}, n = {n}"
            )));
        }
        Ok(Grid1D {
            x0,
            x1: x0 + (n - 1) as f64 * h,
            h,
            n,
        })
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x1
        } else {
            self.x0 + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }
}

/// A complex vector on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl StateVector {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidInput(format!(
                "state has {} values on a grid of {} nodes",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("state has non-finite entries".into()));
        }
        Ok(StateVector { grid, values })
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        StateVector::new(grid, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }
}
