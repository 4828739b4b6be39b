//! Approximation experiments: a fixed Delone set `ω` is approximated along a
//! schedule of radii `S`, either by crystallographic extensions or by gluing
//! `ω ∩ Q(S)` into a fixed crystallographic background `γ̃`, and every
//! approximant is compared with `ω` geometrically (natural distance) and
//! spectrally (resolvent distance on a fixed state, eigenvalues in an energy
//! window, bands when periodic).
//!
//! Schedule entries are independent and evaluated in parallel; rows come
//! back in schedule order.

use rayon::prelude::*;

use super::{bands, resolvent, sample_potential, tridiag, Grid1D, IntervalSet, Potential, StateVector};
use crate::error::{Error, Result};
use crate::geometry::{crystallographic_extension, glue, CrystallographicSet, PointSet};
use crate::topology::natural_distance;

/// Column order of [`ExperimentRow::csv_row`].
pub const EXPERIMENT_CSV_HEADER: &str = "path,n,delta,delta_bound,srs_distance,eig_hausdorff,bands";

/// How the approximants `ω_n` are built.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproximationPath {
    /// Crystallographic extension of `ω ∩ Q(n)`.
    Extension,
    /// `ω` on `Q(n)` glued into `gamma`.
    Glue { gamma: CrystallographicSet },
}

impl ApproximationPath {
    pub fn label(&self) -> &'static str {
        match self {
            ApproximationPath::Extension => "extension",
            ApproximationPath::Glue { .. } => "glue",
        }
    }
}

/// Numerical settings shared by all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Radii `S = n`, strictly increasing.
    pub schedule: Vec<f64>,
    /// Dirichlet box `[-box_half_width, box_half_width]`.
    pub box_half_width: f64,
    pub h: f64,
    /// Energy window for eigenvalues and bands.
    pub window: (f64, f64),
    /// Truncation tolerance of the natural distance.
    pub tol: f64,
    /// Grid pitch of the constructions.
    pub pitch: f64,
    /// Eigenvalue tolerance.
    pub eig_tol: f64,
    /// Band-edge tolerance.
    pub edge_tol: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            schedule: vec![5.0, 10.0, 20.0, 40.0],
            box_half_width: 60.0,
            h: 0.02,
            window: (-1.0, 5.0),
            tol: 1e-3,
            pitch: 0.05,
            eig_tol: 1e-10,
            edge_tol: 1e-9,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::InvalidInput("empty schedule".into()));
        }
        if self.schedule.iter().any(|s| !(s.is_finite() && *s > 0.0)) || self.schedule.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidInput(format!(
                "schedule must be positive and strictly increasing, got {:?}",
                self.schedule
            )));
        }
        for (name, x) in [
            ("box half-width", self.box_half_width),
            ("h", self.h),
            ("tol", self.tol),
            ("pitch", self.pitch),
            ("eigenvalue tolerance", self.eig_tol),
            ("band-edge tolerance", self.edge_tol),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {x}")));
            }
        }
        let (a, b) = self.window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput(format!("invalid energy window [{a}, {b}]")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(-self.box_half_width, self.box_half_width, self.h)
    }
}

/// One schedule entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub path: &'static str,
    pub n: f64,
    /// Truncated natural distance `δ(ω_n, ω)`.
    pub delta: f64,
    /// `2/√(1+n²)` plus the truncation error bound of `delta`.
    pub delta_bound: f64,
    pub srs_distance: f64,
    /// Hausdorff distance between the eigenvalues in the window (0 if both
    /// are empty, infinite if exactly one is).
    pub eig_hausdorff: f64,
    /// Bands in the window when `ω_n` is crystallographic.
    pub bands: Option<IntervalSet>,
    /// Glue path only: whether the sampled potentials of `ω_n` and of the
    /// background agree on every node outside `Q(n + 2R + r + w)`.
    pub outer_agreement: Option<bool>,
}

impl ExperimentRow {
    /// The row in [`EXPERIMENT_CSV_HEADER`] order; `bands` is the number of
    /// band intervals, empty when not applicable.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.path,
            self.n,
            self.delta,
            self.delta_bound,
            self.srs_distance,
            self.eig_hausdorff,
            self.bands.as_ref().map_or(String::new(), |b| b.len().to_string())
        )
    }
}

/// The state `(1 - x²)²` on `[-1, 1]`, zero elsewhere, normalized on the
/// grid.
pub fn bump_state(grid: Grid1D) -> Result<StateVector> {
    let values: Vec<f64> = grid
        .nodes()
        .map(|x| if x.abs() < 1.0 { (1.0 - x * x).powi(2) } else { 0.0 })
        .collect();
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Precondition("grid has no node inside (-1, 1)".into()));
    }
    StateVector::from_real(grid, &values.iter().map(|v| v / norm).collect::<Vec<_>>())
}

fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    // both inputs are sorted
    let directed = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|&e| {
                let k = y.partition_point(|&t| t < e);
                let right = y.get(k).map_or(f64::INFINITY, |t| t - e);
                let left = if k > 0 { e - y[k - 1] } else { f64::INFINITY };
                left.min(right)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Runs the experiment for every schedule entry.
pub fn approximation_experiment(
    omega: &(dyn PointSet + Sync),
    v: &Potential,
    spec: &ExperimentSpec,
    path: &ApproximationPath,
) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    if omega.dim() != 1 {
        return Err(Error::InvalidInput("the experiment runs in dimension 1 only".into()));
    }
    let grid = spec.grid()?;
    let xi = bump_state(grid)?;
    let base = tridiag::truncated_operator(omega, v, grid)?;
    let (ea, eb) = spec.window;
    let mut base_eigs = base.eigenvalues_in(ea, eb, spec.eig_tol)?;
    base_eigs.dedup();
    let background = match path {
        ApproximationPath::Glue { gamma } => Some(sample_potential(gamma, v, &grid)?),
        ApproximationPath::Extension => None,
    };

    spec.schedule
        .par_iter()
        .map(|&n| {
            let (approx, crystal, outer): (Box<dyn PointSet + Sync>, _, _) = match path {
                ApproximationPath::Extension => {
                    let rho = crystallographic_extension(omega, n, spec.pitch)?;
                    (Box::new(rho.clone()), Some(rho), None)
                }
                ApproximationPath::Glue { gamma } => {
                    let p = omega.params();
                    let out = glue(omega, gamma, n, spec.pitch)?;
                    (Box::new(out.set), None, Some(n + 2.0 * p.big_r + p.r + v.half_width()))
                }
            };
            let delta = natural_distance(approx.as_ref(), omega, spec.tol)?;
            let t = tridiag::truncated_operator(approx.as_ref(), v, grid)?;
            let srs = resolvent::srs_distance(&t, &base, &xi)?;
            let mut eigs = t.eigenvalues_in(ea, eb, spec.eig_tol)?;
            eigs.dedup();
            let band_set = match &crystal {
                Some(rho) => Some(bands::bands(rho, v, spec.h, spec.window, spec.edge_tol)?.bands),
                None => None,
            };
            let outer_agreement = match (outer, &background) {
                (Some(radius), Some(bg)) => {
                    let samples = sample_potential(approx.as_ref(), v, &grid)?;
                    Some(
                        grid.nodes()
                            .zip(samples.iter().zip(bg))
                            .filter(|(x, _)| x.abs() > radius)
                            .all(|(_, (a, b))| a == b),
                    )
                }
                _ => None,
            };
            Ok(ExperimentRow {
                path: path.label(),
                n,
                delta: delta.value,
                delta_bound: 2.0 / (1.0 + n * n).sqrt() + delta.error_bound,
                srs_distance: srs,
                eig_hausdorff: hausdorff_1d(&eigs, &base_eigs),
                bands: band_set,
                outer_agreement,
            })
        })
        .collect()
}
