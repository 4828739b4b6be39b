//! Delone sets and Delone Hamiltonians at desk scale.
//!
//! * [`geometry`]: windowed and crystallographic Delone sets, `(r, R)`
//!   verification, greedy maximal fills and the extension/gluing constructions.
//! * [`topology`]: stereographic compactification, the capped Hausdorff
//!   distance, the natural metric on closed sets and local convergence reports.
//! * [`measures`]: finitely represented positive measures and the
//!   membership oracles used to classify them.
//! * [`spectra`]: discretized 1-D Hamiltonians, Sturm bisection, transfer
//!   matrix band structure, spectral measures and resolvent diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod measures;
pub mod spectra;
pub mod topology;

pub use error::{Error, Result};
