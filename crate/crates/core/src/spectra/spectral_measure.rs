//! Spectral measures `ρ_ξ = Σ_k |⟨ψ_k, ξ⟩|² δ_{λ_k}` of Dirichlet operators.
//!
//! The eigen-decomposition is the implicit QL iteration with Wilkinson-type
//! shifts; instead of accumulating the eigenvector matrix, every plane
//! rotation is applied directly to `ξ`, which leaves `Qᵀξ`, i.e. the
//! coefficients `⟨ψ_k, ξ⟩`, in place. This costs `O(N²)` and never needs
//! eigenvectors to be re-orthogonalized inside clusters.

use num_complex::Complex64;

use super::{StateVector, TridiagonalOperator};
use crate::error::{Error, Result};
use crate::measures::Measure;

/// Default bound on the matrix size.
pub const DEFAULT_SPECTRAL_CAP: usize = 2048;

/// Relative width (of the spectrum) below which eigenvalues are merged.
const CLUSTER_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 60;

/// Diagonalizes `(d, e)` in place (`e[i]` couples `i` and `i + 1`) and
/// rotates `w` along.
fn ql_implicit(d: &mut [f64], e: &mut [f64], w: &mut [Complex64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e_ext = e.to_vec();
    e_ext.push(0.0);
    let e = &mut e_ext;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::Resource("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let wi1 = w[i + 1];
                w[i + 1] = w[i] * s + wi1 * c;
                w[i] = w[i] * c - wi1 * s;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) and coefficients `⟨ψ_k, ξ⟩`.
pub(crate) fn eigen_coefficients(t: &TridiagonalOperator, xi: &[Complex64]) -> Result<Vec<(f64, Complex64)>> {
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    let mut w = xi.to_vec();
    ql_implicit(&mut d, &mut e, &mut w)?;
    let mut pairs: Vec<(f64, Complex64)> = d.into_iter().zip(w).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Spectral measure of `ξ` for `T` with the default size cap.
pub fn spectral_measure(t: &TridiagonalOperator, xi: &StateVector) -> Result<Measure> {
    spectral_measure_capped(t, xi, DEFAULT_SPECTRAL_CAP)
}

/// Atoms `(λ, Σ |⟨ψ, ξ⟩|²)` with eigenvalues closer than `1e-9` times the
/// spectral width merged (at their mean); atoms of zero mass are omitted.
pub fn spectral_measure_capped(t: &TridiagonalOperator, xi: &StateVector, cap: usize) -> Result<Measure> {
    t.require_dirichlet()?;
    if t.len() > cap {
        return Err(Error::Resource(format!(
            "matrix size {} exceeds the cap {cap}",
            t.len()
        )));
    }
    if xi.values.len() != t.len() {
        return Err(Error::InvalidInput(format!(
            "operator of size {} with a state of size {}",
            t.len(),
            xi.values.len()
        )));
    }
    let pairs = eigen_coefficients(t, &xi.values)?;
    let width = pairs.last().map_or(0.0, |p| p.0) - pairs.first().map_or(0.0, |p| p.0);
    let merge = CLUSTER_TOL * width;
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut k = 0;
    while k < pairs.len() {
        let start = k;
        let mut mass = pairs[k].1.norm_sqr();
        let mut sum = pairs[k].0;
        while k + 1 < pairs.len() && pairs[k + 1].0 - pairs[k].0 <= merge {
            k += 1;
            mass += pairs[k].1.norm_sqr();
            sum += pairs[k].0;
        }
        let count = (k - start + 1) as f64;
        if mass > 0.0 {
            atoms.push((sum / count, mass));
        }
        k += 1;
    }
    Measure::new(atoms, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Grid1D;
    use std::f64::consts::PI;

    #[test]
    fn one_by_one() {
        let t = TridiagonalOperator::from_entries(vec![1.5], vec![]).unwrap();
        let xi = StateVector::from_real(t.grid, &[1.0]).unwrap();
        let mu = spectral_measure(&t, &xi).unwrap();
        assert_eq!(mu.atoms(), &[(1.5, 1.0)]);
    }

    #[test]
    fn free_eigenvalues_and_weights() {
        let n = 100;
        let t = TridiagonalOperator::from_entries(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let mut xi = vec![0.0; n];
        xi[0] = 1.0;
        let pairs = eigen_coefficients(&t, &xi.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()).unwrap();
        for (k, (lambda, c)) in pairs.iter().enumerate() {
            let theta = (k + 1) as f64 * PI / (n + 1) as f64;
            assert!((lambda - (2.0 - 2.0 * theta.cos())).abs() < 1e-12);
            // first component of the normalized sine eigenvector
            let expected = 2.0 / (n + 1) as f64 * theta.sin().powi(2);
            assert!((c.norm_sqr() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let t = TridiagonalOperator::from_entries(vec![0.0; 5], vec![0.0; 4]).unwrap();
        let xi = StateVector::from_real(Grid1D::from_origin(0.0, 1.0, 5).unwrap(), &[1.0; 5]).unwrap();
        assert!(matches!(spectral_measure_capped(&t, &xi, 4), Err(Error::Resource(_))));
        // a zero matrix is one cluster carrying all the mass
        let mu = spectral_measure(&t, &xi).unwrap();
        assert_eq!(mu.atoms(), &[(0.0, 5.0)]);
    }
}
