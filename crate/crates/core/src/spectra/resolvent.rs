//! Resolvent vectors `(T + i)^{-1} ξ` and the strong-resolvent distance
//! proxy `‖(T₁ + i)^{-1}ξ - (T₂ + i)^{-1}ξ‖`.

use num_complex::Complex64;

use super::{StateVector, TridiagonalOperator};
use crate::error::{Error, Result};

/// Solves a complex tridiagonal system by Gaussian elimination with
/// partial pivoting (one extra superdiagonal of fill-in).
pub(crate) fn solve_tridiagonal(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
    let mut x = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        let l = sub[i];
        if d[i].norm_sqr() >= l.norm_sqr() {
            if d[i].norm_sqr() == 0.0 {
                return Err(Error::Precondition("singular tridiagonal system".into()));
            }
            let f = l / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] = x[i + 1] - f * x[i];
        } else {
            let f = d[i] / l;
            d[i] = l;
            let old = d[i + 1];
            d[i + 1] = du[i] - f * old;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            du[i] = old;
            x.swap(i, i + 1);
            x[i + 1] = x[i + 1] - f * x[i];
        }
    }
    if d[n - 1].norm_sqr() == 0.0 {
        return Err(Error::Precondition("singular tridiagonal system".into()));
    }
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

fn check_grid(t: &TridiagonalOperator, xi: &StateVector) -> Result<()> {
    if t.len() != xi.values.len() {
        return Err(Error::InvalidInput(format!(
            "operator of size {} applied to a state of size {}",
            t.len(),
            xi.values.len()
        )));
    }
    Ok(())
}

/// `u = (T + i)^{-1} ξ`.
pub fn resolvent_vec(t: &TridiagonalOperator, xi: &StateVector) -> Result<StateVector> {
    t.require_dirichlet()?;
    check_grid(t, xi)?;
    let off: Vec<Complex64> = t.offdiag.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    let diag: Vec<Complex64> = t.diag.iter().map(|&d| Complex64::new(d, 1.0)).collect();
    let u = solve_tridiagonal(&off, &diag, &off, &xi.values)?;
    Ok(StateVector {
        grid: xi.grid,
        values: u,
    })
}

/// `‖(T₁ + i)^{-1}ξ - (T₂ + i)^{-1}ξ‖`; both operators must live on the
/// same grid.
pub fn srs_distance(t1: &TridiagonalOperator, t2: &TridiagonalOperator, xi: &StateVector) -> Result<f64> {
    if t1.grid != t2.grid || t1.len() != t2.len() {
        return Err(Error::InvalidInput("operators live on different grids".into()));
    }
    let u1 = resolvent_vec(t1, xi)?;
    let u2 = resolvent_vec(t2, xi)?;
    Ok(u1
        .values
        .iter()
        .zip(&u2.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Grid1D;
    use rand::{Rng, SeedableRng};

    fn residual(t: &TridiagonalOperator, u: &[Complex64], xi: &[Complex64]) -> f64 {
        let n = t.len();
        (0..n)
            .map(|i| {
                let mut y = Complex64::new(t.diag[i], 1.0) * u[i];
                if i > 0 {
                    y += t.offdiag[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    y += t.offdiag[i] * u[i + 1];
                }
                (y - xi[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn random_systems() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 3, 10, 200] {
            let t = TridiagonalOperator::from_entries(
                (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
                (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let grid = Grid1D::from_origin(0.0, 1.0, n).unwrap();
            let xi = StateVector::new(
                grid,
                (0..n)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let u = resolvent_vec(&t, &xi).unwrap();
            assert!(residual(&t, &u.values, &xi.values) <= 1e-12 * xi.norm());
            assert!(u.norm() <= xi.norm() * (1.0 + 1e-12));
            assert_eq!(srs_distance(&t, &t, &xi).unwrap(), 0.0);
        }
    }

    #[test]
    fn distant_perturbation_decays() {
        let n = 400;
        let base = TridiagonalOperator::from_entries(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let grid = base.grid;
        let mut xi = vec![0.0; n];
        xi[10] = 1.0;
        let xi = StateVector::from_real(grid, &xi).unwrap();
        let mut last = f64::INFINITY;
        for at in [20, 40, 80, 160] {
            let mut t = base.clone();
            t.diag[at] += 5.0;
            let dist = srs_distance(&base, &t, &xi).unwrap();
            assert!(dist < last);
            last = dist;
        }
        assert!(last < 1e-10);
    }

    #[test]
    fn grid_mismatch() {
        let a = TridiagonalOperator::from_entries(vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let b = TridiagonalOperator::from_entries(vec![2.0; 4], vec![-1.0; 3]).unwrap();
        let xi = StateVector::from_real(a.grid, &[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(srs_distance(&a, &b, &xi), Err(Error::InvalidInput(_))));
    }
}
