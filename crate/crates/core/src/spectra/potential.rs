//! Single-site potentials and their superposition over a point set.

use super::Grid1D;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::measures::TestFunction;

/// A continuous piecewise-linear profile supported on `[-w, w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    half_width: f64,
    profile: TestFunction,
}

impl Potential {
    /// Breakpoints must start at `-w` and end at `w` with value 0 there.
    pub fn from_breakpoints(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let profile = TestFunction::new(breakpoints)?;
        let bp = profile.breakpoints();
        let (lo, hi) = (bp[0].0, bp[bp.len() - 1].0);
        if lo != -hi || hi <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "potential support [{lo}, {hi}] must be [-w, w]"
            )));
        }
        Ok(Potential {
            half_width: hi,
            profile,
        })
    }

    /// Flat bottom at `depth` on `|x| <= w - shoulder`, linear ramps to 0 at
    /// `|x| = w`.
    pub fn trapezoid(depth: f64, half_width: f64, shoulder: f64) -> Result<Self> {
        if !(shoulder > 0.0 && shoulder < half_width && depth.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "trapezoid needs 0 < shoulder < half-width, got {shoulder}, {half_width}"
            )));
        }
        let inner = half_width - shoulder;
        Potential::from_breakpoints(vec![
            (-half_width, 0.0),
            (-inner, depth),
            (inner, depth),
            (half_width, 0.0),
        ])
    }

    /// Depth -1, half-width 0.3, shoulder 0.05.
    pub fn default_well() -> Self {
        Potential::trapezoid(-1.0, 0.3, 0.05).expect("default well is valid")
    }

    /// `v ≡ 0` with a nominal support `[-w, w]`.
    pub fn zero(half_width: f64) -> Result<Self> {
        Potential::from_breakpoints(vec![(-half_width, 0.0), (half_width, 0.0)])
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    /// `max |v|`.
    pub fn bound(&self) -> f64 {
        self.profile.breakpoints().iter().fold(0.0, |m, p| m.max(p.1.abs()))
    }
}

/// `V_i = Σ_{x ∈ ω, |g_i - x| <= w} v(g_i - x)` on every grid node.
pub fn sample_potential(omega: &dyn PointSet, v: &Potential, grid: &Grid1D) -> Result<Vec<f64>> {
    if omega.dim() != 1 {
        return Err(Error::InvalidInput("potentials are sampled in dimension 1 only".into()));
    }
    let w = v.half_width();
    let reach = grid.x0.abs().max(grid.x1.abs()) + w;
    omega.require_known(reach)?;
    let mut out = vec![0.0; grid.n];
    for p in omega.points_in_cube(reach)? {
        let x = p.0[0];
        let first = ((x - w - grid.x0) / grid.h).ceil().max(0.0) as usize;
        let last = ((x + w - grid.x0) / grid.h).floor();
        if last < 0.0 {
            continue;
        }
        let last = (last as usize).min(grid.n - 1);
        for (i, slot) in out.iter_mut().enumerate().take(last + 1).skip(first) {
            *slot += v.eval(grid.node(i) - x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Cube, DeloneParams, Point, WindowedPointSet};

    fn set(xs: &[f64], s: f64) -> WindowedPointSet {
        let p = DeloneParams::new(0.1, 1.0, 1).unwrap();
        WindowedPointSet::new(xs.iter().map(|&x| Point::from(x)).collect(), Cube::new(s).unwrap(), p).unwrap()
    }

    #[test]
    fn default_well_shape() {
        let v = Potential::default_well();
        assert_eq!(v.half_width(), 0.3);
        assert_eq!(v.eval(0.0), -1.0);
        assert_eq!(v.eval(0.25), -1.0);
        assert!((v.eval(0.275) + 0.5).abs() < 1e-12);
        assert_eq!(v.eval(0.3), 0.0);
        assert_eq!(v.eval(-0.4), 0.0);
        assert_eq!(v.bound(), 1.0);
    }

    #[test]
    fn sampling_examples() {
        let grid = Grid1D::new(-2.0, 2.0, 0.01).unwrap();
        let zero = Potential::zero(0.3).unwrap();
        assert!(sample_potential(&set(&[0.0, 1.0], 3.0), &zero, &grid)
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));

        let v = Potential::default_well();
        let samples = sample_potential(&set(&[0.0], 3.0), &v, &grid).unwrap();
        assert_eq!(samples[200], v.eval(0.0));

        // overlapping wells at 0 and 0.4: node 0.2 sees both at distance 0.2
        let samples = sample_potential(&set(&[0.0, 0.4], 3.0), &v, &grid).unwrap();
        let i = 220;
        assert!((grid.node(i) - 0.2).abs() < 1e-12);
        assert!((samples[i] - (v.eval(grid.node(i)) + v.eval(grid.node(i) - 0.4))).abs() < 1e-15);
        assert_eq!(samples[i], -2.0);
    }

    #[test]
    fn sampling_needs_window() {
        let grid = Grid1D::new(-2.0, 2.0, 0.01).unwrap();
        let e = sample_potential(&set(&[0.0], 2.1), &Potential::default_well(), &grid);
        assert!(matches!(e, Err(Error::InsufficientWindow { .. })));
    }
}
