//! Positive measures on the line with finitely many atoms and a piecewise
//! constant density, continuous piecewise-linear test functions, and the
//! membership oracles used to separate the atomic, absolutely continuous and
//! singular parts of a measure at finite scale.

mod oracles;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracles::{
    cantor_approx, classify, f1n_member, f2n_member, is_diffusive, singular_wrt_lebesgue, support_covers, water_fill,
    ClassLabel, Classification, WaterFill, MAX_CANTOR_DEPTH,
};

/// `Σ m_i δ_{x_i} + Σ h_j 1_{[a_j, b_j)} dx`.
///
/// Atoms are kept sorted by position with distinct positions and positive
/// masses; density pieces are sorted, disjoint, with `a < b` and `h >= 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Measure {
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    density: Vec<(f64, f64, f64)>,
}

impl Measure {
    pub fn new(mut atoms: Vec<(f64, f64)>, mut density: Vec<(f64, f64, f64)>) -> Result<Self> {
        for &(x, m) in &atoms {
            if !(x.is_finite() && m.is_finite() && m > 0.0) {
                return Err(Error::InvalidInput(format!("invalid atom ({x}, {m})")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = atoms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput(format!("duplicate atom position {}", w[0].0)));
        }
        for &(a, b, h) in &density {
            if !(a.is_finite() && b.is_finite() && a < b && h.is_finite() && h >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "invalid density piece [{a}, {b}) height {h}"
                )));
            }
        }
        density.sort_by(|p, q| p.0.total_cmp(&q.0));
        if let Some(w) = density.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidInput(format!(
                "density pieces [{}, {}) and [{}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(Measure { atoms, density })
    }

    pub fn zero() -> Self {
        Measure::default()
    }

    pub fn dirac(x: f64, mass: f64) -> Result<Self> {
        Measure::new(vec![(x, mass)], vec![])
    }

    pub fn uniform(a: f64, b: f64, height: f64) -> Result<Self> {
        Measure::new(vec![], vec![(a, b, height)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> &[(f64, f64, f64)] {
        &self.density
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.density.iter().map(|&(a, b, h)| (b - a) * h).sum::<f64>()
    }

    /// `c·μ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {c}")));
        }
        Measure::new(
            self.atoms.iter().map(|&(x, m)| (x, c * m)).collect(),
            self.density.iter().map(|&(a, b, h)| (a, b, c * h)).collect(),
        )
    }

    /// `μ + ν`: atoms at equal positions are merged, density pieces are split
    /// at every endpoint and their heights added.
    pub fn add(&self, other: &Measure) -> Measure {
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < other.atoms.len() {
            let next = match (self.atoms.get(i), other.atoms.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    i += 1;
                    j += 1;
                    (a.0, a.1 + b.1)
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    *a
                }
                (Some(_), Some(b)) | (None, Some(b)) => {
                    j += 1;
                    *b
                }
                (Some(a), None) => {
                    i += 1;
                    *a
                }
                (None, None) => unreachable!(),
            };
            atoms.push(next);
        }

        let mut cuts: Vec<f64> = self
            .density
            .iter()
            .chain(&other.density)
            .flat_map(|&(a, b, _)| [a, b])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let height_at = |pieces: &[(f64, f64, f64)], lo: f64, hi: f64| {
            pieces.iter().find(|&&(a, b, _)| a <= lo && hi <= b).map(|p| p.2)
        };
        let mut density = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let h1 = height_at(&self.density, lo, hi);
            let h2 = height_at(&other.density, lo, hi);
            if h1.is_some() || h2.is_some() {
                density.push((lo, hi, h1.unwrap_or(0.0) + h2.unwrap_or(0.0)));
            }
        }
        Measure { atoms, density }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Measure =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("invalid measure JSON: {e}")))?;
        Measure::new(raw.atoms, raw.density)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measures serialise to JSON")
    }
}

/// A continuous, compactly supported, piecewise-linear function given by its
/// breakpoints; it vanishes outside the first and last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    breakpoints: Vec<(f64, f64)>,
}

impl TestFunction {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidInput(
                "a test function needs at least two breakpoints".into(),
            ));
        }
        if breakpoints.iter().any(|&(x, v)| !(x.is_finite() && v.is_finite())) {
            return Err(Error::InvalidInput("test function breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        if breakpoints[0].1 != 0.0 || breakpoints[breakpoints.len() - 1].1 != 0.0 {
            return Err(Error::InvalidInput("test functions must vanish at both ends".into()));
        }
        Ok(TestFunction { breakpoints })
    }

    /// Tent of height `peak` at `center` supported on `[center - w, center + w]`.
    pub fn tent(center: f64, half_width: f64, peak: f64) -> Result<Self> {
        TestFunction::new(vec![
            (center - half_width, 0.0),
            (center, peak),
            (center + half_width, 0.0),
        ])
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        let k = bp.partition_point(|p| p.0 <= x);
        if k == 0 || k == bp.len() {
            // outside the support, or exactly the last breakpoint (value 0)
            return 0.0;
        }
        let (x0, v0) = bp[k - 1];
        let (x1, v1) = bp[k];
        if x == x0 {
            return v0;
        }
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Exact `∫_a^b φ`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for w in self.breakpoints.windows(2) {
            let lo = w[0].0.max(a);
            let hi = w[1].0.min(b);
            if lo < hi {
                total += (hi - lo) * (self.eval(lo) + self.eval(hi)) / 2.0;
            }
        }
        total
    }
}

/// `⟨μ, φ⟩ = Σ m φ(x) + Σ h ∫_a^b φ`.
pub fn pairing(mu: &Measure, phi: &TestFunction) -> f64 {
    let atoms: f64 = mu.atoms.iter().map(|&(x, m)| m * phi.eval(x)).sum();
    let density: f64 = mu.density.iter().map(|&(a, b, h)| h * phi.integral(a, b)).sum();
    atoms + density
}

/// The symmetric interval `[-K, K]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactWindow {
    pub half_width: f64,
}

impl CompactWindow {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("K must be positive, got {half_width}")));
        }
        Ok(CompactWindow { half_width })
    }

    /// `K_n = [-n K_1, n K_1]`.
    pub fn nth(&self, n: u32) -> CompactWindow {
        CompactWindow {
            half_width: n as f64 * self.half_width,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        let phi = TestFunction::tent(0.5, 0.5, 1.0).unwrap();
        assert_eq!(pairing(&Measure::dirac(0.3, 1.0).unwrap(), &phi), phi.eval(0.3));
        assert_eq!(pairing(&Measure::uniform(0.0, 1.0, 1.0).unwrap(), &phi), 0.5);
        let far = Measure::new(vec![(3.0, 2.0), (-4.0, 1.0)], vec![]).unwrap();
        assert_eq!(pairing(&far, &phi), 0.0);
    }

    #[test]
    fn test_function_eval() {
        let phi = TestFunction::new(vec![(-1.0, 0.0), (0.0, 2.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        assert_eq!(phi.eval(-2.0), 0.0);
        assert_eq!(phi.eval(-0.5), 1.0);
        assert_eq!(phi.eval(0.0), 2.0);
        assert_eq!(phi.eval(1.5), 0.5);
        assert_eq!(phi.eval(2.0), 0.0);
        assert_eq!(phi.integral(-5.0, 5.0), 1.0 + 1.5 + 0.5);
        assert_eq!(phi.integral(-0.5, 0.0), 0.75);
    }

    #[test]
    fn test_function_validation() {
        assert!(TestFunction::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(TestFunction::new(vec![(0.0, 0.0), (0.0, 0.0)]).is_err());
        assert!(TestFunction::new(vec![(0.0, 0.0)]).is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(vec![(0.0, 1.0), (0.0, 2.0)], vec![]).is_err());
        assert!(Measure::new(vec![(0.0, 0.0)], vec![]).is_err());
        assert!(Measure::new(vec![], vec![(0.0, 1.0, 1.0), (0.5, 2.0, 1.0)]).is_err());
        assert!(Measure::new(vec![], vec![(1.0, 0.0, 1.0)]).is_err());
        assert!(Measure::new(vec![], vec![(0.0, 1.0, -1.0)]).is_err());
        let m = Measure::new(vec![(2.0, 1.0), (-1.0, 0.5)], vec![(1.0, 2.0, 1.0), (0.0, 1.0, 0.0)]).unwrap();
        assert_eq!(m.atoms()[0].0, -1.0);
        assert_eq!(m.density()[0].0, 0.0);
        assert_eq!(m.total_mass(), 2.5);
    }

    #[test]
    fn add_merges() {
        let a = Measure::new(vec![(0.0, 1.0), (1.0, 0.5)], vec![(0.0, 2.0, 1.0)]).unwrap();
        let b = Measure::new(vec![(1.0, 0.25), (3.0, 1.0)], vec![(1.0, 3.0, 0.5)]).unwrap();
        let s = a.add(&b);
        assert_eq!(s.atoms(), &[(0.0, 1.0), (1.0, 0.75), (3.0, 1.0)]);
        assert_eq!(s.density(), &[(0.0, 1.0, 1.0), (1.0, 2.0, 1.5), (2.0, 3.0, 0.5)]);
        assert_eq!(s.total_mass(), a.total_mass() + b.total_mass());
    }

    #[test]
    fn json_round_trip() {
        let m = Measure::new(vec![(0.5, 0.25)], vec![(0.0, 1.0, 2.0)]).unwrap();
        let text = m.to_json();
        assert_eq!(text, r#"{"atoms":[[0.5,0.25]],"density":[[0.0,1.0,2.0]]}"#);
        assert_eq!(Measure::from_json(&text).unwrap(), m);
        assert!(Measure::from_json(r#"{"atoms":[[0,1],[0,1]],"density":[]}"#).is_err());
    }
}
