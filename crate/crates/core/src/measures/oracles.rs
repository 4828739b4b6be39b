//! Finite-scale membership oracles.
//!
//! `f1n_member(μ, n, K)` asks whether `(1/n)·δ_x <= μ` for some `x ∈ K`;
//! `f2n_member(μ, n, K)` whether some `g·dx <= μ` with `g` supported in `K`,
//! `∫g >= 1/n` and `‖g‖_{L²} <= 1`. Growing `n` (with `K_n = n·K_1`)
//! exhausts the measures with a non-trivial atomic, respectively absolutely
//! continuous, part.

use std::fmt;

use super::{CompactWindow, Measure};
use crate::error::{Error, Result};

/// Slack on `‖g‖² <= 1` absorbing rounding in the water level.
const NORM_SLACK: f64 = 1e-12;

pub const MAX_CANTOR_DEPTH: u32 = 24;

pub fn is_diffusive(mu: &Measure) -> bool {
    mu.atoms().is_empty()
}

/// For this representation `μ ⊥ λ` iff the density vanishes identically.
pub fn singular_wrt_lebesgue(mu: &Measure) -> bool {
    mu.density().iter().all(|p| p.2 == 0.0)
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    Ok(())
}

/// Some atom of mass at least `1/n` lies in `K`.
pub fn f1n_member(mu: &Measure, n: u32, k: CompactWindow) -> Result<bool> {
    check_n(n)?;
    let threshold = 1.0 / n as f64;
    Ok(mu.atoms().iter().any(|&(x, m)| k.contains(x) && m >= threshold))
}

/// The minimal-norm `g = min(f, c)` with `∫g = target`, where `f` is the
/// density of `μ` restricted to `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterFill {
    /// `∫_K f`.
    pub available: f64,
    /// The water level `c`, or `None` when `available < target`.
    pub level: Option<f64>,
    /// `‖min(f, c)‖²` (infinite when there is no level).
    pub norm2: f64,
}

/// Solves `∫ min(f, c) = target` exactly: the left side is piecewise linear
/// in `c` with breaks at the density heights.
pub fn water_fill(mu: &Measure, target: f64, k: CompactWindow) -> WaterFill {
    let mut pieces: Vec<(f64, f64)> = mu
        .density()
        .iter()
        .filter_map(|&(a, b, h)| {
            let lo = a.max(-k.half_width);
            let hi = b.min(k.half_width);
            (lo < hi && h > 0.0).then_some((hi - lo, h))
        })
        .collect();
    let available: f64 = pieces.iter().map(|&(len, h)| len * h).sum();
    if available < target {
        return WaterFill {
            available,
            level: None,
            norm2: f64::INFINITY,
        };
    }
    pieces.sort_by(|p, q| p.1.total_cmp(&q.1));
    let mut below = 0.0;
    let mut remaining: f64 = pieces.iter().map(|p| p.0).sum();
    let mut level = pieces.last().map_or(0.0, |p| p.1);
    for &(len, h) in &pieces {
        if below + h * remaining >= target {
            level = (target - below) / remaining;
            break;
        }
        below += len * h;
        remaining -= len;
    }
    let norm2 = pieces.iter().map(|&(len, h)| len * h.min(level).powi(2)).sum();
    WaterFill {
        available,
        level: Some(level),
        norm2,
    }
}

pub fn f2n_member(mu: &Measure, n: u32, k: CompactWindow) -> Result<bool> {
    check_n(n)?;
    let wf = water_fill(mu, 1.0 / n as f64, k);
    Ok(wf.level.is_some() && wf.norm2 <= 1.0 + NORM_SLACK)
}

/// Coarse type of a measure as seen by the oracles up to `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassLabel {
    /// Both an atom and an absolutely continuous part were detected.
    Mixed,
    Atomic,
    Ac,
    /// Non-zero, singular, and no atom of mass `>= 1/n_max`: the finite
    /// stand-in for a singular continuous measure.
    ScProxy,
    /// Non-zero density, but too thin for `n <= n_max`.
    Unresolved,
    Zero,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Mixed => "mixed",
            ClassLabel::Atomic => "atomic",
            ClassLabel::Ac => "ac",
            ClassLabel::ScProxy => "sc-proxy",
            ClassLabel::Unresolved => "unresolved",
            ClassLabel::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub f1n_first: Option<u32>,
    pub f2n_first: Option<u32>,
    pub diffusive: bool,
    pub singular: bool,
    pub label: ClassLabel,
}

impl Classification {
    pub const CSV_HEADER: &'static str = "label,f1n_first,f2n_first,diffusive,singular";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<u32>| v.map_or_else(|| "none".to_string(), |n| n.to_string());
        format!(
            "{},{},{},{},{}",
            self.label,
            opt(self.f1n_first),
            opt(self.f2n_first),
            self.diffusive,
            self.singular
        )
    }
}

/// Smallest `n <= n_max` with `μ ∈ F_{1,n}` resp. `F_{2,n}` on `K_n = n·K_1`.
pub fn classify(mu: &Measure, n_max: u32, k1: CompactWindow) -> Result<Classification> {
    check_n(n_max)?;
    let mut f1n_first = None;
    let mut f2n_first = None;
    for n in 1..=n_max {
        let kn = k1.nth(n);
        if f1n_first.is_none() && f1n_member(mu, n, kn)? {
            f1n_first = Some(n);
        }
        if f2n_first.is_none() && f2n_member(mu, n, kn)? {
            f2n_first = Some(n);
        }
        if f1n_first.is_some() && f2n_first.is_some() {
            break;
        }
    }
    let diffusive = is_diffusive(mu);
    let singular = singular_wrt_lebesgue(mu);
    let label = match (f1n_first, f2n_first) {
        (Some(_), Some(_)) => ClassLabel::Mixed,
        (Some(_), None) => ClassLabel::Atomic,
        (None, Some(_)) => ClassLabel::Ac,
        (None, None) if mu.total_mass() == 0.0 => ClassLabel::Zero,
        (None, None) if singular => ClassLabel::ScProxy,
        (None, None) => ClassLabel::Unresolved,
    };
    Ok(Classification {
        f1n_first,
        f2n_first,
        diffusive,
        singular,
        label,
    })
}

/// Uniform atoms of mass `2^-depth` at the left endpoints of the
/// `2^depth` middle-thirds intervals of generation `depth`.
pub fn cantor_approx(depth: u32) -> Result<Measure> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if depth > MAX_CANTOR_DEPTH {
        return Err(Error::Resource(format!(
            "Cantor depth {depth} exceeds {MAX_CANTOR_DEPTH}"
        )));
    }
    let scale = 3f64.powi(depth as i32);
    let mass = 0.5f64.powi(depth as i32);
    let atoms = (0u64..1 << depth)
        .map(|bits| {
            // ternary digits in {0, 2} read off the binary digits of `bits`
            let mut m: u64 = 0;
            for i in (0..depth).rev() {
                m = 3 * m + 2 * ((bits >> i) & 1);
            }
            (m as f64 / scale, mass)
        })
        .collect();
    Measure::new(atoms, vec![])
}

/// `μ(U_ε(x)) > 0` for every `x` in `f`.
pub fn support_covers(mu: &Measure, f: &[f64], eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    Ok(f.iter().all(|&x| {
        mu.atoms().iter().any(|&(y, _)| (y - x).abs() < eps)
            || mu
                .density()
                .iter()
                .any(|&(a, b, h)| h > 0.0 && a < x + eps && b > x - eps)
    }))
}
