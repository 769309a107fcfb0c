//! Skewness ratios built from the entropies and their duals.
//!
//! ```text
//! ◇_X(s) = ∇_s(X) / Δ_s(-X)        ◇̄_X(s) = ∇_s(-X) / Δ_s(X)
//! ϱ(X)   = inf{s > -1 : ◇_X(s) > 1}  ϱ̄(X)   = inf{s > -1 : ◇̄_X(s) > 1}
//! ```
//!
//! Both ratios increase from 0 to ∞, so each parameter is the crossing of
//! level 1, found by bisection. Since `∇_0 = Δ_0`, `ϱ(X) = 0` exactly when
//! `Δ_0(X) = Δ_0(-X)`. Note `◇̄_X = ◇_{-X}` and `ϱ̄(X) = ϱ(-X)`.

use crate::distributions::Distribution;
use crate::entropy::{self, check_delta_finite};
use crate::error::{domain, Error, Result};
use crate::roots::bisect;
use rayon::prelude::*;
use serde::Serialize;

/// Which ratio to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiamondKind {
    Diamond,
    DiamondBar,
}

/// Which skewness parameter to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoKind {
    Rho,
    RhoBar,
}

impl RhoKind {
    fn ratio(self) -> DiamondKind {
        match self {
            RhoKind::Rho => DiamondKind::Diamond,
            RhoKind::RhoBar => DiamondKind::DiamondBar,
        }
    }
}

fn oriented(d: &Distribution, kind: DiamondKind) -> Distribution {
    match kind {
        DiamondKind::Diamond => *d,
        DiamondKind::DiamondBar => d.negate(),
    }
}

/// Both `Δ_0(X)` and `Δ_0(-X)` must be finite.
pub fn check_skewness_domain(d: &Distribution) -> Result<()> {
    check_delta_finite(d, 0.0)?;
    check_delta_finite(&d.negate(), 0.0)
}

/// `◇_X(s)` or `◇̄_X(s)`.
///
/// Below the order where the denominator diverges the ratio is 0, the
/// monotone extension that keeps the infimum defining ϱ well posed.
pub fn diamond(d: &Distribution, s: f64, kind: DiamondKind) -> Result<f64> {
    check_skewness_domain(d)?;
    let x = oriented(d, kind);
    let denominator = match entropy::delta(&x.negate(), s) {
        Ok(v) => v.value,
        Err(Error::Divergent { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let numerator = entropy::nabla(&x, s)?.value;
    Ok(numerator / denominator)
}

/// `ϱ(X)` or `ϱ̄(X)` to accuracy `tol`.
///
/// Returns 0 when `Δ_0(X) = Δ_0(-X)` to `tol` relative. Otherwise the level-1
/// crossing of the ratio is bracketed on `(-1, 0)` when the ratio exceeds 1
/// at 0, and on `(0, s_hi)` with `s_hi = 1, 4, 16, …` up to `10^4` when not.
pub fn rho(d: &Distribution, kind: RhoKind, tol: f64) -> Result<f64> {
    check_skewness_domain(d)?;
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let x = oriented(d, kind.ratio());
    let d0 = entropy::delta(&x, 0.0)?.value;
    let d0_bar = entropy::delta(&x.negate(), 0.0)?.value;
    if (d0 - d0_bar).abs() <= tol * d0.abs().max(d0_bar.abs()) {
        return Ok(0.0);
    }
    // the ratio vanishes where the denominator Δ_s(-X) diverges
    let floor = x.negate().finiteness_threshold().unwrap_or(-1.0).max(-1.0);
    let excess = |s: f64| -> f64 {
        if s <= floor {
            return -1.0;
        }
        match diamond(&x, s, DiamondKind::Diamond) {
            Ok(r) => r - 1.0,
            Err(_) => f64::NAN,
        }
    };
    let (lo, hi) = if d0 > d0_bar {
        (floor, 0.0)
    } else {
        let mut hi = 1.0;
        while excess(hi) <= 0.0 {
            hi *= 4.0;
            if hi > 1e4 {
                return Err(Error::NotBracketed { lo: 0.0, hi: 1e4 });
            }
        }
        (0.0, hi)
    };
    bisect(excess, lo, hi, tol, 200)
}

/// Values of a ratio over a grid of orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewnessCurve {
    pub kind: DiamondKind,
    /// `(s, ratio)` pairs.
    pub values: Vec<(f64, f64)>,
    /// Crossing of level 1, when the grid brackets one.
    pub root: Option<f64>,
    /// Finite ratios are nondecreasing along the grid.
    pub monotone: bool,
}

/// The ratio at each order of `grid` (sorted ascending).
pub fn diamond_curve(d: &Distribution, kind: DiamondKind, grid: &[f64]) -> Result<SkewnessCurve> {
    let values: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&s| diamond(d, s, kind).map(|r| (s, r)))
        .collect::<Result<_>>()?;
    let monotone = values.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-10));
    let root = match values.iter().position(|&(_, r)| r > 1.0) {
        Some(i) if i > 0 => {
            let rk = match kind {
                DiamondKind::Diamond => RhoKind::Rho,
                DiamondKind::DiamondBar => RhoKind::RhoBar,
            };
            rho(d, rk, 1e-10).ok()
        }
        _ => None,
    };
    Ok(SkewnessCurve { kind, values, root, monotone })
}

/// One point of a β-indexed parameter curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoPoint {
    pub beta: f64,
    pub value: std::result::Result<f64, String>,
}

/// A skewness parameter along a one-parameter family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoCurve {
    pub family: &'static str,
    pub kind: RhoKind,
    pub points: Vec<RhoPoint>,
    /// Finite values move in the expected direction along β.
    pub monotone: bool,
}

fn rho_curve<M>(family: &'static str, kind: RhoKind, betas: &[f64], make: M, increasing: bool) -> RhoCurve
where
    M: Fn(f64) -> Result<Distribution> + Sync,
{
    let points: Vec<RhoPoint> = betas
        .par_iter()
        .map(|&beta| RhoPoint {
            beta,
            value: make(beta).and_then(|d| rho(&d, kind, 1e-10)).map_err(|e| e.to_string()),
        })
        .collect();
    let finite: Vec<f64> = points.iter().filter_map(|p| p.value.as_ref().ok().copied()).collect();
    let monotone = finite.windows(2).all(|w| if increasing { w[1] >= w[0] } else { w[1] <= w[0] });
    RhoCurve { family, kind, points, monotone }
}

/// `β ↦ ϱ(U^(1/β))` (decreasing from 1 to -0.36595…) or
/// `β ↦ ϱ̄(U^(1/β))` (increasing from -1 to 0.38959…), β ascending.
pub fn rho_curve_power_uniform(kind: RhoKind, betas: &[f64]) -> RhoCurve {
    rho_curve("power_uniform", kind, betas, Distribution::power_uniform, kind == RhoKind::RhoBar)
}

/// `β ↦ ϱ(-U^(-1/β))` (increasing from -1 to -0.36595…) or
/// `β ↦ ϱ̄(-U^(-1/β))` (decreasing from 1 to 0.38959…), β > 1 ascending.
pub fn rho_curve_negative_lomax(kind: RhoKind, betas: &[f64]) -> RhoCurve {
    rho_curve("negative_lomax", kind, betas, Distribution::negative_lomax, kind == RhoKind::Rho)
}

/// Report of the sign pattern of `ϱ` and `ϱ̄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoRangeReport {
    pub delta0: f64,
    pub delta0_bar: f64,
    pub rho: f64,
    pub rho_bar: f64,
    /// `-1 < ϱ <= 0 < ϱ̄ < 1` when `Δ_0 > Δ̄_0`, the mirror pattern when
    /// `Δ_0 < Δ̄_0`, and `ϱ = ϱ̄ = 0` when they agree.
    pub pattern_holds: bool,
}

/// Compute `Δ_0`, `Δ̄_0`, `ϱ`, `ϱ̄` and check their bracket pattern.
pub fn rho_range_check(d: &Distribution) -> Result<RhoRangeReport> {
    let delta0 = entropy::delta(d, 0.0)?.value;
    let delta0_bar = entropy::delta_bar(d, 0.0)?.value;
    let r = rho(d, RhoKind::Rho, 1e-10)?;
    let rb = rho(d, RhoKind::RhoBar, 1e-10)?;
    let in_left = |x: f64| x > -1.0 && x <= 0.0;
    let in_right = |x: f64| x > 0.0 && x < 1.0;
    let symmetric = (delta0 - delta0_bar).abs() <= 1e-10 * delta0.abs().max(delta0_bar.abs());
    let pattern_holds = if symmetric {
        r == 0.0 && rb == 0.0
    } else if delta0 > delta0_bar {
        in_left(r) && in_right(rb)
    } else {
        in_left(rb) && in_right(r)
    };
    Ok(RhoRangeReport { delta0, delta0_bar, rho: r, rho_bar: rb, pattern_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::psi;

    #[test]
    fn symmetric_laws_have_unit_ratio_at_zero() {
        assert!((diamond(&Distribution::logistic(), 0.0, DiamondKind::Diamond).unwrap() - 1.0).abs() < 1e-13);
        assert!((diamond(&Distribution::uniform(), 0.0, DiamondKind::Diamond).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(rho(&Distribution::logistic(), RhoKind::Rho, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn power_uniform_ratio_at_zero() {
        let d = Distribution::power_uniform(2.0).unwrap();
        let expected = 1.0 / (3.0 * (psi(2.5) - psi(2.0)));
        assert!((diamond(&d, 0.0, DiamondKind::Diamond).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn exponential_constants() {
        let m = rho(&Distribution::negative_exponential(), RhoKind::Rho, 1e-12).unwrap();
        assert!((m - (-0.365952713005491)).abs() < 1e-9, "{m}");
        let m_bar = rho(&Distribution::exponential(), RhoKind::Rho, 1e-12).unwrap();
        assert!((m_bar - 0.389592221866507).abs() < 1e-9, "{m_bar}");
        let mirrored = rho(&Distribution::negative_exponential(), RhoKind::RhoBar, 1e-12).unwrap();
        assert!((mirrored - m_bar).abs() < 1e-9);
    }

    #[test]
    fn range_patterns() {
        let r = rho_range_check(&Distribution::power_uniform(3.0).unwrap()).unwrap();
        assert!(r.delta0 > r.delta0_bar && r.pattern_holds, "{r:?}");
        let r = rho_range_check(&Distribution::reflected_power(3.0).unwrap()).unwrap();
        assert!(r.delta0 < r.delta0_bar && r.pattern_holds, "{r:?}");
        let r = rho_range_check(&Distribution::logistic()).unwrap();
        assert!(r.pattern_holds && r.rho == 0.0);
    }

    #[test]
    fn infinite_mean_is_rejected() {
        let d = Distribution::frechet(1.0);
        assert!(d.is_err() || diamond(&d.unwrap(), 0.0, DiamondKind::Diamond).is_err());
    }
}
