//! Sharp upper bounds on normalized entropies and the Gamma-ratio inequality
//! they imply.
//!
//! | regime      | normalized value     | upper bound                                          | maximizer                 |
//! |-------------|----------------------|------------------------------------------------------|---------------------------|
//! | `positive`  | `Δ_s(X) / E[X]`, X≥0 | 1, not attained                                      | approached by `U^(1/β)`, β→0 |
//! | `l2`        | `Δ_s(X) / σ(X)`      | `1/√(2s+1)`                                          | `U^(1/β)`, `1 - U^(-1/β)` or `-L` |
//! | `symmetric` | `Δ_s(X) / σ(X)`      | `(s+1)/√(2s²(2s+1)) · √(1 - Γ(s+1)²/Γ(2s+1))`        | s-logistic, logistic at s=0 |
//!
//! Comparing the last two bounds gives `Γ(s+2)²/Γ(2s+1) ≥ 1 + 2s - s²`, whose
//! gap [`gamma_gap`] vanishes only at 0 and 1 on `[s*, ∞)`.

use crate::distributions::Distribution;
use crate::entropy;
use crate::error::{domain, Error, Result};
use crate::roots::{bisect, golden_max};
use crate::quad::gauss_legendre_16;
use crate::specfun::{gamma, psi, psi_dq, rgamma};
use serde::Serialize;

/// The class of laws a bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Positive,
    L2,
    Symmetric,
}

/// Upper bound on the normalized entropy over a class of laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeBound {
    pub regime: Regime,
    pub s: f64,
    pub upper: f64,
    /// A law attaining the bound, or approaching it when `attained` is false.
    pub maximizer: Option<Distribution>,
    pub maximizer_label: String,
    pub attained: bool,
}

/// `sup Δ_s(X)/E[X]` over nonnegative integrable `X`, which is 1.
pub fn bound_positive(s: f64) -> Result<RangeBound> {
    if !(s > -1.0 && s.is_finite()) {
        return Err(domain(format!("order must be a finite s > -1, got {s}")));
    }
    Ok(RangeBound {
        regime: Regime::Positive,
        s,
        upper: 1.0,
        maximizer: None,
        maximizer_label: "power_uniform(beta -> 0)".into(),
        attained: false,
    })
}

fn check_l2_order(s: f64) -> Result<()> {
    if s > -0.5 && s.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("finite-variance bounds need s > -1/2, got {s}")))
    }
}

/// `sup Δ_s(X)/σ(X) = 1/√(2s+1)` over square-integrable `X`.
pub fn bound_l2(s: f64) -> Result<RangeBound> {
    check_l2_order(s)?;
    let maximizer = if s > 0.0 {
        Distribution::power_uniform(1.0 / s)?
    } else if s < 0.0 {
        Distribution::negative_lomax(-1.0 / s)?
    } else {
        Distribution::negative_exponential()
    };
    Ok(RangeBound {
        regime: Regime::L2,
        s,
        upper: 1.0 / (2.0 * s + 1.0).sqrt(),
        maximizer_label: maximizer.label(),
        maximizer: Some(maximizer),
        attained: true,
    })
}

/// The symmetric bound as a number; `π/(2√3)` at `s = 0`.
pub fn symmetric_upper(s: f64) -> f64 {
    // 2 ln Γ(1+s) - ln Γ(1+2s) = -s² I(s) with I(s) = ∫_0^1 (ψ(1+s+ts) - ψ(1+ts))/s dt,
    // so the bound is (s+1)/√(2(2s+1)) · √((1 - exp(-s² I))/s²) and I(0) = π²/6
    let i = gauss_legendre_16(|t| psi_dq(1.0 + t * s, s), 0.0, 1.0);
    let x = s * s * i;
    let ratio = if x == 0.0 { i } else { -(-x).exp_m1() / (s * s) };
    (s + 1.0) / (2.0 * (2.0 * s + 1.0)).sqrt() * ratio.sqrt()
}

/// `sup Δ_s(X)/σ(X)` over symmetric square-integrable `X`.
pub fn bound_symmetric(s: f64) -> Result<RangeBound> {
    check_l2_order(s)?;
    let (maximizer, label) = if s == 0.0 {
        let d = Distribution::logistic();
        (d, "logistic(scaled)".to_string())
    } else {
        let d = Distribution::s_logistic(s, 1.0)?;
        (d, d.label())
    };
    Ok(RangeBound {
        regime: Regime::Symmetric,
        s,
        upper: symmetric_upper(s),
        maximizer: Some(maximizer),
        maximizer_label: label,
        attained: true,
    })
}

/// The bound for `regime` at order `s`.
pub fn bound(regime: Regime, s: f64) -> Result<RangeBound> {
    match regime {
        Regime::Positive => bound_positive(s),
        Regime::L2 => bound_l2(s),
        Regime::Symmetric => bound_symmetric(s),
    }
}

/// `Δ_s(X)` normalized as in `regime`: by `E[X]` for positive laws, by the
/// standard deviation otherwise.
pub fn normalized_entropy(d: &Distribution, s: f64, regime: Regime) -> Result<f64> {
    let delta = entropy::delta(d, s)?.value;
    match regime {
        Regime::Positive => {
            if d.support().0 < 0.0 {
                return Err(Error::PreconditionNotMet(format!("{} is not nonnegative", d.label())));
            }
            Ok(delta / d.mean())
        }
        Regime::L2 | Regime::Symmetric => {
            if regime == Regime::Symmetric && !d.is_symmetric() {
                return Err(Error::PreconditionNotMet(format!("{} is not symmetric", d.label())));
            }
            let sd = d
                .std_dev()
                .ok_or_else(|| Error::PreconditionNotMet(format!("{} has infinite variance", d.label())))?;
            Ok(delta / sd)
        }
    }
}

/// `φ(s) = Γ(s+2)²/Γ(2s+1) - 1 - 2s + s²`, finite for `s > -2` through the
/// reciprocal gamma function.
pub fn gamma_gap(s: f64) -> Result<f64> {
    if !(s > -2.0 && s.is_finite()) {
        return Err(domain(format!("gamma gap needs s > -2, got {s}")));
    }
    let g = gamma(s + 2.0);
    Ok(g * g * rgamma(2.0 * s + 1.0) - 1.0 - 2.0 * s + s * s)
}

/// The unique root `s* ≈ -1.6609` of `φ` on `(-2, -3/2)`.
pub fn gamma_gap_root() -> Result<f64> {
    let f = |s: f64| gamma_gap(s).unwrap_or(f64::NAN);
    bisect(f, -2.0 + 1e-9, -1.5, 1e-14, 200)
}

/// Location and value of the maximum of `φ` on `(0, 1)`, the root of
/// `φ'(s) = 2Γ(s+2)²/Γ(2s+1) (ψ(s+2) - ψ(2s+1)) - 2 + 2s`.
pub fn gamma_gap_argmax() -> (f64, f64) {
    let dphi = |s: f64| {
        let g = gamma(s + 2.0);
        2.0 * g * g * rgamma(2.0 * s + 1.0) * (psi(s + 2.0) - psi(2.0 * s + 1.0)) - 2.0 + 2.0 * s
    };
    let x = bisect(dphi, 0.1, 0.9, 1e-15, 200)
        .unwrap_or_else(|_| golden_max(|s| gamma_gap(s).unwrap_or(f64::NAN), 0.0, 1.0, 1e-12).0);
    (x, gamma_gap(x).unwrap_or(f64::NAN))
}

/// `(s, φ(s))` on `n` equally spaced points of `[a, b]`.
pub fn gamma_gap_table(a: f64, b: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 2 || !(a < b) {
        return Err(domain("table needs a < b and at least two points"));
    }
    (0..n)
        .map(|i| {
            let s = a + (b - a) * i as f64 / (n - 1) as f64;
            gamma_gap(s).map(|v| (s, v))
        })
        .collect()
}

/// Cumulative entropy of the standard Gaussian by quadrature, about 0.9032.
pub fn gaussian_cumulative_entropy() -> Result<f64> {
    Ok(entropy::delta_quadrature(&Distribution::normal(), 0.0)?.value)
}

/// Both sides of the Gamma-ratio inequality next to the weaker bound that
/// follows from the Beta-function inequality
/// `B(x,y) > (x+y)/(xy) (1 - xy min(2/(x+y+1), 1/(x+y)))` at `x = y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrinomialReport {
    pub x: f64,
    /// `Γ(x+2)²/Γ(2x+1)`.
    pub gamma_ratio: f64,
    /// `1 + 2x - x²`.
    pub sharp_rhs: f64,
    /// `1 + 2x - x² - min(2x⁴/(2x+1), x(x-1)²/2)`.
    pub beta_rhs: f64,
    /// The Beta inequality at `x = y`, mapped to the Gamma-ratio scale.
    pub beta_rhs_direct: f64,
    /// `gamma_ratio >= sharp_rhs >= beta_rhs`.
    pub ordering_holds: bool,
}

/// Evaluate the comparison at `x ∈ (0, 1)`.
pub fn beta_trinomial_bound_check(x: f64) -> Result<TrinomialReport> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("comparison needs x in (0, 1), got {x}")));
    }
    let gamma_ratio = gamma_gap(x)? + 1.0 + 2.0 * x - x * x;
    let sharp_rhs = 1.0 + 2.0 * x - x * x;
    let beta_rhs = sharp_rhs - (2.0 * x.powi(4) / (2.0 * x + 1.0)).min(x * (x - 1.0).powi(2) / 2.0);
    // Γ(x+2)²/Γ(2x+1) = x (x+1)² B(x,x) / 2
    let b_lower = 2.0 * x / (x * x) * (1.0 - x * x * (2.0 / (2.0 * x + 1.0)).min(1.0 / (2.0 * x)));
    let beta_rhs_direct = x * (x + 1.0).powi(2) * b_lower / 2.0;
    let ordering_holds = gamma_ratio >= sharp_rhs && sharp_rhs >= beta_rhs;
    Ok(TrinomialReport { x, gamma_ratio, sharp_rhs, beta_rhs, beta_rhs_direct, ordering_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn l2_bound_and_maximizers() {
        for &s in &[0.0, 1.0, 2.0, -0.3] {
            let b = bound_l2(s).unwrap();
            let m = b.maximizer.unwrap();
            let v = normalized_entropy(&m, s, Regime::L2).unwrap();
            assert!((v - b.upper).abs() < 1e-10, "s={s}: {v} vs {}", b.upper);
        }
        assert!((bound_l2(1.0).unwrap().upper - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(bound_l2(-0.5).is_err());
    }

    #[test]
    fn symmetric_bound_values() {
        assert!((bound_symmetric(0.0).unwrap().upper - 0.906899682117109).abs() < 1e-15);
        assert!((bound_symmetric(1.0).unwrap().upper - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        // continuity through s = 0
        assert!((symmetric_upper(1e-7) - symmetric_upper(0.0)).abs() < 1e-6);
        let logistic = Distribution::logistic();
        let v = normalized_entropy(&logistic, 0.0, Regime::Symmetric).unwrap();
        assert!((v - PI / (2.0 * 3f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn positive_ratio_of_power_uniform() {
        for &(s, beta) in &[(0.0, 1e-3), (1.0, 1.0), (2.0, 5.0)] {
            let d = Distribution::power_uniform(beta).unwrap();
            let v = normalized_entropy(&d, s, Regime::Positive).unwrap();
            assert!((v - 1.0 / (beta * (1.0 + s) + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_gap_constants() {
        assert!(gamma_gap(0.0).unwrap().abs() < 1e-14);
        assert!(gamma_gap(1.0).unwrap().abs() < 1e-14);
        let (x, y) = gamma_gap_argmax();
        assert!((x - 0.467103117593359).abs() < 1e-6);
        assert!((y - 0.017296245228697).abs() < 1e-12);
        let root = gamma_gap_root().unwrap();
        assert!((root - (-1.660089588915658)).abs() < 1e-10);
        assert!(gamma_gap(root).unwrap().abs() < 1e-9);
        // 1/Γ(-2) = 0, so φ(-3/2) = -1 + 3 + 9/4
        assert!((gamma_gap(-1.5).unwrap() - 4.25).abs() < 1e-12);
    }

    #[test]
    fn gaussian_constant() {
        let v = gaussian_cumulative_entropy().unwrap();
        assert!((v - 0.903197285568625).abs() < 1e-10);
        assert!(v < PI / (2.0 * 3f64.sqrt()));
    }

    #[test]
    fn trinomial_ordering() {
        for &x in &[0.25, 0.5, 0.9] {
            let r = beta_trinomial_bound_check(x).unwrap();
            assert!(r.ordering_holds, "{r:?}");
            assert!((r.beta_rhs - r.beta_rhs_direct).abs() < 1e-14);
        }
    }

    #[test]
    fn s_logistic_attains_symmetric_bound() {
        for &s in &[-0.3, 0.5, 1.0, 2.0] {
            let b = bound_symmetric(s).unwrap();
            let v = normalized_entropy(b.maximizer.as_ref().unwrap(), s, Regime::Symmetric).unwrap();
            assert!((v - b.upper).abs() < 1e-8, "s={s}: {v} vs {}", b.upper);
        }
    }

    #[test]
    fn s_logistic_degenerates_as_beta_shrinks() {
        let s = 0.5;
        let mut last = f64::INFINITY;
        for &beta in &[0.2, 0.1, 0.05] {
            let d = Distribution::s_logistic(s, beta).unwrap();
            let v = normalized_entropy(&d, s, Regime::Symmetric).unwrap().powi(2);
            assert!(v < last, "beta={beta}: {v}");
            last = v;
        }
    }
}
