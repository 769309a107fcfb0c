//! Distortion risk measures built on the entropies.
//!
//! A distortion `h` (increasing, `h(0) = 0`, `h(1) = 1`) defines
//!
//! ```text
//! ν_h(X) = ∫_0^∞ h(F̄(x)) dx - ∫_{-∞}^0 (1 - h(F̄(x))) dx
//! ```
//!
//! | distortion  | `h(t)`                                        | risk                 |
//! |-------------|-----------------------------------------------|----------------------|
//! | `h_s`       | `t + t (1 - t^s) / s`                         | `E[X] + Δ_s(-X)`     |
//! | `k_s`       | `t (1 + (1+s)(K_s(1) - K_s(t) - log t))`      | `E[X] + ∇_s(-X)`     |
//! | `h_tilde_s` | `t + t (-log t)^s / Γ(s+1)`                   | `E[X] + E_s(X)`      |
//! | `H_tilde_n` | `t Σ_{k≤n} (-log t)^k / k!`                   | `Σ_{k≤n} E_k(X)`     |
//!
//! with `K_s(t) = Σ_{n≥1} (-s)_n t^n / (n (n+1)!)` and
//! `E_k(X) = (1/k!) ∫ F̄ (-log F̄)^k dx`. The first two are concave, hence
//! coherent; `h_tilde_s` is not monotone for `s < 1` and not concave for
//! `s > 1`.

use crate::distributions::Distribution;
use crate::entropy::{self, check_delta_finite, check_nabla_finite, kernel};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_lower, integrate_upper, Integral, QuadOptions};
use crate::specfun::{lgamma, psi_dq};
use serde::Serialize;

/// Which distortion a [`DistortionFunction`] implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistortionKind {
    #[serde(rename = "h_s")]
    H,
    #[serde(rename = "k_s")]
    K,
    #[serde(rename = "h_tilde_s")]
    HTilde,
    #[serde(rename = "H_tilde_n")]
    HTildeN,
}

/// A distortion function with analytic first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionFunction {
    pub label: DistortionKind,
    /// The order `s`, or the count `n` for `H_tilde_n`.
    pub order: f64,
    #[serde(skip)]
    k_at_one: f64,
    #[serde(skip)]
    log_gamma: f64,
}

/// `K_s(1) = -(ψ(s+1) + γ) + s/(s+1)`.
pub fn k_at_one(s: f64) -> f64 {
    -s * psi_dq(1.0, s) + s / (s + 1.0)
}

/// `K_s(t) = Σ_{n≥1} (-s)_n t^n / (n (n+1)!)` for `t ∈ [0, 1]`.
///
/// The power series is used up to `t = 1/2`; above that the value is
/// `K_s(1)` minus the expansion of `∫_t^1 K_s'` in powers of `1 - t`.
pub fn k_series(s: f64, t: f64) -> Result<f64> {
    if !(s > -1.0 && s.is_finite()) {
        return Err(domain(format!("order must be a finite s > -1, got {s}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("K_s needs t in [0, 1], got {t}")));
    }
    Ok(if t <= 0.5 { k_power_series(s, t) } else { k_at_one(s) - k_gap(s, 1.0 - t) })
}

fn k_power_series(s: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut c = 1.0;
    let mut pow = 1.0;
    for n in 1..2000 {
        let nf = n as f64;
        // c_n = (-s)_n / (n+1)!
        c *= (nf - 1.0 - s) / (nf + 1.0);
        pow *= t;
        let term = c * pow / nf;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && nf > s + 2.0 || pow == 0.0 {
            break;
        }
    }
    sum
}

// K_s(1) - K_s(1 - v) for v <= 1/2
fn k_gap(s: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let lv = v.ln();
    let a = s / (s + 1.0);
    let mut sum = 0.0;
    let mut vj1 = v; // v^(j+1)
    for j in 0..2000 {
        let jf = j as f64;
        let vs = ((jf + s + 2.0) * lv).exp();
        let term = -a * vj1 + (jf + 1.0) * vj1 * v / (jf + 2.0)
            - (jf + 1.0) * vs / ((s + 1.0) * (jf + s + 2.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && j > 4 || vj1 < 1e-300 {
            break;
        }
        vj1 *= v;
    }
    sum
}

// ∫_t^1 (1-τ)^s / τ dτ
fn k_slope_integral(s: f64, t: f64) -> f64 {
    let v = 1.0 - t;
    // Σ_k w^(s+k+1)/(s+k+1) = ∫_0^w x^s/(1-x) dx for w <= 1/2
    let upper = |w: f64| {
        let lw = w.ln();
        let mut sum = 0.0;
        for k in 0..2000 {
            let e = s + k as f64 + 1.0;
            let term = (e * lw).exp() / e;
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        sum
    };
    if v <= 0.5 {
        return upper(v);
    }
    // ∫_t^{1/2} (1-τ)^s/τ dτ = ln(1/(2t)) + Σ_{k≥1} (-s)_k/k! ((1/2)^k - t^k)/k
    let mut sum = -(2.0 * t).ln();
    let mut c = 1.0;
    let mut half = 1.0;
    let mut tk = 1.0;
    for k in 1..2000 {
        let kf = k as f64;
        c *= (kf - 1.0 - s) / kf;
        half *= 0.5;
        tk *= t;
        let term = c * (half - tk) / kf;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    upper(0.5) + sum
}

impl DistortionFunction {
    /// `h_s`, the distortion of the Δ-family, for `s > -1`.
    pub fn h(s: f64) -> Result<Self> {
        check_distortion_order(s, -1.0)?;
        Ok(Self::raw(DistortionKind::H, s))
    }

    /// `k_s`, the distortion of the ∇-family, for `s > -1`.
    pub fn k(s: f64) -> Result<Self> {
        check_distortion_order(s, -1.0)?;
        Ok(Self::raw(DistortionKind::K, s))
    }

    /// `h_tilde_s`, the distortion of the generalized residual entropy, `s > 0`.
    pub fn h_tilde(s: f64) -> Result<Self> {
        check_distortion_order(s, 0.0)?;
        Ok(Self::raw(DistortionKind::HTilde, s))
    }

    /// `H_tilde_n`, whose risk is the expected `(n+1)`-th relevation failure time.
    pub fn h_tilde_n(n: u32) -> Self {
        Self::raw(DistortionKind::HTildeN, n as f64)
    }

    fn raw(label: DistortionKind, order: f64) -> Self {
        let k_at_one = if label == DistortionKind::K { k_at_one(order) } else { 0.0 };
        let log_gamma = match label {
            DistortionKind::HTilde => lgamma(order + 1.0),
            _ => 0.0,
        };
        DistortionFunction { label, order, k_at_one, log_gamma }
    }

    /// `h(t) - t` from `(t, v = 1 - t)`.
    pub fn excess(&self, t: f64, v: f64) -> f64 {
        if t <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        let s = self.order;
        let neg_log = if t < 0.5 { -t.ln() } else { -(-v).ln_1p() };
        match self.label {
            DistortionKind::H => kernel(s, t, v),
            DistortionKind::K => {
                let gap = if t > 0.5 {
                    k_gap(s, v)
                } else if t < 1e-12 {
                    // K_s(t) ≈ -s t / 2 is below rounding next to K_s(1)
                    self.k_at_one
                } else {
                    self.k_at_one - k_power_series(s, t)
                };
                t * (1.0 + s) * (gap + neg_log)
            }
            DistortionKind::HTilde => t * (s * neg_log.ln() - self.log_gamma).exp(),
            DistortionKind::HTildeN => {
                let mut term = 1.0;
                let mut sum = 0.0;
                for k in 1..=(s as u32) {
                    term *= neg_log / k as f64;
                    sum += term;
                }
                t * sum
            }
        }
    }

    /// `h(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_pair(t, 1.0 - t)
    }

    /// `h(t)` from `(t, v = 1 - t)`.
    pub fn eval_pair(&self, t: f64, v: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if v <= 0.0 {
            return 1.0;
        }
        t + self.excess(t, v)
    }

    /// `1 - h(t)` from `(t, v = 1 - t)`, accurate when `t` is close to 1.
    pub fn complement_pair(&self, t: f64, v: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if v <= 0.0 {
            return 0.0;
        }
        if self.label == DistortionKind::HTildeN {
            // 1 - h is the upper Poisson tail P[N > n] with mean -log t
            let n = self.order as u32;
            let lam = if t < 0.5 { -t.ln() } else { -(-v).ln_1p() };
            if lam < 1.0 {
                let mut term = t;
                for k in 1..=n {
                    term *= lam / k as f64;
                }
                let mut sum = 0.0;
                let mut k = n + 1;
                loop {
                    term *= lam / k as f64;
                    sum += term;
                    if term <= 1e-17 * sum || k > n + 200 {
                        break;
                    }
                    k += 1;
                }
                return sum;
            }
            return 1.0 - self.eval_pair(t, v);
        }
        v - self.excess(t, v)
    }

    /// `h'(t)` on `(0, 1)`.
    pub fn deriv1(&self, t: f64) -> f64 {
        let s = self.order;
        let neg_log = -t.ln();
        match self.label {
            // (1+s)(1 - t^s)/s
            DistortionKind::H => -(1.0 + s) * crate::specfun::expm1_quot(s, -neg_log),
            DistortionKind::K => (1.0 + s) * k_slope_integral(s, t),
            DistortionKind::HTilde => {
                1.0 + (neg_log.powf(s) - s * neg_log.powf(s - 1.0)) * (-self.log_gamma).exp()
            }
            DistortionKind::HTildeN => (s * neg_log.ln() - lgamma(s + 1.0)).exp(),
        }
    }

    /// `h''(t)` on `(0, 1)`.
    pub fn deriv2(&self, t: f64) -> f64 {
        let s = self.order;
        let neg_log = -t.ln();
        match self.label {
            DistortionKind::H => -(1.0 + s) * t.powf(s - 1.0),
            DistortionKind::K => -(1.0 + s) * (1.0 - t).powf(s) / t,
            DistortionKind::HTilde => {
                -s * (neg_log.powf(s - 1.0) - (s - 1.0) * neg_log.powf(s - 2.0))
                    * (-self.log_gamma).exp()
                    / t
            }
            DistortionKind::HTildeN => {
                if s == 0.0 {
                    0.0
                } else {
                    -((s - 1.0) * neg_log.ln() - lgamma(s)).exp() / t
                }
            }
        }
    }

    // h(t) ~ t^e as t → 0
    fn small_t_exponent(&self) -> f64 {
        match self.label {
            DistortionKind::H => (1.0 + self.order).min(1.0),
            _ => 1.0,
        }
    }
}

fn check_distortion_order(s: f64, lower: f64) -> Result<()> {
    if s > lower && s.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("distortion order must be a finite s > {lower}, got {s}")))
    }
}

/// Which risk functional a [`RiskValue`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskFamily {
    Delta,
    Nabla,
    Gcre,
    RelevationN,
}

/// A risk value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskValue {
    pub value: f64,
    pub abs_error_bound: f64,
    pub family: RiskFamily,
    /// The same quantity by an independent route, when one was computed.
    pub cross_check: Option<f64>,
}

fn tail_power(p: f64) -> f64 {
    if p.is_finite() {
        (1.5 / (p - 1.0)).max(1.0)
    } else {
        1.0
    }
}

fn length_scale(d: &Distribution) -> f64 {
    let iqr = d.iqr();
    if iqr > 0.0 && iqr.is_finite() {
        iqr
    } else {
        1.0
    }
}

const ZERO: Integral = Integral { value: 0.0, abs_error: 0.0, converged: true };

/// `ν_h(X)` by x-space quadrature of the distortion form, anchored at a
/// finite support end or at the median.
pub fn distortion_risk(d: &Distribution, h: &DistortionFunction) -> Result<(f64, f64)> {
    if !d.has_finite_mean() {
        return Err(Error::NonIntegrable(format!("{} has an infinite mean", d.label())));
    }
    let (a, b) = d.support();
    let (left, right) = d.tail_indices();
    let scale = length_scale(d);
    let c = if a.is_finite() {
        a
    } else if b.is_finite() {
        b
    } else {
        d.median()
    };
    let opts = QuadOptions { abs_tol: 1e-13 * scale, rel_tol: 1e-12, max_intervals: 4000 };
    let upper = |x: f64| h.eval_pair(d.sf(x), d.cdf(x));
    let lower = |x: f64| h.complement_pair(d.sf(x), d.cdf(x));
    let hi = if b <= c {
        ZERO
    } else if b.is_finite() {
        integrate(upper, c, b, opts)
    } else {
        integrate_upper(upper, c, scale, tail_power(right * h.small_t_exponent()), opts)
    };
    let lo = if a >= c {
        ZERO
    } else if a.is_finite() {
        integrate(lower, a, c, opts)
    } else {
        integrate_lower(lower, c, scale, tail_power(left), opts)
    };
    let value = c + hi.value - lo.value;
    if !value.is_finite() {
        return Err(Error::NonIntegrable(format!("distortion integral diverged for {}", d.label())));
    }
    Ok((value, hi.abs_error + lo.abs_error))
}

/// `ν_h(X) = ∫_0^1 h'(t) q(1-t) dt`, the quantile form of the same measure.
pub fn distortion_risk_quantile<Q>(
    q_upper: Q,
    h: &DistortionFunction,
    tails: (f64, f64),
) -> Result<(f64, f64)>
where
    Q: Fn(f64) -> f64,
{
    let (left, right) = tails;
    let m_for = |e: f64| if e > 0.0 { (2.0 / e).max(2.0) } else { 2.0 };
    let m0 = m_for(h.small_t_exponent() - if right.is_finite() { 1.0 / right } else { 0.0 });
    let m1 = m_for(1.0 - if left.is_finite() { 1.0 / left } else { 0.0 });
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 4000 };
    // t = w^m0 on (0, 1/2]
    let near_zero = integrate(
        |w| {
            let t = w.powf(m0);
            if t <= 0.0 {
                return 0.0;
            }
            h.deriv1(t) * q_upper(t) * m0 * t / w
        },
        0.0,
        0.5f64.powf(1.0 / m0),
        opts,
    );
    // 1 - t = w^m1 on [1/2, 1)
    let near_one = integrate(
        |w| {
            let v = w.powf(m1);
            if v <= 0.0 {
                return 0.0;
            }
            h.deriv1(1.0 - v) * q_upper(1.0 - v) * m1 * v / w
        },
        0.0,
        0.5f64.powf(1.0 / m1),
        opts,
    );
    let value = near_zero.value + near_one.value;
    if !value.is_finite() {
        return Err(Error::NonIntegrable("quantile-form risk integral diverged".into()));
    }
    Ok((value, near_zero.abs_error + near_one.abs_error))
}

fn cross_checked(
    primary: (f64, f64),
    other: (f64, f64),
    family: RiskFamily,
    what: &str,
) -> Result<RiskValue> {
    let (value, err) = primary;
    let diff = (value - other.0).abs();
    let scale = value.abs().max(1.0);
    if diff > 1e-6 * scale + 100.0 * (err + other.1) {
        return Err(Error::NotConverged(format!(
            "{what}: distortion integral {value} disagrees with the entropy route {}",
            other.0
        )));
    }
    Ok(RiskValue {
        value,
        abs_error_bound: err.max(diff),
        family,
        cross_check: Some(other.0),
    })
}

/// `ν_s^Δ(X) = E[X] + Δ_s(-X)`, through the distortion `h_s`.
pub fn risk_delta(d: &Distribution, s: f64) -> Result<RiskValue> {
    check_delta_finite(&d.negate(), s)?;
    let h = DistortionFunction::h(s)?;
    let primary = distortion_risk(d, &h)?;
    let e = entropy::delta_bar(d, s)?;
    cross_checked(primary, (d.mean() + e.value, e.abs_error_bound), RiskFamily::Delta, "risk_delta")
}

/// `ν_s^∇(X) = E[X] + ∇_s(-X)`, through the distortion `k_s`.
pub fn risk_nabla(d: &Distribution, s: f64) -> Result<RiskValue> {
    check_nabla_finite(&d.negate(), s)?;
    let k = DistortionFunction::k(s)?;
    let primary = distortion_risk(d, &k)?;
    let e = entropy::nabla_bar(d, s)?;
    cross_checked(primary, (d.mean() + e.value, e.abs_error_bound), RiskFamily::Nabla, "risk_nabla")
}

/// The distortion risk of `h_tilde_s`, `E[X] + (1/Γ(s+1)) ∫ F̄ (-log F̄)^s dx`.
pub fn risk_gcre(d: &Distribution, s: f64) -> Result<RiskValue> {
    let h = DistortionFunction::h_tilde(s)?;
    let (value, abs_error_bound) = distortion_risk(d, &h)?;
    Ok(RiskValue { value, abs_error_bound, family: RiskFamily::Gcre, cross_check: None })
}

/// Which family a representation or check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Delta,
    Nabla,
}

// ∫_0^x q over the lower half and ∫_{1-v}^1 q over the upper half, with the
// substitution u = w^m against algebraic blow-up of q at the ends
fn quantile_mass<Q: Fn(f64) -> f64>(q: Q, x: f64, alpha: f64) -> Integral {
    let m = if alpha.is_finite() { (2.0 / (1.0 - 1.0 / alpha)).max(2.0) } else { 2.0 };
    integrate(
        |w| {
            let u = w.powf(m);
            if u <= 0.0 {
                0.0
            } else {
                q(u) * m * u / w
            }
        },
        0.0,
        x.powf(1.0 / m),
        QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 2000 },
    )
}

/// The tail-mean representation
/// `(s+1) E[w(X) (X + mrl(X))]` with `w = F̄^s` (Δ-family) or `F^s` (∇-family),
/// where `X + mrl(X) = E[X | X > x]` at `x = X`.
///
/// Evaluated in probability space: `(s+1) ∫_0^1 w(u) A(u) du` with the upper
/// conditional mean `A(u) = (1/(1-u)) ∫_u^1 q`.
pub fn mrl_representation(d: &Distribution, s: f64, which: Which) -> Result<RiskValue> {
    match which {
        Which::Delta => check_delta_finite(&d.negate(), s)?,
        Which::Nabla => check_nabla_finite(&d.negate(), s)?,
    }
    let (left, right) = d.tail_indices();
    let lower_half = quantile_mass(|u| d.quantile(u), 0.5, left).value;
    let upper_half = quantile_mass(|v| d.quantile_upper(v), 0.5, right).value;
    // A(u) from (u, v = 1-u)
    let tail_mean = |u: f64, v: f64| -> f64 {
        if u <= 0.5 {
            (lower_half - quantile_mass(|w| d.quantile(w), u, left).value + upper_half) / v
        } else {
            quantile_mass(|w| d.quantile_upper(w), v, right).value / v
        }
    };
    let weight = |u: f64, v: f64| -> f64 {
        match which {
            Which::Delta => (s * v.ln()).exp(),
            Which::Nabla => (s * u.ln()).exp(),
        }
    };
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-11, max_intervals: 1000 };
    let m0 = (2.0 / (1.0 + s).min(1.0)).max(2.0);
    let right_decay = (if right.is_finite() { 1.0 - 1.0 / right } else { 1.0 }) + s.min(0.0);
    let m1 = if right_decay > 0.0 { (2.0 / right_decay).max(2.0) } else { 2.0 };
    let lo = integrate(
        |w| {
            let u = w.powf(m0);
            if u <= 0.0 {
                return 0.0;
            }
            weight(u, 1.0 - u) * tail_mean(u, 1.0 - u) * m0 * u / w
        },
        0.0,
        0.5f64.powf(1.0 / m0),
        opts,
    );
    let hi = integrate(
        |w| {
            let v = w.powf(m1);
            if v <= 0.0 {
                return 0.0;
            }
            weight(1.0 - v, v) * tail_mean(1.0 - v, v) * m1 * v / w
        },
        0.0,
        0.5f64.powf(1.0 / m1),
        opts,
    );
    let value = (1.0 + s) * (lo.value + hi.value);
    if !value.is_finite() {
        return Err(Error::NonIntegrable(format!("tail-mean integral diverged for {}", d.label())));
    }
    let family = match which {
        Which::Delta => RiskFamily::Delta,
        Which::Nabla => RiskFamily::Nabla,
    };
    Ok(RiskValue {
        value,
        abs_error_bound: (1.0 + s) * (lo.abs_error + hi.abs_error) + 1e-10 * value.abs(),
        family,
        cross_check: None,
    })
}

/// Grid report on the shape of a distortion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub distortion: DistortionFunction,
    pub grid_n: usize,
    /// `h' > 0` at every grid point.
    pub increasing: bool,
    /// `h'' < 0` at every grid point.
    pub concave: bool,
    /// `h'` nonincreasing along the grid.
    pub deriv1_decreasing: bool,
    pub min_deriv1: f64,
    pub max_deriv2: f64,
    pub first_monotonicity_violation: Option<f64>,
    pub first_concavity_violation: Option<f64>,
    /// Largest relative gap between `h'` and a central difference of `h`.
    pub derivative_check: f64,
}

/// Evaluate `h'` and `h''` on `grid_n` points of `(1e-6, 1 - 1e-6)`.
pub fn coherence_diagnostics(f: &DistortionFunction, grid_n: usize) -> Result<CoherenceReport> {
    if grid_n < 100 {
        return Err(domain(format!("coherence grid needs at least 100 points, got {grid_n}")));
    }
    let (lo, hi) = (1e-6, 1.0 - 1e-6);
    let mut report = CoherenceReport {
        distortion: *f,
        grid_n,
        increasing: true,
        concave: true,
        deriv1_decreasing: true,
        min_deriv1: f64::INFINITY,
        max_deriv2: f64::NEG_INFINITY,
        first_monotonicity_violation: None,
        first_concavity_violation: None,
        derivative_check: 0.0,
    };
    let mut previous = f64::INFINITY;
    for i in 0..grid_n {
        let t = lo + (hi - lo) * i as f64 / (grid_n - 1) as f64;
        let d1 = f.deriv1(t);
        let d2 = f.deriv2(t);
        if !(d1 > 0.0) {
            report.increasing = false;
            report.first_monotonicity_violation.get_or_insert(t);
        }
        if !(d2 < 0.0) {
            report.concave = false;
            report.first_concavity_violation.get_or_insert(t);
        }
        if d1 > previous {
            report.deriv1_decreasing = false;
        }
        previous = d1;
        report.min_deriv1 = report.min_deriv1.min(d1);
        report.max_deriv2 = report.max_deriv2.max(d2);
        if i % 97 == 48 && t > 1e-3 && t < 1.0 - 1e-3 {
            let h = 1e-5 * t.min(1.0 - t);
            let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
            let rel = (fd - d1).abs() / d1.abs().max(1e-3);
            report.derivative_check = report.derivative_check.max(rel);
        }
    }
    Ok(report)
}

/// Outcome of [`risk_axioms_check`] for one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub family: Which,
    pub s: f64,
    /// `|ν(aX+b) - (a ν(X) + b)|`.
    pub affine_error: f64,
    pub affine_ok: bool,
    pub risk_d1: f64,
    pub risk_d2: f64,
    /// `ν(d1) <= ν(d2)`; the survival functions were checked to be ordered.
    pub monotone: bool,
    /// `|ν(λX1 + (1-λ)X2) - (λ ν(X1) + (1-λ) ν(X2))|` for the comonotone
    /// coupling at λ = 1/2, the equality case of subadditivity.
    pub comonotone_error: f64,
    pub comonotone_ok: bool,
}

/// Whether `F̄_1 <= F̄_2` on a grid covering both laws.
pub fn stochastically_ordered(d1: &Distribution, d2: &Distribution) -> bool {
    let mut points = Vec::new();
    for d in [d1, d2] {
        for i in 1..200 {
            points.push(d.quantile(i as f64 / 200.0));
        }
    }
    points.iter().all(|&x| d1.sf(x) <= d2.sf(x) + 1e-15)
}

fn risk_of(d: &Distribution, s: f64, which: Which) -> Result<RiskValue> {
    match which {
        Which::Delta => risk_delta(d, s),
        Which::Nabla => risk_nabla(d, s),
    }
}

/// Affine equivariance, monotonicity and comonotone additivity of both risk
/// families at order `s`.
///
/// Fails with [`Error::PreconditionNotMet`] when `d1` is not below `d2` in
/// the usual stochastic order.
pub fn risk_axioms_check(
    d1: &Distribution,
    d2: &Distribution,
    s: f64,
    a: f64,
    b: f64,
) -> Result<Vec<AxiomReport>> {
    if !stochastically_ordered(d1, d2) {
        return Err(Error::PreconditionNotMet(format!(
            "{} is not stochastically below {}",
            d1.label(),
            d2.label()
        )));
    }
    let moved = d1.affine(a, b)?;
    let tails = |d: &Distribution| d.tail_indices();
    let (l1, r1) = tails(d1);
    let (l2, r2) = tails(d2);
    let mixture_tails = (l1.min(l2), r1.min(r2));
    let mut out = Vec::new();
    for which in [Which::Delta, Which::Nabla] {
        let r1v = risk_of(d1, s, which)?;
        let r2v = risk_of(d2, s, which)?;
        let rm = risk_of(&moved, s, which)?;
        let affine_error = (rm.value - (a * r1v.value + b)).abs();
        let h = match which {
            Which::Delta => DistortionFunction::h(s)?,
            Which::Nabla => DistortionFunction::k(s)?,
        };
        let (mixed, _) = distortion_risk_quantile(
            |v| 0.5 * d1.quantile_upper(v) + 0.5 * d2.quantile_upper(v),
            &h,
            mixture_tails,
        )?;
        let comonotone_error = (mixed - 0.5 * (r1v.value + r2v.value)).abs();
        let scale = rm.value.abs().max(1.0);
        out.push(AxiomReport {
            family: which,
            s,
            affine_error,
            affine_ok: affine_error <= 1e-8 * scale,
            risk_d1: r1v.value,
            risk_d2: r2v.value,
            monotone: r1v.value <= r2v.value + 1e-9 * r2v.value.abs().max(1.0),
            comonotone_error,
            comonotone_ok: comonotone_error <= 1e-7 * mixed.abs().max(1.0),
        });
    }
    Ok(out)
}

/// `E_k(X) = (1/k!) ∫ F̄ (-log F̄)^k dx` for a law on `[0, ∞)`.
pub fn generalized_residual_entropy(d: &Distribution, k: u32) -> Result<(f64, f64)> {
    let (a, b) = d.support();
    if a < 0.0 {
        return Err(domain(format!("{} must be supported on [0, ∞)", d.label())));
    }
    if !d.has_finite_mean() {
        return Err(Error::NonIntegrable(format!("{} has an infinite mean", d.label())));
    }
    let lg = lgamma(k as f64 + 1.0);
    let f = |x: f64| {
        let t = d.sf(x);
        if t <= 0.0 {
            return 0.0;
        }
        let l = if t < 0.5 { -t.ln() } else { -(-d.cdf(x)).ln_1p() };
        if k == 0 {
            t
        } else if l <= 0.0 {
            0.0
        } else {
            (t.ln() + k as f64 * l.ln() - lg).exp()
        }
    };
    let scale = length_scale(d);
    let opts = QuadOptions { abs_tol: 1e-13 * scale, rel_tol: 1e-12, max_intervals: 4000 };
    let r = if b.is_finite() {
        integrate(f, a, b, opts)
    } else {
        integrate_upper(f, a, scale, tail_power(d.tail_indices().1), opts)
    };
    if !r.is_finite() {
        return Err(Error::NonIntegrable(format!("E_{k} diverged for {}", d.label())));
    }
    Ok((r.value, r.abs_error))
}

/// Expected `n`-th failure time of the relevation process,
/// `E[T_n] = Σ_{k<n} E_k(X)`, cross-checked against the distortion `H_tilde_{n-1}`.
pub fn relevation_risk(d: &Distribution, n: u32) -> Result<RiskValue> {
    if n == 0 {
        return Err(domain("relevation count must be at least 1"));
    }
    let mut value = 0.0;
    let mut err = 0.0;
    for k in 0..n {
        let (v, e) = generalized_residual_entropy(d, k)?;
        value += v;
        err += e;
    }
    let (check, _) = distortion_risk(d, &DistortionFunction::h_tilde_n(n - 1))?;
    Ok(RiskValue {
        value,
        abs_error_bound: err.max((value - check).abs()),
        family: RiskFamily::RelevationN,
        cross_check: Some(check),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    // direct summation oracle for K_s(t)
    fn k_direct(s: f64, t: f64, terms: usize) -> f64 {
        let mut c = 1.0;
        let mut sum = 0.0;
        for n in 1..=terms {
            let nf = n as f64;
            c *= (nf - 1.0 - s) / (nf + 1.0);
            sum += c * t.powi(n as i32) / nf;
        }
        sum
    }

    #[test]
    fn k_series_examples() {
        assert_eq!(k_series(0.7, 0.0).unwrap(), 0.0);
        // terminates for integer s: (-1)_1 / (1 * 2!) = -1/2
        assert!(close(k_series(1.0, 1.0).unwrap(), -0.5, 1e-15));
        assert!(close(k_series(2.0, 1.0).unwrap(), -1.0 + 2.0 / 12.0, 1e-14));
        // 10^6 terms, tail below 1e-15 for s = 0.5
        assert!(close(k_series(0.5, 1.0).unwrap(), k_direct(0.5, 1.0, 1_000_000), 1e-12));
        for &s in &[-0.6, 0.3, 2.5] {
            for &t in &[0.2, 0.5, 0.7, 0.95] {
                let oracle = k_direct(s, t, 5000);
                assert!(close(k_series(s, t).unwrap(), oracle, 1e-13), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn k_distortion_matches_dual_kernel() {
        for &s in &[-0.7, -0.2, 0.5, 1.0, 3.3] {
            let k = DistortionFunction::k(s).unwrap();
            for &t in &[1e-8, 0.1, 0.4, 0.6, 0.9, 0.999] {
                let g = entropy::dual_kernel(s, t, 1.0 - t);
                assert!(close(k.excess(t, 1.0 - t), g, 1e-12), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn endpoints_are_fixed() {
        let fs = [
            DistortionFunction::h(0.4).unwrap(),
            DistortionFunction::k(-0.5).unwrap(),
            DistortionFunction::h_tilde(0.5).unwrap(),
            DistortionFunction::h_tilde_n(3),
        ];
        for f in fs {
            assert_eq!(f.eval(0.0), 0.0);
            assert_eq!(f.eval(1.0), 1.0);
            // h_tilde_s approaches 1 like (-log t)^s
            assert!(close(f.eval_pair(1.0 - 1e-12, 1e-12), 1.0, 1e-5));
            let t = 0.3;
            assert!(close(f.complement_pair(t, 1.0 - t), 1.0 - f.eval(t), 1e-14));
        }
    }

    #[test]
    fn uniform_risk_formulas() {
        for &(a, l, s) in &[(0.0, 1.0, 0.0), (2.0, 3.0, 1.0), (-1.0, 0.5, 2.5)] {
            let d = Distribution::uniform().affine(l, a).unwrap();
            let rd = risk_delta(&d, s).unwrap().value;
            let rn = risk_nabla(&d, s).unwrap().value;
            assert!(close(rd, a + l * (s + 3.0) / (2.0 * (s + 2.0)), 1e-10));
            assert!(close(rn, a + l * (2.0 * s + 3.0) / (2.0 * (s + 2.0)), 1e-10));
        }
    }

    #[test]
    fn exponential_risks() {
        let d = Distribution::exponential();
        assert!(close(risk_delta(&d, 0.0).unwrap().value, 2.0, 1e-10));
        assert!(close(risk_nabla(&d, 0.0).unwrap().value, 2.0, 1e-10));
        let far = risk_delta(&d, 1e3).unwrap().value;
        assert!(far > 1.0 && far < 1.0 + 2e-3);
    }

    #[test]
    fn divergent_right_tail() {
        let d = Distribution::lomax(2.0).unwrap();
        assert!(matches!(risk_delta(&d, -0.6), Err(Error::Divergent { .. })));
        assert!(risk_delta(&d, -0.4).is_ok());
    }

    #[test]
    fn mrl_examples() {
        let e = Distribution::exponential();
        assert!(close(mrl_representation(&e, 0.0, Which::Delta).unwrap().value, 2.0, 1e-9));
        let u = Distribution::uniform();
        assert!(close(mrl_representation(&u, 1.0, Which::Delta).unwrap().value, 2.0 / 3.0, 1e-9));
        assert!(close(mrl_representation(&u, 0.0, Which::Nabla).unwrap().value, 0.75, 1e-9));
    }

    #[test]
    fn diagnostics_examples() {
        let r = coherence_diagnostics(&DistortionFunction::h(2.0).unwrap(), 10_000).unwrap();
        assert!(r.increasing && r.concave && r.derivative_check < 1e-6);
        let r = coherence_diagnostics(&DistortionFunction::k(0.5).unwrap(), 10_000).unwrap();
        assert!(r.increasing && r.concave && r.derivative_check < 1e-6);
        let r = coherence_diagnostics(&DistortionFunction::h_tilde(0.5).unwrap(), 10_000).unwrap();
        assert!(!r.increasing);
        let r = coherence_diagnostics(&DistortionFunction::h_tilde(2.0).unwrap(), 10_000).unwrap();
        assert!(!r.concave);
        let r = coherence_diagnostics(&DistortionFunction::h_tilde_n(3), 10_000).unwrap();
        assert!(r.increasing && r.deriv1_decreasing);
    }

    #[test]
    fn relevation_exponential() {
        let d = Distribution::exponential();
        for n in 1..=4 {
            let r = relevation_risk(&d, n).unwrap();
            assert!(close(r.value, n as f64, 1e-10), "n={n}: {}", r.value);
            assert!(close(r.cross_check.unwrap(), n as f64, 1e-9));
        }
    }

    #[test]
    fn axioms_on_exponentials() {
        let fast = Distribution::exponential().affine(0.5, 0.0).unwrap();
        let slow = Distribution::exponential();
        let reports = risk_axioms_check(&fast, &slow, 0.5, 2.0, 3.0).unwrap();
        for r in reports {
            assert!(r.affine_ok && r.monotone && r.comonotone_ok, "{r:?}");
        }
        assert!(matches!(
            risk_axioms_check(&slow, &fast, 0.5, 1.0, 0.0),
            Err(Error::PreconditionNotMet(_))
        ));
    }
}
