//! Special functions in double precision: log-gamma, reciprocal gamma,
//! digamma, trigamma, Pochhammer symbols and a few stable divided
//! differences built on them.
//!
//! | function        | method                                                   |
//! |-----------------|----------------------------------------------------------|
//! | `lgamma`        | upward recurrence to x >= 10, Stirling series to z^-13   |
//! | `psi`, `psi1`   | upward recurrence to x >= 10, asymptotic series to B_14  |
//! | negative x      | reflection through `sin(pi x)` with exact argument reduction |
//! | `poch`          | direct product for short runs, log space with sign count otherwise |
//!
//! The raw `f64` functions are used internally. The checked wrappers return a
//! [`SpecialValue`] carrying a conservative absolute error bound.

use crate::error::{domain, Result};
use crate::quad::gauss_legendre_16;
use serde::Serialize;
use std::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT: f64 = 10.0;

// B_{2k} for k = 1..=7.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// A function value together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialValue {
    pub value: f64,
    pub abs_error_bound: f64,
}

impl SpecialValue {
    fn with_rel(value: f64, rel: f64, floor: f64) -> Self {
        SpecialValue {
            value,
            abs_error_bound: rel * value.abs() + floor,
        }
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `x - round(x)`, exact in floating point.
fn reduce(x: f64) -> f64 {
    x - x.round()
}

fn lgamma_positive(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < SHIFT {
        prod *= z;
        z += 1.0;
    }
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut series = 0.0;
    let mut pow = zi;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2.0 * (k as f64 + 1.0);
        series += b / (k2 * (k2 - 1.0)) * pow;
        pow *= zi2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - prod.ln()
}

/// `ln |Γ(x)|`; NaN at the poles.
pub fn lgamma(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x > 0.0 {
        lgamma_positive(x)
    } else {
        let r = reduce(x);
        (PI / (PI * r).sin().abs()).ln() - lgamma_positive(1.0 - x)
    }
}

/// Sign of Γ(x) (NaN at the poles).
pub fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if is_nonpositive_integer(x) || x.is_nan() {
        f64::NAN
    } else if (x.floor() as i64).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Γ(x); NaN at the poles.
pub fn gamma(x: f64) -> f64 {
    gamma_sign(x) * lgamma(x).exp()
}

/// 1/Γ(x), an entire function (zero at the nonpositive integers).
pub fn rgamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 0.0 {
        return (-lgamma_positive(x)).exp();
    }
    // 1/Γ(x) = Γ(1-x) sin(pi x) / pi
    let r = reduce(x);
    let sign = if (x.round() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * (PI * r).sin() / PI * lgamma_positive(1.0 - x).exp()
}

fn psi_positive(x: f64) -> f64 {
    let mut z = x;
    let mut acc = 0.0;
    while z < SHIFT {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut series = 0.0;
    let mut pow = zi2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2.0 * (k as f64 + 1.0);
        series += b / k2 * pow;
        pow *= zi2;
    }
    acc + z.ln() - 0.5 * zi - series
}

/// Digamma ψ(x); NaN at the poles.
pub fn psi(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x > 0.0 {
        psi_positive(x)
    } else {
        let r = reduce(x);
        psi_positive(1.0 - x) - PI * (PI * r).cos() / (PI * r).sin()
    }
}

fn psi1_positive(x: f64) -> f64 {
    let mut z = x;
    let mut acc = 0.0;
    while z < SHIFT {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut series = 0.0;
    let mut pow = zi2 * zi;
    for b in BERNOULLI.iter() {
        series += b * pow;
        pow *= zi2;
    }
    acc + zi + 0.5 * zi2 + series
}

/// Trigamma ψ'(x); NaN at the poles.
pub fn psi1(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x > 0.0 {
        psi1_positive(x)
    } else {
        let sin = (PI * reduce(x)).sin();
        PI * PI / (sin * sin) - psi1_positive(1.0 - x)
    }
}

/// Pochhammer symbol (x)_n = x(x+1)…(x+n-1).
pub fn poch(x: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if is_nonpositive_integer(x) && (n as f64) > -x {
        return 0.0;
    }
    if n <= 32 {
        return (0..n).fold(1.0, |p, k| p * (x + k as f64));
    }
    // negative factors one by one, the positive run through log-gamma
    let neg = if x < 0.0 { ((-x).ceil() as u64).min(n) } else { 0 };
    let mut log_abs = 0.0;
    for k in 0..neg {
        log_abs += (x + k as f64).abs().ln();
    }
    if neg < n {
        let y = x + neg as f64;
        let m = (n - neg) as f64;
        log_abs += m * lgamma_dq(y, m);
    }
    let sign = if neg % 2 == 1 { -1.0 } else { 1.0 };
    sign * log_abs.exp()
}

/// `expm1(s l) / s`, equal to `l` at `s = 0`.
///
/// This is the stable form of `(x^s - 1)/s` with `l = ln x`.
pub fn expm1_quot(s: f64, l: f64) -> f64 {
    if s == 0.0 {
        l
    } else {
        (s * l).exp_m1() / s
    }
}

fn well_separated(x: f64, h: f64) -> bool {
    x.min(x + h) >= h.abs()
}

/// `(ln Γ(x+h) - ln Γ(x)) / h`, equal to ψ(x) at `h = 0`.
///
/// Both `x` and `x + h` must be positive. When the interval is short relative
/// to its distance from the origin the quotient is the mean of ψ over it.
pub fn lgamma_dq(x: f64, h: f64) -> f64 {
    if h == 0.0 {
        psi(x)
    } else if well_separated(x, h) {
        gauss_legendre_16(|t| psi(x + t * h), 0.0, 1.0)
    } else {
        (lgamma(x + h) - lgamma(x)) / h
    }
}

/// `(ψ(x+h) - ψ(x)) / h`, equal to ψ'(x) at `h = 0`.
pub fn psi_dq(x: f64, h: f64) -> f64 {
    if h == 0.0 {
        psi1(x)
    } else if well_separated(x, h) {
        gauss_legendre_16(|t| psi1(x + t * h), 0.0, 1.0)
    } else {
        (psi(x + h) - psi(x)) / h
    }
}

/// Γ(a)/Γ(b) for positive arguments, computed without forming either factor.
pub fn gamma_ratio_raw(a: f64, b: f64) -> f64 {
    ((a - b) * lgamma_dq(b, a - b)).exp()
}

/// Checked `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<SpecialValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires a finite x > 0, got {x}")));
    }
    let v = lgamma_positive(x);
    Ok(SpecialValue::with_rel(v, 8.0 * f64::EPSILON, 32.0 * f64::EPSILON))
}

/// Checked digamma; error at the poles.
pub fn digamma(x: f64) -> Result<SpecialValue> {
    if !x.is_finite() || is_nonpositive_integer(x) {
        return Err(domain(format!("digamma has a pole at {x}")));
    }
    let v = psi(x);
    let floor = 32.0 * f64::EPSILON * (1.0 + 1.0 / x.abs().min(1.0));
    Ok(SpecialValue::with_rel(v, 8.0 * f64::EPSILON, floor))
}

/// Checked trigamma for `x > 0`.
pub fn trigamma(x: f64) -> Result<SpecialValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("trigamma requires a finite x > 0, got {x}")));
    }
    let v = psi1(x);
    Ok(SpecialValue::with_rel(v, 16.0 * f64::EPSILON, 16.0 * f64::EPSILON))
}

/// Pochhammer symbol; see [`poch`].
pub fn pochhammer(x: f64, n: u64) -> f64 {
    poch(x, n)
}

/// Checked Γ(a)/Γ(b) for positive `a`, `b`.
pub fn gamma_ratio(a: f64, b: f64) -> Result<SpecialValue> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("gamma_ratio requires a, b > 0, got ({a}, {b})")));
    }
    let v = gamma_ratio_raw(a, b);
    Ok(SpecialValue::with_rel(v, 64.0 * f64::EPSILON, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma(1.0).unwrap().value.abs() < 1e-14, true);
        let half = log_gamma(0.5).unwrap();
        assert!(close(half.value, 0.5 * PI.ln(), 1e-14));
        assert!((half.value - 0.5 * PI.ln()).abs() <= half.abs_error_bound);
        assert!(close(log_gamma(6.0).unwrap().value, 120f64.ln(), 1e-14));
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn log_gamma_against_libm() {
        for i in 1..2000 {
            let x = i as f64 * 0.037;
            let ours = lgamma(x);
            let theirs = libm::lgamma(x);
            assert!(close(ours, theirs, 1e-13), "x={x}: {ours} vs {theirs}");
        }
    }

    #[test]
    fn digamma_examples() {
        assert!(close(psi(1.0), -EULER_GAMMA, 1e-15));
        assert!(close(psi(2.0), 1.0 - EULER_GAMMA, 1e-15));
        assert!(close(psi(0.5), -EULER_GAMMA - 2.0 * 2f64.ln(), 1e-14));
        assert!(digamma(0.0).is_err());
        assert!(digamma(-3.0).is_err());
        // reflection: ψ(-0.5) = ψ(0.5) + 2
        assert!(close(psi(-0.5), psi(0.5) + 2.0, 1e-13));
    }

    #[test]
    fn trigamma_examples() {
        let z2 = PI * PI / 6.0;
        assert!(close(psi1(1.0), z2, 1e-14));
        assert!(close(psi1(2.0), z2 - 1.0, 1e-14));
        let tail: f64 = {
            // Σ_{k>=10} 1/k^2 = π²/6 - Σ_{k<10} 1/k^2
            let head: f64 = (1..10).map(|k| 1.0 / (k * k) as f64).sum();
            z2 - head
        };
        assert!(close(psi1(10.0), tail, 1e-13));
        assert!(close(psi1(10.0), 0.105_166_335_681_686, 1e-13));
        assert!(trigamma(0.0).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(2.0, 3), 24.0);
        assert_eq!(pochhammer(-0.5, 0), 1.0);
        assert!(close(pochhammer(-0.5, 3), -0.375, 1e-15));
        assert_eq!(pochhammer(-3.0, 5), 0.0);
        // log-space branch agrees with the direct product
        let direct = (0..40).fold(1.0, |p, k| p * (-2.5 + k as f64));
        assert!(close(pochhammer(-2.5, 40), direct, 1e-12));
    }

    #[test]
    fn gamma_ratio_examples() {
        assert!(close(gamma_ratio(5.0, 3.0).unwrap().value, 12.0, 1e-14));
        assert!(close(gamma_ratio(1.5, 0.5).unwrap().value, 0.5, 1e-14));
        assert!(close(gamma_ratio(2.7, 1.3).unwrap().value, 1.721_154_631_798_077, 1e-13));
        assert!(gamma_ratio(0.0, 1.0).is_err());
    }

    #[test]
    fn reciprocal_gamma_is_entire() {
        assert_eq!(rgamma(-2.0), 0.0);
        assert!(close(rgamma(-0.5), -0.5 / PI.sqrt(), 1e-14));
        assert!(close(rgamma(-1.5), 0.75 / PI.sqrt(), 1e-14));
        assert!(close(gamma(-1.5), 4.0 * PI.sqrt() / 3.0, 1e-14));
        assert!(rgamma(-2.0 + 1e-9).abs() < 1e-8);
    }

    #[test]
    fn divided_differences() {
        assert!(close(psi_dq(2.0, 0.0), psi1(2.0), 1e-15));
        assert!(close(psi_dq(2.0, 1.0), 0.5, 1e-14));
        assert!(close(psi_dq(2.0, 1e-7), psi1(2.0), 1e-6));
        assert!(close(lgamma_dq(3.0, 2.0), (lgamma(5.0) - lgamma(3.0)) / 2.0, 1e-14));
        assert!(close(expm1_quot(0.0, 2.0), 2.0, 0.0));
        assert!(close(expm1_quot(1e-12, 2.0), 2.0, 1e-11));
    }
}
