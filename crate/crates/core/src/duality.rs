//! Series transforms between the entropies Δ_n and their duals ∇_n.
//!
//! Both directions share the coefficients `c_n = (-s)_n / (n+1)!`:
//!
//! ```text
//! ∇_s = (1+s) Σ_{n≥0} c_n Δ_n        Δ_s = (1+s) Σ_{n≥0} c_n ∇_n
//! ```
//!
//! For integer `s >= 0` the sums are finite. Otherwise the head is summed
//! exactly (compensated) and the tail is estimated by the midpoint
//! Euler–Maclaurin formula, using `c(x) = Γ(x-s) / (Γ(x+2) Γ(-s))` and the
//! entropies at real orders. The head length doubles until two successive
//! estimates agree.

use crate::distributions::Distribution;
use crate::entropy::{self, EntropyValue, Method};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{lgamma, rgamma};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::RwLock;

const FIRST_HEAD: usize = 64;
const MAX_TERMS: usize = 1_000_000;

/// Coefficients of the order series, truncated at `truncation_n`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesTransform {
    pub s: f64,
    /// `(1+s) c_n` for `n = 0..=truncation_n`.
    pub coefficients: Vec<f64>,
    pub truncation_n: usize,
    /// Bound on `Σ_{n > truncation_n} |(1+s) c_n|` from the asymptotic decay.
    pub tail_bound: f64,
}

/// `c_n = (-s)_n / (n+1)!`.
pub fn coefficient(s: f64, n: usize) -> f64 {
    let mut c = 1.0;
    for k in 0..n {
        c *= (k as f64 - s) / (k as f64 + 2.0);
    }
    c
}

/// The weighted coefficients `(1+s) c_n` for `n <= n_max`.
pub fn series_transform(s: f64, n_max: usize) -> Result<SeriesTransform> {
    if !(s > -1.0) {
        return Err(domain(format!("order must exceed -1, got {s}")));
    }
    let mut coefficients = Vec::with_capacity(n_max + 1);
    let mut c = 1.0;
    for k in 0..=n_max {
        coefficients.push((1.0 + s) * c);
        c *= (k as f64 - s) / (k as f64 + 2.0);
    }
    let tail_bound = if is_nonneg_integer(s) && (n_max as f64) >= s {
        0.0
    } else {
        // |c_n| ~ n^-(2+s) / |Γ(-s)|, so the tail is about N^-(1+s) / ((1+s)|Γ(-s)|)
        let n = n_max as f64 + 0.5;
        (1.0 + s) * rgamma(-s).abs() * n.powf(-(1.0 + s)) / (1.0 + s)
    };
    Ok(SeriesTransform { s, coefficients, truncation_n: n_max, tail_bound })
}

fn is_nonneg_integer(s: f64) -> bool {
    s >= 0.0 && s.fract() == 0.0
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Result of an order-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Cancellation error, `(1+s) Σ |c_n v(n)|` times `1e-13`, the relative
    /// accuracy assumed of each `v(n)`.
    pub rounding_bound: f64,
    pub terms: usize,
}

const TERM_ACCURACY: f64 = 1e-13;

// c(x) at real x > s
fn coefficient_real(s: f64, x: f64) -> f64 {
    (lgamma(x - s) - lgamma(x + 2.0)).exp() * rgamma(-s)
}

fn tail_estimate<V>(s: f64, v: &V, head_end: usize) -> Result<f64>
where
    V: Fn(f64) -> Result<f64> + Sync,
{
    let m = head_end as f64 + 0.5;
    let f = |x: f64| -> Result<f64> {
        if x > 1e15 {
            return Ok(0.0);
        }
        Ok(coefficient_real(s, x) * v(x)?)
    };
    // x = m t^(-1/q) keeps power-law integrands bounded near t = 0
    let q = 0.5 * (1.0 + s);
    let failure: RwLock<Option<Error>> = RwLock::new(None);
    let integral = integrate(
        |t| {
            let x = m * t.powf(-1.0 / q);
            match f(x) {
                Ok(y) if y != 0.0 => y * x / (q * t),
                Ok(_) => 0.0,
                Err(e) => {
                    *failure.write().expect("lock") = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        QuadOptions { abs_tol: 1e-15, rel_tol: 1e-11, max_intervals: 400 },
    );
    if let Some(e) = failure.into_inner().expect("lock") {
        return Err(e);
    }
    let h = 0.05 * m;
    let deriv = (f(m + h)? - f(m - h)?) / (2.0 * h);
    Ok(integral.value + deriv / 24.0)
}

/// `(1+s) Σ_{n≥0} c_n v(n)` with `v` defined at real orders.
///
/// Stops once two head lengths agree to `tol` (relative to `max(1, |sum|)`);
/// gives up with [`Error::TruncationNotConverged`] past a million terms.
pub fn order_series<V>(s: f64, v: V, tol: f64) -> Result<SeriesValue>
where
    V: Fn(f64) -> Result<f64> + Sync,
{
    if !(s > -1.0) {
        return Err(domain(format!("order must exceed -1, got {s}")));
    }
    if is_nonneg_integer(s) {
        let k = s as usize;
        let mut acc = Compensated::default();
        let mut magnitude = 0.0;
        let mut c = 1.0;
        for n in 0..=k {
            let term = c * v(n as f64)?;
            acc.add(term);
            magnitude += term.abs();
            c *= (n as f64 - s) / (n as f64 + 2.0);
        }
        return Ok(SeriesValue {
            value: (1.0 + s) * acc.value(),
            tail_bound: 0.0,
            rounding_bound: (1.0 + s) * magnitude * TERM_ACCURACY,
            terms: k + 1,
        });
    }

    let mut head_end = FIRST_HEAD.max(s.ceil() as usize + 8);
    let mut values: Vec<f64> = Vec::new();
    let mut coeffs: Vec<f64> = vec![1.0];
    let mut previous: Option<f64> = None;
    loop {
        let start = values.len();
        let fresh: Vec<f64> = (start..=head_end)
            .into_par_iter()
            .map(|n| v(n as f64))
            .collect::<Result<_>>()?;
        values.extend(fresh);
        while coeffs.len() <= head_end {
            let k = (coeffs.len() - 1) as f64;
            let last = *coeffs.last().expect("nonempty");
            coeffs.push(last * (k - s) / (k + 2.0));
        }
        let mut acc = Compensated::default();
        let mut magnitude = 0.0;
        for n in 0..=head_end {
            acc.add(coeffs[n] * values[n]);
            magnitude += (coeffs[n] * values[n]).abs();
        }
        acc.add(tail_estimate(s, &v, head_end)?);
        let total = (1.0 + s) * acc.value();
        if let Some(prev) = previous {
            let diff = (total - prev).abs();
            if diff <= tol * total.abs().max(1.0) {
                return Ok(SeriesValue {
                    value: total,
                    tail_bound: diff,
                    rounding_bound: (1.0 + s) * magnitude * TERM_ACCURACY,
                    terms: head_end + 1,
                });
            }
            if 2 * head_end > MAX_TERMS {
                return Err(Error::TruncationNotConverged { terms: head_end + 1, tail: diff });
            }
        }
        previous = Some(total);
        head_end *= 2;
    }
}

/// Memo of entropy values by order, safe for concurrent readers.
#[derive(Default)]
pub struct OrderCache {
    map: RwLock<HashMap<u64, f64>>,
}

impl OrderCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute<F: FnOnce() -> Result<f64>>(&self, order: f64, f: F) -> Result<f64> {
        let key = order.to_bits();
        if let Some(v) = self.map.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        self.map.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn delta_at(d: &Distribution, n: f64, cache: &OrderCache) -> Result<f64> {
    match d.closed_delta(n) {
        Some(r) => r,
        None => cache.get_or_compute(n, || entropy::delta_quadrature(d, n).map(|e| e.value)),
    }
}

fn nabla_at(d: &Distribution, n: f64, cache: &OrderCache) -> Result<f64> {
    match d.closed_nabla(n) {
        Some(r) => r,
        None => cache.get_or_compute(n, || entropy::nabla_quadrature(d, n).map(|e| e.value)),
    }
}

/// ∇_s as the order series over Δ_n.
pub fn nabla_from_delta_series(d: &Distribution, s: f64, tol: f64) -> Result<EntropyValue> {
    entropy::check_nabla_finite(d, s)?;
    let cache = OrderCache::new();
    let r = order_series(s, |n| delta_at(d, n, &cache), tol)?;
    Ok(EntropyValue { value: r.value, abs_error_bound: r.tail_bound + r.rounding_bound + tol, method: Method::Series })
}

/// Δ_s as the order series over ∇_n.
pub fn delta_from_nabla_series(d: &Distribution, s: f64, tol: f64) -> Result<EntropyValue> {
    entropy::check_delta_finite(d, s)?;
    entropy::check_nabla_finite(d, 0.0)?;
    let cache = OrderCache::new();
    let r = order_series(s, |n| nabla_at(d, n, &cache), tol)?;
    Ok(EntropyValue { value: r.value, abs_error_bound: r.tail_bound + r.rounding_bound + tol, method: Method::Series })
}

/// Beta negative binomial probability `P[N_s = n] = (1+s)(-s)_n/(n+1)!` for
/// `s` in (-1, 0).
pub fn bnb_pmf(s: f64, n: u64) -> Result<f64> {
    if !(s > -1.0 && s < 0.0) {
        return Err(domain(format!("the randomization pmf needs s in (-1, 0), got {s}")));
    }
    let n = n as f64;
    Ok((1.0 + s) * (lgamma(n - s) - lgamma(-s) - lgamma(n + 2.0)).exp())
}

/// `Σ_{n ≤ n_max} P[N_s = n]` together with the asymptotic bound on the
/// remaining mass.
pub fn bnb_partial_sum(s: f64, n_max: u64) -> Result<(f64, f64)> {
    bnb_pmf(s, 0)?;
    let mut acc = Compensated::default();
    let mut p = 1.0 + s;
    for n in 0..=n_max {
        acc.add(p);
        let k = n as f64;
        p *= (k - s) / (k + 2.0);
    }
    let tail = (1.0 + s) * rgamma(-s) * (n_max as f64 + 0.5).powf(-(1.0 + s)) / (1.0 + s);
    Ok((acc.value(), tail))
}

/// The alternating binomial transform `w_k = Σ_{n≤k} C(k+1, n+1) (-1)^n v_n`
/// for `k = 0..=k_max`. Applying it twice returns the input.
pub fn binomial_involution(v: &[f64], k_max: usize) -> Result<Vec<f64>> {
    if v.len() != k_max + 1 {
        return Err(Error::LengthMismatch { expected: k_max + 1, got: v.len() });
    }
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = Compensated::default();
        // C(k+1, n+1) built incrementally
        let mut binom = (k + 1) as f64;
        for (n, &vn) in v.iter().enumerate().take(k + 1) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * binom * vn);
            binom = binom * (k - n) as f64 / (n + 2) as f64;
        }
        out.push(acc.value());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{psi, psi1, EULER_GAMMA};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn coefficients_start_and_partial_sums() {
        assert_eq!(coefficient(0.3, 0), 1.0);
        let t = series_transform(-0.5, 2000).unwrap();
        assert_eq!(t.coefficients[0], 0.5);
        assert!(t.coefficients.iter().all(|&c| c > 0.0));
        let s: f64 = t.coefficients.iter().sum();
        assert!((1.0 - s) <= t.tail_bound * 1.01 && 1.0 - s > 0.0);
        // (1+s) Σ_{n≤N} c_n = 1 - (-s)_{N+1}/(N+1)!
        let s_ = 1.7;
        let t = series_transform(s_, 30).unwrap();
        let sum: f64 = t.coefficients.iter().sum();
        assert!(close(sum, 1.0 - coefficient(s_, 31) * 32.0, 1e-13));
    }

    #[test]
    fn coefficient_decay_matches_asymptotics() {
        for s in [-0.5, 0.5, 1.5] {
            let a = coefficient_real(s, 1e4) * 1e4f64.powf(2.0 + s);
            let b = coefficient_real(s, 1e5) * 1e5f64.powf(2.0 + s);
            assert!((a / b - 1.0).abs() < 0.05);
            // the real-order continuation agrees with the recurrence
            assert!(close(coefficient_real(s, 40.0), coefficient(s, 40), 1e-12));
        }
    }

    #[test]
    fn exponential_nabla_from_closed_deltas() {
        let d = Distribution::exponential();
        let r = nabla_from_delta_series(&d, 0.5, 1e-12).unwrap();
        assert!(close(r.value, 1.5 * psi1(2.5), 1e-10), "{}", r.value);
        let u = Distribution::uniform();
        assert!(close(nabla_from_delta_series(&u, 0.0, 1e-12).unwrap().value, 0.25, 1e-14));
        let l = Distribution::logistic();
        let r = nabla_from_delta_series(&l, 1.0, 1e-12).unwrap();
        assert!(close(r.value, EULER_GAMMA + psi(2.0) + 2.0 * psi1(2.0), 1e-13));
    }

    #[test]
    fn delta_from_closed_nablas() {
        let d = Distribution::exponential();
        assert!(close(delta_from_nabla_series(&d, 1.0, 1e-12).unwrap().value, 0.5, 1e-13));
        let n = Distribution::negative_exponential();
        let r = delta_from_nabla_series(&n, 2.0, 1e-12).unwrap();
        assert!(close(r.value, 1.0 / 3.0, 1e-13));
        let r = delta_from_nabla_series(&d, -0.3, 1e-11).unwrap();
        assert!(close(r.value, psi_dq_exp(-0.3), 1e-9), "{}", r.value);
    }

    fn psi_dq_exp(s: f64) -> f64 {
        (psi(s + 2.0) - psi(2.0)) / s
    }

    #[test]
    fn bnb_examples() {
        assert!(close(bnb_pmf(-0.5, 0).unwrap(), 0.5, 1e-15));
        assert!(close(bnb_pmf(-0.5, 1).unwrap(), 0.125, 1e-14));
        let (sum, tail) = bnb_partial_sum(-0.5, 1_000_000).unwrap();
        assert!((1.0 - sum - tail).abs() < 1e-6);
        assert!((1.0 - sum) > 0.0 && (1.0 - sum) < 1e-3);
        assert!(bnb_pmf(0.5, 1).is_err());
    }

    #[test]
    fn binomial_transform_examples() {
        let v = [1.0, 0.0, 0.0];
        let w = binomial_involution(&v, 2).unwrap();
        let back = binomial_involution(&w, 2).unwrap();
        assert_eq!(back, v.to_vec());
        assert!(binomial_involution(&v, 3).is_err());

        let e = Distribution::exponential();
        let deltas: Vec<f64> = (0..4).map(|n| e.closed_delta(n as f64).unwrap().unwrap()).collect();
        let nablas = binomial_involution(&deltas, 3).unwrap();
        for (n, &x) in nablas.iter().enumerate() {
            assert!(close(x, (n as f64 + 1.0) * psi1(n as f64 + 2.0), 1e-13));
        }
        let l = Distribution::logistic();
        let nab: Vec<f64> = (0..3).map(|n| l.closed_nabla(n as f64).unwrap().unwrap()).collect();
        let del = binomial_involution(&nab, 2).unwrap();
        for (n, &x) in del.iter().enumerate() {
            assert!(close(x, l.closed_delta(n as f64).unwrap().unwrap(), 1e-13));
        }
    }

    #[test]
    fn order_cache_memoizes() {
        let c = OrderCache::new();
        assert_eq!(c.get_or_compute(1.0, || Ok(2.0)).unwrap(), 2.0);
        assert_eq!(c.get_or_compute(1.0, || Ok(3.0)).unwrap(), 2.0);
        assert_eq!(c.len(), 1);
    }
}
