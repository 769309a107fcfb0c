//! Cumulative Tsallis entropies Δ_s and their duals ∇_s.
//!
//! ```text
//! Δ_s(X) = (1/s) ∫ F (1 - F^s) dx = ∫ g_s(F(x)) dx,    g_s(u) = u (1 - u^s) / s
//! ∇_s(X) = ∫ G_s(F(x)) dx,                             G_s(u) = u ∫_u^1 (1 - (1-t)^(s+1)) t^-2 dt
//! ```
//!
//! with `g_0(u) = G_0(u) = -u log u`. Each functional is evaluated by
//! quadrature in x-space, by quadrature against the quantile derivative, or
//! from order statistics of a sample. The kernels take the pair `(u, 1-u)` so
//! that both tails keep full relative accuracy.

use crate::distributions::{Distribution, EmpiricalSample};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_range, QuadOptions, RangeMap};
use crate::specfun::{expm1_quot, psi_dq};
use rayon::prelude::*;
use serde::Serialize;

/// How an entropy value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    QuadratureQuantile,
    QuadratureX,
    Series,
    Plugin,
}

/// A finite entropy value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub abs_error_bound: f64,
    pub method: Method,
}

/// One row of an [`EntropyProfile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub delta: std::result::Result<EntropyValue, String>,
    pub nabla: std::result::Result<EntropyValue, String>,
}

/// Δ_s and ∇_s over a grid of orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub grid: Vec<ProfilePoint>,
    /// Finite Δ values are nonincreasing along the grid.
    pub delta_monotone: bool,
    /// Finite ∇ values are nondecreasing along the grid.
    pub nabla_monotone: bool,
}

fn check_order(s: f64) -> Result<()> {
    if s > -1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("entropy order must be a finite s > -1, got {s}")))
    }
}

/// Errors out when Δ_s(X) is infinite or E|X| is.
pub fn check_delta_finite(d: &Distribution, s: f64) -> Result<()> {
    check_order(s)?;
    if !d.has_finite_mean() {
        return Err(Error::NonIntegrable(format!("{} has an infinite mean", d.label())));
    }
    if let Some(threshold) = d.finiteness_threshold() {
        if s <= threshold {
            return Err(Error::Divergent { order: s, threshold });
        }
    }
    Ok(())
}

/// Errors out when ∇_s(X) is infinite, which happens exactly when Δ_0 is.
pub fn check_nabla_finite(d: &Distribution, s: f64) -> Result<()> {
    check_order(s)?;
    check_delta_finite(d, 0.0).map_err(|e| match e {
        Error::Divergent { threshold, .. } => Error::Divergent { order: s, threshold },
        other => other,
    })
}

fn ln_u(u: f64, v: f64) -> f64 {
    if u < 0.5 {
        u.ln()
    } else {
        (-v).ln_1p()
    }
}

/// `g_s(u) = u (1 - u^s) / s` evaluated from `(u, v = 1-u)`.
pub fn kernel(s: f64, u: f64, v: f64) -> f64 {
    if u <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    -u * expm1_quot(s, ln_u(u, v))
}

/// `G_s(u)` evaluated from `(u, v = 1-u)`.
pub fn dual_kernel(s: f64, u: f64, v: f64) -> f64 {
    if u <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        return -u * ln_u(u, v);
    }
    if u <= 0.5 {
        if s > 40.0 {
            return dual_kernel_direct(s, u);
        }
        // G = 1 - (1-u)^(s+1) - u - (s+1) u ln u + (s+1) u J(u),
        // J(u) = -(ψ(s+1) + γ) - Σ_{k≥1} (-s)_k/k! u^k/k
        let mut sum = 0.0;
        let mut c = 1.0;
        let mut pow = 1.0;
        for k in 1..400 {
            let kf = k as f64;
            c *= (kf - 1.0 - s) / kf;
            pow *= u;
            let term = c * pow / kf;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs().max(1e-300) && kf > s + 1.0 {
                break;
            }
        }
        let j = -s * psi_dq(1.0, s) - sum;
        let head = -((s + 1.0) * (-u).ln_1p()).exp_m1();
        head - u - (s + 1.0) * u * u.ln() + (s + 1.0) * u * j
    } else {
        // G = v - v^(s+2) + (s+1)(1-v) Σ_{k≥1} v^(s+k+1)/(s+k+1)
        let lv = v.ln();
        let mut sum = 0.0;
        let mut pow = (s + 1.0) * lv;
        for k in 1..400 {
            pow += lv;
            let term = pow.exp() / (s + k as f64 + 1.0);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        v - ((s + 2.0) * lv).exp() + (s + 1.0) * u * sum
    }
}

// u ((1-u)/u - ∫_u^1 (1-t)^(s+1) t^-2 dt), for large s and u <= 1/2
fn dual_kernel_direct(s: f64, u: f64) -> f64 {
    let r = integrate(
        |t| ((s + 1.0) * (-t).ln_1p()).exp() / (t * t),
        u,
        1.0,
        QuadOptions { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 500 },
    );
    (1.0 - u) - u * r.value
}

fn x_space_map(d: &Distribution, left_decay: f64, right_decay: f64) -> RangeMap {
    let power = |p: f64| {
        if p.is_finite() {
            (1.5 / (p - 1.0)).max(1.0)
        } else {
            1.0
        }
    };
    let iqr = d.iqr();
    RangeMap {
        mid: d.median(),
        scale: if iqr > 0.0 && iqr.is_finite() { iqr } else { 1.0 },
        powers: (power(left_decay), power(right_decay)),
    }
}

fn x_space<K: Fn(f64, f64) -> f64 + Sync>(
    d: &Distribution,
    k: K,
    left_decay: f64,
    right_decay: f64,
) -> Result<(f64, f64)> {
    let (a, b) = d.support();
    let map = x_space_map(d, left_decay, right_decay);
    let tol = 1e-12 * map.scale;
    let opts = QuadOptions { abs_tol: tol, rel_tol: 1e-12, max_intervals: 4000 };
    let r = integrate_range(|x| k(d.cdf(x), d.sf(x)), a, b, map, opts);
    if !r.is_finite() {
        return Err(Error::NonIntegrable(format!("quadrature diverged for {}", d.label())));
    }
    Ok((r.value, r.abs_error))
}

/// Δ_s by x-space quadrature of `g_s(F)`.
pub fn delta_quadrature(d: &Distribution, s: f64) -> Result<EntropyValue> {
    check_delta_finite(d, s)?;
    let (l, r) = d.tail_indices();
    let (value, err) = x_space(d, |u, v| kernel(s, u, v), l * (1.0 + s).min(1.0), r)?;
    Ok(EntropyValue { value, abs_error_bound: err, method: Method::QuadratureX })
}

/// ∇_s by x-space quadrature of `G_s(F)`.
pub fn nabla_quadrature(d: &Distribution, s: f64) -> Result<EntropyValue> {
    check_nabla_finite(d, s)?;
    let (l, r) = d.tail_indices();
    let (value, err) = x_space(d, |u, v| dual_kernel(s, u, v), l, r)?;
    Ok(EntropyValue { value, abs_error_bound: err, method: Method::QuadratureX })
}

// Derivative of a smooth function at `x` with a five-point stencil and one
// Richardson step; `h` must keep `x ± 2h` inside the domain.
fn derivative<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let d1 = d(h);
    let d2 = d(0.5 * h);
    d2 + (d2 - d1) / 63.0
}

/// `∫_0^1 K(u, 1-u) dq(u)` with the quantile differentiated numerically.
fn quantile_space<K: Fn(f64, f64) -> f64>(d: &Distribution, k: K) -> Result<(f64, f64)> {
    let (l, r) = d.tail_indices();
    // u = w^m regularises algebraic blow-up of q' at the ends
    let m_for = |alpha: f64| {
        if alpha.is_finite() {
            (2.0 / (1.0 - 1.0 / alpha)).max(2.0)
        } else {
            2.0
        }
    };
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 };
    let half = |m: f64, upper: bool| {
        let w_max = 0.5f64.powf(1.0 / m);
        integrate(
            |w| {
                let t = w.powf(m);
                if t <= 0.0 {
                    return 0.0;
                }
                let jac = m * t / w;
                let h = 2e-3 * t;
                if upper {
                    let q = |v: f64| d.quantile_upper(v);
                    -derivative(&q, t, h) * k(1.0 - t, t) * jac
                } else {
                    let q = |u: f64| d.quantile(u);
                    derivative(&q, t, h) * k(t, 1.0 - t) * jac
                }
            },
            0.0,
            w_max,
            opts,
        )
    };
    let lo = half(m_for(l), false);
    let hi = half(m_for(r), true);
    let value = lo.value + hi.value;
    if !value.is_finite() {
        return Err(Error::NonIntegrable(format!("quantile quadrature diverged for {}", d.label())));
    }
    // allowance for the differentiation error on top of the quadrature estimate
    Ok((value, lo.abs_error + hi.abs_error + 1e-10 * value.abs()))
}

/// Δ_s by quadrature of `g_s` against the quantile derivative.
pub fn delta_quantile(d: &Distribution, s: f64) -> Result<EntropyValue> {
    check_delta_finite(d, s)?;
    let (value, err) = quantile_space(d, |u, v| kernel(s, u, v))?;
    Ok(EntropyValue { value, abs_error_bound: err, method: Method::QuadratureQuantile })
}

/// ∇_s by quadrature of `G_s` against the quantile derivative.
pub fn nabla_quantile(d: &Distribution, s: f64) -> Result<EntropyValue> {
    check_nabla_finite(d, s)?;
    let (value, err) = quantile_space(d, |u, v| dual_kernel(s, u, v))?;
    Ok(EntropyValue { value, abs_error_bound: err, method: Method::QuadratureQuantile })
}

fn closed(value: f64) -> EntropyValue {
    EntropyValue {
        value,
        abs_error_bound: 1e-13 * value.abs().max(1.0),
        method: Method::ClosedForm,
    }
}

/// Δ_s(X): the closed form when the catalog has one, quadrature otherwise.
pub fn delta(d: &Distribution, s: f64) -> Result<EntropyValue> {
    check_order(s)?;
    match d.closed_delta(s) {
        Some(r) => r.map(closed),
        None => delta_quadrature(d, s),
    }
}

/// ∇_s(X): the closed form when the catalog has one, quadrature otherwise.
pub fn nabla(d: &Distribution, s: f64) -> Result<EntropyValue> {
    check_order(s)?;
    match d.closed_nabla(s) {
        Some(r) => r.map(closed),
        None => nabla_quadrature(d, s),
    }
}

/// Δ̄_s(X) = Δ_s(-X).
pub fn delta_bar(d: &Distribution, s: f64) -> Result<EntropyValue> {
    delta(&d.negate(), s)
}

/// ∇̄_s(X) = ∇_s(-X).
pub fn nabla_bar(d: &Distribution, s: f64) -> Result<EntropyValue> {
    nabla(&d.negate(), s)
}

fn plugin<K: Fn(f64, f64) -> f64>(x: &EmpiricalSample, k: K) -> EntropyValue {
    let v = x.values();
    let n = v.len();
    let nf = n as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 1..n {
        let w = k(i as f64 / nf, (n - i) as f64 / nf) * (v[i] - v[i - 1]);
        let t = sum + w;
        comp += if sum.abs() >= w.abs() { (sum - t) + w } else { (w - t) + sum };
        sum = t;
    }
    let value = sum + comp;
    EntropyValue {
        value,
        abs_error_bound: 4.0 * f64::EPSILON * nf * value.abs(),
        method: Method::Plugin,
    }
}

/// Plug-in Δ̂_s = Σ_{i<n} g_s(i/n) (x_(i+1) - x_(i)), which is Δ_s of the
/// empirical law in its integral form.
pub fn delta_plugin(x: &EmpiricalSample, s: f64) -> Result<EntropyValue> {
    check_order(s)?;
    Ok(plugin(x, |u, v| kernel(s, u, v)))
}

/// Plug-in ∇̂_s with the dual kernel on the same spacings.
pub fn nabla_plugin(x: &EmpiricalSample, s: f64) -> Result<EntropyValue> {
    check_order(s)?;
    Ok(plugin(x, |u, v| dual_kernel(s, u, v)))
}

/// Δ_s and ∇_s over a strictly increasing grid, evaluated in parallel.
pub fn entropy_profile(d: &Distribution, s_grid: &[f64]) -> Result<EntropyProfile> {
    if s_grid.is_empty() {
        return Err(domain("empty order grid"));
    }
    for s in s_grid {
        check_order(*s)?;
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("order grid must be strictly increasing"));
    }
    let grid: Vec<ProfilePoint> = s_grid
        .par_iter()
        .map(|&s| ProfilePoint {
            s,
            delta: delta(d, s).map_err(|e| e.to_string()),
            nabla: nabla(d, s).map_err(|e| e.to_string()),
        })
        .collect();
    let finite = |f: fn(&ProfilePoint) -> Option<f64>| grid.iter().filter_map(f).collect::<Vec<_>>();
    let deltas = finite(|p| p.delta.as_ref().ok().map(|e| e.value));
    let nablas = finite(|p| p.nabla.as_ref().ok().map(|e| e.value));
    let slack = |a: f64, b: f64| 1e-10 * a.abs().max(b.abs()).max(1e-300);
    let delta_monotone = deltas.windows(2).all(|w| w[1] <= w[0] + slack(w[0], w[1]));
    let nabla_monotone = nablas.windows(2).all(|w| w[1] >= w[0] - slack(w[0], w[1]));
    Ok(EntropyProfile { grid, delta_monotone, nabla_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn dual_kernel_oracle(s: f64, u: f64) -> f64 {
        let r = integrate(
            |t| (1.0 - (1.0 - t).powf(s + 1.0)) / (t * t),
            u,
            1.0,
            QuadOptions { abs_tol: 1e-15, rel_tol: 1e-14, max_intervals: 2000 },
        );
        u * r.value
    }

    #[test]
    fn dual_kernel_matches_its_definition() {
        for &s in &[-0.7, -0.3, 0.4, 1.0, 2.5, 7.3, 55.0] {
            for &u in &[1e-6, 0.01, 0.2, 0.5, 0.51, 0.8, 0.999, 1.0 - 1e-7] {
                let ours = dual_kernel(s, u, 1.0 - u);
                let oracle = dual_kernel_oracle(s, u);
                assert!((ours - oracle).abs() < 1e-12 * oracle.abs().max(1e-3), "s={s} u={u}: {ours} vs {oracle}");
            }
        }
        assert!(close(dual_kernel(1.0, 0.5, 0.5), 2f64.ln() - 0.25, 1e-15));
        assert!(close(dual_kernel(0.0, 0.3, 0.7), -0.3 * 0.3f64.ln(), 1e-15));
    }

    #[test]
    fn kernel_limits() {
        assert!(close(kernel(0.0, 0.5, 0.5), 0.5 * 2f64.ln(), 1e-15));
        assert!(close(kernel(1e-9, 0.5, 0.5), 0.5 * 2f64.ln(), 1e-8));
        assert!(close(kernel(1.0, 0.5, 0.5), 0.25, 1e-15));
        // relative accuracy near u = 1
        let v = 1e-12;
        assert!(close(kernel(2.0, 1.0 - v, v) / v, 1.0, 1e-9));
    }

    #[test]
    fn delta_quadrature_examples() {
        let u = Distribution::uniform();
        assert!(close(delta_quadrature(&u, 0.0).unwrap().value, 0.25, 1e-12));
        let e = Distribution::exponential();
        assert!(close(delta_quadrature(&e, 0.0).unwrap().value, PI * PI / 6.0 - 1.0, 1e-11));
        let nl = Distribution::negative_lomax(2.0).unwrap();
        assert!(matches!(delta_quadrature(&nl, -0.6), Err(Error::Divergent { .. })));
    }

    #[test]
    fn delta_quantile_examples() {
        let u = Distribution::uniform();
        assert!(close(delta_quantile(&u, 1.0).unwrap().value, 1.0 / 6.0, 1e-10));
        let l = Distribution::logistic();
        assert!(close(delta_quantile(&l, 0.0).unwrap().value, PI * PI / 6.0, 1e-9));
        let g = Distribution::gumbel();
        assert!(close(delta_quantile(&g, 1.0).unwrap().value, 2f64.ln(), 1e-9));
    }

    #[test]
    fn nabla_quadrature_examples() {
        let e = Distribution::exponential();
        assert!(close(nabla_quadrature(&e, 0.0).unwrap().value, PI * PI / 6.0 - 1.0, 1e-11));
        assert!(close(nabla_quadrature(&e, 1.0).unwrap().value, PI * PI / 3.0 - 2.5, 1e-11));
        let ne = Distribution::negative_exponential();
        assert!(close(nabla_quadrature(&ne, 1.0).unwrap().value, 1.5, 1e-11));
    }

    #[test]
    fn plugin_examples() {
        let two = EmpiricalSample::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(delta_plugin(&two, 1.0).unwrap().value, 0.25);
        assert!(close(delta_plugin(&two, 2.0).unwrap().value, 3.0 / 16.0, 1e-15));
        assert!(close(nabla_plugin(&two, 1.0).unwrap().value, (2.0 * 2f64.ln() - 0.5) / 2.0, 1e-15));
        let x = Distribution::gumbel().sample(500, 3).unwrap();
        assert!(close(nabla_plugin(&x, 0.0).unwrap().value, delta_plugin(&x, 0.0).unwrap().value, 1e-14));
    }

    #[test]
    fn profile_examples() {
        let e = Distribution::exponential();
        let p = entropy_profile(&e, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(p.delta_monotone && p.nabla_monotone);
        let d: Vec<f64> = p.grid.iter().map(|g| g.delta.as_ref().unwrap().value).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]));
        let u = Distribution::uniform();
        let p = entropy_profile(&u, &[-0.999]).unwrap();
        assert!((p.grid[0].delta.as_ref().unwrap().value - 0.5).abs() < 1e-3);
        assert!(entropy_profile(&u, &[1.0, 0.5]).is_err());
    }
}
