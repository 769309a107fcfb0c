//! Monte Carlo simulation of relevation processes.
//!
//! A unit with lifetime `X` fails; with probability `F̄(X)^s` a spare that
//! has aged as long as the first unit takes over, contributing the residual
//! lifetime `Y_s` of `X` beyond `X`. Then
//!
//! ```text
//! E[Y_s] = Δ_s(-X)        P[X + Y_s > t] = F̄(t) (1 + (1 - F̄(t)^s)/s)
//! ```
//!
//! Chaining always-present spares gives the failure times `T_n` with
//! `F̄(T_{n+1}) = V F̄(T_n)`, `E[T_n] = Σ_{k<n} E_k(X)` and
//! `P[T_n > t] = F̄(t) Σ_{k<n} (-log F̄(t))^k / k!`.
//!
//! Trials run in fixed chunks, each with its own ChaCha8 stream derived from
//! `(seed, chunk index)`, and chunk sums are merged in order, so results do
//! not depend on the number of worker threads.

use crate::distributions::Distribution;
use crate::duality::bnb_pmf;
use crate::entropy;
use crate::error::{domain, Result};
use crate::risk::relevation_risk;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution as _};
use rayon::prelude::*;
use serde::Serialize;

const CHUNK: usize = 1 << 16;

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK)).map(|c| (c, CHUNK.min(n - c * CHUNK))).collect()
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

/// Sample mean of a simulated quantity against its expected value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub n_trials: usize,
    pub mean: f64,
    pub std_error: f64,
    pub target: Option<f64>,
    pub z_score: Option<f64>,
}

impl SimulationResult {
    fn from_sums(n: usize, sum: f64, sum_sq: f64, target: Option<f64>) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        let std_error = (var / nf).sqrt();
        let z_score = target.map(|t| (mean - t) / std_error);
        SimulationResult { n_trials: n, mean, std_error, target, z_score }
    }

    /// `|z| < bound`, or true when there is no target.
    pub fn within(&self, bound: f64) -> bool {
        self.z_score.is_none_or(|z| z.abs() < bound)
    }
}

/// Empirical against analytic survival at one time point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalPoint {
    pub t: f64,
    pub empirical: f64,
    pub analytic: f64,
    /// Four binomial standard deviations at the analytic value.
    pub band: f64,
    pub within: bool,
}

/// An empirical survival curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub n_trials: usize,
    pub points: Vec<SurvivalPoint>,
}

impl SurvivalCurve {
    fn build(n: usize, grid: &[f64], counts: &[u64], analytic: impl Fn(f64) -> f64) -> Self {
        let nf = n as f64;
        let points = grid
            .iter()
            .zip(counts)
            .map(|(&t, &c)| {
                let p = analytic(t);
                let empirical = c as f64 / nf;
                // a floor of one trial keeps degenerate points (p = 0 or 1) testable
                let band = (4.0 * (p * (1.0 - p) / nf).sqrt()).max(1.0 / nf);
                SurvivalPoint { t, empirical, analytic: p, band, within: (empirical - p).abs() <= band }
            })
            .collect();
        SurvivalCurve { n_trials: n, points }
    }

    pub fn all_within(&self) -> bool {
        self.points.iter().all(|p| p.within)
    }
}

fn check_nonnegative(d: &Distribution) -> Result<()> {
    if d.support().0 < 0.0 {
        return Err(domain(format!("relevation needs a lifetime on [0, ∞), got {}", d.label())));
    }
    Ok(())
}

fn check_trials(n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(format!("need at least 2 trials, got {n}")));
    }
    Ok(())
}

// One draw of (X, Y_s); X is drawn through its survival value so that F̄(X)
// is exact.
fn draw_pair(d: &Distribution, s: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let v0 = uniform(rng);
    let x = d.quantile_upper(v0);
    let keep = uniform(rng);
    let v = uniform(rng);
    let y = if keep <= v0.powf(s) { d.quantile_upper(v * v0) - x } else { 0.0 };
    (x, y)
}

fn check_order_positive(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain(format!("the relevation model needs s > 0, got {s}")));
    }
    Ok(())
}

/// Simulate `Y_s` and compare its mean with `Δ_s(-X)`.
pub fn simulate_ys(d: &Distribution, s: f64, n: usize, seed: u64) -> Result<SimulationResult> {
    check_nonnegative(d)?;
    check_order_positive(s)?;
    check_trials(n)?;
    let target = entropy::delta_bar(d, s)?.value;
    let parts: Vec<(f64, f64)> = chunks(n)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..len {
                let (_, y) = draw_pair(d, s, &mut rng);
                sum += y;
                sq += y * y;
            }
            (sum, sq)
        })
        .collect();
    let (sum, sq) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SimulationResult::from_sums(n, sum, sq, Some(target)))
}

/// `F̄(t) (1 + (1 - F̄(t)^s)/s)`, the survival function of `X + Y_s`.
pub fn total_lifetime_survival(d: &Distribution, s: f64, t: f64) -> f64 {
    let sf = d.sf(t);
    sf * (1.0 - crate::specfun::expm1_quot(s, sf.ln()))
}

/// Empirical survival of `X + Y_s` on `t_grid` against the analytic curve.
pub fn simulate_total_lifetime_survival(
    d: &Distribution,
    s: f64,
    t_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<SurvivalCurve> {
    check_nonnegative(d)?;
    check_order_positive(s)?;
    check_trials(n)?;
    let counts = count_exceedances(n, seed, t_grid, |rng| {
        let (x, y) = draw_pair(d, s, rng);
        x + y
    });
    Ok(SurvivalCurve::build(n, t_grid, &counts, |t| total_lifetime_survival(d, s, t)))
}

fn count_exceedances<F>(n: usize, seed: u64, grid: &[f64], draw: F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts: Vec<Vec<u64>> = chunks(n)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut counts = vec![0u64; grid.len()];
            for _ in 0..len {
                let z = draw(&mut rng);
                for (k, &t) in grid.iter().enumerate() {
                    if z > t {
                        counts[k] += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; grid.len()];
    for part in parts {
        for (a, b) in total.iter_mut().zip(part) {
            *a += b;
        }
    }
    total
}

// T_n by n successive relevations
fn draw_failure_time(d: &Distribution, units: u32, rng: &mut ChaCha8Rng) -> f64 {
    let mut survival = 1.0;
    for _ in 0..units {
        survival *= uniform(rng);
    }
    d.quantile_upper(survival)
}

/// Simulate the `n_units`-th failure time and compare with `Σ_{k<n} E_k(X)`.
pub fn simulate_tn(d: &Distribution, n_units: u32, n: usize, seed: u64) -> Result<SimulationResult> {
    check_nonnegative(d)?;
    check_trials(n)?;
    if n_units == 0 {
        return Err(domain("need at least one unit"));
    }
    let target = relevation_risk(d, n_units)?.value;
    let parts: Vec<(f64, f64)> = chunks(n)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..len {
                let t = draw_failure_time(d, n_units, &mut rng);
                sum += t;
                sq += t * t;
            }
            (sum, sq)
        })
        .collect();
    let (sum, sq) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SimulationResult::from_sums(n, sum, sq, Some(target)))
}

/// `P[T_n > t] = F̄(t) Σ_{k<n} (-log F̄(t))^k / k!`.
pub fn failure_time_survival(d: &Distribution, n_units: u32, t: f64) -> f64 {
    let sf = d.sf(t);
    if sf <= 0.0 {
        return 0.0;
    }
    let l = -sf.ln();
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n_units {
        term *= l / k as f64;
        sum += term;
    }
    sf * sum
}

/// Empirical survival of `T_n` on `t_grid` against the analytic curve.
pub fn simulate_tn_survival(
    d: &Distribution,
    n_units: u32,
    t_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<SurvivalCurve> {
    check_nonnegative(d)?;
    check_trials(n)?;
    if n_units == 0 {
        return Err(domain("need at least one unit"));
    }
    let counts = count_exceedances(n, seed, t_grid, |rng| draw_failure_time(d, n_units, rng));
    Ok(SurvivalCurve::build(n, t_grid, &counts, |t| failure_time_survival(d, n_units, t)))
}

/// Sample frequencies of `N_s` with a chi-square comparison to its pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub s: f64,
    pub n_trials: usize,
    /// `counts[k]` draws equal to `k`, for `k < counts.len()`.
    pub counts: Vec<u64>,
    /// Draws at or beyond `counts.len()`.
    pub overflow: u64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
}

impl FrequencyTable {
    pub fn frequency(&self, k: usize) -> f64 {
        self.counts[k] as f64 / self.n_trials as f64
    }

    /// Empirical `P[N >= k]`.
    pub fn tail(&self, k: usize) -> f64 {
        let below: u64 = self.counts.iter().take(k).sum();
        1.0 - below as f64 / self.n_trials as f64
    }

    /// Chi-square statistic below its mean plus four standard deviations.
    pub fn consistent(&self) -> bool {
        let df = self.degrees_of_freedom as f64;
        self.chi_square <= df + 4.0 * (2.0 * df).sqrt()
    }
}

/// Draw `N_s = G_A` for `s ∈ (-1, 0)`: `A ~ Beta(-s, 1+s)` and, given `A`, a
/// geometric count with `P[G = n] = (1 - A) A^n`.
pub fn sample_ns(s: f64, n: usize, seed: u64) -> Result<FrequencyTable> {
    if !(s > -1.0 && s < 0.0) {
        return Err(domain(format!("N_s is defined for s in (-1, 0), got {s}")));
    }
    check_trials(n)?;
    let u = -s;
    let beta = Beta::new(u, 1.0 - u).map_err(|e| domain(e.to_string()))?;
    const BINS: usize = 64;
    let parts: Vec<(Vec<u64>, u64)> = chunks(n)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut counts = vec![0u64; BINS];
            let mut overflow = 0;
            for _ in 0..len {
                let a: f64 = beta.sample(&mut rng);
                let v = uniform(&mut rng);
                let g = if a <= 0.0 { 0.0 } else { (v.ln() / a.ln()).floor() };
                if g < BINS as f64 {
                    counts[g as usize] += 1;
                } else {
                    overflow += 1;
                }
            }
            (counts, overflow)
        })
        .collect();
    let mut counts = vec![0u64; BINS];
    let mut overflow = 0;
    for (part, o) in parts {
        for (a, b) in counts.iter_mut().zip(part) {
            *a += b;
        }
        overflow += o;
    }
    // chi-square over bins with expected count >= 5, the rest pooled
    let nf = n as f64;
    let mut chi = 0.0;
    let mut df = 0usize;
    let mut pooled_obs = overflow as f64;
    let mut pooled_exp = 1.0;
    for (k, &c) in counts.iter().enumerate() {
        let p = bnb_pmf(s, k as u64)?;
        pooled_exp -= p;
        let e = p * nf;
        if e >= 5.0 {
            chi += (c as f64 - e).powi(2) / e;
            df += 1;
        } else {
            pooled_obs += c as f64;
            pooled_exp += p;
        }
    }
    let e = pooled_exp * nf;
    if e > 0.0 {
        chi += (pooled_obs - e).powi(2) / e;
        df += 1;
    }
    Ok(FrequencyTable {
        s,
        n_trials: n,
        counts,
        overflow,
        chi_square: chi,
        degrees_of_freedom: df.saturating_sub(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_ys_mean() {
        let d = Distribution::exponential();
        let r = simulate_ys(&d, 1.0, 200_000, 7).unwrap();
        assert!((r.target.unwrap() - 0.5).abs() < 1e-14);
        assert!(r.within(4.0), "{r:?}");
    }

    #[test]
    fn reproducible() {
        let d = Distribution::uniform();
        let a = simulate_ys(&d, 1.0, 100_000, 42).unwrap();
        let b = simulate_ys(&d, 1.0, 100_000, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_ys(&d, 1.0, 100_000, 43).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn survival_formula_values() {
        let d = Distribution::exponential();
        let e = (-1f64).exp();
        assert!((total_lifetime_survival(&d, 1.0, 1.0) - e * (2.0 - e)).abs() < 1e-15);
        assert_eq!(total_lifetime_survival(&d, 1.0, 0.0), 1.0);
        assert!((failure_time_survival(&d, 2, 1.0) - 2.0 * e).abs() < 1e-15);
    }

    #[test]
    fn failure_times() {
        let d = Distribution::exponential();
        let r = simulate_tn(&d, 3, 200_000, 3).unwrap();
        assert!((r.target.unwrap() - 3.0).abs() < 1e-9);
        assert!(r.within(4.0), "{r:?}");
        let c = simulate_tn_survival(&d, 2, &[0.5, 1.0, 2.0, 4.0], 100_000, 5).unwrap();
        assert!(c.all_within(), "{c:?}");
    }

    #[test]
    fn bnb_frequencies() {
        let t = sample_ns(-0.5, 200_000, 11).unwrap();
        assert!((t.frequency(0) - 0.5).abs() < 0.005);
        assert!((t.frequency(1) - 0.125).abs() < 0.004);
        assert!(t.consistent(), "{t:?}");
        let heavy = sample_ns(-0.9, 200_000, 12).unwrap();
        let light = sample_ns(-0.1, 200_000, 13).unwrap();
        for k in [1, 2, 5, 10] {
            assert!(heavy.tail(k) > light.tail(k));
        }
    }

    #[test]
    fn rejects_signed_support() {
        assert!(simulate_ys(&Distribution::logistic(), 1.0, 100, 1).is_err());
        assert!(simulate_ys(&Distribution::exponential(), -0.5, 100, 1).is_err());
    }
}
