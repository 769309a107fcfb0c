//! Aggregated numerical checks.
//!
//! Each numbered criterion compares two independent routes or a route and a
//! known constant at a fixed tolerance. `Quick` runs the deterministic checks
//! (criteria 1 to 7); `Full` adds the Monte Carlo and estimator checks
//! (8 and 9), the property suites and the figure tables.

use crate::distributions::{Distribution, EmpiricalSample, Family};
use crate::duality::{self, bnb_partial_sum};
use crate::entropy::{self, delta_plugin, delta_quadrature, nabla_quadrature};
use crate::error::{Error, Result};
use crate::extremal::{self, Regime};
use crate::relevation;
use crate::risk::{self, DistortionFunction, Which};
use crate::skewness::{self, DiamondKind, RhoKind};
use crate::specfun::{psi, psi1, EULER_GAMMA};
use crate::roots::bisect;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// How much to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
    pub seconds: f64,
}

/// Outcome of a self-test run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub figures: Vec<PathBuf>,
}

fn timed<F: FnOnce() -> Result<(bool, Value)>>(name: &str, f: F) -> Check {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    Check { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Orders used by the closed-form table.
pub const TABLE_ORDERS: [f64; 7] = [-0.4, -0.1, 0.0, 0.5, 1.0, 2.0, 5.0];

/// Quadrature against closed forms for every catalog law and order in
/// [`TABLE_ORDERS`], skipping divergent pairs and those without a usable
/// closed form; 1e-7 relative.
pub fn criterion_1() -> Check {
    timed("closed-form table", || {
        let cases: Vec<(Distribution, f64)> = Distribution::catalog()
            .into_iter()
            .flat_map(|d| TABLE_ORDERS.iter().map(move |&s| (d, s)))
            .collect();
        let rows: Vec<Result<Option<(String, f64, f64, f64)>>> = cases
            .par_iter()
            .map(|&(d, s)| {
                let closed_d = match d.closed_delta(s) {
                    Some(Ok(v)) => v,
                    Some(Err(Error::Divergent { .. })) => return Ok(None),
                    Some(Err(e)) => return Err(e),
                    None => return Ok(None),
                };
                let Some(closed_n) = d.closed_nabla(s) else { return Ok(None) };
                let closed_n = closed_n?;
                let qd = delta_quadrature(&d, s)?.value;
                let qn = nabla_quadrature(&d, s)?.value;
                Ok(Some((d.label(), s, rel_err(qd, closed_d), rel_err(qn, closed_n))))
            })
            .collect();
        let mut worst = 0.0f64;
        let mut worst_case = Value::Null;
        let mut compared = 0;
        let mut skipped = 0;
        for r in rows {
            match r? {
                Some((label, s, ed, en)) => {
                    compared += 1;
                    let e = ed.max(en);
                    if e > worst {
                        worst = e;
                        worst_case = json!({ "law": label, "s": s, "delta_rel": ed, "nabla_rel": en });
                    }
                }
                None => skipped += 1,
            }
        }
        Ok((
            worst <= 1e-7,
            json!({ "compared": compared, "skipped": skipped, "worst_rel": worst, "worst": worst_case }),
        ))
    })
}

/// Five Δ_0 anchors by quadrature to 1e-9.
pub fn criterion_2() -> Check {
    timed("cumulative entropy constants", || {
        let z2 = PI * PI / 6.0;
        let anchors = [
            ("uniform", Distribution::uniform(), 0.25),
            ("exponential", Distribution::exponential(), z2 - 1.0),
            ("negative_exponential", Distribution::negative_exponential(), 1.0),
            ("logistic", Distribution::logistic(), z2),
            ("gumbel", Distribution::gumbel(), 1.0),
        ];
        let mut ok = true;
        let mut rows = Vec::new();
        for (name, d, expected) in anchors {
            let q = delta_quadrature(&d, 0.0)?.value;
            let c = entropy::delta(&d, 0.0)?.value;
            let err = (q - expected).abs().max((c - expected).abs());
            ok &= err <= 1e-9;
            rows.push(json!({ "law": name, "quadrature": q, "closed": c, "expected": expected, "abs_err": err }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

/// Order series in both directions against direct quadrature, the mass of
/// the randomization law, and the binomial involution.
pub fn criterion_3() -> Check {
    timed("duality", || {
        let laws = [
            Distribution::power_uniform(2.0)?,
            Distribution::exponential(),
            Distribution::logistic(),
            Distribution::lomax(4.0)?,
        ];
        let orders = [-0.3, 0.7, 2.5];
        let cases: Vec<(Distribution, f64)> =
            laws.iter().flat_map(|&d| orders.iter().map(move |&s| (d, s))).collect();
        let errs: Vec<Result<(String, f64, f64, f64)>> = cases
            .par_iter()
            .map(|&(d, s)| {
                let n_series = duality::nabla_from_delta_series(&d, s, 1e-10)?.value;
                let d_series = duality::delta_from_nabla_series(&d, s, 1e-10)?.value;
                let n_direct = nabla_quadrature(&d, s)?.value;
                let d_direct = delta_quadrature(&d, s)?.value;
                Ok((d.label(), s, (n_series - n_direct).abs(), (d_series - d_direct).abs()))
            })
            .collect();
        let mut series_ok = true;
        let mut rows = Vec::new();
        for r in errs {
            let (law, s, en, ed) = r?;
            series_ok &= en <= 1e-6 && ed <= 1e-6;
            rows.push(json!({ "law": law, "s": s, "nabla_abs_err": en, "delta_abs_err": ed }));
        }
        let (sum, tail) = bnb_partial_sum(-0.5, 1_000_000)?;
        let mass_ok = (sum + tail - 1.0).abs() <= 1e-4;
        let e = Distribution::exponential();
        let v: Vec<f64> = (0..=12).map(|n| entropy::delta(&e, n as f64).map(|x| x.value)).collect::<Result<_>>()?;
        let back = duality::binomial_involution(&duality::binomial_involution(&v, 12)?, 12)?;
        let inv_err = v.iter().zip(&back).map(|(a, b)| rel_err(*b, *a)).fold(0.0, f64::max);
        let inv_ok = inv_err <= 1e-10;
        Ok((
            series_ok && mass_ok && inv_ok,
            json!({
                "series": rows,
                "bnb_partial_sum": sum, "bnb_tail_bound": tail, "bnb_total": sum + tail,
                "involution_rel_err": inv_err,
            }),
        ))
    })
}

/// Uniform risk formulas and the shape diagnostics of the distortions.
pub fn criterion_4() -> Check {
    timed("risk measures", || {
        let mut ok = true;
        let mut formulas = Vec::new();
        for &(a, l, s) in &[(0.0, 1.0, 0.0), (2.0, 3.0, 1.0), (-1.0, 0.5, 2.5)] {
            let d = Distribution::uniform().affine(l, a)?;
            let rd = risk::risk_delta(&d, s)?.value;
            let rn = risk::risk_nabla(&d, s)?.value;
            let ed = a + l * (s + 3.0) / (2.0 * (s + 2.0));
            let en = a + l * (2.0 * s + 3.0) / (2.0 * (s + 2.0));
            let err = (rd - ed).abs().max((rn - en).abs());
            ok &= err <= 1e-9;
            formulas.push(json!({ "a": a, "L": l, "s": s, "delta": rd, "nabla": rn, "abs_err": err }));
        }
        let mut shapes = Vec::new();
        for &s in &[-0.5, 0.5, 1.0, 3.0] {
            for f in [DistortionFunction::h(s)?, DistortionFunction::k(s)?] {
                let r = risk::coherence_diagnostics(&f, 10_000)?;
                ok &= r.increasing && r.concave;
                shapes.push(json!({ "distortion": f, "increasing": r.increasing, "concave": r.concave }));
            }
        }
        let non_monotone = !risk::coherence_diagnostics(&DistortionFunction::h_tilde(0.5)?, 10_000)?.increasing;
        let non_concave = !risk::coherence_diagnostics(&DistortionFunction::h_tilde(2.0)?, 10_000)?.concave;
        ok &= non_monotone && non_concave;
        Ok((
            ok,
            json!({
                "uniform_formulas": formulas, "coherent_shapes": shapes,
                "h_tilde_0.5_monotonicity_violation": non_monotone,
                "h_tilde_2_concavity_violation": non_concave,
            }),
        ))
    })
}

fn random_member(rng: &mut ChaCha8Rng, regime: Regime) -> Result<Distribution> {
    let pick = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let family = match regime {
        Regime::Positive => match rng.random_range(0..5) {
            0 => Family::PowerUniform { beta: pick(rng, 0.1, 10.0) },
            1 => Family::ReflectedPower { beta: pick(rng, 0.1, 10.0) },
            2 => Family::Exponential,
            3 => Family::Lomax { beta: pick(rng, 1.5, 10.0) },
            _ => Family::Frechet { beta: pick(rng, 1.5, 10.0) },
        },
        Regime::L2 => match rng.random_range(0..9) {
            0 => Family::PowerUniform { beta: pick(rng, 0.1, 10.0) },
            1 => Family::ReflectedPower { beta: pick(rng, 0.1, 10.0) },
            2 => Family::Exponential,
            3 => Family::Lomax { beta: pick(rng, 2.5, 10.0) },
            4 => Family::NegativeLomax { beta: pick(rng, 2.5, 10.0) },
            5 => Family::Frechet { beta: pick(rng, 2.5, 10.0) },
            6 => Family::ReverseWeibull { beta: pick(rng, 0.5, 5.0) },
            7 => Family::Gumbel,
            _ => Family::Logistic,
        },
        Regime::Symmetric => match rng.random_range(0..4) {
            0 => Family::Logistic,
            1 => Family::Normal,
            2 => Family::SLogistic { s: pick(rng, 0.1, 3.0), beta: pick(rng, 0.3, 1.0) },
            _ => Family::SLogistic { s: pick(rng, -0.45, -0.05), beta: 1.0 },
        },
    };
    let d = Distribution::new(family)?;
    let a = pick(rng, 0.1, 10.0);
    let b = match regime {
        Regime::Positive => pick(rng, 0.0, 5.0),
        _ => pick(rng, -5.0, 5.0),
    };
    let d = d.affine(a, b)?;
    Ok(if regime != Regime::Positive && rng.random::<bool>() { d.negate() } else { d })
}

fn random_order(rng: &mut ChaCha8Rng, d: &Distribution, regime: Regime) -> f64 {
    let lower = match regime {
        Regime::Positive => -0.9,
        _ => -0.45,
    };
    let floor = d.finiteness_threshold().unwrap_or(-1.0).max(lower);
    floor + 0.05 + (4.0 - floor) * rng.random::<f64>()
}

/// Attainment of the finite-variance and symmetric bounds, and no random
/// instance above any bound.
pub fn criterion_5() -> Check {
    timed("entropy ranges", || {
        let mut ok = true;
        let mut attained = Vec::new();
        for &s in &[0.0, 1.0, 2.0, -0.3] {
            let b = extremal::bound_l2(s)?;
            let m = b.maximizer.expect("attained");
            let v = delta_quadrature(&m, s)?.value / m.std_dev().expect("finite variance");
            ok &= (v - b.upper).abs() <= 1e-6;
            attained.push(json!({ "regime": "l2", "s": s, "upper": b.upper, "value": v }));
        }
        for &s in &[0.0, 0.5, 1.0, 2.0] {
            let b = extremal::bound_symmetric(s)?;
            let m = b.maximizer.expect("attained").affine(2.5, 0.0)?;
            let v = delta_quadrature(&m, s)?.value / m.std_dev().expect("finite variance");
            ok &= (v - b.upper).abs() <= 1e-6;
            attained.push(json!({ "regime": "symmetric", "s": s, "upper": b.upper, "value": v }));
        }
        let trials: Vec<Result<(f64, Value)>> = (0..200u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i);
                let regime = [Regime::Positive, Regime::L2, Regime::Symmetric][(i % 3) as usize];
                let d = random_member(&mut rng, regime)?;
                let s = random_order(&mut rng, &d, regime);
                let v = extremal::normalized_entropy(&d, s, regime)?;
                let upper = extremal::bound(regime, s)?.upper;
                Ok((v - upper, json!({ "law": d.label(), "s": s, "regime": regime, "value": v, "upper": upper })))
            })
            .collect();
        let mut worst = f64::NEG_INFINITY;
        let mut worst_case = Value::Null;
        for t in trials {
            let (excess, case) = t?;
            if excess > worst {
                worst = excess;
                worst_case = case;
            }
        }
        ok &= worst <= 1e-9;
        Ok((ok, json!({ "attainment": attained, "max_excess": worst, "closest": worst_case })))
    })
}

/// Extremum and root of the Gamma gap, and the Gaussian cumulative entropy.
pub fn criterion_6() -> Check {
    timed("gamma gap and gaussian constants", || {
        let (arg, max) = extremal::gamma_gap_argmax();
        let root = extremal::gamma_gap_root()?;
        let gauss = extremal::gaussian_cumulative_entropy()?;
        let bound = PI / (2.0 * 3f64.sqrt());
        let ok = (arg - 0.4671).abs() <= 5e-4
            && (max - 0.0172).abs() <= 5e-4
            && (root - (-1.6609)).abs() <= 1e-3
            && (gauss - 0.9033).abs() <= 5e-4
            && gauss < bound;
        Ok((
            ok,
            json!({ "argmax": arg, "max": max, "root": root, "gaussian_delta0": gauss, "logistic_bound": bound }),
        ))
    })
}

/// Betas for the power-uniform curves: 20 points, log-spaced on [1e-2, 1e2].
pub fn power_uniform_betas() -> Vec<f64> {
    (0..20).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0)).collect()
}

/// Betas for the negative-Lomax curves: 20 points on (1, 100], log-spaced in β - 1.
pub fn negative_lomax_betas() -> Vec<f64> {
    (0..20).map(|i| 1.0 + 10f64.powf(-1.3 + 3.3 * i as f64 / 19.0)).collect()
}

/// The exponential skewness constants by the root finder and by their
/// defining equations, and monotone parameter curves.
pub fn criterion_7() -> Check {
    timed("skewness constants and curves", || {
        let m = skewness::rho(&Distribution::negative_exponential(), RhoKind::Rho, 1e-12)?;
        let m_bar = skewness::rho(&Distribution::negative_exponential(), RhoKind::RhoBar, 1e-12)?;
        // (s - 1)(ψ(s+2) + γ) + 1 = 0 on (-1, 0) and (s+1)² ψ'(s+2) = 1 on (0, 1)
        let m_eq = bisect(|s| (s - 1.0) * (psi(s + 2.0) + EULER_GAMMA) + 1.0, -0.99, -0.01, 1e-14, 200)?;
        let m_bar_eq = bisect(|s| (s + 1.0).powi(2) * psi1(s + 2.0) - 1.0, 0.01, 0.99, 1e-14, 200)?;
        let constants_ok = (m - (-0.365952)).abs() <= 1e-5
            && (m_bar - 0.389592).abs() <= 1e-5
            && (m - m_eq).abs() <= 1e-8
            && (m_bar - m_bar_eq).abs() <= 1e-8;
        let curves = [
            skewness::rho_curve_power_uniform(RhoKind::Rho, &power_uniform_betas()),
            skewness::rho_curve_power_uniform(RhoKind::RhoBar, &power_uniform_betas()),
            skewness::rho_curve_negative_lomax(RhoKind::Rho, &negative_lomax_betas()),
            skewness::rho_curve_negative_lomax(RhoKind::RhoBar, &negative_lomax_betas()),
        ];
        let mut curves_ok = true;
        let mut summary = Vec::new();
        for c in &curves {
            let finite = c.points.iter().filter(|p| p.value.is_ok()).count();
            curves_ok &= c.monotone && finite == 20;
            summary.push(json!({
                "family": c.family, "kind": c.kind, "monotone": c.monotone, "finite_points": finite,
                "first": c.points.first().map(|p| p.value.clone().unwrap_or(f64::NAN)),
                "last": c.points.last().map(|p| p.value.clone().unwrap_or(f64::NAN)),
            }));
        }
        Ok((
            constants_ok && curves_ok,
            json!({
                "rho_negative_exponential": m, "rho_bar_negative_exponential": m_bar,
                "defining_equation_roots": [m_eq, m_bar_eq], "curves": summary,
            }),
        ))
    })
}

/// Simulated relevation lifetimes against entropies and survival formulas.
pub fn criterion_8() -> Check {
    timed("relevation simulation", || {
        let laws = [Distribution::exponential(), Distribution::uniform(), Distribution::lomax(4.0)?];
        let n = 1_000_000;
        let mut ok = true;
        let mut rows = Vec::new();
        for (i, d) in laws.iter().enumerate() {
            for (j, &s) in [1.0, 2.0].iter().enumerate() {
                let seed = 1000 + 10 * i as u64 + j as u64;
                let r = relevation::simulate_ys(d, s, n, seed)?;
                let q = |p: f64| d.quantile(p);
                let grid: Vec<f64> = (1..=10).map(|k| q(k as f64 / 11.0) * 1.5).collect();
                let c = relevation::simulate_total_lifetime_survival(d, s, &grid, n, seed + 500)?;
                ok &= r.within(4.0) && c.all_within();
                let worst = c.points.iter().map(|p| (p.empirical - p.analytic).abs() / p.band).fold(0.0, f64::max);
                rows.push(json!({
                    "law": d.label(), "s": s, "mean": r.mean, "target": r.target,
                    "z": r.z_score, "survival_worst_band_fraction": worst,
                }));
            }
        }
        let t3 = relevation::simulate_tn(&Distribution::exponential(), 3, n, 77)?;
        ok &= t3.within(4.0) && (t3.target.unwrap_or(f64::NAN) - 3.0).abs() < 1e-9;
        Ok((ok, json!({ "ys": rows, "t3": t3 })))
    })
}

/// Plug-in consistency on exponential samples and the two-point value.
pub fn criterion_9() -> Check {
    timed("plug-in estimator", || {
        let target = PI * PI / 6.0 - 1.0;
        let e = Distribution::exponential();
        let estimates: Vec<f64> = (0..100u64)
            .into_par_iter()
            .map(|i| Ok(delta_plugin(&e.sample(100_000, 9000 + i)?, 0.0)?.value))
            .collect::<Result<_>>()?;
        let mean = estimates.iter().sum::<f64>() / 100.0;
        let sd = (estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
        let first = estimates[0];
        let band_ok = (first - target).abs() <= 4.0 * sd && (mean - target).abs() <= 4.0 * sd / 10.0;
        let two_point = delta_plugin(&EmpiricalSample::new(vec![0.0, 1.0])?, 1.0)?.value;
        Ok((
            band_ok && two_point == 0.25,
            json!({
                "target": target, "first_estimate": first, "replicate_mean": mean,
                "replicate_sd": sd, "two_point_s1": two_point,
            }),
        ))
    })
}

/// The numbered criterion `n` in 1..=9.
pub fn criterion(n: u32) -> Option<Check> {
    Some(match n {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        _ => return None,
    })
}

/// Invariants beyond the numbered criteria.
pub fn property_checks() -> Vec<Check> {
    vec![
        timed("profiles are monotone in the order", || {
            let grid = [-0.3, 0.0, 0.5, 1.0, 2.0, 4.0];
            let mut ok = true;
            let mut bad = Vec::new();
            for d in Distribution::catalog() {
                let p = entropy::entropy_profile(&d, &grid)?;
                if !(p.delta_monotone && p.nabla_monotone) {
                    ok = false;
                    bad.push(d.label());
                }
            }
            Ok((ok, json!({ "non_monotone": bad })))
        }),
        timed("distortion risk equals mean plus entropy of -X", || {
            // risk_delta / risk_nabla fail internally on disagreement
            let mut worst = 0.0f64;
            for d in Distribution::catalog() {
                for &s in &[0.5, 2.0] {
                    for r in [risk::risk_delta(&d, s)?, risk::risk_nabla(&d, s)?] {
                        worst = worst.max((r.value - r.cross_check.unwrap_or(r.value)).abs());
                    }
                }
            }
            Ok((worst <= 1e-7, json!({ "max_abs_gap": worst })))
        }),
        timed("tail-mean representation", || {
            let laws = [
                Distribution::uniform(),
                Distribution::exponential(),
                Distribution::logistic(),
                Distribution::lomax(4.0)?,
                Distribution::gumbel(),
            ];
            let mut worst = 0.0f64;
            for d in &laws {
                for &s in &[0.0, 0.5, 2.0] {
                    let a = risk::mrl_representation(d, s, Which::Delta)?.value;
                    let b = risk::risk_delta(d, s)?.value;
                    let c = risk::mrl_representation(d, s, Which::Nabla)?.value;
                    let e = risk::risk_nabla(d, s)?.value;
                    worst = worst.max(rel_err(a, b)).max(rel_err(c, e));
                }
            }
            Ok((worst <= 1e-7, json!({ "max_rel_gap": worst })))
        }),
        timed("risk families squeezed between mean and maximum", || {
            let d = Distribution::power_uniform(2.0)?;
            let mean = d.mean();
            let max = d.support().1;
            let grid = [-0.5, 0.0, 0.5, 1.0, 3.0, 10.0];
            let mut ok = true;
            let mut last = (f64::INFINITY, f64::NEG_INFINITY);
            for &s in &grid {
                let rd = risk::risk_delta(&d, s)?.value;
                let rn = risk::risk_nabla(&d, s)?.value;
                ok &= rd <= last.0 && rn >= last.1;
                ok &= rd >= mean && rd <= max && rn >= mean && rn <= max;
                last = (rd, rn);
            }
            Ok((ok, json!({ "mean": mean, "max": max })))
        }),
        timed("uniform risks without stochastic order", || {
            // X on (b, b+M) and Y on (a, a+L) with b > a and L = M + 2(b - a)
            let (a, b, m) = (0.0, 1.0, 1.0);
            let l = m + 2.0 * (b - a);
            let x = Distribution::uniform().affine(m, b)?;
            let y = Distribution::uniform().affine(l, a)?;
            let mut ok = !risk::stochastically_ordered(&x, &y) && !risk::stochastically_ordered(&y, &x);
            for &s in &[0.0, 1.0, 2.0] {
                ok &= risk::risk_delta(&x, s)?.value < risk::risk_delta(&y, s)?.value;
                ok &= risk::risk_nabla(&x, s)?.value < risk::risk_nabla(&y, s)?.value;
            }
            Ok((ok, Value::Null))
        }),
        timed("risk axioms", || {
            let fast = Distribution::exponential().affine(0.5, 0.0)?;
            let slow = Distribution::exponential();
            let reports = risk::risk_axioms_check(&fast, &slow, 0.5, 2.0, 3.0)?;
            let u = Distribution::uniform();
            let reports2 = risk::risk_axioms_check(&u, &u.affine(2.0, 0.0)?, 1.0, 3.0, 0.0)?;
            let ok = reports.iter().chain(&reports2).all(|r| r.affine_ok && r.monotone && r.comonotone_ok);
            Ok((ok, json!({ "exponential": reports, "uniform": reports2 })))
        }),
        timed("residual entropy ordered along hazard-ordered exponentials", || {
            let fast = Distribution::exponential().affine(0.5, 0.0)?;
            let slow = Distribution::exponential();
            let mut ok = true;
            for &s in &[-0.5, 0.0, 0.5, 1.0, 3.0] {
                ok &= entropy::delta_bar(&fast, s)?.value <= entropy::delta_bar(&slow, s)?.value;
            }
            Ok((ok, Value::Null))
        }),
        timed("skewness ratios increase in the order", || {
            let laws = [
                Distribution::power_uniform(2.0)?,
                Distribution::reflected_power(2.0)?,
                Distribution::exponential(),
                Distribution::negative_exponential(),
                Distribution::gumbel(),
                Distribution::lomax(4.0)?,
            ];
            let grid = [-0.5, -0.2, 0.0, 0.5, 1.0, 2.0, 5.0];
            let mut ok = true;
            for d in &laws {
                for kind in [DiamondKind::Diamond, DiamondKind::DiamondBar] {
                    ok &= skewness::diamond_curve(d, kind, &grid)?.monotone;
                }
            }
            Ok((ok, Value::Null))
        }),
        timed("skewness parameters are affine invariant", || {
            let d = Distribution::gumbel();
            let moved = d.affine(3.0, -2.0)?;
            let a = skewness::rho(&d, RhoKind::Rho, 1e-10)?;
            let b = skewness::rho(&moved, RhoKind::Rho, 1e-10)?;
            Ok(((a - b).abs() <= 1e-8, json!({ "rho": a, "rho_moved": b })))
        }),
        timed("skewness parameter ranges", || {
            let laws = [
                Distribution::power_uniform(3.0)?,
                Distribution::negative_lomax(3.0)?,
                Distribution::reflected_power(0.5)?,
                Distribution::logistic(),
            ];
            let mut ok = true;
            let mut rows = Vec::new();
            for d in &laws {
                let r = skewness::rho_range_check(d)?;
                ok &= r.pattern_holds;
                rows.push(json!({ "law": d.label(), "report": r }));
            }
            Ok((ok, Value::Array(rows)))
        }),
        timed("symmetric bound attained at negative order", || {
            let b = extremal::bound_symmetric(-0.3)?;
            let m = b.maximizer.expect("attained");
            let v = delta_quadrature(&m, -0.3)?.value / m.std_dev().expect("finite variance");
            Ok(((v - b.upper).abs() <= 1e-6, json!({ "value": v, "upper": b.upper })))
        }),
        timed("symmetric bound decreases and stays below the finite-variance bound", || {
            let grid: Vec<f64> = (0..60).map(|i| -0.49 + 0.1 * i as f64).collect();
            let mut ok = true;
            let mut last = f64::INFINITY;
            for &s in &grid {
                let v = extremal::symmetric_upper(s);
                ok &= v < last;
                last = v;
                let strict = extremal::symmetric_upper(s) < 1.0 / (2.0 * s + 1.0).sqrt();
                let gap_positive = extremal::gamma_gap(s)? > 0.0;
                if s.abs() > 1e-9 && (s - 1.0).abs() > 1e-9 && s < 1.0 {
                    ok &= strict && gap_positive;
                }
            }
            Ok((ok, Value::Null))
        }),
        timed("gamma gap positive away from its zeros", || {
            let root = extremal::gamma_gap_root()?;
            let mut ok = true;
            for i in 0..=400 {
                let s = root + 1e-6 + (4.0 - root) * i as f64 / 400.0;
                if s.abs() < 1e-3 || (s - 1.0).abs() < 1e-3 {
                    continue;
                }
                ok &= extremal::gamma_gap(s)? > 0.0;
            }
            for x in [0.1, 0.25, 0.5, 0.75, 0.9] {
                ok &= extremal::beta_trinomial_bound_check(x)?.ordering_holds;
            }
            Ok((ok, Value::Null))
        }),
        timed("relevation survival of the second failure", || {
            let d = Distribution::exponential();
            let grid: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64).collect();
            let mut ok = true;
            for n in 1..=3 {
                ok &= relevation::simulate_tn_survival(&d, n, &grid, 400_000, 31 + n as u64)?.all_within();
            }
            Ok((ok, Value::Null))
        }),
        timed("randomization law frequencies", || {
            let t = relevation::sample_ns(-0.5, 1_000_000, 5)?;
            let heavy = relevation::sample_ns(-0.9, 200_000, 6)?;
            let light = relevation::sample_ns(-0.1, 200_000, 7)?;
            let ok = t.consistent() && [1, 2, 5, 10].iter().all(|&k| heavy.tail(k) > light.tail(k));
            Ok((ok, json!({ "chi_square": t.chi_square, "df": t.degrees_of_freedom })))
        }),
    ]
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.12e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)
}

/// Write the parameter curves and Gamma-gap tables as CSV files into `dir`.
pub fn write_figures(dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::PreconditionNotMet(format!("cannot write figures: {e}"));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    let value = |p: &skewness::RhoPoint| p.value.clone().unwrap_or(f64::NAN);

    let betas: Vec<f64> = (0..80).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 79.0)).collect();
    let r = skewness::rho_curve_power_uniform(RhoKind::Rho, &betas);
    let rb = skewness::rho_curve_power_uniform(RhoKind::RhoBar, &betas);
    let rows: Vec<Vec<f64>> =
        betas.iter().zip(r.points.iter().zip(&rb.points)).map(|(&b, (p, q))| vec![b, value(p), value(q)]).collect();
    let path = dir.join("rho_power_uniform.csv");
    write_csv(&path, "beta,rho,rho_bar", &rows).map_err(io)?;
    written.push(path);

    let betas: Vec<f64> = (0..80).map(|i| 1.0 + 10f64.powf(-1.5 + 3.5 * i as f64 / 79.0)).collect();
    let r = skewness::rho_curve_negative_lomax(RhoKind::Rho, &betas);
    let rb = skewness::rho_curve_negative_lomax(RhoKind::RhoBar, &betas);
    let rows: Vec<Vec<f64>> =
        betas.iter().zip(r.points.iter().zip(&rb.points)).map(|(&b, (p, q))| vec![b, value(p), value(q)]).collect();
    let path = dir.join("rho_negative_lomax.csv");
    write_csv(&path, "beta,rho,rho_bar", &rows).map_err(io)?;
    written.push(path);

    let table = |a: f64, b: f64| -> Result<Vec<Vec<f64>>> {
        Ok(extremal::gamma_gap_table(a, b, 401)?.into_iter().map(|(s, v)| vec![s, v]).collect())
    };
    let path = dir.join("gamma_gap_unit.csv");
    write_csv(&path, "s,phi", &table(-0.5, 1.5)?).map_err(io)?;
    written.push(path);
    let path = dir.join("gamma_gap_wide.csv");
    write_csv(&path, "s,phi", &table(extremal::gamma_gap_root()?, 4.0)?).map_err(io)?;
    written.push(path);
    Ok(written)
}

/// Run the checks for `level`; at `Full`, figure tables go to `figure_dir`
/// when given.
pub fn run(level: Level, figure_dir: Option<&Path>) -> Report {
    let last = match level {
        Level::Quick => 7,
        Level::Full => 9,
    };
    let mut checks: Vec<Check> = (1..=last).filter_map(criterion).collect();
    let mut figures = Vec::new();
    if level == Level::Full {
        checks.extend(property_checks());
        if let Some(dir) = figure_dir {
            checks.push(timed("figure tables", || {
                figures = write_figures(dir)?;
                let ok = figures.iter().all(|p| p.exists());
                Ok((ok, json!({ "files": figures })))
            }));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Report { level, passed, checks, figures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_criterion_passes() {
        let c = criterion_2();
        assert!(c.passed, "{}", c.detail);
    }

    #[test]
    fn unknown_criterion_is_none() {
        assert!(criterion(0).is_none());
        assert!(criterion(10).is_none());
    }
}
