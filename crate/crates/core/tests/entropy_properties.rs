use ctent::entropy::{delta, delta_plugin, nabla};
use ctent::{Distribution, EmpiricalSample};
use rayon::prelude::*;

fn value(d: &Distribution, s: f64) -> f64 {
    delta(d, s).unwrap().value
}

#[test]
fn lower_order_limit_is_mean_minus_minimum() {
    // convergence is linear in 1 + s for these members
    for d in [
        Distribution::uniform(),
        Distribution::power_uniform(2.5).unwrap(),
        Distribution::exponential(),
        Distribution::lomax(4.0).unwrap(),
    ] {
        let target = d.mean() - d.support().0;
        let v = value(&d, -1.0 + 1e-9);
        assert!((v - target).abs() < 1e-7 * (1.0 + target), "{}: {v} vs {target}", d.label());
    }
}

#[test]
fn large_orders_vanish() {
    // Δ_s decays like 1/s for bounded laws and like ln(s)/s for exponential
    // tails, so the 1e-3 ratio is reached near s = 1e5 rather than 1e3.
    for d in [
        Distribution::uniform(),
        Distribution::power_uniform(2.0).unwrap(),
        Distribution::exponential(),
        Distribution::gumbel(),
        Distribution::logistic(),
        Distribution::normal(),
    ] {
        let d1 = value(&d, 1.0);
        let far = value(&d, 1e5);
        assert!(far > 0.0 && far <= 1e-3 * d1, "{}: {far} vs {d1}", d.label());
        assert!(value(&d, 1e3) < value(&d, 1e2));
    }
}

#[test]
fn order_times_entropy_tends_to_max_minus_mean() {
    for beta in [0.5, 1.0, 3.0] {
        let d = Distribution::power_uniform(beta).unwrap();
        let target = d.support().1 - d.mean();
        let errs: Vec<f64> = (1..=12)
            .map(|k| {
                let n = 2f64.powi(k);
                (n * value(&d, n) - target).abs()
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "beta {beta}: {errs:?}");
        assert!(errs[11] < 2e-3 * target.max(1.0) * 4.0, "beta {beta}: {}", errs[11]);
    }
}

#[test]
fn order_one_is_half_mean_difference() {
    let n = 400_000;
    for (i, d) in [Distribution::exponential(), Distribution::logistic(), Distribution::uniform()].iter().enumerate() {
        let x = d.sample(n, 10 + i as u64).unwrap();
        let y = d.sample(n, 100 + i as u64).unwrap();
        // samples come back sorted, so pair x with a reversed-index shuffle of y
        let mut yv = y.values().to_vec();
        let mut state = 0x9e37_79b9_7f4a_7c15u64 + i as u64;
        for k in (1..yv.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            yv.swap(k, (state % (k as u64 + 1)) as usize);
        }
        let half: Vec<f64> = x.values().iter().zip(&yv).map(|(a, b)| 0.5 * (a - b).abs()).collect();
        let mean = half.iter().sum::<f64>() / n as f64;
        let sd = (half.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let target = value(d, 1.0);
        assert!((mean - target).abs() <= 3.0 * sd / (n as f64).sqrt(), "{}: {mean} vs {target}", d.label());
    }
}

#[test]
fn order_one_is_even() {
    for d in Distribution::catalog() {
        if let Ok(v) = delta(&d, 1.0) {
            let w = value(&d.negate(), 1.0);
            assert!((v.value - w).abs() <= 1e-12 * (1.0 + v.value), "{}", d.label());
        }
    }
    // with atoms
    let xs = vec![0.0, 0.0, 1.0, 3.0, 3.0, 3.0, 7.5];
    let a = delta_plugin(&EmpiricalSample::new(xs.clone()).unwrap(), 1.0).unwrap().value;
    let b = delta_plugin(&EmpiricalSample::new(xs.iter().map(|x| -x).collect()).unwrap(), 1.0).unwrap().value;
    assert!((a - b).abs() < 1e-14);
}

#[test]
fn finite_values_are_nonnegative() {
    for d in Distribution::catalog() {
        for s in [-0.9, -0.5, -0.1, 0.0, 0.3, 1.0, 2.5, 10.0, 100.0] {
            for v in [delta(&d, s), nabla(&d, s)].into_iter().flatten() {
                assert!(v.value >= 0.0, "{} at {s}: {}", d.label(), v.value);
            }
        }
    }
}

#[test]
fn plugin_error_shrinks_with_sample_size() {
    // median absolute error over replicates, at n = 1e3, 1e4, 1e5
    for (i, d) in [Distribution::exponential(), Distribution::uniform(), Distribution::logistic()].iter().enumerate() {
        let truth = value(d, 0.0);
        let medians: Vec<f64> = [1_000usize, 10_000, 100_000]
            .iter()
            .map(|&n| {
                let mut errs: Vec<f64> = (0..200u64)
                    .into_par_iter()
                    .map(|r| {
                        let x = d.sample(n, 7_000 * (i as u64 + 1) + r).unwrap();
                        (delta_plugin(&x, 0.0).unwrap().value - truth).abs()
                    })
                    .collect();
                errs.sort_by(f64::total_cmp);
                errs[100]
            })
            .collect();
        assert!(medians.windows(2).all(|w| w[1] < w[0]), "{}: {medians:?}", d.label());
    }
}
