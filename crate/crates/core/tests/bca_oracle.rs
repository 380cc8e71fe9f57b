use plsstop_core::resampling::{
    bca_interval, bootstrap_indices, jackknife_indices, ResamplePlan, Sidedness,
};
use plsstop_core::rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

fn type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[test]
fn bilateral_endpoints_match_stepwise_oracle() {
    let mut r = rng::stream(2024, &[1]);
    let boot: Vec<f64> = (0..200)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut r);
            1.0 + 0.3 * z + 0.05 * z * z
        })
        .collect();
    let theta = 1.02;
    let jack: Vec<f64> = (0..10)
        .map(|i| 1.0 + 0.01 * (i as f64) - 0.002 * (i * i) as f64)
        .collect();
    let alpha = 0.05;

    let nd = std_normal();
    let below = boot.iter().filter(|&&b| b < theta).count() as f64;
    let z0 = nd.inverse_cdf(below / 200.0);
    let m = jack.iter().sum::<f64>() / 10.0;
    let num: f64 = jack.iter().map(|j| (m - j).powi(3)).sum();
    let den: f64 = jack.iter().map(|j| (m - j).powi(2)).sum();
    let a = num / (6.0 * den.powf(1.5));
    let level = |z: f64| nd.cdf(z0 + (z0 + z) / (1.0 - a * (z0 + z)));
    let a1 = level(nd.inverse_cdf(alpha / 2.0));
    let a2 = level(nd.inverse_cdf(1.0 - alpha / 2.0));
    let mut sorted = boot.clone();
    sorted.sort_by(f64::total_cmp);

    let ci = bca_interval(&boot, theta, &jack, alpha, Sidedness::Bilateral).unwrap();
    assert!((ci.z0 - z0).abs() < 1e-9);
    assert!((ci.acceleration - a).abs() < 1e-12);
    assert!(
        (ci.lower - type7(&sorted, a1)).abs() < 1e-9,
        "{} vs {}",
        ci.lower,
        type7(&sorted, a1)
    );
    assert!((ci.upper - type7(&sorted, a2)).abs() < 1e-9);

    let one = bca_interval(&boot, theta, &jack, alpha, Sidedness::LowerUnilateral).unwrap();
    assert!((one.lower - type7(&sorted, level(nd.inverse_cdf(alpha)))).abs() < 1e-9);
    assert!(one.upper.is_infinite());
}

#[test]
fn coverage_of_normal_mean() {
    let mut covered = 0;
    for trial in 0..200u64 {
        let mut r = rng::stream(7, &[trial]);
        let x: Vec<f64> = (0..30).map(|_| StandardNormal.sample(&mut r)).collect();
        let mean = |rows: &[usize]| rows.iter().map(|&i| x[i]).sum::<f64>() / rows.len() as f64;
        let plan = ResamplePlan::new(500, 1000 + trial, 0.05).unwrap();
        let boot: Vec<f64> = (0..500)
            .map(|b| mean(&bootstrap_indices(30, &plan, b)))
            .collect();
        let jack: Vec<f64> = (0..30).map(|i| mean(&jackknife_indices(30, i))).collect();
        let all: Vec<usize> = (0..30).collect();
        let ci = bca_interval(&boot, mean(&all), &jack, 0.05, Sidedness::Bilateral).unwrap();
        covered += ci.contains(0.0) as usize;
    }
    let rate = covered as f64 / 200.0;
    assert!((0.90..=0.98).contains(&rate), "coverage {rate}");
}
