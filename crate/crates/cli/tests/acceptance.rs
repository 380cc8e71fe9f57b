//! Acceptance suite: twelve end-to-end checks, one PASS/FAIL line each.
//! Runs as a plain binary so the report is printed on every `cargo test`.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use plsstop_core::criteria::{dof_estimate, select, CriterionKind, CriterionSpec, Folds};
use plsstop_core::evaluation::{nmse, partition_count, welch_t_test};
use plsstop_core::linalg::{dot, mean, norm};
use plsstop_core::resampling::{
    bca_interval, bootstrap_indices, jackknife_indices, ResamplePlan, Sidedness,
};
use plsstop_core::rng::{self, derive_seed, StreamRng};
use plsstop_core::simulation::{grid_run, simulate_univ_yx, GridRow, GridSpec, SimConfig};
use plsstop_core::{center_scale, fit_pls, glm, Dataset, Family, Matrix, PlsPath};
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, StudentsT};

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn z(r: &mut StreamRng) -> f64 {
    StandardNormal.sample(r)
}

fn sim_config(family: Family, n: usize, p: usize, s4: f64, s5: f64, datasets: usize) -> SimConfig {
    SimConfig {
        n,
        p_range: (p, p),
        sigma: [10.0, 8.0, 6.0, s4, s5],
        family,
        datasets_per_cell: datasets,
        seed: SEED,
        test_rows: 0,
    }
}

fn grid(template: SimConfig, criteria: Vec<CriterionSpec>) -> Vec<GridRow> {
    let spec = GridSpec {
        couples: vec![(template.sigma[3], template.sigma[4])],
        template,
        criteria,
        kmax: 10,
        seed: SEED,
    };
    grid_run(&spec).expect("grid run")
}

fn ks(rows: &[GridRow], c: CriterionKind) -> Vec<usize> {
    rows.iter()
        .filter(|r| r.criterion == c)
        .map(|r| r.k.expect("criterion failed on a grid row"))
        .collect()
}

fn mean_k(v: &[usize]) -> f64 {
    v.iter().sum::<usize>() as f64 / v.len() as f64
}

fn count(v: &[usize], k: usize) -> usize {
    v.iter().filter(|&&x| x == k).count()
}

fn c1_partition_count() -> Outcome {
    fn enumerate(i: usize, n: usize, q: usize, sizes: &mut Vec<usize>) -> u64 {
        if i == n {
            let m = n / q;
            return (sizes.len() == q && sizes.iter().all(|&s| s == m || s == m + 1)) as u64;
        }
        let mut total = 0;
        for b in 0..sizes.len() {
            sizes[b] += 1;
            total += enumerate(i + 1, n, q, sizes);
            sizes[b] -= 1;
        }
        if sizes.len() < q {
            sizes.push(1);
            total += enumerate(i + 1, n, q, sizes);
            sizes.pop();
        }
        total
    }
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=8 {
        for q in 1..=n {
            let want = BigUint::from(enumerate(0, n, q, &mut Vec::new()));
            if partition_count(n, q).ok() != Some(want) {
                bad.push(format!("f({n},{q})"));
            }
        }
    }
    for n in 1..=200 {
        if partition_count(n, n).ok() != Some(BigUint::from(1u8)) {
            bad.push(format!("f({n},{n})"));
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < Duration::from_secs(10),
        format!("36 enumerated pairs and f(n,n) for n<=200, mismatches {bad:?}, {t:.2?}"),
    )
}

fn c2_pls_matches_ols() -> Outcome {
    let (mut worst_fit, mut worst_orth) = (0.0f64, 0.0f64);
    for run in 0..50u64 {
        let mut r = rng::stream(SEED, &[2, run]);
        let x = Matrix::from_fn(60, 8, |_, _| z(&mut r));
        let y: Vec<f64> = (0..60)
            .map(|i| (0..8).map(|j| (j as f64 - 3.5) * x.get(i, j)).sum::<f64>() + z(&mut r))
            .collect();
        let d = Dataset::new(x.clone(), y.clone(), Family::Gaussian).unwrap();
        let m = fit_pls(&center_scale(&d).unwrap(), 8).unwrap();
        let ols = glm::fit_ols(&x, &y, true).unwrap();
        let diff: Vec<f64> = m
            .fitted
            .iter()
            .zip(&ols.fitted)
            .map(|(a, b)| a - b)
            .collect();
        worst_fit = worst_fit.max(norm(&diff) / norm(&ols.fitted));
        for i in 0..8 {
            for j in i + 1..8 {
                let (a, b) = (m.t.col(i), m.t.col(j));
                worst_orth = worst_orth.max(dot(a, b).abs() / (norm(a) * norm(b)));
            }
        }
    }
    outcome(
        worst_fit <= 1e-8 && worst_orth <= 1e-8,
        format!("max relative fit gap {worst_fit:.2e}, max component cosine {worst_orth:.2e}"),
    )
}

fn c3_dof() -> Outcome {
    let mut r = rng::stream(SEED, &[3]);
    let x = Matrix::from_fn(40, 4, |_, _| z(&mut r));
    let y: Vec<f64> = (0..40)
        .map(|i| x.get(i, 0) - x.get(i, 2) + z(&mut r))
        .collect();
    let full = dof_estimate(&Dataset::new(x, y, Family::Gaussian).unwrap(), 4).unwrap();
    let x1 = Matrix::from_fn(40, 1, |_, _| z(&mut r));
    let y1: Vec<f64> = (0..40).map(|i| 2.0 * x1.get(i, 0) + z(&mut r)).collect();
    let single = dof_estimate(&Dataset::new(x1, y1, Family::Gaussian).unwrap(), 1).unwrap();
    outcome(
        (full - 5.0).abs() <= 0.05 && (single - 2.0).abs() <= 0.05,
        format!("gamma(k=p=4) = {full:.4} (target 5), gamma(k=1, p=1) = {single:.4} (target 2)"),
    )
}

fn c4_bca_coverage() -> Outcome {
    let start = Instant::now();
    let mut covered = 0;
    for trial in 0..200u64 {
        let mut r = rng::stream(SEED, &[4, trial]);
        let x: Vec<f64> = (0..30).map(|_| z(&mut r)).collect();
        let avg = |rows: &[usize]| rows.iter().map(|&i| x[i]).sum::<f64>() / rows.len() as f64;
        let plan = ResamplePlan::new(500, derive_seed(SEED, &[4, trial]), 0.05).unwrap();
        let boot: Vec<f64> = (0..500)
            .map(|b| avg(&bootstrap_indices(30, &plan, b)))
            .collect();
        let jack: Vec<f64> = (0..30).map(|i| avg(&jackknife_indices(30, i))).collect();
        let all: Vec<usize> = (0..30).collect();
        let ci = bca_interval(&boot, avg(&all), &jack, 0.05, Sidedness::Bilateral).unwrap();
        covered += ci.contains(0.0) as usize;
    }
    let rate = covered as f64 / 200.0;
    let t = start.elapsed();
    outcome(
        (0.90..=0.98).contains(&rate) && t < Duration::from_secs(120),
        format!("coverage {rate:.3} over 200 trials, {t:.2?}"),
    )
}

fn noise_specs() -> Vec<CriterionSpec> {
    vec![
        CriterionSpec::Q2 {
            folds: Folds::KFold(5),
        },
        CriterionSpec::BicDof,
        CriterionSpec::BootYt {
            replicates: 250,
            alpha: 0.05,
        },
    ]
}

fn c5_low_noise_recovery() -> Outcome {
    let start = Instant::now();
    let rows = grid(
        sim_config(Family::Gaussian, 200, 20, 0.01, 0.01, 20),
        noise_specs(),
    );
    let t = start.elapsed();
    let mut pass = t < Duration::from_secs(600);
    let mut parts = Vec::new();
    for c in [
        CriterionKind::Q2,
        CriterionKind::BicDof,
        CriterionKind::BootYt,
    ] {
        let k = ks(&rows, c);
        let hits = count(&k, 3);
        pass &= hits * 5 >= k.len() * 4;
        parts.push(format!("{c} K=3 in {hits}/{}", k.len()));
    }
    outcome(pass, format!("{}, {t:.2?}", parts.join(", ")))
}

fn c6_q2_noise_sensitivity() -> Outcome {
    let rows = grid(
        sim_config(Family::Gaussian, 200, 20, 0.01, 20.01, 20),
        noise_specs(),
    );
    let q2 = mean_k(&ks(&rows, CriterionKind::Q2));
    let bt = mean_k(&ks(&rows, CriterionKind::BootYt));
    outcome(
        q2 < bt && q2 < 3.0,
        format!("mean K: q2 {q2:.2}, bootyt {bt:.2}"),
    )
}

fn modal_share(v: &[usize]) -> (usize, usize) {
    let top = (0..=v.iter().copied().max().unwrap_or(0))
        .max_by_key(|&k| (count(v, k), std::cmp::Reverse(k)))
        .unwrap_or(0);
    (top, count(v, top))
}

fn c7_bootyt_stability() -> Outcome {
    let reruns = |family: Family, spec: CriterionSpec| -> Vec<usize> {
        let cfg = sim_config(family, 200, 20, 1.0, 2.0, 1);
        let data = simulate_univ_yx(&cfg, 0).unwrap().data;
        (0..20u64)
            .map(|i| {
                select(&data, &spec, 10, derive_seed(SEED, &[7, i]))
                    .unwrap()
                    .k
            })
            .collect()
    };
    let bt = reruns(
        Family::Gaussian,
        CriterionSpec::BootYt {
            replicates: 250,
            alpha: 0.05,
        },
    );
    let (mode, share) = modal_share(&bt);
    let cv = reruns(Family::Binomial, CriterionSpec::CvMclassed { q: 5 });
    let (cv_mode, cv_share) = modal_share(&cv);
    outcome(
        share * 10 >= 9 * 20,
        format!("bootyt modal K={mode} in {share}/20; cvmc (binomial, not asserted) modal K={cv_mode} in {cv_share}/20, runs {cv:?}"),
    )
}

fn c8_poisson_divergence() -> Outcome {
    let specs = vec![
        CriterionSpec::Pval { alpha: 0.05 },
        CriterionSpec::BootYt {
            replicates: 250,
            alpha: 0.05,
        },
    ];
    let (mut pv, mut bt) = (Vec::new(), Vec::new());
    for s5 in [0.01, 1.01, 2.01] {
        let rows = grid(
            sim_config(Family::Poisson, 100, 15, 0.5, s5, 10),
            specs.clone(),
        );
        pv.push(mean_k(&ks(&rows, CriterionKind::Pval)));
        bt.push(mean_k(&ks(&rows, CriterionKind::BootYt)));
    }
    let nondecreasing = pv.windows(2).all(|w| w[1] >= w[0]);
    let pv_gain = pv[2] - pv[0];
    let bt_gain = bt.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v - bt[0]));
    outcome(
        nondecreasing && pv_gain >= 1.0 && bt_gain <= 0.5,
        format!("mean K over sigma5 = 0.01, 1.01, 2.01: pval {pv:?}, bootyt {bt:?}"),
    )
}

fn c9_bootyt_null() -> Outcome {
    let mut advanced = 0;
    for run in 0..50u64 {
        let mut r = rng::stream(SEED, &[9, run]);
        let l: Vec<f64> = (0..100).map(|_| z(&mut r)).collect();
        let x = Matrix::from_fn(100, 10, |i, _| l[i] + 0.1 * z(&mut r));
        let y: Vec<f64> = (0..100).map(|_| z(&mut r)).collect();
        let d = Dataset::new(x, y, Family::Gaussian).unwrap();
        let spec = CriterionSpec::BootYt {
            replicates: 500,
            alpha: 0.05,
        };
        advanced += (select(&d, &spec, 10, derive_seed(SEED, &[9, run]))
            .unwrap()
            .k
            >= 1) as usize;
    }
    outcome(
        advanced * 100 <= 15 * 50,
        format!("K >= 1 in {advanced}/50 runs"),
    )
}

fn c10_welch() -> Outcome {
    let (mut dt, mut ddf, mut dp) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..20u64 {
        let mut r = rng::stream(SEED, &[10, case]);
        let na = 3 + (case as usize % 7);
        let nb = 4 + (case as usize * 3 % 11);
        let sa = 0.5 + case as f64 * 0.2;
        let a: Vec<f64> = (0..na).map(|_| 1.0 + sa * z(&mut r)).collect();
        let b: Vec<f64> = (0..nb).map(|_| 1.5 + z(&mut r)).collect();
        let var = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
        };
        let (va, vb) = (var(&a) / na as f64, var(&b) / nb as f64);
        let t = (mean(&a) - mean(&b)) / (va + vb).sqrt();
        let df = (va + vb).powi(2) / (va * va / (na - 1) as f64 + vb * vb / (nb - 1) as f64);
        let p = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t.abs()));
        let got = welch_t_test(&a, &b).unwrap();
        dt = dt.max((got.t - t).abs());
        ddf = ddf.max((got.df - df).abs());
        dp = dp.max((got.p_value - p).abs());
    }
    let mut rejected = 0;
    for draw in 0..500u64 {
        let mut r = rng::stream(SEED, &[10, 1000 + draw]);
        let a: Vec<f64> = (0..20).map(|_| z(&mut r)).collect();
        let b: Vec<f64> = (0..20).map(|_| z(&mut r)).collect();
        rejected += (welch_t_test(&a, &b).unwrap().p_value < 0.05) as usize;
    }
    let rate = rejected as f64 / 500.0;
    outcome(
        dt <= 1e-10 && ddf <= 1e-10 && dp <= 1e-8 && (0.02..=0.09).contains(&rate),
        format!("max |dt| {dt:.1e}, |ddf| {ddf:.1e}, |dp| {dp:.1e}; null rejection rate {rate:.3}"),
    )
}

fn c11_parallel_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, out: &str| {
        let out = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_plsstop"))
            .args([
                "compare",
                "--n",
                "60",
                "--p",
                "12",
                "--datasets",
                "4",
                "--R",
                "100",
                "--sigma4-count",
                "2",
                "--sigma5-count",
                "2",
                "--seed",
                "42",
                "--jobs",
                jobs,
                "--out-dir",
            ])
            .arg(&out)
            .stderr(std::process::Stdio::null())
            .stdout(std::process::Stdio::null())
            .status()
            .expect("run plsstop");
        (
            status.success(),
            std::fs::read(out.join("grid.csv")).unwrap_or_default(),
        )
    };
    let (ok1, a) = run("1", "serial");
    let (ok1b, a2) = run("1", "serial_again");
    let (ok8, b) = run("8", "parallel");
    outcome(
        ok1 && ok1b && ok8 && !a.is_empty() && a == a2 && a == b,
        format!(
            "grid.csv {} bytes; rerun identical: {}; jobs 1 vs 8 identical: {}",
            a.len(),
            a == a2,
            a == b
        ),
    )
}

fn c12_trivial_model() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for family in [Family::Gaussian, Family::Binomial, Family::Poisson] {
        for (n, p) in [(200, 20), (20, 30)] {
            let cfg = SimConfig {
                test_rows: if n == 20 { 80 } else { 100 },
                ..sim_config(family, n, p, 1.0, 1.0, 5)
            };
            for rep in 0..5 {
                let sim = simulate_univ_yx(&cfg, rep).unwrap();
                let test = sim.test_extension.as_ref().unwrap();
                let ybar = mean(sim.data.y());
                let constant = vec![ybar; test.n()];
                checked += 1;
                if nmse(test.y(), &constant, ybar) != Ok(1.0) {
                    bad += 1;
                }
                if family == Family::Gaussian {
                    let path = PlsPath::build(&center_scale(&sim.data).unwrap(), 0).unwrap();
                    let pred = path.model(0).unwrap().predict(test.x()).unwrap();
                    checked += 1;
                    if nmse(test.y(), &pred, ybar) != Ok(1.0) {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("{checked} checks, {bad} not exactly 1"))
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 12] = [
        ("partition count exactness", c1_partition_count),
        ("PLS equals OLS at saturation", c2_pls_matches_ols),
        ("degrees of freedom sanity", c3_dof),
        ("BCa coverage", c4_bca_coverage),
        ("low-noise recovery", c5_low_noise_recovery),
        ("Q2 noise sensitivity", c6_q2_noise_sensitivity),
        ("BootYT stability", c7_bootyt_stability),
        ("poisson divergence pattern", c8_poisson_divergence),
        ("BootYT null behaviour", c9_bootyt_null),
        ("Welch test exactness", c10_welch),
        ("parallel determinism", c11_parallel_determinism),
        ("trivial-model anchor", c12_trivial_model),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        println!(
            "acceptance {:>2} {:<30} {}  ({}; {:.1?})",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
