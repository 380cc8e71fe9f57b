use std::path::Path;
use std::time::Instant;

use plsstop_core::criteria::{self, CriterionSpec};
use plsstop_core::evaluation::{
    partition_count, resample_count, robustness_one, summarize_grid, Robustness, RobustnessMode,
};
use plsstop_core::simulation::{couples, run_cell, sigma_sequence, simulate_univ_yx, GridSpec};
use rayon::prelude::*;

use crate::args::{
    criterion_spec, CompareArgs, Mode, PartitionArgs, RobustnessArgs, SelectArgs, SimulateArgs,
};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io;

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))
}

fn resolved_jobs(jobs: usize) -> usize {
    if jobs == 0 {
        rayon::current_num_threads()
    } else {
        jobs
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = a
        .generator
        .template(a.seed.seed)
        .with_noise(a.sigma4, a.sigma5);
    cfg.validate()?;
    io::ensure_dir(&a.out_dir)?;
    for i in 0..a.datasets {
        let sim = simulate_univ_yx(&cfg, i as u64)?;
        let stem = format!("dataset_{:03}", i + 1);
        io::write_dataset(&a.out_dir.join(format!("{stem}.csv")), &sim.data)?;
        io::write_latent(&a.out_dir.join(format!("{stem}.latent.csv")), &sim)?;
        if let Some(t) = &sim.test_extension {
            io::write_dataset(&a.out_dir.join(format!("{stem}.test.csv")), t)?;
        }
        let mut meta = RunConfig::default();
        meta.set("replicate", i)
            .set("n", cfg.n)
            .set("p", sim.p_drawn)
            .set("family", cfg.family)
            .set("true_k", sim.true_k)
            .set("eta_scale", sim.eta_scale);
        for (j, s) in cfg.sigma.iter().enumerate() {
            meta.set(&format!("sigma{}", j + 1), s);
        }
        let path = a.out_dir.join(format!("{stem}.meta.txt"));
        std::fs::write(&path, meta.render()).map_err(CliError::io(path))?;
    }
    let mut rc = RunConfig::new("simulate");
    a.generator.record(&cfg, &mut rc);
    rc.set("sigma4", a.sigma4)
        .set("sigma5", a.sigma5)
        .set("datasets", a.datasets)
        .set("seed", a.seed.seed)
        .set("out-dir", a.out_dir.display());
    rc.write(&a.out_dir)?;
    println!("wrote {} dataset(s) to {}", a.datasets, a.out_dir.display());
    Ok(())
}

pub fn select(a: &SelectArgs) -> Result<()> {
    let spec = a.criterion.spec()?;
    spec.kind()
        .supports(a.input.family)
        .then_some(())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "criterion requires {} family (got `{}` with {} data)",
                spec.kind().requirement().unwrap_or("another"),
                spec.kind(),
                a.input.family
            ))
        })?;
    let data = io::read_dataset(&a.input.data, &a.input.response, a.input.family)?;
    let res = criteria::select(&data, &spec, a.criterion.kmax, a.seed.seed)?;
    io::ensure_dir(&a.out_dir)?;
    io::write_trace(&a.out_dir.join("trace.csv"), &res.trace)?;
    let mut rc = RunConfig::new("select");
    a.input.record(&mut rc);
    a.criterion.record(&mut rc);
    rc.set("seed", a.seed.seed)
        .set("out-dir", a.out_dir.display());
    rc.write(&a.out_dir)?;
    for n in &res.notes {
        eprintln!("note: {n}");
    }
    match res.k_max {
        Some(m) => println!("{}: K={} (k_max={m})", res.criterion, res.k),
        None => println!("{}: K={}", res.criterion, res.k),
    }
    Ok(())
}

pub fn robustness(a: &RobustnessArgs) -> Result<()> {
    let spec = a.criterion.spec()?;
    let data = io::read_dataset(&a.input.data, &a.input.response, a.input.family)?;
    if data.n() < 3 {
        return Err(CliError::Data("robustness needs at least 3 rows".into()));
    }
    let mode = match a.mode {
        Mode::Bootstrap if a.resamples == 0 => {
            return Err(CliError::Usage("--B must be at least 1".into()))
        }
        Mode::Bootstrap => RobustnessMode::Bootstrap(a.resamples),
        Mode::Jackknife => RobustnessMode::Jackknife,
    };
    if !spec.kind().supports(data.family()) {
        criteria::select(&data, &spec, a.criterion.kmax, a.seed.seed)?;
    }
    let count = resample_count(data.n(), mode);
    let outcomes = pool(a.jobs.jobs)?.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| robustness_one(&data, &spec, a.criterion.kmax, mode, i, a.seed.seed))
            .collect::<Vec<_>>()
    });
    let r = Robustness::from_outcomes(spec.kind(), outcomes);
    io::ensure_dir(&a.out_dir)?;
    io::write_histogram(&a.out_dir.join("histogram.csv"), &r)?;
    let mut rc = RunConfig::new("robustness");
    a.input.record(&mut rc);
    a.criterion.record(&mut rc);
    rc.set(
        "mode",
        match a.mode {
            Mode::Bootstrap => "bootstrap",
            Mode::Jackknife => "jackknife",
        },
    )
    .set("B", a.resamples)
    .set("seed", a.seed.seed)
    .set("jobs", resolved_jobs(a.jobs.jobs))
    .set("out-dir", a.out_dir.display());
    rc.write(&a.out_dir)?;
    for (i, e) in &r.errors {
        eprintln!("resample {i}: {e}");
    }
    match (r.mode(), r.mean()) {
        (Some(m), Some(mean)) => println!(
            "{}: modal K={m}, mean K={mean:.3}, {} of {} resamples succeeded",
            r.criterion,
            r.successes(),
            r.resamples
        ),
        _ => {
            return Err(CliError::Data(format!(
                "all {} resamples failed",
                r.resamples
            )))
        }
    }
    Ok(())
}

fn check_sigma_axis(name: &str, start: f64, step: f64, count: usize) -> Result<()> {
    if count == 0 || !(start.is_finite() && step.is_finite() && start >= 0.0 && step >= 0.0) {
        return Err(CliError::Usage(format!(
            "{name} axis needs a non-negative start and step and a positive count"
        )));
    }
    Ok(())
}

pub fn compare(a: &CompareArgs) -> Result<()> {
    check_sigma_axis("sigma4", a.sigma4_start, a.sigma4_step, a.sigma4_count)?;
    check_sigma_axis("sigma5", a.sigma5_start, a.sigma5_step, a.sigma5_count)?;
    let kinds = a.criteria();
    if kinds.is_empty() {
        return Err(CliError::Usage("no criteria given".into()));
    }
    for k in &kinds {
        if !k.supports(a.generator.family) {
            return Err(CliError::Usage(format!(
                "criterion requires {} family (got `{k}` with {} data)",
                k.requirement().unwrap_or("another"),
                a.generator.family
            )));
        }
    }
    let specs: Vec<CriterionSpec> = kinds
        .iter()
        .map(|&k| criterion_spec(k, a.alpha, a.replicates(), &a.q))
        .collect::<Result<_>>()?;
    let mut template = a.generator.template(a.seed.seed);
    template.datasets_per_cell = a.datasets();
    template.validate()?;
    let grid = GridSpec {
        couples: couples(
            &sigma_sequence(a.sigma4_start, a.sigma4_step, a.sigma4_count),
            &sigma_sequence(a.sigma5_start, a.sigma5_step, a.sigma5_count),
        ),
        template: template.clone(),
        criteria: specs,
        kmax: a.kmax,
        seed: a.seed.seed,
    };

    let start = Instant::now();
    let clock = move || start.elapsed().as_secs_f64() * 1e3;
    let timer: Option<&(dyn Fn() -> f64 + Sync)> = if a.timings { Some(&clock) } else { None };
    let cells = pool(a.jobs.jobs)?.install(|| {
        (0..grid.cell_count())
            .into_par_iter()
            .map(|cell| {
                let (c, r) = grid.cell(cell);
                let rows = run_cell(&grid, c, r, timer.map(|t| t as &dyn Fn() -> f64));
                eprintln!(
                    "cell {}/{} (sigma4={}, sigma5={}, replicate {r}) done",
                    cell + 1,
                    grid.cell_count(),
                    grid.couples[c].0,
                    grid.couples[c].1
                );
                rows
            })
            .collect::<Vec<_>>()
    });
    let rows: Vec<_> = cells.into_iter().flatten().collect();

    io::ensure_dir(&a.out_dir)?;
    io::write_grid(&a.out_dir.join("grid.csv"), &rows)?;
    io::write_summary(&a.out_dir.join("summary.csv"), &summarize_grid(&rows))?;
    let mut rc = RunConfig::new("compare");
    a.generator.record(&template, &mut rc);
    rc.set(
        "criteria",
        kinds
            .iter()
            .map(|k| k.as_str())
            .collect::<Vec<_>>()
            .join(","),
    )
    .set("sigma4-start", a.sigma4_start)
    .set("sigma4-step", a.sigma4_step)
    .set("sigma4-count", a.sigma4_count)
    .set("sigma5-start", a.sigma5_start)
    .set("sigma5-step", a.sigma5_step)
    .set("sigma5-count", a.sigma5_count)
    .set("datasets", a.datasets())
    .set("R", a.replicates())
    .set("alpha", a.alpha)
    .set("q", &a.q)
    .set("kmax", a.kmax)
    .set("timings", a.timings)
    .set("seed", a.seed.seed)
    .set("jobs", resolved_jobs(a.jobs.jobs))
    .set("out-dir", a.out_dir.display());
    rc.write(&a.out_dir)?;

    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "{} rows written to {}",
        rows.len(),
        Path::new(&a.out_dir).join("grid.csv").display()
    );
    match failed {
        0 => Ok(()),
        f if f == rows.len() => Err(CliError::Data(
            "every grid row failed; see the error column".into(),
        )),
        f => Err(CliError::PartialGrid {
            failed: f,
            total: rows.len(),
        }),
    }
}

pub fn partition(a: &PartitionArgs) -> Result<()> {
    println!("{}", partition_count(a.n, a.q)?);
    Ok(())
}
