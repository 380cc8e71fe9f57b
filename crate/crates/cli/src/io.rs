//! CSV input and output.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use plsstop_core::criteria::TraceRecord;
use plsstop_core::evaluation::{GridSummary, Robustness};
use plsstop_core::simulation::{GridRow, SimulatedDataset};
use plsstop_core::{Dataset, Family, Matrix};

use crate::error::{CliError, Result};

/// Reads a headed CSV; `response` names the response column and every other
/// column is a predictor.
pub fn read_dataset(path: &Path, response: &str, family: Family) -> Result<Dataset> {
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = File::open(path).map_err(CliError::io(path))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let yi = headers.iter().position(|h| h == response).ok_or_else(|| {
        parse_err(
            1,
            format!("response column `{response}` not found in header"),
        )
    })?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != yi)
        .map(|(_, h)| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(parse_err(1, "no predictor columns".into()));
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut y = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut c = 0;
        for (i, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(
                    line,
                    format!("column `{}`: invalid number `{field}`", &headers[i]),
                )
            })?;
            if i == yi {
                y.push(v);
            } else {
                cols[c].push(v);
                c += 1;
            }
        }
    }
    let x = Matrix::from_columns(&cols)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Dataset::new(x, y, family)
        .and_then(|d| d.with_column_names(names))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(CliError::io(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.into_inner()
        .map_err(|e| CliError::io(path)(e.into_error()))?
        .flush()
        .map_err(CliError::io(path))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `x1..xp, y` with a header.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut w = csv_writer(path)?;
    let e = csv_err(path);
    let p = data.p();
    let mut header: Vec<String> = match data.column_names() {
        Some(n) => n.to_vec(),
        None => (1..=p).map(|j| format!("x{j}")).collect(),
    };
    header.push("y".into());
    w.write_record(&header).map_err(&e)?;
    for i in 0..data.n() {
        let mut row: Vec<String> = (0..p).map(|j| data.x().get(i, j).to_string()).collect();
        row.push(data.y()[i].to_string());
        w.write_record(&row).map_err(&e)?;
    }
    finish(w, path)
}

/// Latent columns `l1..l4`, one row per observation.
pub fn write_latent(path: &Path, sim: &SimulatedDataset) -> Result<()> {
    let mut w = csv_writer(path)?;
    let e = csv_err(path);
    w.write_record(["l1", "l2", "l3", "l4"]).map_err(&e)?;
    for i in 0..sim.latent.nrows() {
        w.write_record((0..4).map(|j| sim.latent.get(i, j).to_string()))
            .map_err(&e)?;
    }
    finish(w, path)
}

pub const TRACE_HEADER: [&str; 15] = [
    "k",
    "statistic",
    "decision",
    "q2",
    "press",
    "rss",
    "bic",
    "dof",
    "sigma2",
    "aic",
    "missclassed",
    "min_pvalue",
    "ci_lower",
    "c_hat",
    "x_significant",
];

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let e = csv_err(path);
    w.write_record(TRACE_HEADER).map_err(&e)?;
    for r in trace {
        w.write_record([
            r.k.to_string(),
            r.statistic.to_string(),
            r.decision.as_str().to_string(),
            opt(r.q2),
            opt(r.press),
            opt(r.rss),
            opt(r.bic),
            opt(r.dof),
            opt(r.sigma2),
            opt(r.aic),
            opt(r.missclassed),
            opt(r.min_pvalue),
            opt(r.ci_lower),
            opt(r.c_hat),
            opt(r.x_significant),
        ])
        .map_err(&e)?;
    }
    finish(w, path)
}

pub const GRID_HEADER: [&str; 12] = [
    "couple_sigma4",
    "couple_sigma5",
    "replicate",
    "p",
    "criterion",
    "K",
    "k_max",
    "nmse_train",
    "nmse_test",
    "missclassed_test",
    "runtime_ms",
    "error",
];

pub fn write_grid(path: &Path, rows: &[GridRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let e = csv_err(path);
    w.write_record(GRID_HEADER).map_err(&e)?;
    for r in rows {
        w.write_record([
            r.sigma4.to_string(),
            r.sigma5.to_string(),
            r.replicate.to_string(),
            r.p.to_string(),
            r.criterion.to_string(),
            opt(r.k),
            opt(r.k_max),
            opt(r.nmse_train),
            opt(r.nmse_test),
            opt(r.missclassed_test),
            opt(r.runtime_ms.map(|t| format!("{t:.3}"))),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(&e)?;
    }
    finish(w, path)
}

pub const SUMMARY_HEADER: [&str; 14] = [
    "record",
    "couple_sigma4",
    "couple_sigma5",
    "criterion_a",
    "criterion_b",
    "metric",
    "n",
    "mean",
    "variance",
    "failures",
    "t",
    "df",
    "p_value",
    "verdict",
];

/// Long format: `stat` rows hold per-criterion means and variances, `test`
/// rows hold pairwise Welch comparisons.
pub fn write_summary(path: &Path, s: &GridSummary) -> Result<()> {
    let mut w = csv_writer(path)?;
    let e = csv_err(path);
    w.write_record(SUMMARY_HEADER).map_err(&e)?;
    for c in &s.stats {
        let var = if c.variance.is_nan() {
            String::new()
        } else {
            c.variance.to_string()
        };
        w.write_record([
            "stat".into(),
            c.sigma4.to_string(),
            c.sigma5.to_string(),
            c.criterion.to_string(),
            String::new(),
            c.metric.as_str().into(),
            c.count.to_string(),
            c.mean.to_string(),
            var,
            c.failures.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])
        .map_err(&e)?;
    }
    for t in &s.tests {
        w.write_record([
            "test".into(),
            t.sigma4.to_string(),
            t.sigma5.to_string(),
            t.criterion_a.to_string(),
            t.criterion_b.to_string(),
            t.metric.as_str().into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            opt(t.test.map(|r| r.t)),
            opt(t.test.map(|r| r.df)),
            opt(t.test.map(|r| r.p_value)),
            t.verdict.as_str().into(),
        ])
        .map_err(&e)?;
    }
    finish(w, path)
}

/// `k, count, frequency` for `k = 0..=max`, frequencies over successful
/// resamples.
pub fn write_histogram(path: &Path, r: &Robustness) -> Result<()> {
    let mut w = csv_writer(path)?;
    let e = csv_err(path);
    w.write_record(["k", "count", "frequency"]).map_err(&e)?;
    let total = r.successes().max(1) as f64;
    for (k, &c) in r.histogram.iter().enumerate() {
        w.write_record([k.to_string(), c.to_string(), (c as f64 / total).to_string()])
            .map_err(&e)?;
    }
    finish(w, path)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_named_response_and_reports_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        fs::write(&p, "a,y,b\n1,0.5,2\n2,1.5,3\n3,2.0,5\n").unwrap();
        let d = read_dataset(&p, "y", Family::Gaussian).unwrap();
        assert_eq!(d.y(), &[0.5, 1.5, 2.0]);
        assert_eq!(d.x().col(1), &[2.0, 3.0, 5.0]);
        assert_eq!(
            d.column_names().unwrap(),
            &["a".to_string(), "b".to_string()]
        );

        fs::write(&p, "a,y\n1,2\n2,x\n").unwrap();
        match read_dataset(&p, "y", Family::Gaussian).unwrap_err() {
            CliError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("`y`"));
            }
            e => panic!("{e}"),
        }
        let err = read_dataset(&p, "resp", Family::Gaussian).unwrap_err();
        assert!(err.to_string().contains("`resp`"));
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let x = Matrix::from_columns(&[vec![0.1, 0.2, 0.7], vec![1.0 / 3.0, -2.5, 4.0]]).unwrap();
        let d = Dataset::new(x, vec![1.0, 0.0, 1.0], Family::Binomial).unwrap();
        write_dataset(&p, &d).unwrap();
        let back = read_dataset(&p, "y", Family::Binomial).unwrap();
        assert_eq!(back.x(), d.x());
        assert_eq!(back.y(), d.y());
    }
}
