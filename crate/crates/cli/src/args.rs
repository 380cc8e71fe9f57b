use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plsstop_core::criteria::{CriterionKind, CriterionSpec, Folds};
use plsstop_core::simulation::SimConfig;
use plsstop_core::Family;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "plsstop",
    version,
    about = "Choose the number of PLS / PLSGLR components and benchmark stopping criteria",
    after_help = "Every command also accepts `--config FILE`, a `key = value` file of flag settings; flags given on the command line take precedence."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic datasets with a known three-component structure
    Simulate(SimulateArgs),
    /// Select the number of components of a CSV dataset
    Select(SelectArgs),
    /// Run criteria over a grid of noise levels and compare them
    Compare(CompareArgs),
    /// Distribution of the selected count over bootstrap or jackknife resamples
    Robustness(RobustnessArgs),
    /// Number of distinct balanced q-fold partitions of n observations
    PartitionCount(PartitionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    /// n = 200, p in [7, 50], 100 test rows
    NGtP,
    /// n = 20, p in [25, 50], 80 test rows
    NLtP,
}

impl Regime {
    fn as_str(self) -> &'static str {
        match self {
            Regime::NGtP => "n-gt-p",
            Regime::NLtP => "n-lt-p",
        }
    }

    fn template(self, family: Family) -> SimConfig {
        match self {
            Regime::NGtP => SimConfig::n_greater_than_p(family),
            Regime::NLtP => SimConfig::n_less_than_p(family),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    #[arg(long, default_value = "gaussian")]
    pub family: Family,
    /// Sets the default row count, predictor range and test rows
    #[arg(long, value_enum, default_value_t = Regime::NGtP)]
    pub regime: Regime,
    #[arg(long)]
    pub n: Option<usize>,
    /// Fixed predictor count (overrides --p-min/--p-max)
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub p_min: Option<usize>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long, default_value_t = 10.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 8.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 6.0)]
    pub sigma3: f64,
    /// Extra rows for out-of-sample evaluation (regime default when omitted)
    #[arg(long)]
    pub test_rows: Option<usize>,
}

impl GeneratorArgs {
    pub fn template(&self, seed: u64) -> SimConfig {
        let mut c = self.regime.template(self.family);
        if let Some(n) = self.n {
            c.n = n;
        }
        let (lo, hi) = c.p_range;
        c.p_range = match self.p {
            Some(p) => (p, p),
            None => (self.p_min.unwrap_or(lo), self.p_max.unwrap_or(hi)),
        };
        c.sigma[0] = self.sigma1;
        c.sigma[1] = self.sigma2;
        c.sigma[2] = self.sigma3;
        if let Some(t) = self.test_rows {
            c.test_rows = t;
        }
        c.seed = seed;
        c
    }

    pub fn record(&self, c: &SimConfig, rc: &mut RunConfig) {
        rc.set("family", self.family)
            .set("regime", self.regime.as_str())
            .set("n", c.n)
            .set("p-min", c.p_range.0)
            .set("p-max", c.p_range.1)
            .set("sigma1", c.sigma[0])
            .set("sigma2", c.sigma[1])
            .set("sigma3", c.sigma[2])
            .set("test-rows", c.test_rows);
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    /// Master seed for every random stream
    #[arg(long, env = "PLSSTOP_SEED", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct JobsArgs {
    /// Worker threads (0 uses all cores); results do not depend on it
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 0.01)]
    pub sigma4: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sigma5: f64,
    /// Number of datasets to generate
    #[arg(long, default_value_t = 1)]
    pub datasets: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Criterion and its tuning parameters.
#[derive(Debug, Clone, Args)]
pub struct CriterionArgs {
    #[arg(long)]
    pub criterion: CriterionKind,
    /// Significance level of the p_val and BootYT criteria
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap replicates of BootYT
    #[arg(long = "R", default_value_t = 500)]
    pub replicates: usize,
    /// Folds for q2 and cvmc; `loo` for leave-one-out (q2 only)
    #[arg(long, default_value = "5")]
    pub q: String,
    /// Largest number of components considered
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
}

fn parse_folds(q: &str) -> Result<Folds> {
    if q.eq_ignore_ascii_case("loo") {
        return Ok(Folds::Loo);
    }
    q.parse::<usize>()
        .ok()
        .filter(|&v| v >= 2)
        .map(Folds::KFold)
        .ok_or_else(|| CliError::Usage(format!("--q must be an integer >= 2 or `loo`, got `{q}`")))
}

/// Builds the criterion configuration for `kind`.
pub fn criterion_spec(
    kind: CriterionKind,
    alpha: f64,
    replicates: usize,
    q: &str,
) -> Result<CriterionSpec> {
    Ok(match kind {
        CriterionKind::Q2 => CriterionSpec::Q2 {
            folds: parse_folds(q)?,
        },
        CriterionKind::CvMclassed => match parse_folds(q)? {
            Folds::KFold(q) => CriterionSpec::CvMclassed { q },
            Folds::Loo => return Err(CliError::Usage("cvmc needs an integer --q".into())),
        },
        CriterionKind::Pval => CriterionSpec::Pval { alpha },
        CriterionKind::BootYt => CriterionSpec::BootYt { replicates, alpha },
        other => CriterionSpec::default_for(other),
    })
}

impl CriterionArgs {
    pub fn spec(&self) -> Result<CriterionSpec> {
        criterion_spec(self.criterion, self.alpha, self.replicates, &self.q)
    }

    pub fn record(&self, rc: &mut RunConfig) {
        rc.set("criterion", self.criterion)
            .set("alpha", self.alpha)
            .set("R", self.replicates)
            .set("q", &self.q)
            .set("kmax", self.kmax);
    }
}

/// Input dataset.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with a header row
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column; all other columns are predictors
    #[arg(long, default_value = "y")]
    pub response: String,
    #[arg(long, default_value = "gaussian")]
    pub family: Family,
}

impl InputArgs {
    pub fn record(&self, rc: &mut RunConfig) {
        rc.set("data", self.data.display())
            .set("response", &self.response)
            .set("family", self.family);
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bootstrap,
    Jackknife,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RobustnessArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[arg(long, value_enum, default_value_t = Mode::Bootstrap)]
    pub mode: Mode,
    /// Bootstrap resamples
    #[arg(long = "B", default_value_t = 100)]
    pub resamples: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub jobs: JobsArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CompareArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Comma-separated criteria (defaults depend on the family)
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<CriterionKind>>,
    #[arg(long, default_value_t = 0.01)]
    pub sigma4_start: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma4_step: f64,
    #[arg(long, default_value_t = 2)]
    pub sigma4_count: usize,
    #[arg(long, default_value_t = 0.01)]
    pub sigma5_start: f64,
    #[arg(long, default_value_t = 5.0)]
    pub sigma5_step: f64,
    #[arg(long, default_value_t = 2)]
    pub sigma5_count: usize,
    /// Datasets per noise couple [default: 20, or 100 with --paper-scale]
    #[arg(long)]
    pub datasets: Option<usize>,
    /// BootYT replicates [default: 250, or 500 with --paper-scale]
    #[arg(long = "R")]
    pub replicates: Option<usize>,
    /// Use 100 datasets per couple and 500 bootstrap replicates
    #[arg(long)]
    pub paper_scale: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Folds for q2 and cvmc; `loo` for leave-one-out (q2 only)
    #[arg(long, default_value = "5")]
    pub q: String,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    /// Record per-criterion wall-clock time in runtime_ms
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub jobs: JobsArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

impl CompareArgs {
    pub fn datasets(&self) -> usize {
        self.datasets
            .unwrap_or(if self.paper_scale { 100 } else { 20 })
    }

    pub fn replicates(&self) -> usize {
        self.replicates
            .unwrap_or(if self.paper_scale { 500 } else { 250 })
    }

    pub fn criteria(&self) -> Vec<CriterionKind> {
        use CriterionKind::*;
        match &self.criteria {
            Some(c) => c.clone(),
            None => match self.generator.family {
                Family::Gaussian => vec![Q2, BicDof, BootYt],
                Family::Binomial => vec![Aic, Bic, CvMclassed, Pval, BootYt],
                Family::Poisson => vec![Aic, Bic, Pval, BootYt],
            },
        }
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct PartitionArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: usize,
}
