use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use malthus_core::age_model::AgeDivisionRate;
use malthus_core::numerics::Tolerance;

use crate::commands::{self, join, settings};
use crate::config::{BaselineSpec, KvConfig};
use crate::error::{CliError, CliResult};
use crate::exec::RayonExecutor;
use crate::format::Csv;
use crate::manifest::{now_unix_ms, RunManifest};

/// Malthus parameter of age- and size-structured cell populations with
/// variable aging or growth rates.
///
/// Numbers in the CSV outputs carry 10 significant digits.
#[derive(Debug, Parser)]
#[command(name = "malthus", version)]
pub struct Cli {
    /// Worker threads for Monte Carlo runs (default: $MALTHUS_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Age model: Malthus parameter along the contraction family, per power of B.
    AgeCurve(AgeCurveArgs),
    /// Age model: exact value against the second-order expansion in alpha.
    AgePerturb(AgePerturbArgs),
    /// Size model: Monte Carlo table over (alpha, T) rows.
    SizeMc(SizeArgs),
    /// Size model: spread of the biomass and cell-count estimators.
    EstimatorCompare(CompareArgs),
    /// Size model: every cell of one simulated tree.
    TreeDump(TreeDumpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BaselineArgs {
    /// gauss, twopoint, twopoint(V1,V2), uniform or dirac.
    #[arg(long, default_value = "gauss")]
    pub baseline: String,
    #[arg(long, default_value_t = 1.0)]
    pub vbar: f64,
    #[arg(long, default_value_t = 0.7)]
    pub sigma_eta: f64,
    /// Lower end of the support (gauss: vbar - 1, twopoint/uniform: vbar - 0.5).
    #[arg(long, allow_hyphen_values = true)]
    pub v_min: Option<f64>,
    /// Upper end of the support (gauss: vbar + 1, twopoint/uniform: vbar + 0.5).
    #[arg(long)]
    pub v_max: Option<f64>,
}

impl BaselineArgs {
    fn spec(&self) -> BaselineSpec {
        BaselineSpec {
            kind: self.baseline.clone(),
            vbar: self.vbar,
            sigma_eta: self.sigma_eta,
            v_min: self.v_min,
            v_max: self.v_max,
        }
    }

    fn record(&self) -> [(&'static str, String); 5] {
        [
            ("baseline", self.baseline.clone()),
            ("baseline.vbar", self.vbar.to_string()),
            ("baseline.sigma_eta", self.sigma_eta.to_string()),
            ("baseline.v_min", self.v_min.map(|v| v.to_string()).unwrap_or_default()),
            ("baseline.v_max", self.v_max.map(|v| v.to_string()).unwrap_or_default()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct AgeCurveArgs {
    /// Powers of B(a) = (a - lag)^beta 1{a >= lag}.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1,2,3,4,5,6,7")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lag: f64,
    /// Contraction amplitudes; the alpha = 0 anchor is always included.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub alpha: Vec<f64>,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgePerturbArgs {
    /// Power of B(a) = (a - lag)^beta 1{a >= lag}.
    #[arg(long, conflicts_with = "b_const", default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lag: f64,
    /// Constant rate B(a) = b instead of the power form.
    #[arg(long)]
    pub b_const: Option<f64>,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,0.025,0.05,0.1,0.2")]
    pub alphas: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// key=value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one configuration entry (repeatable), e.g. --set division.beta=3.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ModelArgs {
    fn resolve(&self) -> CliResult<KvConfig> {
        let mut cfg = match &self.config {
            Some(path) => KvConfig::parse(&std::fs::read_to_string(path).map_err(CliError::io(path))?)?,
            None => KvConfig::default(),
        };
        for entry in &self.overrides {
            cfg.set_entry(entry)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output CSV; a manifest is written beside it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
    pub horizons: Vec<f64>,
    #[arg(short = 'M', long = "trees", default_value_t = 50)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TreeDumpArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    #[arg(long, default_value_t = 6.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Replicate index within the seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(
    csv: Csv,
    out: Option<&Path>,
    command: &str,
    config: std::collections::BTreeMap<String, String>,
    seed: Option<u64>,
    started: u128,
) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, csv.as_str()).map_err(CliError::io(path))?;
            let mut manifest = RunManifest::new(command, config, seed, started);
            manifest.add_output(path, csv.as_str().as_bytes());
            manifest.write_beside(path)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_str().as_bytes()).map_err(CliError::io("<stdout>"))?;
        }
    }
    Ok(())
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    let started = now_unix_ms();
    let tol = Tolerance::root();
    match cli.command {
        Command::AgeCurve(a) => {
            let csv = commands::age_curve(&a.beta, a.lag, &a.alpha, &a.baseline.spec(), &tol)?;
            let mut cfg = settings([("beta", join(&a.beta)), ("lag", a.lag.to_string()), ("alpha", join(&a.alpha))]);
            cfg.extend(settings(a.baseline.record()));
            emit(csv, a.out.as_deref(), "age-curve", cfg, None, started)
        }
        Command::AgePerturb(a) => {
            let b = match a.b_const {
                Some(b) => AgeDivisionRate::Constant { b },
                None => AgeDivisionRate::PowerLag { beta: a.beta, lag: a.lag },
            };
            let csv = commands::age_perturb(&b, &a.baseline.spec(), &a.alphas, &tol)?;
            let mut cfg = settings([("division_rate", format!("{b:?}")), ("alphas", join(&a.alphas))]);
            cfg.extend(settings(a.baseline.record()));
            emit(csv, a.out.as_deref(), "age-perturb", cfg, None, started)
        }
        Command::SizeMc(a) => {
            let cfg = a.model.resolve()?;
            let seed = cfg.protocol()?.seed;
            let exec = RayonExecutor::new(cli.threads)?;
            let csv = commands::size_mc(&cfg, &exec)?;
            emit(csv, a.out.as_deref(), "size-mc", cfg.entries().clone(), Some(seed), started)
        }
        Command::EstimatorCompare(a) => {
            let cfg = a.model.resolve()?;
            let exec = RayonExecutor::new(cli.threads)?;
            let csv = commands::estimator_compare(&cfg, a.alpha, &a.horizons, a.m, a.seed, &exec)?;
            let mut record = cfg.entries().clone();
            record.extend(settings([
                ("compare.alpha", a.alpha.to_string()),
                ("compare.horizons", join(&a.horizons)),
                ("compare.M", a.m.to_string()),
            ]));
            emit(csv, a.out.as_deref(), "estimator-compare", record, Some(a.seed), started)
        }
        Command::TreeDump(a) => {
            let cfg = a.model.resolve()?;
            let csv = commands::tree_dump(&cfg, a.alpha, a.horizon, a.seed, a.stream)?;
            let mut record = cfg.entries().clone();
            record.extend(settings([
                ("dump.alpha", a.alpha.to_string()),
                ("dump.horizon", a.horizon.to_string()),
                ("dump.stream", a.stream.to_string()),
            ]));
            emit(csv, a.out.as_deref(), "tree-dump", record, Some(a.seed), started)
        }
    }
}
