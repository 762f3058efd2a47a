use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdsim_core::integrate::{Scheme, Taming};
use hdsim_core::{Experiment, ExperimentConfig, ModelParams, SkewMethod};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "hdsim", version, about = "Simulate |x|^alpha diffusions and check their small-noise limits by Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Dump solution paths of the regularized equation as CSV.
    Simulate(Flags),
    /// Run one experiment and write its report.
    Experiment {
        #[arg(value_parser = experiment_names())]
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Tabulate sigma_eps, F_eps, F_0 and related maps on [-t, t].
    Transforms(Flags),
}

fn experiment_names() -> clap::builder::PossibleValuesParser {
    clap::builder::PossibleValuesParser::new(Experiment::ALL.map(|e| e.name()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SchemeArg {
    EulerIto,
    HeunStratonovich,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TamingArg {
    None,
    Clip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SkewMethodArg {
    ExcursionFlip,
    HarrisonShepp,
}

#[derive(Debug, Args)]
struct Flags {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eps_grid: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    theta_grid: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    plateau_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    plateau_b: Option<f64>,
    /// Time horizon (for `transforms`: half-width of the tabulated interval).
    #[arg(long = "t", allow_negative_numbers = true)]
    t: Option<f64>,
    /// Dyadic level: 2^level steps.
    #[arg(long)]
    level: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    level_grid: Option<Vec<u32>>,
    /// Occupation bands of the `occupation` experiment.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    delta_grid: Option<Vec<f64>>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 means all cores.
    #[arg(long, env = "HDSIM_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    taming: Option<TamingArg>,
    #[arg(long, allow_negative_numbers = true)]
    clip_scale: Option<f64>,
    /// Exponent of the negative-moment experiment.
    #[arg(long, allow_negative_numbers = true)]
    moment_order: Option<f64>,
    #[arg(long, value_enum)]
    skew_method: Option<SkewMethodArg>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Experiment(Experiment),
    Transforms,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub config: ExperimentConfig,
    pub out_path: Option<PathBuf>,
    pub format: Format,
}

/// Model used by `simulate` and `transforms` when no flags are given.
fn generic_defaults() -> ExperimentConfig {
    ExperimentConfig::new(ModelParams::new(0.5, 0.5, 0.0).expect("valid defaults"))
}

pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let (command, flags) = match cli.command {
        Cmd::Simulate(f) => (Command::Simulate, f),
        Cmd::Transforms(f) => (Command::Transforms, f),
        Cmd::Experiment { name, flags } => (Command::Experiment(name.parse()?), flags),
    };
    let mut cfg = match command {
        Command::Experiment(e) => e.default_config(),
        _ => generic_defaults(),
    };
    apply(&flags, &mut cfg, command)?;

    let format = match (flags.format, &flags.out) {
        (Some(f), _) => f,
        (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    };
    if format == Format::Json && !matches!(command, Command::Experiment(_)) {
        return Err(CliError::Usage("--format json is only available for experiment reports".into()));
    }
    match command {
        Command::Experiment(_) => cfg.validate()?,
        _ => cfg.validate_model()?,
    }
    Ok(CliConfig { command, config: cfg, out_path: flags.out, format })
}

fn apply(f: &Flags, cfg: &mut ExperimentConfig, command: Command) -> Result<(), CliError> {
    let mp = &mut cfg.params;
    set(&mut mp.alpha, f.alpha);
    set(&mut mp.eps, f.eps);
    set(&mut mp.x0, f.x0);
    if let Some(theta) = f.theta {
        mp.theta = Some(theta);
        if command == Command::Experiment(Experiment::Skew) && f.theta_grid.is_none() {
            cfg.theta_grid = Some(vec![theta]);
        }
    }
    if f.plateau_a.is_some() {
        mp.plateau_a = f.plateau_a;
    }
    if f.plateau_b.is_some() {
        mp.plateau_b = f.plateau_b;
    }
    mp.validate()?;
    set(&mut cfg.t_end, f.t);
    set(&mut cfg.level, f.level);
    set(&mut cfg.n_paths, f.paths);
    set(&mut cfg.seed, f.seed);
    set(&mut cfg.workers, f.workers);
    set(&mut cfg.moment_order, f.moment_order);
    if f.eps_grid.is_some() {
        cfg.eps_grid = f.eps_grid.clone();
    }
    if f.level_grid.is_some() {
        cfg.level_grid = f.level_grid.clone();
    }
    if f.theta_grid.is_some() {
        cfg.theta_grid = f.theta_grid.clone();
    }
    if f.delta_grid.is_some() {
        cfg.delta_grid = f.delta_grid.clone();
    }
    if let Some(s) = f.scheme {
        cfg.scheme.scheme = match s {
            SchemeArg::EulerIto => Scheme::EulerIto,
            SchemeArg::HeunStratonovich => Scheme::HeunStratonovich,
        };
    }
    if let Some(t) = f.taming {
        cfg.scheme.taming = match t {
            TamingArg::None => Taming::None,
            TamingArg::Clip => Taming::Clip,
        };
    }
    set(&mut cfg.scheme.clip_scale, f.clip_scale);
    if let Some(m) = f.skew_method {
        cfg.skew_method = match m {
            SkewMethodArg::ExcursionFlip => SkewMethod::ExcursionFlip,
            SkewMethodArg::HarrisonShepp => SkewMethod::HarrisonShepp,
        };
    }
    Ok(())
}

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
