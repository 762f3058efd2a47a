//! Command-line front end: parse flags into an [`ExperimentConfig`], run the
//! requested command, and write paths, reports or transform tables.
//!
//! Exit codes: 0 success or pass, 1 experiment fail or inconclusive, 2 usage
//! or parameter error, 3 numerical or I/O error.

mod args;
mod output;

use std::io::Write;

use hdsim_core::{simulate_paths, Verdict};

pub use args::{parse_args, CliConfig, Command, Format};
pub use output::{emit_paths, emit_report_csv, emit_report_json, emit_transforms, fmt_f64, PathCsv, Sink, TOOL_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) | CliError::Parameter(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<hdsim_core::Error> for CliError {
    fn from(e: hdsim_core::Error) -> Self {
        match e {
            hdsim_core::Error::Parameter(m) => CliError::Parameter(m),
            hdsim_core::Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}

/// Successful outcome of [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Verdict(Verdict),
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Done | Outcome::Verdict(Verdict::Pass) => 0,
            Outcome::Verdict(Verdict::Fail | Verdict::Inconclusive) => 1,
        }
    }
}

pub fn run(cfg: &CliConfig) -> Result<Outcome, CliError> {
    let mut sink = Sink::open(cfg.out_path.as_deref())?;
    let outcome = match cfg.command {
        Command::Simulate => {
            let mut out = PathCsv::new(&mut sink)?;
            simulate_paths(&cfg.config, |i, p| out.write_path(i, p))?;
            out.finish()?;
            Outcome::Done
        }
        Command::Transforms => {
            emit_transforms(&cfg.config, &mut sink)?;
            Outcome::Done
        }
        Command::Experiment(e) => {
            let report = e.run(&cfg.config)?;
            match cfg.format {
                Format::Csv => emit_report_csv(&report, &mut sink).map(drop)?,
                Format::Json => emit_report_json(&report, &cfg.config, &mut sink).map(drop)?,
            }
            eprintln!("{}: {} ({:.1}s)", report.name, report.verdict, report.wall_time);
            Outcome::Verdict(report.verdict)
        }
    };
    sink.flush().map_err(output::io_error)?;
    sink.commit()?;
    Ok(outcome)
}

/// Parses `argv`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_args(argv).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("hdsim: {e}");
            e.exit_code()
        }
    }
}
