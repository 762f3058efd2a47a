//! Monte Carlo experiments with pass/fail verdicts.
//!
//! Each experiment is a deterministic function of its [`ExperimentConfig`]:
//! path `i` draws from the keyed streams of `(seed, i)`, per-path results are
//! collected in index order, and all reductions run sequentially over that
//! order. Reports are therefore bitwise identical for any worker count.

mod bracket;
mod equivalence;
mod moments;
mod occupation;
mod selection;
mod skew;
mod uniqueness;
mod weak;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::estimate::{count_inversions, median, McSummary};
use crate::integrate::{simulate, SchemeConfig, Taming};
use crate::lamperti::ModelParams;
use crate::noise::{sample_bm_pair, Partition, Path, SkewMethod, MAX_LEVEL};

pub use moments::gaussian_abs_moment;

/// Smallest ensemble accepted by the statistical experiments.
pub const MIN_PATHS: usize = 100;

/// Medians at or below this level are rounding noise of an exact construction;
/// a trend over them passes.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub t_end: f64,
    pub level: u32,
    pub n_paths: usize,
    pub seed: u64,
    pub eps_grid: Option<Vec<f64>>,
    pub level_grid: Option<Vec<u32>>,
    pub theta_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    /// Exponent of the negative-moment experiment.
    pub moment_order: f64,
    pub scheme: SchemeConfig,
    pub skew_method: SkewMethod,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            t_end: 1.0,
            level: 12,
            n_paths: 10_000,
            seed: 42,
            eps_grid: None,
            level_grid: None,
            theta_grid: None,
            delta_grid: None,
            moment_order: -0.5,
            scheme: SchemeConfig::default(),
            skew_method: SkewMethod::ExcursionFlip,
            workers: 0,
        }
    }

    /// Checks the fields used by plain path simulation.
    pub fn validate_model(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return param(format!("t_end must be finite and > 0, got {}", self.t_end));
        }
        if self.level > MAX_LEVEL {
            return param(format!("level must be <= {MAX_LEVEL}, got {}", self.level));
        }
        if self.scheme.taming == Taming::Clip && !(self.scheme.clip_scale > 0.0 && self.scheme.clip_scale.is_finite()) {
            return param(format!("clip_scale must be finite and > 0, got {}", self.scheme.clip_scale));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_model()?;
        if self.n_paths < MIN_PATHS {
            return param(format!("statistical experiments need n_paths >= {MIN_PATHS}, got {}", self.n_paths));
        }
        if let Some(g) = &self.eps_grid {
            if g.is_empty() || g.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
                return param("eps_grid must be a non-empty list of finite values >= 0");
            }
            if g.windows(2).any(|w| !(w[1] < w[0])) {
                return param(format!("eps_grid must be strictly decreasing, got {g:?}"));
            }
        }
        if let Some(g) = &self.level_grid {
            if g.len() < 2 {
                return param("level_grid needs at least two levels");
            }
            if g.windows(2).any(|w| w[1] <= w[0]) {
                return param(format!("level_grid must be strictly increasing, got {g:?}"));
            }
            if g[g.len() - 1] > MAX_LEVEL {
                return param(format!("level_grid entries must be <= {MAX_LEVEL}"));
            }
        }
        if let Some(g) = &self.theta_grid {
            if g.is_empty() || g.iter().any(|t| !(t.abs() <= 1.0)) {
                return param(format!("|theta| <= 1 required for every theta, got {g:?}"));
            }
        }
        if let Some(g) = &self.delta_grid {
            if g.is_empty() || g.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
                return param("delta_grid must be a non-empty list of finite values >= 0");
            }
        }
        Ok(())
    }

    pub fn partition(&self) -> Result<Partition> {
        Partition::new(self.t_end, self.level)
    }

    pub(crate) fn eps_grid(&self) -> Result<&[f64]> {
        match &self.eps_grid {
            Some(g) => Ok(g),
            None => param("this experiment needs an eps grid"),
        }
    }

    pub(crate) fn level_grid(&self) -> Result<&[u32]> {
        match &self.level_grid {
            Some(g) => Ok(g),
            None => param("this experiment needs a level grid"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One parameter point of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub param: String,
    #[serde(flatten)]
    pub summary: McSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(param: impl Into<String>, summary: McSummary, pass: bool) -> Self {
        Self { param: param.into(), summary, median: None, pass }
    }

    pub fn with_median(mut self, median: f64) -> Self {
        self.median = Some(median);
        self
    }

    /// A row for a deterministic statistic (standard error 0).
    pub fn exact(param: impl Into<String>, value: f64, n: usize, pass: bool) -> Self {
        Self::new(param, McSummary::new(value, 0.0, n), pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
    pub wall_time: f64,
}

impl ExperimentReport {
    /// Verdict is `pass` iff every row passes; a non-finite statistic makes the
    /// run inconclusive rather than failed.
    pub fn from_rows(name: &str, rows: Vec<ReportRow>) -> Self {
        let finite = rows.iter().all(|r| {
            let s = &r.summary;
            s.mean.is_finite() && s.std_error.is_finite() && r.median.is_none_or(f64::is_finite)
        });
        let verdict = if !finite {
            Verdict::Inconclusive
        } else if rows.iter().all(|r| r.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self { name: name.to_string(), rows, verdict, wall_time: 0.0 }
    }

    pub fn row(&self, param: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.param == param)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Selection,
    Bracket,
    Skew,
    Weak,
    Uniqueness,
    Moments,
    Equivalence,
    Occupation,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Selection,
        Experiment::Bracket,
        Experiment::Skew,
        Experiment::Weak,
        Experiment::Uniqueness,
        Experiment::Moments,
        Experiment::Equivalence,
        Experiment::Occupation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Selection => "selection",
            Experiment::Bracket => "bracket",
            Experiment::Skew => "skew",
            Experiment::Weak => "weak",
            Experiment::Uniqueness => "uniqueness",
            Experiment::Moments => "moments",
            Experiment::Equivalence => "equivalence",
            Experiment::Occupation => "occupation",
        }
    }

    /// Configuration that reproduces the reference parameter point of the experiment.
    pub fn default_config(self) -> ExperimentConfig {
        let mp = |alpha, eps, x0| ModelParams::new(alpha, eps, x0).expect("default parameters are valid");
        let levels = Some(vec![10, 12, 14, 16]);
        match self {
            Experiment::Selection => ExperimentConfig {
                level: 14,
                n_paths: 1000,
                eps_grid: Some(vec![0.4, 0.2, 0.1, 0.05]),
                ..ExperimentConfig::new(mp(0.5, 0.0, 0.0))
            },
            Experiment::Bracket => {
                ExperimentConfig { level: 16, n_paths: 200, level_grid: levels, ..ExperimentConfig::new(mp(0.5, 0.5, 1.0)) }
            }
            Experiment::Skew => ExperimentConfig {
                n_paths: 10_000,
                theta_grid: Some(vec![-0.5, 0.0, 0.5, 1.0]),
                ..ExperimentConfig::new(mp(0.5, 0.0, 0.0))
            },
            Experiment::Weak => ExperimentConfig {
                level: 14,
                n_paths: 1000,
                level_grid: levels,
                ..ExperimentConfig::new(mp(0.5, 0.5, 0.0))
            },
            Experiment::Uniqueness => {
                ExperimentConfig { level: 16, n_paths: 200, level_grid: levels, ..ExperimentConfig::new(mp(0.5, 0.25, 0.0)) }
            }
            Experiment::Moments => ExperimentConfig { n_paths: 10_000, ..ExperimentConfig::new(mp(0.5, 0.5, 0.0)) },
            Experiment::Equivalence => {
                ExperimentConfig { level: 16, n_paths: 100, level_grid: levels, ..ExperimentConfig::new(mp(0.5, 0.5, 1.0)) }
            }
            Experiment::Occupation => ExperimentConfig {
                level: 14,
                n_paths: 1000,
                delta_grid: Some(vec![0.1, 0.05, 0.01]),
                ..ExperimentConfig::new(ModelParams { plateau_a: Some(0.5), plateau_b: Some(0.5), ..mp(0.5, 0.0, 0.0) })
            },
        }
    }

    /// Runs the experiment on a pool of `cfg.workers` threads.
    pub fn run(self, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
        cfg.validate()?;
        let pool = worker_pool(cfg.workers)?;
        let start = Instant::now();
        let mut report = pool.install(|| match self {
            Experiment::Selection => selection::run(cfg),
            Experiment::Bracket => bracket::run(cfg),
            Experiment::Skew => skew::run(cfg),
            Experiment::Weak => weak::run(cfg),
            Experiment::Uniqueness => uniqueness::run(cfg),
            Experiment::Moments => moments::run(cfg),
            Experiment::Equivalence => equivalence::run(cfg),
            Experiment::Occupation => occupation::run(cfg),
        })?;
        report.wall_time = start.elapsed().as_secs_f64();
        Ok(report)
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
            Error::Parameter(format!("unknown experiment '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn run_selection_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Selection.run(cfg)
}

pub fn run_bracket_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Bracket.run(cfg)
}

pub fn run_skew_probability_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Skew.run(cfg)
}

pub fn run_weak_construction_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Weak.run(cfg)
}

pub fn run_uniqueness_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Uniqueness.run(cfg)
}

pub fn run_moment_bound_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Moments.run(cfg)
}

pub fn run_equivalence_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Equivalence.run(cfg)
}

pub fn run_occupation_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::Occupation.run(cfg)
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))
}

/// Paths simulated per parallel batch in [`simulate_paths`].
const SIM_CHUNK: u64 = 256;

/// Simulates `cfg.n_paths` solutions of the regularized equation with
/// `cfg.scheme`, path `i` driven by the noise pair of `(cfg.seed, i)`, and
/// hands them to `sink` in index order. Batches are computed in parallel so
/// memory stays bounded by one batch.
pub fn simulate_paths<E: From<Error>>(
    cfg: &ExperimentConfig,
    mut sink: impl FnMut(u64, &Path) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    cfg.validate_model()?;
    let p = cfg.partition()?;
    let pool = worker_pool(cfg.workers)?;
    let n = cfg.n_paths as u64;
    let mut start = 0;
    while start < n {
        let end = (start + SIM_CHUNK).min(n);
        let batch: Vec<Result<Path>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| simulate(&sample_bm_pair(&p, cfg.seed, i), cfg.params.x0, &cfg.params, &cfg.scheme))
                .collect()
        });
        for (i, path) in (start..end).zip(batch) {
            sink(i, &path?)?;
        }
        start = end;
    }
    Ok(())
}

/// Evaluates `f` on path indices `0..n` in parallel and returns the results in
/// index order. On failure the error of the lowest failing index is returned.
pub(crate) fn per_path<T: Send>(n: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = (0..n as u64).into_par_iter().map(f).collect();
    results.into_iter().collect()
}

/// Transposes per-path rows of per-point values into per-point columns.
pub(crate) fn columns(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    (0..width).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Per-level rows carrying the McSummary and median of `samples`, followed by a
/// trend row on the medians: decreasing from first to last with at most
/// `allowed_inversions` adjacent non-decreases.
pub(crate) fn trend_rows(
    metric: &str,
    labels: &[String],
    samples: &[Vec<f64>],
    allowed_inversions: usize,
) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::with_capacity(labels.len() + 1);
    let mut medians = Vec::with_capacity(labels.len());
    for (label, s) in labels.iter().zip(samples) {
        let m = median(s);
        medians.push(m);
        rows.push(ReportRow::new(format!("{metric}[{label}]"), McSummary::from_samples(s)?, true).with_median(m));
    }
    let inversions = count_inversions(&medians);
    let exact = medians.iter().all(|m| m.abs() <= ROUNDING_FLOOR);
    let pass = exact || (inversions <= allowed_inversions && medians[medians.len() - 1] < medians[0]);
    rows.push(ReportRow::exact(format!("{metric}:median_inversions"), inversions as f64, medians.len(), pass));
    Ok(rows)
}

/// Rows whose means must decrease strictly in the order given: each row after
/// the first passes iff its mean is below its predecessor's.
pub(crate) fn strictly_decreasing_rows(metric: &str, labels: &[String], samples: &[Vec<f64>]) -> Result<Vec<ReportRow>> {
    let mut rows: Vec<ReportRow> = Vec::with_capacity(labels.len());
    for (label, s) in labels.iter().zip(samples) {
        let summary = McSummary::from_samples(s)?;
        let pass = rows.last().is_none_or(|prev| summary.mean < prev.summary.mean);
        rows.push(ReportRow::new(format!("{metric}[{label}]"), summary, pass));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_rows() {
        let s = McSummary::new(1.0, 0.1, 10);
        let ok = ExperimentReport::from_rows("x", vec![ReportRow::new("a", s, true), ReportRow::new("b", s, true)]);
        assert_eq!(ok.verdict, Verdict::Pass);
        let bad = ExperimentReport::from_rows("x", vec![ReportRow::new("a", s, true), ReportRow::new("b", s, false)]);
        assert_eq!(bad.verdict, Verdict::Fail);
        let nan = ExperimentReport::from_rows("x", vec![ReportRow::new("a", McSummary::new(f64::NAN, 0.0, 1), false)]);
        assert_eq!(nan.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn config_validation() {
        let base = Experiment::Selection.default_config();
        assert!(base.validate().is_ok());
        assert!(ExperimentConfig { n_paths: 99, ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { eps_grid: Some(vec![0.1, 0.2]), ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { level_grid: Some(vec![12, 10]), ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { theta_grid: Some(vec![1.5]), ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { t_end: 0.0, ..base }.validate().is_err());
        for e in Experiment::ALL {
            assert!(e.default_config().validate().is_ok(), "{e}");
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn simulated_paths_arrive_in_order() {
        let mut cfg = ExperimentConfig::new(ModelParams::new(0.5, 0.5, 0.0).unwrap());
        cfg.level = 4;
        cfg.n_paths = 600;
        cfg.workers = 2;
        let mut seen = vec![];
        simulate_paths::<Error>(&cfg, |i, p| {
            assert_eq!(p.len(), 17);
            seen.push(i);
            Ok(())
        })
        .unwrap();
        assert!(seen.iter().copied().eq(0..600));
        cfg.n_paths = 0;
        simulate_paths::<Error>(&cfg, |_, _| panic!("no paths requested")).unwrap();
    }

    #[test]
    fn per_path_keeps_index_order_and_first_error() {
        let v = per_path(1000, |i| Ok(i * 2)).unwrap();
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i as u64));
        let e = per_path(1000, |i| if i >= 500 { Err(Error::Numerical(format!("{i}"))) } else { Ok(i) });
        assert_eq!(e.unwrap_err(), Error::Numerical("500".into()));
    }

    #[test]
    fn trend_rows_allow_configured_inversions() {
        let labels: Vec<String> = (0..4).map(|i| i.to_string()).collect();
        let s = |m: f64| vec![m, m, m];
        let rows = trend_rows("r", &labels, &[s(4.0), s(3.0), s(3.5), s(1.0)], 1).unwrap();
        assert!(rows.last().unwrap().pass);
        let rows = trend_rows("r", &labels, &[s(4.0), s(3.0), s(3.5), s(1.0)], 0).unwrap();
        assert!(!rows.last().unwrap().pass);
        let rows = trend_rows("r", &labels, &[s(1.0), s(0.5), s(0.7), s(1.5)], 1).unwrap();
        assert!(!rows.last().unwrap().pass);
        let rows = trend_rows("r", &labels, &[s(1e-17), s(3e-17), s(0.0), s(2e-17)], 0).unwrap();
        assert!(rows.last().unwrap().pass);
    }
}
