//! Time spent at zero: the benchmark solution leaves zero immediately while the
//! plateau solution sits there for a positive fraction of time.

use super::{columns, fmt_num, per_path, strictly_decreasing_rows, ExperimentConfig, ExperimentReport, ReportRow};
use crate::error::{param, Result};
use crate::estimate::{occupation_time, McSummary};
use crate::exact::{benchmark_path, plateau_path};
use crate::noise::sample_bm_pair;

/// Upper bound on the benchmark occupation at the narrowest band.
const BENCHMARK_MAX: f64 = 0.02;
/// Lower bound on the plateau occupation of exact zeros.
const PLATEAU_MIN: f64 = 0.1;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_unit_alpha("the occupation experiment")?;
    let deltas = match &cfg.delta_grid {
        Some(g) => g.clone(),
        None => return param("the occupation experiment needs a band grid"),
    };
    let (a, b) = (mp.plateau_a.unwrap_or(0.5), mp.plateau_b.unwrap_or(0.5));
    let p = cfg.partition()?;
    let per = per_path(cfg.n_paths, |i| {
        let bm = sample_bm_pair(&p, cfg.seed, i).b;
        let x = benchmark_path(&bm, mp.x0, mp.alpha)?;
        let mut out = deltas.iter().map(|&d| occupation_time(&x, d)).collect::<Result<Vec<_>>>()?;
        out.push(occupation_time(&plateau_path(&bm, mp.alpha, a, b)?, 0.0)?);
        Ok(out)
    })?;
    let cols = columns(&per, deltas.len() + 1);
    let labels: Vec<String> = deltas.iter().map(|d| format!("delta={}", fmt_num(*d))).collect();
    let mut rows = strictly_decreasing_rows("benchmark_occupation", &labels, &cols[..deltas.len()])?;
    if let Some(last) = rows.last_mut() {
        last.pass &= last.summary.mean < BENCHMARK_MAX;
    }
    let plateau = McSummary::from_samples(&cols[deltas.len()])?;
    rows.push(ReportRow::new(
        format!("plateau_zero_occupation[a={},b={}]", fmt_num(a), fmt_num(b)),
        plateau,
        plateau.mean > PLATEAU_MIN,
    ));
    Ok(ExperimentReport::from_rows("occupation", rows))
}
