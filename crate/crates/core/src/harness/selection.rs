//! `X^eps -> X^0` as `eps -> 0` under common noise.

use super::{columns, fmt_num, per_path, strictly_decreasing_rows, ExperimentConfig, ExperimentReport, ReportRow};
use crate::error::Result;
use crate::estimate::{sup_distance, McSummary};
use crate::exact::{benchmark_path, selection_remainder};
use crate::integrate::simulate;
use crate::lamperti::TransformTable;
use crate::noise::sample_bm_pair;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_unit_alpha("the selection experiment")?;
    let grid = cfg.eps_grid()?.to_vec();
    let p = cfg.partition()?;
    let tables = grid
        .iter()
        .map(|&e| TransformTable::new(&mp.with_eps(e)?))
        .collect::<Result<Vec<_>>>()?;

    // Per path: sup distance then sup |I|^2 for every eps.
    let per = per_path(cfg.n_paths, |i| {
        let noise = sample_bm_pair(&p, cfg.seed, i);
        let bench = benchmark_path(&noise.b, mp.x0, mp.alpha)?;
        let mut out = Vec::with_capacity(2 * grid.len());
        for (&eps, table) in grid.iter().zip(&tables) {
            let x = if eps == 0.0 {
                bench.clone()
            } else {
                simulate(&noise, mp.x0, &mp.with_eps(eps)?, &cfg.scheme)?
            };
            let rem = selection_remainder(&x, &noise.b, table)?;
            let sup_i = rem.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            out.push(sup_distance(&x, &bench)?);
            out.push(sup_i * sup_i);
        }
        Ok(out)
    })?;
    let cols = columns(&per, 2 * grid.len());
    let labels: Vec<String> = grid.iter().map(|e| format!("eps={}", fmt_num(*e))).collect();
    let dist: Vec<Vec<f64>> = cols.iter().step_by(2).cloned().collect();
    let rem: Vec<Vec<f64>> = cols.iter().skip(1).step_by(2).cloned().collect();

    let mut rows = strictly_decreasing_rows("sup_distance", &labels, &dist)?;
    let rem_rows = strictly_decreasing_rows("sup_remainder_sq", &labels, &rem)?;
    let first = rem_rows[0].summary.mean;
    let last = rem_rows[rem_rows.len() - 1].summary.mean;
    rows.extend(rem_rows);
    if grid.len() > 1 {
        let ratio = if first > 0.0 { last / first } else { f64::NAN };
        rows.push(ReportRow::new(
            "sup_remainder_sq:last_over_first",
            McSummary::new(ratio, 0.0, cfg.n_paths),
            ratio < 0.5,
        ));
    }
    Ok(ExperimentReport::from_rows("selection", rows))
}
