//! Bracket identity `[|Y|^alpha, B]_t = alpha int (Y)^{2 alpha - 1} ds` under mesh refinement.

use super::{columns, per_path, trend_rows, ExperimentConfig, ExperimentReport, ReportRow};
use crate::error::Result;
use crate::estimate::bracket_residual;
use crate::exact::benchmark_path;
use crate::integrate::simulate;
use crate::noise::{sample_bm_pair, Partition, Path};
use crate::power::abs_pow;

/// Trend tolerance for the bracket medians.
const ALLOWED_INVERSIONS: usize = 1;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_unit_alpha("the bracket experiment")?;
    mp.require_positive_eps("the bracket experiment")?;
    let levels = cfg.level_grid()?.to_vec();
    let grids = levels.iter().map(|&l| Partition::new(cfg.t_end, l)).collect::<Result<Vec<_>>>()?;
    let n_levels = levels.len();

    // Per path: solution residuals, then benchmark residuals, one per level.
    let per = per_path(cfg.n_paths, |i| {
        let coarse = sample_bm_pair(&grids[0], cfg.seed, i);
        let mut out = vec![0.0; 2 * n_levels];
        for (j, p) in grids.iter().enumerate() {
            let noise = coarse.refine(p)?;
            let y = simulate(&noise, mp.x0, &mp, &cfg.scheme)?;
            out[j] = bracket_residual(&y, &noise.b, mp.alpha)?;
            let x0 = benchmark_path(&noise.b, mp.x0, mp.alpha)?;
            out[n_levels + j] = bracket_residual(&x0, &noise.b, mp.alpha)?;
        }
        Ok(out)
    })?;
    let cols = columns(&per, 2 * n_levels);
    let labels: Vec<String> = levels.iter().map(|l| format!("level={l}")).collect();
    let mut rows = trend_rows("bracket_residual", &labels, &cols[..n_levels], ALLOWED_INVERSIONS)?;
    rows.extend(trend_rows("benchmark_bracket_residual", &labels, &cols[n_levels..], ALLOWED_INVERSIONS)?);

    // A constant path is not a solution: its residual is exactly alpha |c|^{2 alpha - 1} t.
    let c = if mp.x0 != 0.0 { mp.x0 } else { 1.0 };
    let finest = &grids[n_levels - 1];
    let b = sample_bm_pair(&grids[0], cfg.seed, 0).refine(finest)?.b;
    let control = bracket_residual(&Path::constant(finest, c), &b, mp.alpha)?;
    let expected = mp.alpha * abs_pow(c, 2.0 * mp.alpha - 1.0) * cfg.t_end;
    let matches = (control - expected).abs() <= 1e-9 * expected.abs().max(1.0);
    rows.push(ReportRow::exact(format!("constant_control[c={c}]"), control, 1, matches));
    Ok(ExperimentReport::from_rows("bracket", rows))
}
