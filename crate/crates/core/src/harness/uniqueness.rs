//! Pathwise uniqueness seen through mesh refinement: Euler solutions at
//! consecutive levels approach each other and the solution is recovered
//! exactly from its rotated noise.

use super::{columns, per_path, trend_rows, ExperimentConfig, ExperimentReport};
use crate::error::Result;
use crate::exact::{reconstruction_residual, recover_rotated_noise};
use crate::integrate::simulate;
use crate::lamperti::TransformTable;
use crate::noise::{sample_bm_pair, Partition};

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_unit_alpha("the uniqueness experiment")?;
    mp.require_positive_eps("pathwise uniqueness")?;
    let levels = cfg.level_grid()?.to_vec();
    let grids = levels.iter().map(|&l| Partition::new(cfg.t_end, l)).collect::<Result<Vec<_>>>()?;
    let table = TransformTable::new(&mp)?;
    let n = levels.len();

    // Per path: n - 1 terminal gaps, then n reconstruction residuals.
    let per = per_path(cfg.n_paths, |i| {
        let coarse = sample_bm_pair(&grids[0], cfg.seed, i);
        let mut terminals = Vec::with_capacity(n);
        let mut out = Vec::with_capacity(2 * n - 1);
        let mut recon = Vec::with_capacity(n);
        for g in &grids {
            let noise = coarse.refine(g)?;
            let y = simulate(&noise, mp.x0, &mp, &cfg.scheme)?;
            terminals.push(y.terminal());
            let rn = recover_rotated_noise(&y, &noise.b, &noise.w, &mp)?;
            recon.push(reconstruction_residual(&y, &rn.w_hat, &table)?);
        }
        out.extend(terminals.windows(2).map(|w| (w[1] - w[0]).abs()));
        out.extend(recon);
        Ok(out)
    })?;
    let cols = columns(&per, 2 * n - 1);
    let gap_labels: Vec<String> = levels.windows(2).map(|w| format!("levels={}-{}", w[0], w[1])).collect();
    let labels: Vec<String> = levels.iter().map(|l| format!("level={l}")).collect();
    let mut rows = trend_rows("terminal_gap", &gap_labels, &cols[..n - 1], 0)?;
    rows.extend(trend_rows("reconstruction_residual", &labels, &cols[n - 1..], 0)?);
    Ok(ExperimentReport::from_rows("uniqueness", rows))
}
