//! Weak solutions built by rotating a pair of independent Brownian motions.

use super::{columns, per_path, trend_rows, ExperimentConfig, ExperimentReport, ReportRow};
use crate::error::Result;
use crate::estimate::{default_vp_cutoff, ks_critical_1pct, ks_statistic, normal_cdf, terminal_covariation, McSummary};
use crate::exact::weak_solution_triple;
use crate::lamperti::TransformTable;
use crate::noise::{sample_bm_pair, Partition};

const K_SE: f64 = 3.0;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_positive_eps("the weak construction")?;
    let table = TransformTable::new(&mp)?;
    let t = cfg.t_end;
    let p = cfg.partition()?;

    // Per path: [B]_T, [W]_T, [B, W]_T and the normalized terminal transform.
    let per = per_path(cfg.n_paths, |i| {
        let np = sample_bm_pair(&p, cfg.seed, i);
        let tr = weak_solution_triple(&np.b, &np.w, mp.x0, &table)?;
        let z = (table.forward(tr.y.terminal())? - table.forward(mp.x0)?) / t.sqrt();
        Ok(vec![
            terminal_covariation(&tr.b, &tr.b)?,
            terminal_covariation(&tr.w, &tr.w)?,
            terminal_covariation(&tr.b, &tr.w)?,
            z,
        ])
    })?;
    let cols = columns(&per, 4);
    let mut rows = Vec::new();
    for (name, col, target) in [("bracket_B", &cols[0], t), ("bracket_W", &cols[1], t), ("bracket_BW", &cols[2], 0.0)] {
        let s = McSummary::from_samples(col)?;
        rows.push(ReportRow::new(format!("{name}[t={t}]"), s, s.within(target, K_SE)));
    }
    let ks = ks_statistic(&cols[3], normal_cdf(0.0, 1.0))?;
    let crit = ks_critical_1pct(cfg.n_paths);
    rows.push(ReportRow::exact(format!("ks_transform[crit={crit:.6}]"), ks, cfg.n_paths, ks < crit));

    if let Some(levels) = &cfg.level_grid {
        let grids = levels.iter().map(|&l| Partition::new(t, l)).collect::<Result<Vec<_>>>()?;
        let res = per_path(cfg.n_paths, |i| {
            let coarse = sample_bm_pair(&grids[0], cfg.seed, i);
            grids
                .iter()
                .map(|g| {
                    let np = coarse.refine(g)?;
                    let tr = weak_solution_triple(&np.b, &np.w, mp.x0, &table)?;
                    let cutoff = (mp.alpha < 0.0).then(|| default_vp_cutoff(g.mesh()));
                    tr.ito_residual(&mp, cutoff)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let labels: Vec<String> = levels.iter().map(|l| format!("level={l}")).collect();
        rows.extend(trend_rows("ito_residual", &labels, &columns(&res, levels.len()), 0)?);
    }
    Ok(ExperimentReport::from_rows("weak", rows))
}
