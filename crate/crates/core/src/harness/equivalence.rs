//! Ito and Stratonovich formulations share solutions: Heun and Euler paths
//! driven by the same noise approach each other as the mesh shrinks.

use super::{columns, per_path, trend_rows, ExperimentConfig, ExperimentReport};
use crate::error::Result;
use crate::integrate::{euler_maruyama_ito, heun_stratonovich, SchemeConfig};
use crate::noise::{sample_bm_pair, Partition};

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_unit_alpha("the equivalence experiment")?;
    let levels = cfg.level_grid()?.to_vec();
    let grids = levels.iter().map(|&l| Partition::new(cfg.t_end, l)).collect::<Result<Vec<_>>>()?;
    let euler = SchemeConfig { scheme: crate::integrate::Scheme::EulerIto, ..cfg.scheme };
    let per = per_path(cfg.n_paths, |i| {
        let coarse = sample_bm_pair(&grids[0], cfg.seed, i);
        grids
            .iter()
            .map(|g| {
                let noise = coarse.refine(g)?;
                let e = euler_maruyama_ito(&noise, mp.x0, &mp, &euler)?;
                let h = heun_stratonovich(&noise, mp.x0, &mp)?;
                Ok((e.terminal() - h.terminal()).abs())
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let labels: Vec<String> = levels.iter().map(|l| format!("level={l}")).collect();
    let rows = trend_rows("terminal_difference", &labels, &columns(&per, levels.len()), 0)?;
    Ok(ExperimentReport::from_rows("equivalence", rows))
}
