//! Sign law `P(X^theta_t >= 0 | X_0 = 0) = (1 + theta)/2`.

use super::{fmt_num, per_path, ExperimentConfig, ExperimentReport, ReportRow};
use crate::error::{param, Result};
use crate::estimate::empirical_sign_prob;
use crate::exact::{skew_solution_path, skew_start};
use crate::noise::{sample_skew_bm, SkewParams};

/// Tolerance in binomial standard errors.
const K_SE: f64 = 4.0;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    mp.require_unit_alpha("the skew experiment")?;
    if mp.x0 != 0.0 {
        return param(format!("the sign law is stated for a start at 0, got x0 = {}", mp.x0));
    }
    let thetas = match (&cfg.theta_grid, mp.theta) {
        (Some(g), _) => g.clone(),
        (None, Some(t)) => vec![t],
        (None, None) => return param("the skew experiment needs theta or a theta grid"),
    };
    let p = cfg.partition()?;
    let start = skew_start(mp.x0, mp.alpha);
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in &thetas {
        let sp = SkewParams::new(theta, start)?;
        let terminal = per_path(cfg.n_paths, |i| {
            let b = sample_skew_bm(&p, sp, cfg.seed, i, cfg.skew_method)?;
            Ok(skew_solution_path(&b, mp.alpha)?.terminal())
        })?;
        let s = empirical_sign_prob(&terminal)?;
        let target = 0.5 * (1.0 + theta);
        let pass = (s.mean - target).abs() <= K_SE * s.std_error;
        rows.push(ReportRow::new(format!("theta={}", fmt_num(theta)), s, pass));
    }
    Ok(ExperimentReport::from_rows("skew", rows))
}
