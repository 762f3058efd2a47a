//! Negative moments `E|X^eps_t|^a`, `a in (-1, 0)`, stay bounded: the
//! estimates are stable when the ensemble doubles.

use statrs::function::gamma::gamma;

use super::{fmt_num, per_path, ExperimentConfig, ExperimentReport, ReportRow};
use crate::error::{param, Result};
use crate::estimate::negative_moment;
use crate::integrate::{simulate, SchemeConfig};
use crate::lamperti::ModelParams;
use crate::noise::sample_bm_pair;

const TIME_FRACTIONS: [f64; 3] = [0.25, 0.5, 1.0];
const MAX_RELATIVE_CHANGE: f64 = 0.2;
const K_SE: f64 = 3.0;
/// Noise level of the Gaussian control `X = B + eps W`.
const CONTROL_EPS: f64 = 1.0;

/// `E|N(0, sd^2)|^a = sd^a 2^{a/2} Gamma((a+1)/2) / sqrt(pi)` for `a > -1`.
pub fn gaussian_abs_moment(sd: f64, a: f64) -> f64 {
    sd.powf(a) * 2f64.powf(0.5 * a) * gamma(0.5 * (a + 1.0)) / std::f64::consts::PI.sqrt()
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mp = cfg.params;
    let a = cfg.moment_order;
    if !(a > -1.0 && a < 0.0) {
        return param(format!("moment order must lie in (-1, 0), got {a}"));
    }
    mp.require_unit_alpha("the moment experiment")?;
    mp.require_positive_eps("the moment experiment")?;
    let p = cfg.partition()?;
    let idx: Vec<usize> = TIME_FRACTIONS.iter().map(|f| p.index_of(f * cfg.t_end)).collect();
    let control = ModelParams::new(0.0, CONTROL_EPS, 0.0)?;
    let euler = SchemeConfig::euler();
    let n = cfg.n_paths;

    // Per path: X at each time, then the control at t_end.
    let per = per_path(2 * n, |i| {
        let noise = sample_bm_pair(&p, cfg.seed, i);
        let x = simulate(&noise, mp.x0, &mp, &cfg.scheme)?;
        let g = simulate(&noise, control.x0, &control, &euler)?;
        let mut out: Vec<f64> = idx.iter().map(|&k| x.values()[k]).collect();
        out.push(g.terminal());
        Ok(out)
    })?;

    let mut rows = Vec::new();
    for (j, &k) in idx.iter().enumerate() {
        let t = fmt_num(p.times()[k]);
        let vals: Vec<f64> = per.iter().map(|r| r[j]).collect();
        let small = negative_moment(&vals[..n], a)?;
        let large = negative_moment(&vals, a)?;
        let change = (large.mean - small.mean).abs() / small.mean.abs();
        rows.push(ReportRow::new(format!("moment[t={t},n={n}]"), small, small.mean.is_finite()));
        rows.push(ReportRow::new(
            format!("moment[t={t},n={}]", 2 * n),
            large,
            large.mean.is_finite() && change < MAX_RELATIVE_CHANGE,
        ));
    }
    let ctrl: Vec<f64> = per.iter().map(|r| r[TIME_FRACTIONS.len()]).collect();
    let s = negative_moment(&ctrl, a)?;
    let sd = ((1.0 + CONTROL_EPS * CONTROL_EPS) * cfg.t_end).sqrt();
    let oracle = gaussian_abs_moment(sd, a);
    rows.push(ReportRow::new(
        format!("gaussian_control[t={},target={oracle:.6}]", fmt_num(cfg.t_end)),
        s,
        s.within(oracle, K_SE),
    ));
    Ok(ExperimentReport::from_rows("moments", rows))
}
