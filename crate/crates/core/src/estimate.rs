//! Partition-based functionals of sampled paths and Monte Carlo summaries.
//!
//! Time integrals are left-endpoint Riemann sums over the grid, matching the
//! Ito convention. The exceptions are noted on [`local_time_zero`].

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{param, Result};
use crate::noise::Path;
use crate::power::{abs_pow, signed_pow};

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A Monte Carlo mean with its standard error and 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl McSummary {
    pub fn new(mean: f64, std_error: f64, n: usize) -> Self {
        Self { mean, std_error, n, ci_low: mean - Z95 * std_error, ci_high: mean + Z95 * std_error }
    }

    /// Sample mean and `sample_std / sqrt(n)`; summation runs in slice order.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return param("cannot summarize an empty sample");
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self::new(mean, se, n))
    }

    /// `|mean - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Number of adjacent pairs with `next >= prev` in a sequence expected to decrease.
pub fn count_inversions(seq: &[f64]) -> usize {
    seq.windows(2).filter(|w| !(w[1] < w[0])).count()
}

/// Partial sums `sum_{t_k < t} (X_{k+1} - X_k)(Y_{k+1} - Y_k)` at every grid time.
pub fn quadratic_covariation(x: &Path, y: &Path) -> Result<Path> {
    x.check_same_grid(y)?;
    let (xv, yv) = (x.values(), y.values());
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(xv.len());
    out.push(0.0);
    for k in 0..xv.len() - 1 {
        acc += (xv[k + 1] - xv[k]) * (yv[k + 1] - yv[k]);
        out.push(acc);
    }
    Ok(Path::from_parts(x.partition().clone(), out))
}

/// Terminal value of [`quadratic_covariation`] without building the path.
pub fn terminal_covariation(x: &Path, y: &Path) -> Result<f64> {
    x.check_same_grid(y)?;
    let (xv, yv) = (x.values(), y.values());
    Ok((0..xv.len() - 1).map(|k| (xv[k + 1] - xv[k]) * (yv[k + 1] - yv[k])).sum())
}

/// `sup_t | [|Y|^alpha, B]_t - alpha sum_{t_k < t} (Y_k)^{2 alpha - 1} dt |`.
pub fn bracket_residual(y: &Path, b: &Path, alpha: f64) -> Result<f64> {
    y.check_same_grid(b)?;
    let dt = y.partition().mesh();
    let (yv, bv) = (y.values(), b.values());
    let (mut bracket, mut drift, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    let mut p_prev = abs_pow(yv[0], alpha);
    for k in 0..yv.len() - 1 {
        let p_next = abs_pow(yv[k + 1], alpha);
        bracket += (p_next - p_prev) * (bv[k + 1] - bv[k]);
        drift += alpha * signed_pow(yv[k], 2.0 * alpha - 1.0) * dt;
        sup = sup.max((bracket - drift).abs());
        p_prev = p_next;
    }
    Ok(sup)
}

/// Symmetric local time at zero, `(2 delta)^-1 Leb{s <= t_end : |X_s| <= delta}`,
/// with the occupation counted at the right endpoints `t_1..t_n`. Leaving out
/// `t_0` keeps a path started at zero from contributing a full `mesh / 2 delta`
/// for the initial point when `delta` is far below one step's fluctuation.
pub fn local_time_zero(x: &Path, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return param(format!("local time bandwidth must be > 0, got {delta}"));
    }
    let mesh = x.partition().mesh();
    let count = x.values()[1..].iter().filter(|v| v.abs() <= delta).count();
    Ok(count as f64 * mesh / (2.0 * delta))
}

/// Default local-time bandwidth `3 sqrt(mesh)`.
pub fn default_local_time_bandwidth(mesh: f64) -> f64 {
    3.0 * mesh.sqrt()
}

/// `mesh * #{k < n : |X_k| <= delta}`; `delta = 0` counts exact zeros.
pub fn occupation_time(x: &Path, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return param(format!("occupation band must be >= 0, got {delta}"));
    }
    let v = x.values();
    let count = v[..v.len() - 1].iter().filter(|v| v.abs() <= delta).count();
    Ok(count as f64 * x.partition().mesh())
}

/// `max_k |X_k - Y_k|`.
pub fn sup_distance(x: &Path, y: &Path) -> Result<f64> {
    x.check_same_grid(y)?;
    Ok(x.values().iter().zip(y.values()).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Cut-off drift integral `sum (Y_k)^{2 alpha - 1} 1(|Y_k| > delta) dt` for
/// `alpha in (-1, 0)`.
pub fn vp_drift(y: &Path, alpha: f64, delta: f64) -> Result<f64> {
    if !(alpha > -1.0 && alpha < 0.0) {
        return param(format!("principal-value drift requires alpha in (-1, 0), got {alpha}"));
    }
    if !(delta > 0.0) {
        return param(format!("principal-value cutoff must be > 0, got {delta}"));
    }
    let v = y.values();
    let dt = y.partition().mesh();
    Ok(v[..v.len() - 1]
        .iter()
        .filter(|y| y.abs() > delta)
        .map(|&y| signed_pow(y, 2.0 * alpha - 1.0) * dt)
        .sum())
}

/// Default principal-value cutoff `mesh^{1/4}`.
pub fn default_vp_cutoff(mesh: f64) -> f64 {
    mesh.powf(0.25)
}

/// Fraction of values `>= 0` with binomial standard error.
pub fn empirical_sign_prob(terminal_values: &[f64]) -> Result<McSummary> {
    let n = terminal_values.len();
    if n < 2 {
        return param(format!("sign probability needs at least 2 values, got {n}"));
    }
    let p = terminal_values.iter().filter(|&&v| v >= 0.0).count() as f64 / n as f64;
    Ok(McSummary::new(p, binomial_se(p, n), n))
}

pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Kolmogorov-Smirnov distance between the empirical distribution of `samples`
/// and a continuous `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return param("KS statistic needs at least one sample");
    }
    if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
        return param(format!("KS sample {k} is not finite"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    Ok(s.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let c = cdf(x);
        let hi = (i + 1) as f64 / n - c;
        let lo = c - i as f64 / n;
        d.max(hi.abs()).max(lo.abs())
    }))
}

/// 1% critical value of the one-sample KS statistic, asymptotic form.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

pub fn normal_cdf(mean: f64, sd: f64) -> impl Fn(f64) -> f64 {
    let dist = Normal::new(mean, sd).expect("normal parameters are finite with sd > 0");
    move |x| dist.cdf(x)
}

/// Sample mean and standard error of `|X|^a` with `|0|^a = 0`. Exact zeros
/// therefore pull the estimate down; none of the laws simulated here have an
/// atom at zero.
pub fn negative_moment(terminal_values: &[f64], a: f64) -> Result<McSummary> {
    if !(a > -1.0 && a < 0.0) {
        return param(format!("negative moment order must lie in (-1, 0), got {a}"));
    }
    let powers: Vec<f64> = terminal_values.iter().map(|&x| abs_pow(x, a)).collect();
    McSummary::from_samples(&powers)
}
