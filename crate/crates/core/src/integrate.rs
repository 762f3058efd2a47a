//! Time-stepping schemes for `dX = |X|^alpha o dB + eps dW`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::lamperti::ModelParams;
use crate::noise::{NoisePair, Path};
use crate::power::{abs_pow, signed_pow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taming {
    #[default]
    None,
    /// Cap the drift coefficient at `clip_scale / sqrt(dt)` in absolute value.
    Clip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    EulerIto,
    HeunStratonovich,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler_ito" | "euler" => Ok(Self::EulerIto),
            "heun_stratonovich" | "heun" => Ok(Self::HeunStratonovich),
            other => param(format!("unknown scheme '{other}' (expected euler_ito or heun_stratonovich)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub taming: Taming,
    pub clip_scale: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self { scheme: Scheme::EulerIto, taming: Taming::None, clip_scale: 1.0 }
    }
}

impl SchemeConfig {
    pub fn euler() -> Self {
        Self::default()
    }

    pub fn heun() -> Self {
        Self { scheme: Scheme::HeunStratonovich, ..Self::default() }
    }

    pub fn clipped(self, clip_scale: f64) -> Self {
        Self { taming: Taming::Clip, clip_scale, ..self }
    }
}

fn require_steps(noise: &NoisePair) -> Result<()> {
    if noise.partition().level() == 0 {
        return param("time stepping needs a partition of level >= 1");
    }
    Ok(())
}

fn blow_up(step: usize, value: f64) -> Error {
    Error::Numerical(format!("iterate became non-finite at step {step} (value {value})"))
}

/// Euler-Maruyama for the Ito form
/// `Y_{k+1} = Y_k + |Y_k|^alpha dB + (alpha/2) (Y_k)^{2 alpha - 1} dt + eps dW`.
///
/// With `alpha < 0` the drift is unbounded at zero and clipping is required.
pub fn euler_maruyama_ito(noise: &NoisePair, x0: f64, mp: &ModelParams, cfg: &SchemeConfig) -> Result<Path> {
    mp.validate()?;
    require_steps(noise)?;
    if !x0.is_finite() {
        return param(format!("start value must be finite, got {x0}"));
    }
    let alpha = mp.alpha;
    let clip = match cfg.taming {
        Taming::Clip => {
            if !(cfg.clip_scale > 0.0 && cfg.clip_scale.is_finite()) {
                return param(format!("clip_scale must be finite and > 0, got {}", cfg.clip_scale));
            }
            true
        }
        Taming::None => {
            if alpha < 0.0 {
                return param(format!("alpha = {alpha} < 0 requires taming = clip"));
            }
            false
        }
    };
    let p = noise.partition();
    let dt = p.mesh();
    let cap = cfg.clip_scale / dt.sqrt();
    let (b, w) = (noise.b.values(), noise.w.values());
    let mut y = x0;
    let mut out = Vec::with_capacity(b.len());
    out.push(y);
    for k in 0..b.len() - 1 {
        let mut drift = if alpha == 0.0 { 0.0 } else { 0.5 * alpha * signed_pow(y, 2.0 * alpha - 1.0) };
        if clip {
            drift = drift.clamp(-cap, cap);
        }
        y += abs_pow(y, alpha) * (b[k + 1] - b[k]) + drift * dt + mp.eps * (w[k + 1] - w[k]);
        if !y.is_finite() {
            return Err(blow_up(k + 1, y));
        }
        out.push(y);
    }
    Ok(Path::from_parts(p.clone(), out))
}

/// Stochastic Heun for the Stratonovich form, drift-free:
/// predictor `Y + |Y|^alpha dB + eps dW`, corrector with the averaged diffusion.
pub fn heun_stratonovich(noise: &NoisePair, x0: f64, mp: &ModelParams) -> Result<Path> {
    mp.validate()?;
    mp.require_unit_alpha("the Heun scheme")?;
    require_steps(noise)?;
    if !x0.is_finite() {
        return param(format!("start value must be finite, got {x0}"));
    }
    let alpha = mp.alpha;
    let p = noise.partition();
    let (b, w) = (noise.b.values(), noise.w.values());
    let mut y = x0;
    let mut out = Vec::with_capacity(b.len());
    out.push(y);
    for k in 0..b.len() - 1 {
        let db = b[k + 1] - b[k];
        let dw = mp.eps * (w[k + 1] - w[k]);
        let s = abs_pow(y, alpha);
        let pred = y + s * db + dw;
        y += 0.5 * (s + abs_pow(pred, alpha)) * db + dw;
        if !y.is_finite() {
            return Err(blow_up(k + 1, y));
        }
        out.push(y);
    }
    Ok(Path::from_parts(p.clone(), out))
}

/// Runs the scheme selected in `cfg`.
pub fn simulate(noise: &NoisePair, x0: f64, mp: &ModelParams, cfg: &SchemeConfig) -> Result<Path> {
    match cfg.scheme {
        Scheme::EulerIto => euler_maruyama_ito(noise, x0, mp, cfg),
        Scheme::HeunStratonovich => heun_stratonovich(noise, x0, mp),
    }
}

/// Left-endpoint sums `sum_{t_k < t} Z_k (X_{k+1} - X_k)`.
pub fn ito_sum(integrand: &Path, integrator: &Path) -> Result<Path> {
    cumulative(integrand, integrator, |z, k| z[k])
}

/// Trapezoidal sums `sum_{t_k < t} (Z_k + Z_{k+1})/2 (X_{k+1} - X_k)`.
pub fn stratonovich_sum(integrand: &Path, integrator: &Path) -> Result<Path> {
    cumulative(integrand, integrator, |z, k| 0.5 * (z[k] + z[k + 1]))
}

fn cumulative(integrand: &Path, integrator: &Path, weight: impl Fn(&[f64], usize) -> f64) -> Result<Path> {
    integrand.check_same_grid(integrator)?;
    let (z, x) = (integrand.values(), integrator.values());
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(z.len());
    out.push(0.0);
    for k in 0..z.len() - 1 {
        acc += weight(z, k) * (x[k + 1] - x[k]);
        out.push(acc);
    }
    Ok(Path::from_parts(integrand.partition().clone(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::quadratic_covariation;
    use crate::noise::{make_partition, sample_bm_pair, Partition};

    fn pair(p: &Partition, b: Vec<f64>, w: Vec<f64>) -> NoisePair {
        NoisePair { b: Path::new(p.clone(), b).unwrap(), w: Path::new(p.clone(), w).unwrap(), seed: 0, path_index: 0 }
    }

    fn straight(p: &Partition, slope: f64) -> Path {
        Path::new(p.clone(), p.times().iter().map(|t| slope * t).collect()).unwrap()
    }

    #[test]
    fn one_euler_step_by_hand() {
        let p = make_partition(1.0, 1).unwrap();
        let np = pair(&p, vec![0.0, 0.1, 0.1], vec![0.0, 0.0, 0.0]);
        let mp = ModelParams::new(0.5, 0.0, 1.0).unwrap();
        let y = euler_maruyama_ito(&np, 1.0, &mp, &SchemeConfig::euler()).unwrap();
        let expected = 1.0 + 0.1 + 0.25 * 0.5;
        assert!((y.values()[1] - expected).abs() < 1e-15, "{}", y.values()[1]);
    }

    #[test]
    fn zero_noise_reduces_to_the_drift_ode() {
        // dY = (1/4) Y^0 dt from Y = 1 with alpha = 1/2: Y_1 = 1.25 exactly.
        let p = make_partition(1.0, 10).unwrap();
        let np = pair(&p, vec![0.0; p.steps() + 1], vec![0.0; p.steps() + 1]);
        let mp = ModelParams::new(0.5, 0.0, 1.0).unwrap();
        let y = euler_maruyama_ito(&np, 1.0, &mp, &SchemeConfig::euler()).unwrap();
        assert!((y.terminal() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn alpha_zero_is_arithmetic_brownian_motion() {
        let p = make_partition(1.0, 8).unwrap();
        let np = sample_bm_pair(&p, 7, 0);
        let mp = ModelParams::new(0.0, 0.3, 0.5).unwrap();
        let y = euler_maruyama_ito(&np, 0.5, &mp, &SchemeConfig::euler()).unwrap();
        for k in 0..y.len() {
            let exact = 0.5 + np.b.values()[k] + 0.3 * np.w.values()[k];
            assert!((y.values()[k] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn heun_on_a_smooth_driver_matches_the_ode() {
        // With B_t = t and no W the Stratonovich equation is y' = sqrt(y).
        let p = make_partition(1.0, 12).unwrap();
        let np = NoisePair { b: straight(&p, 1.0), w: Path::constant(&p, 0.0), seed: 0, path_index: 0 };
        let mp = ModelParams::new(0.5, 0.0, 1.0).unwrap();
        let y = heun_stratonovich(&np, 1.0, &mp).unwrap();
        for (t, v) in p.times().iter().zip(y.values()) {
            let exact = (0.5 * t + 1.0).powi(2);
            assert!((v - exact).abs() < 1e-7, "t={t}: {v} vs {exact}");
        }
    }

    #[test]
    fn schemes_agree_on_fine_grids() {
        let mp = ModelParams::new(0.5, 0.5, 1.0).unwrap();
        let p = make_partition(1.0, 16).unwrap();
        let np = sample_bm_pair(&p, 11, 0);
        let e = simulate(&np, 1.0, &mp, &SchemeConfig::euler()).unwrap();
        let h = simulate(&np, 1.0, &mp, &SchemeConfig::heun()).unwrap();
        let d = crate::estimate::sup_distance(&e, &h).unwrap();
        assert!(d < 0.05, "{d}");
    }

    #[test]
    fn parameter_errors() {
        let p0 = make_partition(1.0, 0).unwrap();
        let np0 = sample_bm_pair(&p0, 1, 0);
        let mp = ModelParams::new(0.5, 0.1, 0.0).unwrap();
        assert!(matches!(euler_maruyama_ito(&np0, 0.0, &mp, &SchemeConfig::euler()), Err(Error::Parameter(_))));
        assert!(matches!(heun_stratonovich(&np0, 0.0, &mp), Err(Error::Parameter(_))));
        let p = make_partition(1.0, 4).unwrap();
        let np = sample_bm_pair(&p, 1, 0);
        let neg = ModelParams::new(-0.25, 0.1, 0.0).unwrap();
        assert!(matches!(euler_maruyama_ito(&np, 0.5, &neg, &SchemeConfig::euler()), Err(Error::Parameter(_))));
        assert!(euler_maruyama_ito(&np, 0.5, &neg, &SchemeConfig::euler().clipped(1.0)).is_ok());
        assert!(euler_maruyama_ito(&np, 0.5, &neg, &SchemeConfig::euler().clipped(0.0)).is_err());
        assert!(heun_stratonovich(&np, 0.5, &neg).is_err());
        assert!("bogus".parse::<Scheme>().is_err());
        assert_eq!("heun_stratonovich".parse::<Scheme>().unwrap(), Scheme::HeunStratonovich);
    }

    #[test]
    fn overflow_names_the_step() {
        let p = make_partition(1.0, 2).unwrap();
        let np = pair(&p, vec![0.0, 1e300, -1e300, 1e300, -1e300], vec![0.0; 5]);
        let mp = ModelParams::new(0.9, 0.0, 1.0).unwrap();
        match euler_maruyama_ito(&np, 1e300, &mp, &SchemeConfig::euler()) {
            Err(Error::Numerical(msg)) => assert!(msg.contains("step"), "{msg}"),
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn ito_and_stratonovich_sums() {
        let p = make_partition(1.0, 16).unwrap();
        let np = sample_bm_pair(&p, 5, 0);
        let ito = ito_sum(&np.b, &np.b).unwrap();
        let strat = stratonovich_sum(&np.b, &np.b).unwrap();
        let bt = np.b.terminal();
        assert!((strat.terminal() - 0.5 * bt * bt).abs() < 1e-10);
        let qv = quadratic_covariation(&np.b, &np.b).unwrap().terminal();
        assert!((ito.terminal() - 0.5 * (bt * bt - qv)).abs() < 1e-10);
        let diff = strat.terminal() - ito.terminal();
        assert!((diff - 0.5 * qv).abs() < 1e-10);
    }
}
