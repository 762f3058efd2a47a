//! Scale functions and coefficient maps.
//!
//! `sigma_eps(y) = sqrt(|y|^{2 alpha} + eps^2)` is the regularized diffusion
//! coefficient and `F_eps(x) = int_0^x dy / sigma_eps(y)` its Lamperti map, so
//! that `F_eps(Z) - F_eps(x)` is a Brownian motion whenever
//! `dZ = sigma_eps(Z) o dB`. As `eps -> 0`, `F_eps` converges to the closed form
//! `F_0(x) = |x|^{1-alpha} sign(x) / (1-alpha)`.
//!
//! The free functions [`f_eps`] and [`f_eps_inv`] are the slow, quadrature-backed
//! definitions. [`TransformTable`] caches `F_eps` on a log-spaced grid and is
//! what the path constructors use per grid point.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::power::{abs_pow, sign};
use crate::quad::adaptive_simpson;

/// Default absolute tolerance of the `F_eps` quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Model constants. `theta` and the plateau widths are only read by the
/// skew and plateau constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub eps: f64,
    pub x0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_b: Option<f64>,
}

impl ModelParams {
    pub fn new(alpha: f64, eps: f64, x0: f64) -> Result<Self> {
        let mp = Self { alpha, eps, x0, theta: None, plateau_a: None, plateau_b: None };
        mp.validate()?;
        Ok(mp)
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        let mp = Self { eps, ..self };
        mp.validate()?;
        Ok(mp)
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        let mp = Self { theta: Some(theta), ..self };
        mp.validate()?;
        Ok(mp)
    }

    pub fn with_plateau(self, a: f64, b: f64) -> Result<Self> {
        let mp = Self { plateau_a: Some(a), plateau_b: Some(b), ..self };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0 && self.alpha < 1.0) {
            return param(format!("alpha must lie in (-1, 1), got {}", self.alpha));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return param(format!("eps must be finite and >= 0, got {}", self.eps));
        }
        if !self.x0.is_finite() {
            return param(format!("x0 must be finite, got {}", self.x0));
        }
        if let Some(theta) = self.theta {
            if !(theta.abs() <= 1.0) {
                return param(format!("|theta| <= 1 required, got theta = {theta}"));
            }
        }
        for (name, v) in [("plateau_a", self.plateau_a), ("plateau_b", self.plateau_b)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return param(format!("{name} must be finite and >= 0, got {v}"));
                }
            }
        }
        Ok(())
    }

    /// Rejects exponents outside `(0, 1)`.
    pub fn require_unit_alpha(&self, what: &str) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return param(format!("{what} requires alpha in (0, 1), got alpha = {}", self.alpha));
        }
        Ok(())
    }

    pub fn require_positive_eps(&self, what: &str) -> Result<()> {
        if !(self.eps > 0.0) {
            return param(format!("{what} requires eps > 0, got eps = {}", self.eps));
        }
        Ok(())
    }
}

/// `sqrt(|y|^{2 alpha} + eps^2)` with `|0|^{2 alpha} = 0`.
#[inline]
pub fn sigma_eps(y: f64, mp: &ModelParams) -> f64 {
    abs_pow(y, mp.alpha).hypot(mp.eps)
}

/// `1 / sigma_eps` extended continuously through `y = 0`. The pointwise value
/// at 0 under the `|0|^a = 0` convention differs for `alpha <= 0`, but a single
/// point does not change the integral and would only confuse the quadrature.
#[inline]
fn inv_sigma_continuous(y: f64, alpha: f64, eps: f64) -> f64 {
    let p = if y == 0.0 {
        match alpha {
            a if a > 0.0 => 0.0,
            a if a == 0.0 => 1.0,
            _ => return 0.0,
        }
    } else {
        abs_pow(y, alpha)
    };
    p.hypot(eps).recip()
}

/// `int_0^a dy / sigma_eps(y)` for `a >= 0`, split into geometric pieces.
fn integral_from_zero(a: f64, alpha: f64, eps: f64, tol: f64) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    let f = |y: f64| inv_sigma_continuous(y, alpha, eps);
    // On [0, h] the integrand has a fractional-power kink at 0; y = h s^2 moves
    // it to an integrable power of order > 1 that Simpson resolves quickly.
    let near_zero = |h: f64, tol: f64| {
        let g = |s: f64| 2.0 * h * s * f(h * s * s);
        adaptive_simpson(&g, 0.0, 1.0, tol)
    };
    let tol = tol.min(1e-12 * a).max(f64::MIN_POSITIVE);
    if a <= 1.0 {
        return near_zero(a, tol);
    }
    let pieces = a.log2().ceil() as u32 + 1;
    let piece_tol = tol / pieces as f64;
    let mut total = near_zero(1.0, piece_tol)?;
    let mut lo = 1.0;
    while lo < a {
        let hi = (2.0 * lo).min(a);
        total += adaptive_simpson(&f, lo, hi, piece_tol)?;
        lo = hi;
    }
    Ok(total)
}

/// `F_eps(x)` by adaptive quadrature at the default tolerance. With `eps = 0`
/// this is `F_0`.
pub fn f_eps(x: f64, mp: &ModelParams) -> Result<f64> {
    f_eps_with_tol(x, mp, QUAD_TOL)
}

pub fn f_eps_with_tol(x: f64, mp: &ModelParams, tol: f64) -> Result<f64> {
    if !x.is_finite() {
        return param(format!("F_eps argument must be finite, got {x}"));
    }
    if mp.eps == 0.0 {
        if !(mp.alpha < 1.0) {
            return param("F_0 requires alpha < 1");
        }
        return Ok(f0(x, mp.alpha));
    }
    let v = integral_from_zero(x.abs(), mp.alpha, mp.eps, tol)?;
    Ok(sign(x) * v)
}

/// `F_eps^{-1}(u)` by bracketed bisection to `1e-12` in the argument (relative
/// beyond magnitude 1). Requires `eps > 0`.
pub fn f_eps_inv(u: f64, mp: &ModelParams) -> Result<f64> {
    mp.require_positive_eps("F_eps^{-1}")?;
    if !u.is_finite() {
        return param(format!("F_eps^{{-1}} argument must be finite, got {u}"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let target = u.abs();
    let (alpha, eps) = (mp.alpha, mp.eps);
    let seg_tol = 1e-13;
    let piece = |lo: f64, hi: f64| -> Result<f64> {
        if lo == 0.0 {
            integral_from_zero(hi, alpha, eps, seg_tol)
        } else {
            let f = |y: f64| inv_sigma_continuous(y, alpha, eps);
            adaptive_simpson(&f, lo, hi, seg_tol.min(1e-12 * (hi - lo)).max(f64::MIN_POSITIVE))
        }
    };

    // Near zero F_eps^{-1}(u) ~ eps u; far away it dominates F_0^{-1}(u).
    let mut guess = (eps * target).max(f64::MIN_POSITIVE);
    if alpha > 0.0 {
        guess = guess.max(f0_inv(target, alpha));
    }
    let (mut lo, mut f_lo) = (0.0, 0.0);
    let mut hi = guess;
    let mut expansions = 0;
    loop {
        let f_hi = f_lo + piece(lo, hi)?;
        if f_hi >= target {
            break;
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 2100 || !hi.is_finite() {
            return Err(Error::Numerical(format!(
                "F_eps^{{-1}}({u}): bracket expansion failed (alpha {alpha}, eps {eps})"
            )));
        }
    }

    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * mid.max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f_lo + piece(lo, mid)?;
        if f_mid < target {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(sign(u) * 0.5 * (lo + hi))
}

/// `F_0(x) = |x|^{1-alpha} sign(x) / (1 - alpha)`, `alpha < 1`.
#[inline]
pub fn f0(x: f64, alpha: f64) -> f64 {
    let k = 1.0 - alpha;
    abs_pow(x, k) * sign(x) / k
}

/// `F_0^{-1}(u) = |(1-alpha) u|^{1/(1-alpha)} sign(u)`, `alpha < 1`.
#[inline]
pub fn f0_inv(u: f64, alpha: f64) -> f64 {
    let k = 1.0 - alpha;
    abs_pow(k * u, k.recip()) * sign(u)
}

/// Limit map of the plateau regularization: zero on `[-a, b]`, shifted `F_0^{-1}`
/// branches outside.
pub fn f_ab_inv(u: f64, alpha: f64, a: f64, b: f64) -> f64 {
    let k = 1.0 - alpha;
    if u < -a {
        -abs_pow(k * (u + a), k.recip())
    } else if u > b {
        abs_pow(k * (u - b), k.recip())
    } else {
        0.0
    }
}

/// `(G_eps(y), H_eps(y)) = (|y|^alpha, eps) / sigma_eps(y)`, a unit vector.
pub fn rotation_coeffs(y: f64, mp: &ModelParams) -> Result<(f64, f64)> {
    mp.require_positive_eps("rotation coefficients")?;
    Ok(rotation_unchecked(y, mp.alpha, mp.eps))
}

#[inline]
pub(crate) fn rotation_unchecked(y: f64, alpha: f64, eps: f64) -> (f64, f64) {
    let p = abs_pow(y, alpha);
    let s = p.hypot(eps);
    (p / s, eps / s)
}

/// Maximal solution of `x' = |x|^alpha` started at `x`.
pub fn peano_maximal_solution(t: f64, x: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("maximal solution requires alpha in (0, 1), got {alpha}"));
    }
    if !(t >= 0.0) {
        return param(format!("maximal solution requires t >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(x);
    }
    let k = 1.0 - alpha;
    let e = k.recip();
    let kt = k * t;
    Ok(if x > 0.0 {
        (kt + x.powf(k)).powf(e)
    } else {
        let m = x.abs().powf(k);
        -(m - kt).max(0.0).powf(e) + (kt - m).max(0.0).powf(e)
    })
}

/// Number of log-spaced nodes per sign in [`TransformTable`].
pub const TABLE_NODES: usize = 4096;
const TABLE_X_MIN: f64 = 1e-8;
const TABLE_X_MAX: f64 = 1e8;

/// `F_eps` tabulated for `x >= 0` on log-spaced abscissae and mirrored by
/// oddness. Between nodes it is a cubic Hermite interpolant using the exact
/// slope `1/sigma_eps`, with a Fritsch-Carlson guard that keeps every segment
/// monotone; the inverse interpolates the swapped nodes with slope `sigma_eps`.
/// Arguments outside the tabulated range fall back to quadrature.
///
/// With `eps = 0` the table degenerates to the closed forms `F_0`, `F_0^{-1}`.
#[derive(Debug, Clone)]
pub struct TransformTable {
    params: ModelParams,
    abscissae: Vec<f64>,
    f_values: Vec<f64>,
    slopes: Vec<f64>,
    quadrature_tol: f64,
    log_min: f64,
    inv_log_step: f64,
}

impl TransformTable {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Self::with_tolerance(params, QUAD_TOL)
    }

    pub fn with_tolerance(params: &ModelParams, quadrature_tol: f64) -> Result<Self> {
        params.validate()?;
        let mut table = Self {
            params: *params,
            abscissae: Vec::new(),
            f_values: Vec::new(),
            slopes: Vec::new(),
            quadrature_tol,
            log_min: TABLE_X_MIN.ln(),
            inv_log_step: 0.0,
        };
        if params.eps == 0.0 {
            return Ok(table);
        }
        let log_step = (TABLE_X_MAX.ln() - table.log_min) / (TABLE_NODES - 1) as f64;
        table.inv_log_step = log_step.recip();
        let xs: Vec<f64> = (0..TABLE_NODES).map(|i| (table.log_min + i as f64 * log_step).exp()).collect();
        let (alpha, eps) = (params.alpha, params.eps);
        let f = |y: f64| inv_sigma_continuous(y, alpha, eps);
        let mut fs = Vec::with_capacity(TABLE_NODES);
        fs.push(integral_from_zero(xs[0], alpha, eps, quadrature_tol)?);
        for w in xs.windows(2) {
            let seg_tol = (quadrature_tol / TABLE_NODES as f64).min(1e-13 * (w[1] - w[0]));
            let last = *fs.last().unwrap();
            fs.push(last + adaptive_simpson(&f, w[0], w[1], seg_tol)?);
        }
        if fs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Numerical("tabulated F_eps is not strictly increasing".into()));
        }
        table.slopes = xs.iter().map(|&x| f(x)).collect();
        table.abscissae = xs;
        table.f_values = fs;
        Ok(table)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }

    fn closed_form(&self) -> bool {
        self.params.eps == 0.0
    }

    /// `F_eps(x)`.
    pub fn forward(&self, x: f64) -> Result<f64> {
        if self.closed_form() {
            return Ok(f0(x, self.params.alpha));
        }
        let a = x.abs();
        let xs = &self.abscissae;
        if !(a >= xs[0] && a <= xs[TABLE_NODES - 1]) {
            return f_eps_with_tol(x, &self.params, self.quadrature_tol);
        }
        let mut i = (((a.ln() - self.log_min) * self.inv_log_step) as usize).min(TABLE_NODES - 2);
        while i > 0 && xs[i] > a {
            i -= 1;
        }
        while i < TABLE_NODES - 2 && xs[i + 1] < a {
            i += 1;
        }
        let v = hermite(
            a,
            (xs[i], xs[i + 1]),
            (self.f_values[i], self.f_values[i + 1]),
            (self.slopes[i], self.slopes[i + 1]),
        );
        Ok(sign(x) * v)
    }

    /// `F_eps^{-1}(u)`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if self.closed_form() {
            return Ok(f0_inv(u, self.params.alpha));
        }
        let b = u.abs();
        let fs = &self.f_values;
        if !(b >= fs[0] && b <= fs[TABLE_NODES - 1]) {
            return f_eps_inv(u, &self.params);
        }
        let i = fs.partition_point(|&v| v <= b).clamp(1, TABLE_NODES - 1) - 1;
        let v = hermite(
            b,
            (fs[i], fs[i + 1]),
            (self.abscissae[i], self.abscissae[i + 1]),
            (self.slopes[i].recip(), self.slopes[i + 1].recip()),
        );
        Ok(sign(u) * v)
    }

    pub fn sigma(&self, y: f64) -> f64 {
        sigma_eps(y, &self.params)
    }
}

/// Cubic Hermite interpolation on one segment with the Fritsch-Carlson
/// monotonicity restriction on the endpoint slopes.
#[inline]
fn hermite(x: f64, (x0, x1): (f64, f64), (y0, y1): (f64, f64), (mut d0, mut d1): (f64, f64)) -> f64 {
    let h = x1 - x0;
    let secant = (y1 - y0) / h;
    let (r0, r1) = (d0 / secant, d1 / secant);
    let r2 = r0 * r0 + r1 * r1;
    if r2 > 9.0 {
        let tau = 3.0 / r2.sqrt();
        d0 *= tau;
        d1 *= tau;
    }
    let t = (x - x0) / h;
    let s = 1.0 - t;
    let h00 = (1.0 + 2.0 * t) * s * s;
    let h10 = t * s * s;
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = -t * t * s;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}
