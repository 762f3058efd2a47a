//! Solution paths obtained by transforming the driving noise.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{param, Result};
use crate::lamperti::{f0, f0_inv, f_ab_inv, rotation_unchecked, ModelParams, TransformTable};
use crate::noise::Path;
use crate::power::{abs_pow, signed_pow};

fn require_unit_alpha(alpha: f64, what: &str) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("{what} requires alpha in (0, 1), got {alpha}"));
    }
    Ok(())
}

/// `X_t = F_0^{-1}(F_0(x0) + B_t)`, the limit solution that spends zero time at 0.
pub fn benchmark_path(b: &Path, x0: f64, alpha: f64) -> Result<Path> {
    require_unit_alpha(alpha, "benchmark path")?;
    let k = 1.0 - alpha;
    let shift = signed_pow(x0, k);
    Ok(b.map(|bt| if bt == 0.0 { x0 } else { signed_pow(k * bt + shift, k.recip()) }))
}

/// `Z_t = F_eps^{-1}(F_eps(x0) + W_t)` for the rotated driver `W`.
pub fn regularized_exact_path(w_hat: &Path, x0: f64, table: &TransformTable) -> Result<Path> {
    table.params().require_positive_eps("regularized exact path")?;
    let u0 = table.forward(x0)?;
    let values = w_hat
        .values()
        .iter()
        .map(|&w| if w == 0.0 { Ok(x0) } else { table.inverse(u0 + w) })
        .collect::<Result<Vec<_>>>()?;
    Path::new(w_hat.partition().clone(), values)
}

/// `F_{A,B}^{-1}(B_t)`: zero while `B` stays in `[-a, bb]`.
pub fn plateau_path(b: &Path, alpha: f64, a: f64, bb: f64) -> Result<Path> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return param(format!("plateau path requires alpha in (-1, 1), got {alpha}"));
    }
    if !(a >= 0.0 && bb >= 0.0 && a.is_finite() && bb.is_finite()) {
        return param(format!("plateau widths must be finite and >= 0, got a = {a}, b = {bb}"));
    }
    Ok(b.map(|u| f_ab_inv(u, alpha, a, bb)))
}

/// `F_0^{-1}(B^theta_t)` for a skew Brownian path started at `F_0(x0)`.
pub fn skew_solution_path(b_theta: &Path, alpha: f64) -> Result<Path> {
    require_unit_alpha(alpha, "skew solution path")?;
    Ok(b_theta.map(|u| f0_inv(u, alpha)))
}

/// Start value for the skew Brownian input of [`skew_solution_path`].
pub fn skew_start(x0: f64, alpha: f64) -> f64 {
    f0(x0, alpha)
}

/// A weak solution `Y` with the pair of Brownian motions `(B, W)` that drive it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakTriple {
    pub y: Path,
    pub b: Path,
    pub w: Path,
}

/// Builds `Y = F_eps^{-1}(F_eps(x0) + (w1 + w2)/sqrt 2)` and rotates `(w1, w2)`
/// by the angle of `(|Y|^alpha, eps)` to get `(B, W)`. Sums are left-endpoint.
pub fn weak_solution_triple(w1: &Path, w2: &Path, x0: f64, table: &TransformTable) -> Result<WeakTriple> {
    w1.check_same_grid(w2)?;
    let mp = *table.params();
    mp.require_positive_eps("weak solution triple")?;
    let w_hat = Path::from_parts(
        w1.partition().clone(),
        w1.values().iter().zip(w2.values()).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect(),
    );
    let y = regularized_exact_path(&w_hat, x0, table)?;
    let (v1, v2, yv) = (w1.values(), w2.values(), y.values());
    let n = yv.len();
    let (mut b, mut w) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut bs, mut ws) = (0.0, 0.0);
    b.push(0.0);
    w.push(0.0);
    for k in 0..n - 1 {
        let (g, h) = rotation_unchecked(yv[k], mp.alpha, mp.eps);
        let (d1, d2) = (v1[k + 1] - v1[k], v2[k + 1] - v2[k]);
        bs += ((g + h) * d1 + (g - h) * d2) * FRAC_1_SQRT_2;
        ws += ((h - g) * d1 + (g + h) * d2) * FRAC_1_SQRT_2;
        b.push(bs);
        w.push(ws);
    }
    let p = y.partition().clone();
    Ok(WeakTriple { y, b: Path::from_parts(p.clone(), b), w: Path::from_parts(p, w) })
}

impl WeakTriple {
    /// `sup_t |Y_t - x0 - sum |Y|^alpha dB - (alpha/2) sum drift dt - eps W_t|`.
    ///
    /// For `alpha < 0` the drift is summed only where `|Y_k| > cutoff`, the
    /// discrete form of the principal value; `cutoff` is required in that case.
    pub fn ito_residual(&self, mp: &ModelParams, cutoff: Option<f64>) -> Result<f64> {
        let alpha = mp.alpha;
        let cut = match cutoff {
            Some(c) if !(c >= 0.0) => return param(format!("drift cutoff must be >= 0, got {c}")),
            Some(c) => c,
            None if alpha < 0.0 => return param("alpha < 0 needs a principal-value cutoff"),
            None => 0.0,
        };
        let (y, b, w) = (self.y.values(), self.b.values(), self.w.values());
        let dt = self.y.partition().mesh();
        let x0 = y[0];
        let (mut mart, mut drift, mut sup) = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..y.len() - 1 {
            mart += abs_pow(y[k], alpha) * (b[k + 1] - b[k]);
            if alpha != 0.0 && y[k].abs() > cut {
                drift += 0.5 * alpha * signed_pow(y[k], 2.0 * alpha - 1.0) * dt;
            }
            let r = y[k + 1] - x0 - mart - drift - mp.eps * w[k + 1];
            sup = sup.max(r.abs());
        }
        Ok(sup)
    }
}

/// The rotated pair `(W1, W2)` and their normalized sum `W_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedNoise {
    pub w1: Path,
    pub w2: Path,
    pub w_hat: Path,
}

/// Inverse rotation of [`weak_solution_triple`]: recovers `(W1, W2)` from a
/// solution `Y` and its drivers `(B, W)`. The increments of `W_hat` are
/// `(|Y_k|^alpha dB + eps dW) / sigma_eps(Y_k)`.
pub fn recover_rotated_noise(y: &Path, b: &Path, w: &Path, mp: &ModelParams) -> Result<RotatedNoise> {
    mp.require_positive_eps("noise recovery")?;
    y.check_same_grid(b)?;
    y.check_same_grid(w)?;
    let (yv, bv, wv) = (y.values(), b.values(), w.values());
    let n = yv.len();
    let mut out = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut acc = [0.0f64; 3];
    for (o, a) in out.iter_mut().zip(acc) {
        o.push(a);
    }
    for k in 0..n - 1 {
        let (g, h) = rotation_unchecked(yv[k], mp.alpha, mp.eps);
        let (db, dw) = (bv[k + 1] - bv[k], wv[k + 1] - wv[k]);
        acc[0] += ((g + h) * db - (g - h) * dw) * FRAC_1_SQRT_2;
        acc[1] += ((g - h) * db + (g + h) * dw) * FRAC_1_SQRT_2;
        acc[2] += g * db + h * dw;
        for (o, a) in out.iter_mut().zip(acc) {
            o.push(a);
        }
    }
    let p = y.partition().clone();
    let [w1, w2, w_hat] = out.map(|v| Path::from_parts(p.clone(), v));
    Ok(RotatedNoise { w1, w2, w_hat })
}

/// `sup_t |F_eps(Y_t) - F_eps(x0) - W_hat_t|`.
pub fn reconstruction_residual(y: &Path, w_hat: &Path, table: &TransformTable) -> Result<f64> {
    y.check_same_grid(w_hat)?;
    let f_start = table.forward(y.values()[0])?;
    let mut sup = 0.0f64;
    for (&yt, &wt) in y.values().iter().zip(w_hat.values()) {
        sup = sup.max((table.forward(yt)? - f_start - wt).abs());
    }
    Ok(sup)
}

/// Selection remainder `F_eps(X_t) - F_eps(x0) - B_t` along a path.
pub fn selection_remainder(x: &Path, b: &Path, table: &TransformTable) -> Result<Path> {
    x.check_same_grid(b)?;
    let f_start = table.forward(x.values()[0])?;
    let values = x
        .values()
        .iter()
        .zip(b.values())
        .map(|(&xt, &bt)| Ok(table.forward(xt)? - f_start - bt))
        .collect::<Result<Vec<_>>>()?;
    Path::new(x.partition().clone(), values)
}
