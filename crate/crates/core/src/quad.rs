//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The local acceptance test is `|S2 - S1| <= 15 tol` with the Richardson
/// correction applied; tolerances below a few ulps of the running estimate are
/// raised to that floor so that rounding noise cannot stall the recursion.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    let diff = refined - whole;
    let tol = tol.max(8.0 * f64::EPSILON * refined.abs());
    if !diff.is_finite() {
        return Err(Error::Numerical(format!(
            "quadrature produced a non-finite value on [{a:e}, {b:e}]"
        )));
    }
    if diff.abs() <= 15.0 * tol || m <= a || m >= b {
        return Ok(refined + diff / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "adaptive Simpson did not converge on [{a:e}, {b:e}]: |error| ~ {:e} > tol {tol:e}",
            diff.abs() / 15.0
        )));
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn kinked_integrands() {
        let v = adaptive_simpson(&|x: f64| x.abs().sqrt(), -1.0, 1.0, 1e-11).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-10, "{v}");
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 30.0, 1e-12).unwrap();
        assert!((v - (1.0 - (-30.0f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn reports_non_finite() {
        assert!(adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-10).is_err());
    }
}
