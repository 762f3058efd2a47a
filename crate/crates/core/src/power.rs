//! Power and sign conventions shared by every formula in the crate.
//!
//! `sign(0) = 0`, `|0|^a = 0` for every real `a` (including `a <= 0`), and the
//! signed power `(x)^a = |x|^a sign(x)`.

#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `|x|^a` with `|0|^a = 0`.
#[inline]
pub fn abs_pow(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if a == 0.0 {
        1.0
    } else if a == 0.5 {
        x.abs().sqrt()
    } else {
        x.abs().powf(a)
    }
}

/// Signed power `(x)^a = |x|^a sign(x)`.
#[inline]
pub fn signed_pow(x: f64, a: f64) -> f64 {
    abs_pow(x, a) * sign(x)
}
