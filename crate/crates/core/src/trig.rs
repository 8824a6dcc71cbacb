//! `sin(2πx)` and `cos(2πx)` for `x` in turns.
//!
//! The reduction to `[−1/4, 1/4]` turns is exact (Sterbenz), so values at
//! dyadic points are exact (`sin_turns(0.5) == 0`) and the result depends on
//! `x mod 1` only. The short Estrin-form polynomials also overlap well when
//! several orbits are iterated in lockstep, which `libm`'s `sin` does not.

use std::f64::consts::TAU;

/// `(−1)^k / (2k+1)!`
const SIN: [f64; 11] = [
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0,
    -1.0 / 121645100408832000.0,
    1.0 / 51090942171709440000.0,
];

/// `(−1)^k / (2k)!`
const COS: [f64; 11] = [
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
    -1.0 / 6402373705728000.0,
    1.0 / 2432902008176640000.0,
];

/// `floor` via truncation; `f64::floor` is a library call on baseline x86-64.
/// Branch-free so that lockstep orbits vectorize. From `2^52` on every float
/// is an integer, and NaN falls through unchanged.
#[inline(always)]
pub(crate) fn floor(y: f64) -> f64 {
    let i = y as i64 as f64;
    let f = if i > y { i - 1.0 } else { i };
    if y.abs() < 4503599627370496.0 {
        f
    } else {
        y
    }
}

#[inline(always)]
fn estrin(c: &[f64; 11], w: f64) -> f64 {
    let w2 = w * w;
    let w4 = w2 * w2;
    let w8 = w4 * w4;
    let lo = (c[0] + c[1] * w) + w2 * (c[2] + c[3] * w);
    let mid = (c[4] + c[5] * w) + w2 * (c[6] + c[7] * w);
    let hi = (c[8] + c[9] * w) + w2 * c[10];
    lo + w4 * mid + w8 * hi
}

/// Returns `v` in `[−1/4, 1/4]` and `s = ±1` with `sin(2πx) = sin(2πv)` and
/// `cos(2πx) = s·cos(2πv)`.
#[inline(always)]
fn reduce(x: f64) -> (f64, f64) {
    let u = x - floor(x + 0.5);
    // Branch-free select: which half the orbit lands in is unpredictable.
    let far = ((u.abs() > 0.25) as u64).wrapping_neg();
    let v = select(far, 0.5f64.copysign(u) - u, u);
    let s = select(far, -1.0, 1.0);
    (v, s)
}

#[inline(always)]
fn select(mask: u64, if_set: f64, if_clear: f64) -> f64 {
    f64::from_bits((if_set.to_bits() & mask) | (if_clear.to_bits() & !mask))
}

#[inline]
pub(crate) fn sin_turns(x: f64) -> f64 {
    let (v, _) = reduce(x);
    let z = TAU * v;
    z * estrin(&SIN, z * z)
}

#[inline]
pub(crate) fn cos_turns(x: f64) -> f64 {
    let (v, s) = reduce(x);
    let z = TAU * v;
    s * estrin(&COS, z * z)
}

#[inline]
pub(crate) fn sin_cos_turns(x: f64) -> (f64, f64) {
    let (v, s) = reduce(x);
    let z = TAU * v;
    let w = z * z;
    (z * estrin(&SIN, w), s * estrin(&COS, w))
}
