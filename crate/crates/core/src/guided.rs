//! Order-`n` coefficients `Ξ_n(t, x)` of a family expanded in `a` at `a = 0`,
//! `F_{t,a}(x) = x + t + Σ_{n≥1} Ξ_n(t, x) aⁿ`, and their trigonometric degree.
//!
//! A family semiconjugated to a holomorphic guide through `Π_a(x) = a e^{2πix}`
//! has every `Ξ_n` a trigonometric polynomial of degree at most `n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle_map::{FamilySpec, ParamPoint};
use crate::fourier;
use crate::{Error, Result};

pub const SPECTRUM_GRID: usize = 1 << 12;
pub const DEFAULT_DEGREE_TOL: f64 = 1e-6;
pub const MAX_ORDER: usize = 6;

/// Finite-difference weights for the `order`-th derivative at 0 on `nodes`
/// (Fornberg's recursion).
fn fornberg_weights(nodes: &[f64], order: usize) -> Vec<f64> {
    let npts = nodes.len();
    let mut w = vec![vec![0.0; order + 1]; npts];
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..npts {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[i][k] = c1 * (k as f64 * w[i - 1][k - 1] - c5 * w[i - 1][k]) / c2;
                }
                w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                w[j][k] = (c4 * w[j][k] - k as f64 * w[j][k - 1]) / c3;
            }
            w[j][0] = c4 * w[j][0] / c3;
        }
        c1 = c2;
    }
    w.into_iter().map(|row| row[order]).collect()
}

/// Half-width `m` of the central stencil of accuracy order ≥ `n + 2`.
fn stencil_half_width(n: usize) -> usize {
    let accuracy = if n.is_multiple_of(2) { n + 2 } else { n + 3 };
    let points = 2 * n.div_ceil(2) - 1 + accuracy;
    (points - 1) / 2
}

/// `Ξ_n(t, x)` at `x = i/grid`.
pub fn xi_coefficient(fam: &FamilySpec, t: f64, n: usize, grid: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("order n = {n} outside 1..={MAX_ORDER}")));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must have at least 2 points".into()));
    }
    let xs = (0..grid).map(|i| i as f64 / grid as f64);
    if fam.is_affine_in_a() {
        return Ok(xs.map(|x| (x, if n == 1 { fam.phi(x) } else { 0.0 })).collect());
    }

    let m = stencil_half_width(n);
    let (a_lo, a_hi) = fam.a_range();
    let reach = 0.9 * a_hi.min(-a_lo);
    let mut h = f64::EPSILON.powf(1.0 / (n as f64 + 2.0));
    if m as f64 * h > reach {
        h = reach / m as f64;
    }
    if !(h > 1e-12) || 1.0 + h == 1.0 {
        return Err(Error::StepUnderflow { h });
    }
    let nodes: Vec<f64> = (-(m as i64)..=m as i64).map(|j| j as f64).collect();
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let weights: Vec<f64> =
        fornberg_weights(&nodes, n).into_iter().map(|w| w / (h.powi(n as i32) * factorial)).collect();
    let lifts = nodes.iter().map(|&j| fam.lift(ParamPoint::new(t, j * h))).collect::<Result<Vec<_>>>()?;
    Ok(xs
        .map(|x| {
            let v = lifts.iter().zip(&weights).map(|(l, w)| w * l.perturbation(x)).sum();
            (x, v)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub t: f64,
    /// `(k, c_{n,k})` for `|k| ≤ K_max`.
    pub coeffs: Vec<(i64, Complex64)>,
    pub degree_bound_satisfied: bool,
    /// Largest `|c_{n,k}|` with `|k| > n`, reported at positive `k`.
    pub worst_violation: (i64, f64),
}

impl SpectrumReport {
    pub fn coefficient(&self, k: i64) -> Option<Complex64> {
        self.coeffs.iter().find(|(j, _)| *j == k).map(|&(_, c)| c)
    }

    pub fn k_max(&self) -> i64 {
        self.coeffs.iter().map(|(k, _)| *k).max().unwrap_or(0)
    }
}

/// Fourier-analyses `Ξ_n(t, ·)` on a `2^12` grid and checks that no
/// frequency above `n` exceeds `tol`.
pub fn degree_check(fam: &FamilySpec, t: f64, n: usize, tol: f64) -> Result<SpectrumReport> {
    let samples = xi_coefficient(fam, t, n, SPECTRUM_GRID)?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let coeffs = fourier::coefficients(&values);
    let k_max = 2 * n as i64 + 4;
    let nyquist = (SPECTRUM_GRID / 2) as i64;
    let mut worst = (n as i64 + 1, 0.0f64);
    for k in (n as i64 + 1)..nyquist {
        let mag = fourier::at(&coeffs, k).norm().max(fourier::at(&coeffs, -k).norm());
        if mag > worst.1 {
            worst = (k, mag);
        }
    }
    Ok(SpectrumReport {
        n,
        t,
        coeffs: (-k_max..=k_max).map(|k| (k, fourier::at(&coeffs, k))).collect(),
        degree_bound_satisfied: worst.1 < tol,
        worst_violation: worst,
    })
}
