//! First-order behaviour of tongue boundaries at `a = 0` and the order of
//! contact between the two boundaries of a tongue.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::FamilySpec;
use crate::fourier;
use crate::tongue::{Fraction, TongueSample, TongueSolver};
use crate::util::{periodic_max, periodic_mean, periodic_min};
use crate::{Error, Result};

/// Threshold below which `max A_q − min A_q` counts as a constant function.
const CONSTANT_TOL: f64 = 1e-13;
/// Trapezoid points for means of the perturbation.
const MEAN_POINTS: usize = 1 << 14;
const EXTREMUM_GRID: usize = 4096;

/// `A_q(φ)(x) = (1/q) Σ_{k<q} φ(x + kp/q)` sampled on a grid, with its
/// Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedPerturbation {
    pub fraction: Fraction,
    /// `(x, A_q(φ)(x))` for `x = i/grid`.
    pub samples: Vec<(f64, f64)>,
    coeffs: Vec<Complex64>,
}

impl AveragedPerturbation {
    /// Fourier coefficient at signed frequency `k`, `|k| < grid/2`.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        fourier::at(&self.coeffs, k)
    }

    pub fn grid(&self) -> usize {
        self.samples.len()
    }
}

fn averaged(fam: &FamilySpec, frac: Fraction, x: f64) -> f64 {
    let q = frac.q();
    let shift = frac.value();
    (0..q).map(|k| fam.phi(x + k as f64 * shift)).sum::<f64>() / q as f64
}

pub fn average_translates(fam: &FamilySpec, frac: Fraction, grid: usize) -> Result<AveragedPerturbation> {
    if grid < 4 {
        return Err(Error::InvalidArgument(format!("grid {grid} too small")));
    }
    let samples: Vec<(f64, f64)> = (0..grid)
        .map(|i| {
            let x = i as f64 / grid as f64;
            (x, averaged(fam, frac, x))
        })
        .collect();
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(AveragedPerturbation { fraction: frac, samples, coeffs: fourier::coefficients(&values) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub p: i64,
    pub q: u32,
    /// `M_A = max A_q(φ)`.
    #[serde(rename = "M_A")]
    pub max_avg: f64,
    /// `m_A = min A_q(φ)`.
    #[serde(rename = "m_A")]
    pub min_avg: f64,
    pub mean_phi: f64,
    /// Slope of the left boundary for `a > 0`, `−M_A`.
    pub slope_minus: f64,
    /// Slope of the right boundary for `a > 0`, `−m_A`.
    pub slope_plus: f64,
    /// Angle between the lines of slopes `−M_A` and `−m_A` in the `(a, t)` plane.
    pub angle_geometric: f64,
    /// `arctan((M−m)(1+mM)/(mM)²)`; `None` when `mM = 0`.
    pub angle_paper: Option<f64>,
}

pub fn slopes(fam: &FamilySpec, frac: Fraction) -> Result<SlopeReport> {
    let f = |x: f64| averaged(fam, frac, x);
    let mean_phi = periodic_mean(&|x| fam.phi(x), MEAN_POINTS);
    let (_, mut hi) = periodic_max(&f, EXTREMUM_GRID, 1e-13);
    let (_, mut lo) = periodic_min(&f, EXTREMUM_GRID, 1e-13);
    if hi - lo < CONSTANT_TOL {
        hi = mean_phi;
        lo = mean_phi;
    }
    let angle_geometric = (hi - lo).abs().atan2(1.0 + lo * hi);
    let prod = lo * hi;
    let angle_paper = (prod != 0.0).then(|| ((hi - lo) * (1.0 + prod) / (prod * prod)).atan());
    Ok(SlopeReport {
        p: frac.p(),
        q: frac.q(),
        max_avg: hi,
        min_avg: lo,
        mean_phi,
        slope_minus: -hi,
        slope_plus: -lo,
        angle_geometric,
        angle_paper,
    })
}

/// Boundary offsets against the first-order prediction at one amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderRow {
    pub a: f64,
    /// The boundary following `p/q − M_A·a` (left for `a > 0`, right for `a < 0`).
    pub gamma_minus: f64,
    /// The boundary following `p/q − m_A·a`.
    pub gamma_plus: f64,
    /// `|γ⁻(a) − p/q + M_A·a| / |a|`.
    pub ratio_minus: f64,
    /// `|γ⁺(a) − p/q + m_A·a| / |a|`.
    pub ratio_plus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderReport {
    pub slopes: SlopeReport,
    pub rows: Vec<FirstOrderRow>,
    /// Largest ratio at the smallest `|a|`.
    pub ratio_at_smallest: f64,
}

impl FirstOrderReport {
    /// True when both ratios shrink from the largest to the smallest `|a|`.
    pub fn ratios_decrease(&self) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by(|l, r| l.a.abs().total_cmp(&r.a.abs()));
        match (rows.first(), rows.last()) {
            (Some(s), Some(l)) => s.ratio_minus <= l.ratio_minus && s.ratio_plus <= l.ratio_plus,
            _ => false,
        }
    }
}

pub fn verify_first_order(fam: &FamilySpec, frac: Fraction, a_values: &[f64]) -> Result<FirstOrderReport> {
    verify_first_order_with(&TongueSolver::default(), fam, frac, a_values)
}

pub fn verify_first_order_with(
    solver: &TongueSolver,
    fam: &FamilySpec,
    frac: Fraction,
    a_values: &[f64],
) -> Result<FirstOrderReport> {
    if a_values.is_empty() || a_values.contains(&0.0) {
        return Err(Error::InvalidArgument("first-order check needs nonzero amplitudes".into()));
    }
    let s = slopes(fam, frac)?;
    let center = frac.value();
    let rows = a_values
        .par_iter()
        .map(|&a| {
            let b = solver.boundary_at(fam, frac, a)?;
            let (minus, plus) = if a >= 0.0 { (b.t_left, b.t_right) } else { (b.t_right, b.t_left) };
            Ok(FirstOrderRow {
                a,
                gamma_minus: minus,
                gamma_plus: plus,
                ratio_minus: (minus - center + s.max_avg * a).abs() / a.abs(),
                ratio_plus: (plus - center + s.min_avg * a).abs() / a.abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let smallest = rows.iter().min_by(|l, r| l.a.abs().total_cmp(&r.a.abs())).expect("nonempty");
    let ratio_at_smallest = smallest.ratio_minus.max(smallest.ratio_plus);
    Ok(FirstOrderReport { slopes: s, rows, ratio_at_smallest })
}

/// Slope `−∫₀¹ φ` of irrational tongues at `a = 0`.
pub fn irrational_slope(fam: &FamilySpec) -> f64 {
    -periodic_mean(&|x| fam.phi(x), MEAN_POINTS)
}

/// Power law `width ≈ coefficient · a^exponent` fitted in log-log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Largest absolute deviation of `log width` from the fitted line.
    pub residual: f64,
    pub samples_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthFitRow {
    pub a: f64,
    pub width: f64,
    pub log_a: f64,
    pub log_width: f64,
}

const MIN_FIT_SAMPLES: usize = 4;
const MIN_WIDTH: f64 = 1e-14;
const RESIDUAL_GUARD: f64 = 0.02;
const MAX_DROPS: usize = 2;

/// Rows of the `width-fit` table, ordered by increasing `|a|`.
pub fn width_fit_rows(samples: &[TongueSample]) -> Vec<WidthFitRow> {
    let mut rows: Vec<WidthFitRow> = samples
        .iter()
        .map(|s| WidthFitRow { a: s.a, width: s.width, log_a: s.a.abs().ln(), log_width: s.width.ln() })
        .collect();
    rows.sort_by(|l, r| l.a.abs().total_cmp(&r.a.abs()));
    rows
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = points.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Fits `width ∼ C·|a|^k`. When the max residual exceeds 0.02 the largest
/// amplitude is dropped and the fit repeated, at most twice.
pub fn fit_contact(samples: &[TongueSample]) -> Result<ContactFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData { needed: MIN_FIT_SAMPLES, got: samples.len() });
    }
    if let Some(s) = samples.iter().find(|s| !(s.width > MIN_WIDTH) || s.a == 0.0) {
        return Err(Error::UnderflowedWidths { a: s.a, width: s.width });
    }
    let rows = width_fit_rows(samples);
    let mut points: Vec<(f64, f64)> = rows.iter().map(|r| (r.log_a, r.log_width)).collect();
    let distinct = {
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        xs.dedup();
        xs.len()
    };
    if distinct < 2 {
        return Err(Error::InsufficientData { needed: 2, got: distinct });
    }
    let mut fit = least_squares(&points);
    let mut drops = 0;
    while fit.2 > RESIDUAL_GUARD && drops < MAX_DROPS && points.len() > MIN_FIT_SAMPLES {
        points.pop();
        fit = least_squares(&points);
        drops += 1;
    }
    let (exponent, intercept, residual) = fit;
    Ok(ContactFit { exponent, coefficient: intercept.exp(), residual, samples_used: points.len() })
}

/// Amplitude ladder `a_k = a0·2^{−k/2}` for width fits, descending.
///
/// `a0` starts at 0.16 clamped into the family range and is halved until the
/// tongue is at most 1% of `1/q²` wide, so the leading power dominates: the
/// fitted coefficient is the intercept at `a = 1`, which magnifies any bias in
/// the exponent. Going lower costs curvature at the boundary (`G''` shrinks
/// like `a^q`), so the ladder stays short.
pub fn width_ladder(solver: &TongueSolver, fam: &FamilySpec, frac: Fraction, rungs: usize) -> Result<Vec<f64>> {
    let (lo, hi) = fam.a_range();
    let mut a0 = 0.16f64.min(0.9 * hi).min(0.9 * -lo);
    let spacing = 1.0 / (frac.q() as f64 * frac.q() as f64);
    for _ in 0..20 {
        if solver.boundary_at(fam, frac, a0)?.width <= LADDER_WIDTH_FRACTION * spacing {
            break;
        }
        a0 *= 0.5;
    }
    Ok((0..rungs).map(|k| a0 * std::f64::consts::FRAC_1_SQRT_2.powi(k as i32)).collect())
}

const LADDER_WIDTH_FRACTION: f64 = 0.01;

/// Rungs used by [`width_ladder`] callers that have no reason to pick.
pub const DEFAULT_RUNGS: usize = 7;
