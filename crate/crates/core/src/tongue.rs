//! Rational Arnol'd tongues.
//!
//! For a reduced fraction `p/q` the displacement `G_t(x) = F_t^{∘q}(x) − x − p`
//! decides where `t` sits relative to the tongue: `Trans(F_t) = p/q` exactly
//! when `G_t` has a zero. Both `t ↦ max G_t` and `t ↦ min G_t` increase with
//! slope at least one, so each boundary is the unique root of one of them and
//! plain bisection finds it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::{FamilySpec, Lift, ParamPoint};
use crate::util::{gcd, periodic_max, periodic_min};
use crate::{Error, Result};

/// A reduced fraction `p/q` with `q ≥ 1`; labels a rational tongue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    p: i64,
    q: u32,
}

impl Fraction {
    /// Rejects non-reduced fractions instead of reducing them.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 || q > u32::MAX as i64 || gcd(p.unsigned_abs(), q as u64) != 1 {
            return Err(Error::NonCoprime { p, q });
        }
        Ok(Fraction { p, q: q as u32 })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected a fraction p/q, got {s:?}"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        Fraction::new(p, q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub t: f64,
    pub a: f64,
    pub min_g: f64,
    pub argmin: f64,
    pub max_g: f64,
    pub argmax: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Position {
    Below,
    LeftBoundary,
    /// Strictly inside; also returned when `G` vanishes identically to
    /// tolerance, where the tongue is pinched to a point.
    Interior,
    RightBoundary,
    Above,
}

impl Position {
    pub fn in_tongue(self) -> bool {
        matches!(self, Position::LeftBoundary | Position::Interior | Position::RightBoundary)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Boundary values of one tongue at one amplitude `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TongueSample {
    pub p: i64,
    pub q: u32,
    pub a: f64,
    pub t_left: f64,
    pub t_right: f64,
    /// Argmax of `G` at `t_left`.
    pub x_left: f64,
    /// Argmin of `G` at `t_right`.
    pub x_right: f64,
    pub width: f64,
}

/// Parabolic witness on a boundary: `G(x0) ≈ 0`, `G'(x0) ≈ 0`, `G''(x0) ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x0: f64,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Tolerances and grid size for the tongue computations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TongueSolver {
    /// Grid for the extremum scan; raised to `64·q` when smaller.
    pub grid: usize,
    pub classify_tol: f64,
    pub bisection_tol: f64,
    /// Smallest acceptable `|G''|` at a witness.
    pub witness_tol: f64,
}

impl Default for TongueSolver {
    fn default() -> Self {
        TongueSolver { grid: 1024, classify_tol: 1e-10, bisection_tol: 1e-13, witness_tol: 1e-6 }
    }
}

const X_TOL: f64 = 1e-12;

struct Displacement<'f> {
    lift: Lift<'f>,
    q: u64,
    p: f64,
}

impl Displacement<'_> {
    fn value(&self, x: f64) -> f64 {
        self.lift.iterate(x, self.q) - x - self.p
    }

    fn slope(&self, x: f64) -> f64 {
        self.lift.iterate_deriv(x, self.q) - 1.0
    }

    fn curvature(&self, x: f64) -> f64 {
        let h = 1e-5;
        (self.slope(x + h) - self.slope(x - h)) / (2.0 * h)
    }

    /// Newton on `G'` from a golden-section estimate. Golden section stalls
    /// near 1e-8 because `G` is flat at an extremum; `G'` is not.
    fn polish(&self, mut x: f64) -> f64 {
        let mut best = (x, self.slope(x).abs());
        for _ in 0..6 {
            let g1 = self.slope(x);
            let g2 = self.curvature(x);
            if g2 == 0.0 || !g2.is_finite() {
                break;
            }
            let step = g1 / g2;
            if step.abs() > 1e-6 {
                break;
            }
            x -= step;
            let s = self.slope(x).abs();
            if s < best.1 {
                best = (x, s);
            } else {
                break;
            }
        }
        best.0
    }

    fn max(&self, grid: usize) -> (f64, f64) {
        let (x, v) = periodic_max(&|x| self.value(x), grid, X_TOL);
        let xp = self.polish(x);
        let vp = self.value(xp);
        if vp >= v {
            (xp.rem_euclid(1.0), vp)
        } else {
            (x, v)
        }
    }

    fn min(&self, grid: usize) -> (f64, f64) {
        let (x, v) = periodic_min(&|x| self.value(x), grid, X_TOL);
        let xp = self.polish(x);
        let vp = self.value(xp);
        if vp <= v {
            (xp.rem_euclid(1.0), vp)
        } else {
            (x, v)
        }
    }
}

impl TongueSolver {
    fn grid_for(&self, q: u32) -> usize {
        self.grid.max(64 * q as usize)
    }

    fn displacement<'f>(&self, fam: &'f FamilySpec, frac: Fraction, t: f64, a: f64) -> Result<Displacement<'f>> {
        let point = ParamPoint::new(t, a);
        let lift = if frac.q == 1 { fam.lift_continuous(point)? } else { fam.lift(point)? };
        Ok(Displacement { lift, q: frac.q as u64, p: frac.p as f64 })
    }

    pub fn g_extrema(&self, fam: &FamilySpec, frac: Fraction, t: f64, a: f64) -> Result<ExtremumReport> {
        let g = self.displacement(fam, frac, t, a)?;
        let grid = self.grid_for(frac.q);
        let (argmax, max_g) = g.max(grid);
        let (argmin, min_g) = g.min(grid);
        Ok(ExtremumReport { t, a, min_g: min_g.min(max_g), argmin, max_g, argmax })
    }

    pub fn classify(&self, fam: &FamilySpec, frac: Fraction, t: f64, a: f64) -> Result<Position> {
        let r = self.g_extrema(fam, frac, t, a)?;
        Ok(position_from_extrema(r.min_g, r.max_g, self.classify_tol))
    }

    fn bisect<F: Fn(f64) -> Result<f64>>(&self, f: F, a: f64, lo: f64, hi: f64) -> Result<f64> {
        let (f_lo, f_hi) = (f(lo)?, f(hi)?);
        if !(f_lo <= 0.0 && f_hi >= 0.0) {
            return Err(Error::BracketFailure { a, lo, hi, f_lo, f_hi });
        }
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            if hi - lo <= self.bisection_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Left and right boundaries of the `p/q` tongue at amplitude `a`.
    ///
    /// For `q ≥ 2`, `a` must lie in the homeomorphism range. Fixed-point
    /// tongues (`q = 1`) only need a continuous perturbation: `G = F − Id − p`
    /// has `∂G/∂t = 1` for every `a`.
    pub fn boundary_at(&self, fam: &FamilySpec, frac: Fraction, a: f64) -> Result<TongueSample> {
        if frac.q == 1 {
            fam.check_a_continuous(a)?;
        } else {
            fam.check_a(a)?;
        }
        let center = frac.value();
        let sup = fam.perturbation_sup(a);
        if sup == 0.0 {
            return Ok(TongueSample {
                p: frac.p,
                q: frac.q,
                a,
                t_left: center,
                t_right: center,
                x_left: 0.0,
                x_right: 0.0,
                width: 0.0,
            });
        }
        // |q·t − p − G_t| ≤ q·sup, so both roots lie within q·sup of p/q.
        let half = frac.q as f64 * sup * (1.0 + 1e-9) + 1e-12;
        let (lo, hi) = (center - half, center + half);
        let grid = self.grid_for(frac.q);
        let t_left = self.bisect(|t| Ok(self.displacement(fam, frac, t, a)?.max(grid).1), a, lo, hi)?;
        let t_right = self.bisect(|t| Ok(self.displacement(fam, frac, t, a)?.min(grid).1), a, lo, hi)?;
        let (x_left, _) = self.displacement(fam, frac, t_left, a)?.max(grid);
        let (x_right, _) = self.displacement(fam, frac, t_right, a)?.min(grid);
        let t_right = t_right.max(t_left);
        Ok(TongueSample { p: frac.p, q: frac.q, a, t_left, t_right, x_left, x_right, width: t_right - t_left })
    }

    /// Boundary samples along sorted `a_values`, in input order.
    pub fn trace_boundary(&self, fam: &FamilySpec, frac: Fraction, a_values: &[f64]) -> Result<Vec<TongueSample>> {
        if a_values.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidArgument("a_values must be sorted".into()));
        }
        a_values.par_iter().map(|&a| self.boundary_at(fam, frac, a)).collect()
    }

    pub fn boundary_witness(&self, fam: &FamilySpec, sample: &TongueSample, side: Side) -> Result<Witness> {
        let frac = Fraction::new(sample.p, sample.q as i64)?;
        let (t, x_start) = match side {
            Side::Left => (sample.t_left, sample.x_left),
            Side::Right => (sample.t_right, sample.x_right),
        };
        let g = self.displacement(fam, frac, t, sample.a)?;
        let x0 = g.polish(x_start).rem_euclid(1.0);
        let w = Witness { x0, g0: g.value(x0), g1: g.slope(x0), g2: g.curvature(x0) };
        if !(w.g2.abs() >= self.witness_tol) {
            return Err(Error::DegenerateWitness { g2: w.g2 });
        }
        Ok(w)
    }
}

fn position_from_extrema(min_g: f64, max_g: f64, tol: f64) -> Position {
    if max_g < -tol {
        Position::Below
    } else if min_g > tol {
        Position::Above
    } else if max_g.abs() <= tol {
        if min_g < -tol {
            Position::LeftBoundary
        } else {
            Position::Interior
        }
    } else if min_g.abs() <= tol {
        Position::RightBoundary
    } else {
        Position::Interior
    }
}

/// Consecutive difference quotients `(Δt_left/Δa, Δt_right/Δa)` of a trace.
/// Pairs with equal `a` are skipped.
pub fn difference_quotients(samples: &[TongueSample]) -> Vec<(f64, f64)> {
    samples
        .windows(2)
        .filter(|w| w[1].a != w[0].a)
        .map(|w| {
            let da = w[1].a - w[0].a;
            ((w[1].t_left - w[0].t_left) / da, (w[1].t_right - w[0].t_right) / da)
        })
        .collect()
}

pub fn g_extrema(fam: &FamilySpec, frac: Fraction, t: f64, a: f64, grid: usize) -> Result<ExtremumReport> {
    if grid < 64 {
        return Err(Error::InvalidArgument(format!("extremum grid {grid} is below 64")));
    }
    TongueSolver { grid, ..TongueSolver::default() }.g_extrema(fam, frac, t, a)
}

pub fn classify(fam: &FamilySpec, frac: Fraction, t: f64, a: f64) -> Result<Position> {
    TongueSolver::default().classify(fam, frac, t, a)
}

pub fn boundary_at(fam: &FamilySpec, frac: Fraction, a: f64) -> Result<TongueSample> {
    TongueSolver::default().boundary_at(fam, frac, a)
}

pub fn trace_boundary(fam: &FamilySpec, frac: Fraction, a_values: &[f64]) -> Result<Vec<TongueSample>> {
    TongueSolver::default().trace_boundary(fam, frac, a_values)
}

pub fn boundary_witness(fam: &FamilySpec, sample: &TongueSample, side: Side) -> Result<Witness> {
    TongueSolver::default().boundary_witness(fam, sample, side)
}
