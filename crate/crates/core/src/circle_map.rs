//! Lift families `F_{t,a}(x) = x + t + a·ξ(a, x)` measured in turns, so that
//! every lift satisfies `F(x + 1) = F(x) + 1`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::trig::{cos_turns, sin_cos_turns, sin_turns};
use crate::util::{periodic_max, periodic_min};
use crate::{Error, Result};

/// Default number of terms kept from `Σ sin(2πnx)/n!` for the Angle family.
pub const DEFAULT_ANGLE_TERMS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `φ(x) = sin(2πx)`.
    Standard,
    /// `x + t − arctan(a sin 2πx / (1 − a cos 2πx))/π`, guided by `w(1 − w)`.
    Blaschke,
    /// `φ(x) = Σ_{n≥1} sin(2πnx)/n!`, truncated.
    Angle,
    /// `φ(x) = Re c_0 + Σ_k (c_k e^{2πikx} + conj(c_k) e^{−2πikx})`.
    Fourier,
}

/// One term `c_k e^{2πikx} + conj(c_k) e^{−2πikx}` of a Fourier perturbation.
/// The `k = 0` term contributes `Re c_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: u32,
    pub c: Complex64,
}

impl FourierTerm {
    pub fn new(k: u32, re: f64, im: f64) -> Self {
        FourierTerm { k, c: Complex64::new(re, im) }
    }
}

/// Structured config record for a family, as read from JSON.
///
/// ```
/// use tongue_lab::circle_map::{FamilyConfig, FamilySpec};
/// let cfg: FamilyConfig = serde_json::from_str(
///     r#"{ "kind": "fourier", "fourier": [[1, 0.0, -0.5]] }"#).unwrap();
/// let fam = FamilySpec::from_config(&cfg).unwrap();
/// assert!((fam.phi(0.25) - 1.0).abs() < 1e-15);
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub kind: Option<FamilyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_terms: Option<usize>,
}

/// A two-parameter lift family together with its admissible `a`-interval.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    kind: FamilyKind,
    /// Dense coefficients `c_0..c_K` for Angle and Fourier kinds.
    coeffs: Vec<Complex64>,
    angle_terms: usize,
    a_min: f64,
    a_max: f64,
    phi_min: f64,
    phi_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub t: f64,
    pub a: f64,
}

impl ParamPoint {
    pub fn new(t: f64, a: f64) -> Self {
        ParamPoint { t, a }
    }
}

impl FamilySpec {
    pub fn standard() -> Self {
        FamilySpec {
            kind: FamilyKind::Standard,
            coeffs: Vec::new(),
            angle_terms: 0,
            a_min: -1.0 / TAU,
            a_max: 1.0 / TAU,
            phi_min: -1.0,
            phi_max: 1.0,
        }
    }

    pub fn blaschke() -> Self {
        FamilySpec {
            kind: FamilyKind::Blaschke,
            coeffs: Vec::new(),
            angle_terms: 0,
            // 1 − 2a(cos θ − a)/(1 − 2a cos θ + a²) first vanishes at |a| = 1/3.
            a_min: -1.0 / 3.0,
            a_max: 1.0 / 3.0,
            phi_min: -1.0 / PI,
            phi_max: 1.0 / PI,
        }
    }

    pub fn angle() -> Self {
        Self::angle_with_terms(DEFAULT_ANGLE_TERMS).expect("default truncation is valid")
    }

    pub fn angle_with_terms(terms: usize) -> Result<Self> {
        if terms == 0 {
            return Err(Error::InvalidConfig("angle_terms must be positive".into()));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); terms + 1];
        let mut factorial = 1.0;
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            factorial *= n as f64;
            // sin(2πnx)/n! = 2 Re(c e^{2πinx}) with c = −i/(2 n!)
            *c = Complex64::new(0.0, -0.5 / factorial);
        }
        Ok(Self::from_dense(FamilyKind::Angle, coeffs, terms))
    }

    pub fn fourier(terms: &[FourierTerm]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidConfig("fourier family needs at least one term".into()));
        }
        let kmax = terms.iter().map(|t| t.k).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); kmax + 1];
        for term in terms {
            if !(term.c.re.is_finite() && term.c.im.is_finite()) {
                return Err(Error::InvalidConfig(format!("non-finite coefficient at k = {}", term.k)));
            }
            coeffs[term.k as usize] += term.c;
        }
        Ok(Self::from_dense(FamilyKind::Fourier, coeffs, 0))
    }

    fn from_dense(kind: FamilyKind, coeffs: Vec<Complex64>, angle_terms: usize) -> Self {
        let mut fam = FamilySpec {
            kind,
            coeffs,
            angle_terms,
            a_min: f64::NEG_INFINITY,
            a_max: f64::INFINITY,
            phi_min: 0.0,
            phi_max: 0.0,
        };
        let grid = 4096;
        let (_, dmax) = periodic_max(&|x| fam.phi_deriv(x), grid, 1e-13);
        let (_, dmin) = periodic_min(&|x| fam.phi_deriv(x), grid, 1e-13);
        if dmax > 0.0 {
            fam.a_min = -1.0 / dmax;
        }
        if dmin < 0.0 {
            fam.a_max = -1.0 / dmin;
        }
        fam.phi_max = periodic_max(&|x| fam.phi(x), grid, 1e-13).1;
        fam.phi_min = periodic_min(&|x| fam.phi(x), grid, 1e-13).1;
        fam
    }

    pub fn from_config(cfg: &FamilyConfig) -> Result<Self> {
        match cfg.kind.unwrap_or(FamilyKind::Standard) {
            FamilyKind::Standard => Ok(Self::standard()),
            FamilyKind::Blaschke => Ok(Self::blaschke()),
            FamilyKind::Angle => Self::angle_with_terms(cfg.angle_terms.unwrap_or(DEFAULT_ANGLE_TERMS)),
            FamilyKind::Fourier => {
                let rows = cfg
                    .fourier
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("fourier family needs a \"fourier\" list".into()))?;
                let mut terms = Vec::with_capacity(rows.len());
                for &[k, re, im] in rows {
                    if k < 0.0 || k.fract() != 0.0 || k > u32::MAX as f64 {
                        return Err(Error::InvalidConfig(format!("frequency {k} is not a nonnegative integer")));
                    }
                    terms.push(FourierTerm::new(k as u32, re, im));
                }
                Self::fourier(&terms)
            }
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn angle_terms(&self) -> usize {
        self.angle_terms
    }

    /// Open interval of `a` on which every `F_{t,a}` is an increasing homeomorphism.
    pub fn a_range(&self) -> (f64, f64) {
        (self.a_min, self.a_max)
    }

    /// Bounds `(min φ, max φ)` of the `a → 0` perturbation.
    pub fn phi_bounds(&self) -> (f64, f64) {
        (self.phi_min, self.phi_max)
    }

    /// True when `F_{t,a}` depends affinely on `a`.
    pub fn is_affine_in_a(&self) -> bool {
        self.kind != FamilyKind::Blaschke
    }

    pub fn check_a(&self, a: f64) -> Result<()> {
        if a > self.a_min && a < self.a_max {
            Ok(())
        } else {
            Err(Error::ParameterOutOfRange { a, min: self.a_min, max: self.a_max })
        }
    }

    /// Weaker check used for fixed-point problems (`q = 1`), where `G = F − Id`
    /// stays meaningful for non-invertible `F`: the perturbation only has to
    /// be continuous.
    pub fn check_a_continuous(&self, a: f64) -> Result<()> {
        let ok = match self.kind {
            FamilyKind::Blaschke => a.abs() < 1.0,
            _ => a.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            let bound = if self.kind == FamilyKind::Blaschke { 1.0 } else { f64::INFINITY };
            Err(Error::ParameterOutOfRange { a, min: -bound, max: bound })
        }
    }

    /// The perturbation `ξ(0, x)`; for families affine in `a` this is `φ`.
    pub fn phi(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Standard => sin_turns(x),
            FamilyKind::Blaschke => -sin_turns(x) / PI,
            FamilyKind::Angle | FamilyKind::Fourier => self.dense_phi(x).0,
        }
    }

    pub fn phi_deriv(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Standard => TAU * cos_turns(x),
            FamilyKind::Blaschke => -2.0 * cos_turns(x),
            FamilyKind::Angle | FamilyKind::Fourier => self.dense_phi(x).1,
        }
    }

    /// Dense Fourier sum and its x-derivative at `x` (turns).
    fn dense_phi(&self, x: f64) -> (f64, f64) {
        let (s, c) = sin_cos_turns(x);
        let step = Complex64::new(c, s);
        let mut z = Complex64::new(1.0, 0.0);
        let mut value = self.coeffs.first().map_or(0.0, |c| c.re);
        let mut deriv = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            z *= step;
            let cz = c * z;
            value += 2.0 * cz.re;
            // d/dx of 2 Re(c e^{2πikx}) = 2 Re(2πik c e^{2πikx}) = −4πk Im(c z)
            deriv -= 2.0 * TAU * k as f64 * cz.im;
        }
        (value, deriv)
    }

    /// Supremum over `x` of `|a·ξ(a, x)|`.
    pub fn perturbation_sup(&self, a: f64) -> f64 {
        match self.kind {
            FamilyKind::Standard => a.abs(),
            FamilyKind::Blaschke => a.abs().min(1.0).asin() / PI,
            FamilyKind::Angle | FamilyKind::Fourier => a.abs() * self.phi_min.abs().max(self.phi_max.abs()),
        }
    }

    /// Validated lift at a parameter point.
    pub fn lift(&self, p: ParamPoint) -> Result<Lift<'_>> {
        self.check_a(p.a)?;
        Ok(Lift { fam: self, t: p.t, a: p.a })
    }

    /// Lift checked only with [`FamilySpec::check_a_continuous`]; may fail to
    /// be monotone.
    pub fn lift_continuous(&self, p: ParamPoint) -> Result<Lift<'_>> {
        self.check_a_continuous(p.a)?;
        Ok(Lift { fam: self, t: p.t, a: p.a })
    }

    pub fn eval_lift(&self, p: ParamPoint, x: f64) -> Result<f64> {
        Ok(self.lift(p)?.apply(x))
    }

    pub fn eval_iterate(&self, p: ParamPoint, x: f64, n: u64) -> Result<f64> {
        Ok(self.lift(p)?.iterate(x, n))
    }

    pub fn eval_iterate_deriv(&self, p: ParamPoint, x: f64, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("derivative of the zeroth iterate requested".into()));
        }
        Ok(self.lift(p)?.iterate_deriv(x, n))
    }
}

/// A lift `F_{t,a}` with `a` already checked against the family range.
#[derive(Clone, Copy, Debug)]
pub struct Lift<'f> {
    fam: &'f FamilySpec,
    t: f64,
    a: f64,
}

impl<'f> Lift<'f> {
    pub fn family(&self) -> &'f FamilySpec {
        self.fam
    }

    pub fn param(&self) -> ParamPoint {
        ParamPoint::new(self.t, self.a)
    }

    /// `a·ξ(a, x)`, the part of `F_{t,a}(x)` beyond `x + t`.
    #[inline]
    pub fn perturbation(&self, x: f64) -> f64 {
        let a = self.a;
        if a == 0.0 {
            return 0.0;
        }
        match self.fam.kind {
            FamilyKind::Standard => a * sin_turns(x),
            FamilyKind::Blaschke => {
                let (s, c) = sin_cos_turns(x);
                -(a * s).atan2(1.0 - a * c) / PI
            }
            FamilyKind::Angle | FamilyKind::Fourier => a * self.fam.dense_phi(x).0,
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        x + self.t + self.perturbation(x)
    }

    /// `F'(x)`.
    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        let a = self.a;
        if a == 0.0 {
            return 1.0;
        }
        match self.fam.kind {
            FamilyKind::Standard => 1.0 + TAU * a * cos_turns(x),
            FamilyKind::Blaschke => {
                let c = cos_turns(x);
                1.0 - 2.0 * a * (c - a) / (1.0 - 2.0 * a * c + a * a)
            }
            FamilyKind::Angle | FamilyKind::Fourier => 1.0 + a * self.fam.dense_phi(x).1,
        }
    }

    pub fn iterate(&self, mut x: f64, n: u64) -> f64 {
        for _ in 0..n {
            x = self.apply(x);
        }
        x
    }

    /// `(F^{∘n})'(x)` by the chain rule along the orbit.
    pub fn iterate_deriv(&self, mut x: f64, n: u64) -> f64 {
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.deriv(x);
            x = self.apply(x);
        }
        d
    }

    /// `F^{∘n}(x)` together with its derivative.
    pub fn iterate_with_deriv(&self, mut x: f64, n: u64) -> (f64, f64) {
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.deriv(x);
            x = self.apply(x);
        }
        (x, d)
    }
}
