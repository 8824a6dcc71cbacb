//! Truncated complex power series at 0 and parabolic data of guiding maps.
//!
//! A germ `f(z) = e^{2πip/q} z + …` whose multiplier is a primitive `q`-th
//! root of unity has `f^{∘q}(z) = z + C z^{νq+1} + O(z^{νq+2})` unless the
//! iterate is the identity; `ν` is the parabolic multiplicity.

use std::f64::consts::{PI, TAU};

use log::debug;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tongue::Fraction;
use crate::{Error, Result};

pub const DEFAULT_ORDER: usize = 32;
/// Coefficients below this magnitude count as zero in the leading-term scan.
pub const ZERO_TOL: f64 = 1e-10;

/// Coefficients `c_0..c_N` of a series known exactly up to `z^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl TruncatedSeries {
    /// Pads with zeros or truncates so that the series has order `order`.
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, c(0.0, 0.0));
        TruncatedSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&v| c(v, 0.0)).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::new(vec![c(1.0, 0.0)], order)
    }

    /// The identity germ `z`.
    pub fn identity(order: usize) -> Self {
        Self::new(vec![c(0.0, 0.0), c(1.0, 0.0)], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(c(0.0, 0.0))
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|v| v * s).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order();
        let mut out = vec![c(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == c(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// `exp(f)` from `(exp f)' = f'·exp f`, with `e^{c_0}` factored out.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut g = vec![c(0.0, 0.0); n + 1];
        g[0] = c(1.0, 0.0);
        for k in 1..=n {
            let mut acc = c(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * g[k - j] * j as f64;
            }
            g[k] = acc / k as f64;
        }
        let scale = self.coeffs[0].exp();
        TruncatedSeries { coeffs: g }.scale(scale)
    }

    /// `self ∘ inner` by Horner's scheme; `inner` must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        let c0 = inner.coeffs[0];
        if c0 != c(0.0, 0.0) {
            return Err(Error::NonvanishingConstantTerm { re: c0.re, im: c0.im });
        }
        let n = self.order();
        let mut acc = TruncatedSeries::new(vec![self.coeffs[n]], n);
        for k in (0..n).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// `f(ρz)/ρ`, i.e. coefficient `k` multiplied by `ρ^{k−1}`.
    pub fn rescale(&self, rho: f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, c)| c * rho.powi(k as i32 - 1)).collect();
        TruncatedSeries { coeffs }
    }

    /// Radius `ρ` making every coefficient of `f(ρz)/ρ` beyond the linear one
    /// at most 1 in modulus; 1 when there are no such coefficients.
    pub fn unit_radius(&self) -> f64 {
        let rho = self
            .coeffs
            .iter()
            .enumerate()
            .skip(2)
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| c.norm().powf(-1.0 / (k as f64 - 1.0)))
            .fold(f64::INFINITY, f64::min);
        if rho.is_finite() {
            rho
        } else {
            1.0
        }
    }

    /// `f^{∘n}` by `n − 1` successive compositions (`n = 0` gives `z`).
    pub fn iterate(&self, n: u32) -> Result<Self> {
        let mut out = TruncatedSeries::identity(self.order());
        for _ in 0..n {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// `f^{∘n}` by repeated squaring of the composition power.
    pub fn iterate_by_squaring(&self, mut n: u32) -> Result<Self> {
        let mut out = TruncatedSeries::identity(self.order());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                out = base.compose(&out)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuideKind {
    /// `s_t(z) = e^{2πit} z e^{πz}`, guiding the standard family.
    Standard,
    /// `b_t(w) = e^{2πit} w (1 − w)`, guiding the Blaschke family.
    Blaschke,
}

pub fn multiplier(frac: Fraction) -> Complex64 {
    Complex64::from_polar(1.0, TAU * frac.value())
}

/// Taylor series at 0 of the guiding map at `t = p/q`.
pub fn guide_series(kind: GuideKind, frac: Fraction, order: usize) -> TruncatedSeries {
    let rot = multiplier(frac);
    let body = match kind {
        GuideKind::Standard => {
            let exp = TruncatedSeries::new(vec![c(0.0, 0.0), c(PI, 0.0)], order).exp();
            TruncatedSeries::identity(order).mul_unchecked(&exp)
        }
        GuideKind::Blaschke => TruncatedSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)], order),
    };
    body.scale(rot)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicData {
    pub multiplier: Complex64,
    pub p: i64,
    pub q: u32,
    pub nu: usize,
    /// Leading coefficient of `f^{∘q}(z) − z`.
    #[serde(rename = "C")]
    pub c: Complex64,
    /// `ν·q + 1`.
    pub leading_index: usize,
}

pub fn parabolic_data(f: &TruncatedSeries, q: u32) -> Result<ParabolicData> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let needed = 2 * q as usize + 2;
    if f.order() < needed {
        return Err(Error::OrderTooLow { order: f.order(), needed });
    }
    let mult = f.coeff(1);
    let q_pow = mult.powu(q);
    if (mult.norm() - 1.0).abs() > 1e-10 || (q_pow - c(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::NotRootOfUnity { q });
    }
    let p = (mult.arg() / TAU * q as f64).round() as i64;
    let p = p.rem_euclid(q as i64);
    // Iterate coefficients grow like |C_{p/q}|, so the zero test runs on the
    // unit-scaled germ f(ρz)/ρ and C is scaled back afterwards.
    let rho = f.unit_radius();
    let scaled = f.rescale(rho);
    let iter = scaled.iterate(q)?;
    let diff = iter.sub(&TruncatedSeries::identity(f.order()))?;
    let leading = (2..=f.order()).find(|&j| diff.coeff(j).norm() > ZERO_TOL);
    let Some(j) = leading else {
        return Err(Error::IdentityToTruncation { order: f.order() });
    };
    debug!(
        "first coefficient of f^{q} - z above {ZERO_TOL:e} (scale {rho:e}): index {j}, |c| = {:e}",
        diff.coeff(j).norm()
    );
    if (j - 1) % q as usize != 0 {
        return Err(Error::NonresonantLeadingTerm { index: j, q });
    }
    let c = diff.coeff(j) / rho.powi(j as i32 - 1);
    Ok(ParabolicData { multiplier: mult, p, q, nu: (j - 1) / q as usize, c, leading_index: j })
}

/// `2|C|/(πq)`, the coefficient of `a^q` in the tongue width when `ν = 1`.
pub fn width_coefficient(pd: &ParabolicData) -> Result<f64> {
    if pd.nu != 1 {
        return Err(Error::MultiplicityNotOne { nu: pd.nu });
    }
    Ok(2.0 * pd.c.norm() / (PI * pd.q as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frac(p: i64, q: i64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn products() {
        let z = TruncatedSeries::identity(6);
        let z2 = z.mul(&z).unwrap();
        assert_eq!(z2.coeff(2), c(1.0, 0.0));
        assert_eq!(z2.coeffs().iter().filter(|v| v.norm() > 0.0).count(), 1);
        let f = TruncatedSeries::from_real(&[0.5, 1.0, -2.0, 3.0], 6);
        assert_eq!(f.mul(&TruncatedSeries::one(6)).unwrap(), f);
        let a = TruncatedSeries::from_real(&[1.0, 1.0], 6);
        let b = TruncatedSeries::from_real(&[1.0, -1.0], 6);
        assert_eq!(a.mul(&b).unwrap(), TruncatedSeries::from_real(&[1.0, 0.0, -1.0], 6));
        assert_eq!(a.mul(&TruncatedSeries::one(5)).unwrap_err().name(), "OrderMismatch");
    }

    #[test]
    fn products_truncate() {
        let z3 = TruncatedSeries::from_real(&[0.0, 0.0, 0.0, 1.0], 4);
        assert_eq!(z3.mul(&z3).unwrap(), TruncatedSeries::zero(4));
    }

    #[test]
    fn exponentials() {
        assert_eq!(TruncatedSeries::zero(8).exp(), TruncatedSeries::one(8));
        let e = TruncatedSeries::identity(10).exp();
        let mut fact = 1.0;
        for k in 0..=10 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!(close(e.coeff(k), c(1.0 / fact, 0.0), 1e-15));
        }
        let e = TruncatedSeries::from_real(&[0.0, PI], 8).exp();
        assert!(close(e.coeff(2), c(PI * PI / 2.0, 0.0), 1e-14));
        // Constant term factors out as e^{c_0}.
        let e = TruncatedSeries::from_real(&[2.0, 1.0], 8).exp();
        assert!(close(e.coeff(3), c(2f64.exp() / 6.0, 0.0), 1e-14));
    }

    #[test]
    fn compositions() {
        let f = TruncatedSeries::from_real(&[0.3, 1.0, -0.5, 2.0], 8);
        assert_eq!(f.compose(&TruncatedSeries::identity(8)).unwrap(), f);
        let z2 = TruncatedSeries::from_real(&[0.0, 0.0, 1.0], 8);
        let inner = TruncatedSeries::from_real(&[0.0, 1.0, 1.0], 8);
        assert_eq!(z2.compose(&inner).unwrap(), TruncatedSeries::from_real(&[0.0, 0.0, 1.0, 2.0, 1.0], 8));
        let err = z2.compose(&TruncatedSeries::from_real(&[1.0, 1.0], 8)).unwrap_err();
        assert_eq!(err.name(), "NonvanishingConstantTerm");
    }

    fn cubic() -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3).prop_map(|v| {
            let mut coeffs = vec![c(0.0, 0.0)];
            coeffs.extend(v.into_iter().map(|(re, im)| c(re, im)));
            TruncatedSeries::new(coeffs, 9)
        })
    }

    proptest! {
        #[test]
        fn composition_is_associative(f in cubic(), g in cubic(), h in cubic()) {
            let left = f.compose(&g).unwrap().compose(&h).unwrap();
            let right = f.compose(&g.compose(&h).unwrap()).unwrap();
            for k in 0..=9 {
                prop_assert!(close(left.coeff(k), right.coeff(k), 1e-12));
            }
        }
    }

    #[test]
    fn guide_coefficients() {
        let s = guide_series(GuideKind::Standard, frac(0, 1), 8);
        let expected = [0.0, 1.0, PI, PI * PI / 2.0, PI.powi(3) / 6.0];
        for (k, e) in expected.iter().enumerate() {
            assert!(close(s.coeff(k), c(*e, 0.0), 1e-13));
        }
        let b = guide_series(GuideKind::Blaschke, frac(1, 2), 8);
        assert!(close(b.coeff(1), c(-1.0, 0.0), 1e-15) && close(b.coeff(2), c(1.0, 0.0), 1e-15));
        assert_eq!(b.coeffs().iter().filter(|v| v.norm() > 1e-15).count(), 2);
        let s = guide_series(GuideKind::Standard, frac(1, 3), 8);
        assert!(close(s.coeff(1), Complex64::from_polar(1.0, TAU / 3.0), 1e-15));
    }

    #[test]
    fn standard_half_by_hand() {
        // s∘s(z) = z·e^{πz(1 − e^{πz})} = z − π²z³ + O(z⁴).
        let s = guide_series(GuideKind::Standard, frac(1, 2), 8);
        let pd = parabolic_data(&s, 2).unwrap();
        assert_eq!((pd.nu, pd.leading_index, pd.p, pd.q), (1, 3, 1, 2));
        assert!(close(pd.c, c(-PI * PI, 0.0), 1e-12));
        // Oracle: expand z·exp(πz(1 − e^{πz})) directly.
        let n = 8;
        let epz = TruncatedSeries::from_real(&[0.0, PI], n).exp();
        let inner = TruncatedSeries::from_real(&[0.0, PI], n).mul(&TruncatedSeries::one(n).sub(&epz).unwrap()).unwrap();
        let direct = TruncatedSeries::identity(n).mul(&inner.exp()).unwrap();
        let iter = s.iterate(2).unwrap();
        for k in 0..=n {
            assert!(close(direct.coeff(k), iter.coeff(k), 1e-10), "k={k}");
        }
        assert!((width_coefficient(&pd).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn blaschke_half_by_hand() {
        // b(w) = −w + w², b∘b(w) = w − 2w³ + w⁴.
        let b = guide_series(GuideKind::Blaschke, frac(1, 2), 8);
        let iter = b.iterate(2).unwrap();
        let expected = TruncatedSeries::from_real(&[0.0, 1.0, 0.0, -2.0, 1.0], 8);
        for k in 0..=8 {
            assert!(close(iter.coeff(k), expected.coeff(k), 1e-15));
        }
        let pd = parabolic_data(&b, 2).unwrap();
        assert_eq!(pd.nu, 1);
        assert!(close(pd.c, c(-2.0, 0.0), 1e-15));
        assert!((width_coefficient(&pd).unwrap() - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn unit_scaling() {
        let s = guide_series(GuideKind::Standard, frac(1, 2), 8);
        assert!((s.unit_radius() - 1.0 / PI).abs() < 1e-15);
        let r = s.rescale(1.0 / PI);
        assert!(close(r.coeff(3), -0.5 * c(1.0, 0.0), 1e-14));
        assert_eq!(TruncatedSeries::identity(8).unit_radius(), 1.0);
        assert_eq!(guide_series(GuideKind::Blaschke, frac(0, 1), 8).unit_radius(), 1.0);
    }

    #[test]
    fn large_q_coefficients_stay_resonant() {
        // |C_{1/8}| is about 6.7e5; without scaling rounding noise reaches 1e-10.
        for q in 1..=8 {
            let pd = parabolic_data(&guide_series(GuideKind::Standard, frac(1, q), DEFAULT_ORDER), q as u32).unwrap();
            assert_eq!(pd.nu, 1, "q={q}");
        }
        let pd = parabolic_data(&guide_series(GuideKind::Standard, frac(1, 3), 16), 3).unwrap();
        assert!((pd.c.norm() - 41.01744859).abs() < 1e-7);
    }

    #[test]
    fn pure_rotation_is_identity_to_truncation() {
        let f = TruncatedSeries::new(vec![c(0.0, 0.0), Complex64::from_polar(1.0, TAU / 3.0)], 16);
        assert_eq!(parabolic_data(&f, 3).unwrap_err().name(), "IdentityToTruncation");
    }

    #[test]
    fn parabolic_preconditions() {
        let f = TruncatedSeries::from_real(&[0.0, 0.5, 1.0], 16);
        assert_eq!(parabolic_data(&f, 1).unwrap_err().name(), "NotRootOfUnity");
        let g = guide_series(GuideKind::Standard, frac(1, 3), 16);
        assert_eq!(parabolic_data(&g, 2).unwrap_err().name(), "NotRootOfUnity");
        let short = guide_series(GuideKind::Standard, frac(1, 3), 6);
        assert_eq!(parabolic_data(&short, 3).unwrap_err().name(), "OrderTooLow");
    }

    #[test]
    fn leading_index_of_handmade_germ() {
        // f(z) = −z − z²: f∘f(z) = z − 2z³ − z⁴.
        let f = TruncatedSeries::from_real(&[0.0, -1.0, -1.0], 8);
        let pd = parabolic_data(&f, 2).unwrap();
        assert_eq!((pd.leading_index, pd.nu), (3, 1));
        assert!(close(pd.c, c(-2.0, 0.0), 1e-15));
    }

    #[test]
    fn width_coefficient_needs_simple_parabola() {
        let pd = ParabolicData { multiplier: c(1.0, 0.0), p: 0, q: 1, nu: 2, c: c(1.0, 0.0), leading_index: 3 };
        assert_eq!(width_coefficient(&pd).unwrap_err().name(), "MultiplicityNotOne");
    }

    #[test]
    fn iterate_methods_agree() {
        for kind in [GuideKind::Standard, GuideKind::Blaschke] {
            for q in 1..=8 {
                let g = guide_series(kind, frac(1, q), 24);
                let f = g.rescale(g.unit_radius());
                let a = f.iterate(q as u32).unwrap();
                let b = f.iterate_by_squaring(q as u32).unwrap();
                for k in 0..=24 {
                    // High orders are sums of large cancelling terms.
                    let rel = if k <= 2 * q as usize + 2 { 1e-11 } else { 1e-9 };
                    let tol = rel * a.coeff(k).norm().max(1.0);
                    assert!(
                        close(a.coeff(k), b.coeff(k), tol),
                        "{kind:?} q={q} k={k}: {} vs {}",
                        a.coeff(k),
                        b.coeff(k)
                    );
                }
            }
        }
    }

    #[test]
    fn truncation_stability() {
        for kind in [GuideKind::Standard, GuideKind::Blaschke] {
            for (p, q) in [(0, 1), (1, 2), (1, 3), (2, 5), (3, 7)] {
                let n = 2 * q as usize + 2;
                let a = parabolic_data(&guide_series(kind, frac(p, q), n), q as u32).unwrap();
                let b = parabolic_data(&guide_series(kind, frac(p, q), n + 8), q as u32).unwrap();
                assert_eq!(a.nu, b.nu);
                assert!((a.c - b.c).norm() <= 1e-10 * a.c.norm());
            }
        }
    }

    #[test]
    fn serializes_parabolic_data() {
        let pd = parabolic_data(&guide_series(GuideKind::Blaschke, frac(1, 2), 8), 2).unwrap();
        let v = serde_json::to_value(pd).unwrap();
        assert_eq!(v["nu"], 1);
        assert_eq!(v["C"][0], -2.0);
    }
}
