//! Translation numbers: certified enclosures, point estimates, devil's
//! staircases and Poincaré semiconjugacy averages.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::{FamilyKind, FamilySpec, Lift, ParamPoint};
use crate::trig::{floor, sin_turns};
use crate::{Error, Result};

/// Default orbit length for point estimates.
pub const DEFAULT_ITERATIONS: u64 = 100_000;

/// Interval `[lo, hi]` certified to contain the translation number.
///
/// For any lift `|F^n(x) − x − n·Trans(F)| < 1`, so from the orbit of 0 the
/// translation number lies in `[(F^n(0) − 1)/n, (F^n(0) + 1)/n]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub iterations: u64,
}

impl Enclosure {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_subset_of(&self, other: &Enclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// `F^{∘n}(0)` computed with the integer part split off, so the fractional
/// state stays in `[0, 1)` and no precision is lost as the orbit grows.
fn displacement_from_zero(lift: &Lift<'_>, n: u64) -> f64 {
    let mut whole = 0.0f64;
    let mut frac = 0.0f64;
    for _ in 0..n {
        let y = lift.apply(frac);
        let fl = floor(y);
        whole += fl;
        frac = y - fl;
    }
    whole + frac
}

/// Orbits advanced together by [`displacements`].
const LANES: usize = 8;

/// [`displacement_from_zero`] for up to `LANES` lifts at once. Each step of a
/// single orbit waits on the previous one; interleaving independent orbits
/// keeps the pipeline busy. Per-lane arithmetic is identical, so results
/// match the single-orbit path bit for bit.
fn displacements(lifts: &[Lift<'_>], n: u64) -> Vec<f64> {
    let m = lifts.len();
    debug_assert!((1..=LANES).contains(&m));
    let lane: [Lift<'_>; LANES] = std::array::from_fn(|i| lifts[i.min(m - 1)]);
    let disp = if lane[0].family().kind() == FamilyKind::Standard {
        // Same arithmetic as `Lift::apply`, minus the per-step dispatch.
        let t: [f64; LANES] = std::array::from_fn(|l| lane[l].param().t);
        let a: [f64; LANES] = std::array::from_fn(|l| lane[l].param().a);
        standard_lockstep_dispatch(&t, &a, n)
    } else {
        lockstep(n, |l, x| lane[l].apply(x))
    };
    disp[..m].to_vec()
}

#[inline(always)]
fn standard_lockstep(t: &[f64; LANES], a: &[f64; LANES], n: u64) -> [f64; LANES] {
    lockstep(n, |l, x| x + t[l] + a[l] * sin_turns(x))
}

/// Wider vectors, same IEEE operations: AVX2 brings no fused multiply-add,
/// so the results are bitwise those of the baseline build.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn standard_lockstep_avx2(t: &[f64; LANES], a: &[f64; LANES], n: u64) -> [f64; LANES] {
    standard_lockstep(t, a, n)
}

fn standard_lockstep_dispatch(t: &[f64; LANES], a: &[f64; LANES], n: u64) -> [f64; LANES] {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: AVX2 support was just checked.
        return unsafe { standard_lockstep_avx2(t, a, n) };
    }
    standard_lockstep(t, a, n)
}

#[inline(always)]
fn lockstep(n: u64, step: impl Fn(usize, f64) -> f64) -> [f64; LANES] {
    let mut whole = [0.0f64; LANES];
    let mut frac = [0.0f64; LANES];
    for _ in 0..n {
        for l in 0..LANES {
            let y = step(l, frac[l]);
            let fl = floor(y);
            whole[l] += fl;
            frac[l] = y - fl;
        }
    }
    std::array::from_fn(|l| whole[l] + frac[l])
}

fn enclosure(disp: f64, n: u64) -> Enclosure {
    let n_f = n as f64;
    Enclosure { lo: (disp - 1.0) / n_f, hi: (disp + 1.0) / n_f, iterations: n }
}

fn check_iterations(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("iteration count must be positive".into()));
    }
    Ok(())
}

pub fn trans_enclosure(fam: &FamilySpec, p: ParamPoint, n: u64) -> Result<Enclosure> {
    check_iterations(n)?;
    let lift = fam.lift(p)?;
    Ok(enclosure(displacement_from_zero(&lift, n), n))
}

/// Midpoint of [`trans_enclosure`]; within `1/n` of the translation number.
pub fn trans_estimate(fam: &FamilySpec, p: ParamPoint, n: u64) -> Result<f64> {
    Ok(trans_enclosure(fam, p, n)?.midpoint())
}

/// [`trans_enclosure`] at many points, bitwise equal to the one-point
/// results but several times faster per point.
///
/// ```
/// use tongue_lab::circle_map::{FamilySpec, ParamPoint};
/// use tongue_lab::rotation::{trans_enclosure, trans_enclosures};
/// let fam = FamilySpec::standard();
/// let pts: Vec<ParamPoint> = (0..5).map(|i| ParamPoint::new(0.1 * i as f64, 0.1)).collect();
/// let many = trans_enclosures(&fam, &pts, 1000).unwrap();
/// assert_eq!(many[3], trans_enclosure(&fam, pts[3], 1000).unwrap());
/// ```
pub fn trans_enclosures(fam: &FamilySpec, points: &[ParamPoint], n: u64) -> Result<Vec<Enclosure>> {
    check_iterations(n)?;
    let lifts = points.iter().map(|&p| fam.lift(p)).collect::<Result<Vec<_>>>()?;
    Ok(lifts.par_chunks(LANES).flat_map_iter(|chunk| displacements(chunk, n)).map(|d| enclosure(d, n)).collect())
}

pub fn trans_estimates(fam: &FamilySpec, points: &[ParamPoint], n: u64) -> Result<Vec<f64>> {
    Ok(trans_enclosures(fam, points, n)?.iter().map(Enclosure::midpoint).collect())
}

/// Samples `t ↦ Trans(F_{t,a})` on `steps` equally spaced points of
/// `[t_lo, t_hi]` (both ends included).
pub fn staircase(fam: &FamilySpec, a: f64, t_lo: f64, t_hi: f64, steps: usize, n: u64) -> Result<Vec<(f64, f64)>> {
    if !(t_lo < t_hi) || steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "staircase needs t_lo < t_hi and at least 2 steps (got [{t_lo}, {t_hi}], {steps})"
        )));
    }
    fam.check_a(a)?;
    let dt = (t_hi - t_lo) / (steps - 1) as f64;
    let ts: Vec<f64> = (0..steps).map(|i| if i + 1 == steps { t_hi } else { t_lo + i as f64 * dt }).collect();
    let points: Vec<ParamPoint> = ts.iter().map(|&t| ParamPoint::new(t, a)).collect();
    let values = trans_estimates(fam, &points, n)?;
    Ok(ts.into_iter().zip(values).collect())
}

/// Poincaré averages `Φ_N(x) = (1/N) Σ_{k=0}^{N−1} (F^k(x) − F^k(0))` on
/// `grid` equally spaced points of `[0, 1]`. The last point is set to
/// `Φ_N(0) + 1` exactly, which is its value by periodicity.
pub fn semiconjugacy_profile(fam: &FamilySpec, p: ParamPoint, n_avg: usize, grid: usize) -> Result<Vec<(f64, f64)>> {
    if n_avg == 0 || grid < 2 {
        return Err(Error::InvalidArgument("profile needs N >= 1 and grid >= 2".into()));
    }
    let lift = fam.lift(p)?;
    let mut base = Vec::with_capacity(n_avg);
    let mut y = 0.0;
    for _ in 0..n_avg {
        base.push(y);
        y = lift.apply(y);
    }
    let dx = 1.0 / (grid - 1) as f64;
    let mut out: Vec<(f64, f64)> = (0..grid - 1)
        .into_par_iter()
        .map(|i| {
            let x0 = i as f64 * dx;
            let mut x = x0;
            let mut acc = 0.0;
            for b in &base {
                acc += x - b;
                x = lift.apply(x);
            }
            (x0, acc / n_avg as f64)
        })
        .collect();
    out.push((1.0, out[0].1 + 1.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::FamilySpec;
    use proptest::prelude::*;

    const GOLDEN: f64 = 0.618_033_988_7;

    #[test]
    fn rigid_rotation_enclosure() {
        let fam = FamilySpec::standard();
        let e = trans_enclosure(&fam, ParamPoint::new(0.3, 0.0), 1000).unwrap();
        assert!(e.contains(0.3));
        assert!((e.width() - 0.002).abs() < 1e-12);
        assert_eq!(e.iterations, 1000);
    }

    #[test]
    fn half_is_locked_by_symmetry() {
        let fam = FamilySpec::standard();
        let p = ParamPoint::new(0.5, 0.1);
        for n in [10, 1000, 100_000] {
            assert!(trans_enclosure(&fam, p, n).unwrap().contains(0.5));
        }
        // Brute-force periodic orbit: F²(x) − x − 1 changes sign on a grid.
        let lift = fam.lift(p).unwrap();
        let g: Vec<f64> = (0..1000).map(|i| lift.iterate(i as f64 / 1000.0, 2) - i as f64 / 1000.0 - 1.0).collect();
        assert!(g.iter().any(|&v| v <= 0.0) && g.iter().any(|&v| v >= 0.0));
    }

    #[test]
    fn enclosures_nest_toward_long_orbit() {
        let fam = FamilySpec::standard();
        let p = ParamPoint::new(0.3, 0.1);
        let oracle = trans_enclosure(&fam, p, 10_000_000).unwrap();
        let e = trans_enclosure(&fam, p, 100_000).unwrap();
        assert!((e.width() - 2e-5).abs() < 1e-15);
        assert!(e.contains(oracle.midpoint()));
        assert!(oracle.lo < e.hi && e.lo < oracle.hi);
    }

    #[test]
    fn rational_estimate_is_exact_up_to_resolution() {
        let fam = FamilySpec::standard();
        for (p, q) in [(1, 3), (2, 5), (3, 7)] {
            let n = 1000 * q as u64;
            let v = trans_estimate(&fam, ParamPoint::new(p as f64 / q as f64, 0.0), n).unwrap();
            assert!((v - p as f64 / q as f64).abs() <= 1.0 / n as f64);
        }
    }

    #[test]
    fn estimates_at_two_resolutions_agree() {
        let fam = FamilySpec::standard();
        let p = ParamPoint::new(0.41, 0.12);
        let a = trans_estimate(&fam, p, 10_000).unwrap();
        let b = trans_estimate(&fam, p, 1_000_000).unwrap();
        assert!((a - b).abs() < 1.1e-4);
    }

    #[test]
    fn blaschke_midpoint_inside_enclosure() {
        let fam = FamilySpec::blaschke();
        let p = ParamPoint::new(0.5, 0.2);
        let e = trans_enclosure(&fam, p, 100_000).unwrap();
        assert!(e.contains(trans_estimate(&fam, p, 100_000).unwrap()));
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(trans_enclosure(&FamilySpec::standard(), ParamPoint::new(0.1, 0.0), 0).is_err());
    }

    #[test]
    fn staircase_at_zero_amplitude_is_the_diagonal() {
        let fam = FamilySpec::standard();
        let n = 10_000;
        for (t, v) in staircase(&fam, 0.0, -0.5, 1.5, 101, n).unwrap() {
            assert!((v - t).abs() <= 1.0 / n as f64);
        }
    }

    #[test]
    fn staircase_has_half_plateau() {
        let fam = FamilySpec::standard();
        let n = 20_000;
        let s = staircase(&fam, 0.15, 0.0, 1.0, 401, n).unwrap();
        let on: Vec<f64> = s.iter().filter(|(_, v)| (v - 0.5).abs() <= 1.0 / n as f64).map(|&(t, _)| t).collect();
        assert!(on.len() > 5, "plateau too short: {}", on.len());
        assert!(on.first().unwrap() < &0.5 && on.last().unwrap() > &0.5);
    }

    #[test]
    fn staircase_shift_by_one() {
        let fam = FamilySpec::standard();
        let n = 20_000;
        let s0 = staircase(&fam, 0.1, 0.1, 0.6, 51, n).unwrap();
        let s1 = staircase(&fam, 0.1, 1.1, 1.6, 51, n).unwrap();
        for ((_, v0), (_, v1)) in s0.iter().zip(&s1) {
            assert!((v1 - v0 - 1.0).abs() <= 2.0 / n as f64);
        }
    }

    #[test]
    fn staircase_rejects_bad_window() {
        let fam = FamilySpec::standard();
        assert!(staircase(&fam, 0.1, 0.5, 0.5, 10, 100).is_err());
        assert!(staircase(&fam, 0.1, 0.0, 1.0, 1, 100).is_err());
        assert_eq!(staircase(&fam, 0.2, 0.0, 1.0, 10, 100).unwrap_err().name(), "ParameterOutOfRange");
    }

    #[test]
    fn profile_of_translation_is_identity() {
        let fam = FamilySpec::standard();
        for n_avg in [1, 7, 100] {
            for (x, phi) in semiconjugacy_profile(&fam, ParamPoint::new(0.3, 0.0), n_avg, 11).unwrap() {
                assert!((phi - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_first_terms() {
        let fam = FamilySpec::standard();
        let p = ParamPoint::new(0.2, 0.1);
        let lift = fam.lift(p).unwrap();
        for (x, phi) in semiconjugacy_profile(&fam, p, 1, 9).unwrap() {
            assert!((phi - x).abs() < 1e-15);
        }
        let prof = semiconjugacy_profile(&fam, p, 2, 9).unwrap();
        for &(x, phi) in &prof[..8] {
            let expected = 0.5 * (x + lift.apply(x) - lift.apply(0.0));
            assert!((phi - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn golden_mean_profile_is_monotone() {
        let fam = FamilySpec::standard();
        let prof = semiconjugacy_profile(&fam, ParamPoint::new(GOLDEN, 0.1), 2000, 257).unwrap();
        assert_eq!(prof[0].1, 0.0);
        assert!((prof.last().unwrap().1 - prof[0].1 - 1.0).abs() == 0.0);
        for w in prof.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-9, "{:?}", w);
        }
    }

    fn standard_point() -> impl Strategy<Value = ParamPoint> {
        (-1.0f64..2.0, -0.15f64..0.15).prop_map(|(t, a)| ParamPoint::new(t, a))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn enclosures_contain_refinements(p in standard_point(), k in 0usize..3, n in 20u64..2000) {
            let fams = [FamilySpec::standard(), FamilySpec::blaschke(), FamilySpec::angle()];
            let fam = &fams[k];
            let (lo, hi) = fam.a_range();
            let p = ParamPoint::new(p.t, p.a.clamp(0.9 * lo, 0.9 * hi));
            let e1 = trans_enclosure(fam, p, n).unwrap();
            let e4 = trans_enclosure(fam, p, 4 * n).unwrap();
            prop_assert!(e4.is_subset_of(&e1), "{:?} vs {:?}", e4, e1);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn monotone_in_t(p in standard_point(), dt in 0.0f64..0.3) {
            let fam = FamilySpec::standard();
            let n = 5000;
            let e1 = trans_enclosure(&fam, p, n).unwrap();
            let e2 = trans_enclosure(&fam, ParamPoint::new(p.t + dt, p.a), n).unwrap();
            prop_assert!(e1.lo <= e2.hi + 2.0 / n as f64);
            prop_assert!(e1.midpoint() <= e2.midpoint() + 2.0 / n as f64);
        }

        #[test]
        fn batched_matches_single(points in proptest::collection::vec(standard_point(), 1..20)) {
            for fam in [FamilySpec::standard(), FamilySpec::blaschke(), FamilySpec::angle()] {
                // Rescale a ∈ (−0.15, 0.15) into the family's admissible range.
                let (lo, hi) = fam.a_range();
                let points: Vec<_> = points
                    .iter()
                    .map(|p| ParamPoint::new(p.t, 0.5 * (lo + hi) + 0.99 * (hi - lo) * p.a / 0.3))
                    .collect();
                let many = trans_enclosures(&fam, &points, 700).unwrap();
                for (p, e) in points.iter().zip(&many) {
                    prop_assert_eq!(*e, trans_enclosure(&fam, *p, 700).unwrap());
                }
            }
        }

        #[test]
        fn integer_equivariance(p in standard_point()) {
            let fam = FamilySpec::standard();
            let n = 5000;
            let v0 = trans_estimate(&fam, p, n).unwrap();
            let v1 = trans_estimate(&fam, ParamPoint::new(p.t + 1.0, p.a), n).unwrap();
            prop_assert!((v1 - v0 - 1.0).abs() <= 4.0 / n as f64);
        }

        // Sectors bounded by the slopes −max φ and −min φ through a base point:
        // moving into S^− cannot increase Trans, moving into S^+ cannot decrease it.
        #[test]
        fn sector_monotonicity(base in standard_point(), da in -0.05f64..0.05, u in 0.0f64..1.0, extra in 0.0f64..0.05) {
            let fam = FamilySpec::standard();
            let (phi_min, phi_max) = fam.phi_bounds();
            let a = (base.a + da).clamp(-0.15, 0.15);
            let da = a - base.a;
            let n = 4000;
            let v0 = trans_estimate(&fam, base, n).unwrap();
            // In S^−: t − t0 ≤ −φ(x)·(a − a0) for every x.
            let lower = if da >= 0.0 { -phi_max * da } else { -phi_min * da };
            let upper = if da >= 0.0 { -phi_min * da } else { -phi_max * da };
            let t_minus = base.t + lower - extra * u;
            let t_plus = base.t + upper + extra * u;
            let vm = trans_estimate(&fam, ParamPoint::new(t_minus, a), n).unwrap();
            let vp = trans_estimate(&fam, ParamPoint::new(t_plus, a), n).unwrap();
            prop_assert!(vm <= v0 + 2.0 / n as f64);
            prop_assert!(vp >= v0 - 2.0 / n as f64);
        }
    }
}
