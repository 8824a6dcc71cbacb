//! Small scalar helpers shared by the solvers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 80 shrinks take an O(1) interval far below 1e-12.
    for _ in 0..80 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximum of a 1-periodic function: uniform grid scan, then golden-section
/// refinement around the three best grid cells. Returns `(argmax, max)` with
/// `argmax` in `[0, 1)`.
pub(crate) fn periodic_max<F: Fn(f64) -> f64>(f: &F, grid: usize, tol: f64) -> (f64, f64) {
    let dx = 1.0 / grid as f64;
    let mut samples: Vec<(usize, f64)> = (0..grid).map(|i| (i, f(i as f64 * dx))).collect();
    samples.sort_by(|l, r| r.1.total_cmp(&l.1).then(l.0.cmp(&r.0)));
    let mut best = (samples[0].0 as f64 * dx, samples[0].1);
    for &(i, _) in samples.iter().take(3) {
        let c = i as f64 * dx;
        let (x, v) = golden_max(f, c - dx, c + dx, tol);
        if v > best.1 {
            best = (x, v);
        }
    }
    (best.0.rem_euclid(1.0), best.1)
}

/// Minimum of a 1-periodic function, see [`periodic_max`].
pub(crate) fn periodic_min<F: Fn(f64) -> f64>(f: &F, grid: usize, tol: f64) -> (f64, f64) {
    let (x, v) = periodic_max(&|x| -f(x), grid, tol);
    (x, -v)
}

/// Mean of a 1-periodic function by the trapezoid rule on `n` points.
pub(crate) fn periodic_mean<F: Fn(f64) -> f64>(f: &F, n: usize) -> f64 {
    let dx = 1.0 / n as f64;
    (0..n).map(|i| f(i as f64 * dx)).sum::<f64>() / n as f64
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_max(&|x: f64| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_extrema_of_sine() {
        let f = |x: f64| (2.0 * PI * x).sin();
        let (xm, m) = periodic_max(&f, 64, 1e-12);
        let (xn, n) = periodic_min(&f, 64, 1e-12);
        assert!((xm - 0.25).abs() < 1e-7 && (m - 1.0).abs() < 1e-15);
        assert!((xn - 0.75).abs() < 1e-7 && (n + 1.0).abs() < 1e-15);
    }

    #[test]
    fn argmax_wraps_into_unit_interval() {
        let f = |x: f64| (2.0 * PI * x).cos();
        let (x, _) = periodic_max(&f, 64, 1e-12);
        assert!((0.0..1.0).contains(&x));
        assert!(x < 1e-7 || 1.0 - x < 1e-7);
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(7, 1), 1);
    }
}
