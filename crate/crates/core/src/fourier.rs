use num_complex::Complex64;
use rustfft::FftPlanner;

/// Fourier coefficients `c_k = (1/N) Σ_j f_j e^{−2πikj/N}` of equally spaced
/// samples on one period. Index `k` holds frequency `k`, index `N − k`
/// frequency `−k`.
pub(crate) fn coefficients(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Coefficient at signed frequency `k` from the output of [`coefficients`].
pub(crate) fn at(coeffs: &[Complex64], k: i64) -> Complex64 {
    let n = coeffs.len() as i64;
    coeffs[k.rem_euclid(n) as usize]
}
