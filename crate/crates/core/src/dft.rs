//! DFT helpers.
//!
//! The toolkit uses the unnormalized forward transform
//! `X(k) = sum_t x(t) exp(-j 2 pi k t / N)` everywhere. A cosine of amplitude
//! `a` at bin `k` therefore shows up as `a N / 2` at bin `k`, and the
//! two-sided *line amplitude* `X(k) / N` equals `a / 2`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward DFT of a real sequence, returning bins `0..=N/2`.
pub fn rfft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf
}

/// Full-length forward DFT of a real sequence.
pub fn fft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
    buf
}

/// Inverse of [`rfft`] for an even length `n`: rebuilds the Hermitian spectrum
/// and returns `(1/N) sum_k X(k) exp(+j 2 pi k t / N)`.
///
/// The imaginary parts of bins 0 and N/2 are ignored.
pub fn irfft(half: &[Complex64], n: usize) -> Vec<f64> {
    assert_eq!(half.len(), n / 2 + 1, "half spectrum length must be N/2+1");
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    full[0] = Complex64::new(half[0].re, 0.0);
    for k in 1..n.div_ceil(2) {
        full[k] = half[k];
        full[n - k] = half[k].conj();
    }
    if n % 2 == 0 {
        full[n / 2] = Complex64::new(half[n / 2].re, 0.0);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut full);
    let scale = 1.0 / n as f64;
    full.iter().map(|c| c.re * scale).collect()
}

/// Periodic band-limited resampling of one period `x` to `x.len() * factor`
/// samples (zero padding in the frequency domain).
pub fn upsample_periodic(x: &[f64], factor: usize) -> Vec<f64> {
    let n = x.len();
    if factor == 1 {
        return x.to_vec();
    }
    let m = n * factor;
    let spec = fft_real(x);
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let half = n / 2;
    for k in 0..n.div_ceil(2) {
        padded[k] = spec[k];
    }
    for k in 1..n.div_ceil(2) {
        padded[m - k] = spec[n - k];
    }
    if n % 2 == 0 {
        // split the Nyquist bin symmetrically so the result stays real
        padded[half] = spec[half] * 0.5;
        padded[m - half] = spec[half] * 0.5;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut padded);
    let scale = 1.0 / n as f64;
    padded.iter().map(|c| c.re * scale).collect()
}

/// `exp(j 2 pi k / N)`, the discrete-time frequency point of bin `k`.
pub fn bin_to_z(bin: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * bin as f64 / n as f64)
}
