//! Fourier-domain descriptors: DFT, periodogram PSD, magnitude spectrum and
//! the real cepstrum.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized FFT of any length.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    if buf.is_empty() {
        return;
    }
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// `X(k) = sum_n x(n) exp(-j 2 pi k n / N)` for `k = 0..N`.
pub fn dft(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    buf
}

/// Inverse DFT including the `1/N` factor.
pub fn idft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    fft_in_place(&mut buf, true);
    let n = buf.len() as f64;
    buf.iter_mut().for_each(|v| *v /= n);
    buf
}

/// Number of retained one-sided bins, `floor(N/2) + 1`.
pub fn one_sided_len(n: usize) -> usize {
    n / 2 + 1
}

/// Periodogram `|X(k)|^2 / N` over the one-sided bins.
pub fn psd(frame: &[f64]) -> Vec<f64> {
    let n = frame.len() as f64;
    dft(frame)
        .iter()
        .take(one_sided_len(frame.len()))
        .map(|c| c.norm_sqr() / n)
        .collect()
}

/// One-sided DFT magnitude, optionally after multiplying by `window`.
pub fn magnitude_spectrum(frame: &[f64], window: Option<&[f64]>) -> Vec<f64> {
    let x: Vec<f64> = match window {
        Some(w) => frame.iter().zip(w).map(|(a, b)| a * b).collect(),
        None => frame.to_vec(),
    };
    dft(&x)
        .iter()
        .take(one_sided_len(x.len()))
        .map(|c| c.norm())
        .collect()
}

/// Power floor in linear units for a dB value, e.g. `-100 dB -> 1e-10`.
pub fn power_floor(floor_db: f64) -> f64 {
    10f64.powf(floor_db / 10.0)
}

/// Real cepstrum: `IDFT(log max(|X|, eps))`, with the floor applied to the
/// power `|X|^2` at `floor_db`. The output has the frame's length and is
/// even-symmetric in quefrency.
pub fn cepstrum(frame: &[f64], floor_db: f64) -> Vec<f64> {
    let floor = power_floor(floor_db);
    let spec: Vec<Complex64> = dft(frame)
        .iter()
        .map(|c| Complex64::new(0.5 * c.norm_sqr().max(floor).ln(), 0.0))
        .collect();
    idft(&spec).iter().map(|c| c.re).collect()
}

/// Magnitude-weighted mean frequency and spread (Hz) of a one-sided spectrum.
/// Both are zero for an all-zero spectrum.
pub fn centroid_and_bandwidth(mag: &[f64], sample_rate: u32, n_fft: usize) -> (f64, f64) {
    let total: f64 = mag.iter().sum();
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let hz = |k: usize| k as f64 * sample_rate as f64 / n_fft as f64;
    let c = mag.iter().enumerate().map(|(k, m)| hz(k) * m).sum::<f64>() / total;
    let var = mag
        .iter()
        .enumerate()
        .map(|(k, m)| (hz(k) - c).powi(2) * m)
        .sum::<f64>()
        / total;
    (c, var.sqrt())
}
