//! Continuous wavelet transform with the Morlet wavelet, wavelet variance,
//! band power estimates and an orthonormal Haar frame used to study
//! truncated-expansion error.
//!
//! Conventions. Scales `a` are measured in samples. The mother wavelet is
//!
//! ```text
//! psi(t) = pi^(-1/4) (exp(i w0 t) - exp(-w0^2 / 2)) exp(-t^2 / 2)
//! ```
//!
//! and the transform is `W(a, b) = a^(-1/2) sum_t x(t) conj(psi((t - b) / a))`,
//! i.e. the admissibility constant in the `1/sqrt(c |a|)` prefactor is fixed
//! to `c = 1`. It is evaluated in the frequency domain on a zero-padded,
//! power-of-two FFT grid. Scale `a` responds to `f = w0 fs / (2 pi a)` Hz.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use super::spectral::fft_in_place;
use crate::error::{Error, Result};

/// Default Morlet center-frequency parameter.
pub const DEFAULT_OMEGA0: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CwtScalogram {
    /// `n_scales x n_samples`
    pub coefficients: Array2<Complex64>,
    /// Strictly increasing, in samples.
    pub scales: Vec<f64>,
    pub omega0: f64,
}

impl CwtScalogram {
    /// `|W|^2`, same shape as the coefficients.
    pub fn power(&self) -> Array2<f64> {
        self.coefficients.mapv(|c| c.norm_sqr())
    }
}

/// Fourier transform of the Morlet wavelet at angular frequency `omega`.
/// Exactly zero at `omega = 0` (zero-mean wavelet).
pub fn morlet_fourier(omega: f64, omega0: f64) -> f64 {
    let norm = PI.powf(-0.25) * (2.0 * PI).sqrt();
    norm * ((-(omega - omega0).powi(2) / 2.0).exp() - (-omega0 * omega0 / 2.0).exp() * (-omega * omega / 2.0).exp())
}

pub fn scale_to_frequency(scale: f64, sample_rate: u32, omega0: f64) -> f64 {
    omega0 * sample_rate as f64 / (2.0 * PI * scale)
}

pub fn frequency_to_scale(freq: f64, sample_rate: u32, omega0: f64) -> f64 {
    omega0 * sample_rate as f64 / (2.0 * PI * freq)
}

/// Scales for frequencies `f_hi, f_hi 10^(-1/d), ...` down to `f_lo`,
/// returned in increasing scale order.
pub fn log_scale_grid(sample_rate: u32, f_lo: f64, f_hi: f64, omega0: f64, per_decade: usize) -> Vec<f64> {
    if !(f_lo > 0.0 && f_hi >= f_lo) || per_decade == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let f = f_hi * 10f64.powf(-(i as f64) / per_decade as f64);
        if f < f_lo * (1.0 - 1e-12) {
            break;
        }
        out.push(frequency_to_scale(f, sample_rate, omega0));
        i += 1;
    }
    out
}

/// Morlet CWT of `signal` at the given scales.
pub fn cwt_morlet(signal: &[f64], scales: &[f64], omega0: f64) -> Result<CwtScalogram> {
    if signal.is_empty() {
        return Err(Error::invalid("CWT of an empty signal"));
    }
    if scales.iter().any(|a| !(a.is_finite() && *a > 0.0)) || scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("CWT scales must be positive and strictly increasing"));
    }
    let n = signal.len();
    let m = n.next_power_of_two();
    let mut spectrum: Vec<Complex64> = signal
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(m)
        .collect();
    fft_in_place(&mut spectrum, false);
    let omegas: Vec<f64> = (0..m)
        .map(|k| {
            let k = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
            2.0 * PI * k / m as f64
        })
        .collect();

    let mut coefficients = Array2::zeros((scales.len(), n));
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (row, &a) in scales.iter().enumerate() {
        let gain = a.sqrt() / m as f64;
        for k in 0..m {
            buf[k] = spectrum[k] * (gain * morlet_fourier(a * omegas[k], omega0));
        }
        fft_in_place(&mut buf, true);
        for b in 0..n {
            coefficients[[row, b]] = buf[b];
        }
    }
    Ok(CwtScalogram {
        coefficients,
        scales: scales.to_vec(),
        omega0,
    })
}

/// `V(a) = (1/n) sum_j |W(a, j)|^2` for each scale.
pub fn wavelet_variance(scalogram: &CwtScalogram) -> Vec<f64> {
    let n = scalogram.coefficients.ncols().max(1) as f64;
    scalogram
        .coefficients
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|c| c.norm_sqr()).sum::<f64>() / n)
        .collect()
}

/// Wavelet power summed over the scales whose frequencies fall in
/// `[f_lo, f_hi]` (log grid, `per_decade` scales per decade).
pub fn band_power(
    frame: &[f64],
    sample_rate: u32,
    f_lo: f64,
    f_hi: f64,
    omega0: f64,
    per_decade: usize,
) -> f64 {
    let scales = log_scale_grid(sample_rate, f_lo, f_hi, omega0, per_decade);
    if scales.is_empty() || frame.is_empty() {
        return 0.0;
    }
    let sc = cwt_morlet(frame, &scales, omega0).expect("grid scales are valid");
    wavelet_variance(&sc).iter().sum()
}

/// The cut frequency actually used by [`high_band_power`], and whether the
/// requested value had to be clamped to `0.95 * Nyquist`.
pub fn effective_cut(sample_rate: u32, f_cut: f64) -> (f64, bool) {
    let top = 0.95 * sample_rate as f64 / 2.0;
    if f_cut > top {
        (top, true)
    } else {
        (f_cut, false)
    }
}

/// Wavelet power above `f_cut` (clamped to `0.95 * Nyquist`).
pub fn high_band_power(frame: &[f64], sample_rate: u32, f_cut: f64, omega0: f64, per_decade: usize) -> f64 {
    let (cut, _) = effective_cut(sample_rate, f_cut);
    let top = 0.95 * sample_rate as f64 / 2.0;
    band_power(frame, sample_rate, cut, top, omega0, per_decade)
}

/// Orthonormal Haar expansion of a power-of-two length signal, ordered from
/// the coarsest approximation to the finest details.
pub fn haar_coefficients(signal: &[f64]) -> Result<Vec<f64>> {
    let n = signal.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid("Haar expansion needs a power-of-two length"));
    }
    let mut approx = signal.to_vec();
    let mut details: Vec<Vec<f64>> = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    while approx.len() > 1 {
        let half = approx.len() / 2;
        let (mut a, mut d) = (Vec::with_capacity(half), Vec::with_capacity(half));
        for i in 0..half {
            a.push((approx[2 * i] + approx[2 * i + 1]) * r);
            d.push((approx[2 * i] - approx[2 * i + 1]) * r);
        }
        details.push(d);
        approx = a;
    }
    let mut out = approx;
    for d in details.into_iter().rev() {
        out.extend(d);
    }
    Ok(out)
}

/// Inverse of [`haar_coefficients`].
pub fn haar_reconstruct(coeffs: &[f64]) -> Result<Vec<f64>> {
    let n = coeffs.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid("Haar expansion needs a power-of-two length"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut approx = vec![coeffs[0]];
    let mut pos = 1;
    while approx.len() < n {
        let d = &coeffs[pos..pos + approx.len()];
        pos += approx.len();
        approx = approx
            .iter()
            .zip(d)
            .flat_map(|(a, d)| [(a + d) * r, (a - d) * r])
            .collect();
    }
    Ok(approx)
}

/// Squared error `||x - x_M||^2` of the expansion truncated to its first `m`
/// Haar terms, computed by reconstruction.
pub fn approximation_error(signal: &[f64], m: usize) -> Result<f64> {
    let mut c = haar_coefficients(signal)?;
    c.iter_mut().skip(m).for_each(|v| *v = 0.0);
    let approx = haar_reconstruct(&c)?;
    Ok(signal.iter().zip(&approx).map(|(a, b)| (a - b).powi(2)).sum())
}
