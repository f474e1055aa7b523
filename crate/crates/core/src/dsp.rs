//! Spectral helpers used by the demodulators, the calibration code and the
//! verification suites.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

/// Analysis window applied before an FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    pub fn coefficients<T: Real>(self, len: usize) -> Vec<T> {
        match self {
            Window::Rectangular => vec![T::one(); len],
            Window::Hann => {
                if len == 1 {
                    return vec![T::one()];
                }
                let denom = T::of(len as f64);
                (0..len)
                    .map(|n| {
                        let x = T::two_pi() * T::of(n as f64) / denom;
                        T::of(0.5) * (T::one() - x.cos())
                    })
                    .collect()
            }
        }
    }
}

/// Forward FFT of `input`, zero-padded to `n_fft` (which must be ≥ the input length).
pub fn fft<T: Real>(input: &[Complex<T>], n_fft: usize) -> Vec<Complex<T>> {
    assert!(n_fft >= input.len(), "n_fft shorter than input");
    let mut buf = Vec::with_capacity(n_fft);
    buf.extend_from_slice(input);
    buf.resize(n_fft, Complex::new(T::zero(), T::zero()));
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(n_fft).process(&mut buf);
    buf
}

/// Inverse FFT without the `1/N` normalization.
pub fn ifft<T: Real>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = input.to_vec();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Windowed magnitude spectrum, `|X[k]|`, for `k` in `0..n_fft`.
pub fn magnitude_spectrum<T: Real>(input: &[Complex<T>], window: Window, n_fft: usize) -> Vec<T> {
    let w = window.coefficients::<T>(input.len());
    let windowed: Vec<Complex<T>> = input.iter().zip(&w).map(|(x, &c)| x * c).collect();
    fft(&windowed, n_fft).into_iter().map(|x| x.norm()).collect()
}

/// Signed frequency of FFT bin `k` (negative frequencies occupy the upper half).
pub fn bin_frequency(k: usize, n_fft: usize, sample_rate: f64) -> f64 {
    let k = k as f64;
    let n = n_fft as f64;
    if k < n / 2.0 {
        k * sample_rate / n
    } else {
        (k - n) * sample_rate / n
    }
}

/// Nearest FFT bin index for a signed frequency.
pub fn frequency_bin(freq: f64, n_fft: usize, sample_rate: f64) -> usize {
    let k = (freq / sample_rate * n_fft as f64).round() as i64;
    k.rem_euclid(n_fft as i64) as usize
}

/// Index of the largest spectral magnitude, optionally skipping the bins
/// within `dc_guard` of zero frequency.
pub fn peak_bin<T: Real>(spectrum: &[T], dc_guard: usize) -> usize {
    let n = spectrum.len();
    let mut best = 0;
    let mut best_val = T::neg_infinity();
    for (k, &v) in spectrum.iter().enumerate() {
        let dist = k.min(n - k);
        if dist < dc_guard {
            continue;
        }
        if v > best_val {
            best_val = v;
            best = k;
        }
    }
    best
}

/// Peak frequency of each Hann-windowed frame of a short-time Fourier transform.
///
/// Returns `(frame_center_time_s, peak_frequency_hz)` pairs. `pad` multiplies
/// the FFT length for finer frequency interpolation.
pub fn stft_peak_track<T: Real>(
    samples: &[Complex<T>],
    sample_rate: f64,
    frame_len: usize,
    hop: usize,
    pad: usize,
) -> Vec<(f64, f64)> {
    let n_fft = (frame_len * pad.max(1)).next_power_of_two();
    let mut out = Vec::new();
    let mut start = 0;
    while start + frame_len <= samples.len() {
        let spec = magnitude_spectrum(&samples[start..start + frame_len], Window::Hann, n_fft);
        let k = peak_bin(&spec, 0);
        let t = (start as f64 + (frame_len as f64 - 1.0) / 2.0) / sample_rate;
        out.push((t, bin_frequency(k, n_fft, sample_rate)));
        start += hop;
    }
    out
}

/// Least-squares line fit, returning `(slope, intercept)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Correlation of `samples` with a complex exponential at `cycles_per_sample`,
/// starting at phase zero on the first sample.
pub fn tone_correlation<T: Real>(samples: &[Complex<T>], cycles_per_sample: f64) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    // Rotator recursion drifts in f32, so the phase is recomputed from the index.
    for (n, x) in samples.iter().enumerate() {
        let ph = crate::scalar::frac(cycles_per_sample * n as f64) * std::f64::consts::TAU;
        let rot = Complex::new(T::of(ph.cos()), T::of(-ph.sin()));
        acc += x * rot;
    }
    acc
}

/// Mean power `E|x|²` of a complex buffer.
pub fn mean_power<T: Real>(samples: &[Complex<T>]) -> T {
    if samples.is_empty() {
        return T::zero();
    }
    samples.iter().map(|x| x.norm_sqr()).sum::<T>() / T::of(samples.len() as f64)
}
