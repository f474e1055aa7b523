use num_complex::Complex;

use crate::error::{arg, config, Result};
use crate::scalar::Real;

/// Complex-baseband sample buffer with its sampling metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer<T> {
    samples: Vec<Complex<T>>,
    sample_rate: f64,
    center_freq: f64,
    timestamp: f64,
}

impl<T: Real> IqBuffer<T> {
    pub fn new(samples: Vec<Complex<T>>, sample_rate: f64, center_freq: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(config(format!("sample rate {sample_rate} must be positive")));
        }
        if samples.is_empty() {
            return Err(arg("IQ buffer must not be empty"));
        }
        Ok(Self {
            samples,
            sample_rate,
            center_freq,
            timestamp: 0.0,
        })
    }

    /// A constant-amplitude carrier of `len` samples.
    pub fn tone(amplitude: T, len: usize, sample_rate: f64, center_freq: f64) -> Result<Self> {
        Self::new(vec![Complex::new(amplitude, T::zero()); len], sample_rate, center_freq)
    }

    pub fn with_timestamp(mut self, timestamp: f64) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn center_freq(&self) -> f64 {
        self.center_freq
    }

    /// Simulated capture time of the first sample, seconds.
    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Sum of `|x|²` over the buffer.
    pub fn energy(&self) -> T {
        self.samples.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn mean_power(&self) -> T {
        crate::dsp::mean_power(&self.samples)
    }

    /// Multiplies every sample by `gain`.
    pub fn scale(&mut self, gain: T) {
        for x in &mut self.samples {
            *x = *x * gain;
        }
    }

    /// Converts to another scalar width.
    pub fn cast<U: Real>(&self) -> IqBuffer<U> {
        IqBuffer {
            samples: self
                .samples
                .iter()
                .map(|x| Complex::new(U::of(x.re.as_f64()), U::of(x.im.as_f64())))
                .collect(),
            sample_rate: self.sample_rate,
            center_freq: self.center_freq,
            timestamp: self.timestamp,
        }
    }
}
