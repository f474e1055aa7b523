use crate::error::{arg, config, Result};
use crate::scalar::{frac, Real};

/// Four-parameter symbol descriptor.
///
/// Frequencies are normalized: `a1` in cycles/sample, `a2` in
/// cycles/sample², `a0` in cycles (phase / 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams<T> {
    pub a2: T,
    pub a1: T,
    pub a0: T,
    pub n_samples: usize,
}

impl<T: Real> PhaseParams<T> {
    /// Builds a validated descriptor.
    pub fn new(a2: T, a1: T, a0: T, n_samples: usize) -> Result<Self> {
        let p = Self { a2, a1, a0, n_samples };
        p.validate()?;
        Ok(p)
    }

    /// Checks the length and the Nyquist bound at both ends of the symbol.
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(config("n_samples must be at least 1"));
        }
        let half = T::of(0.5);
        if !self.a1.is_finite() || !self.a2.is_finite() || !self.a0.is_finite() {
            return Err(config("phase parameters must be finite"));
        }
        if self.a1.abs() >= half {
            return Err(config(format!(
                "start frequency {} cycles/sample is not below Nyquist",
                self.a1
            )));
        }
        let end = self.end_frequency();
        if end.abs() >= half {
            return Err(config(format!(
                "end frequency {end} cycles/sample is not below Nyquist"
            )));
        }
        Ok(())
    }

    /// Instantaneous frequency at the last sample, cycles/sample.
    pub fn end_frequency(&self) -> T {
        self.a2 * T::of(self.n_samples.saturating_sub(1) as f64) + self.a1
    }

    /// Unreduced phase in cycles at sample index `n`.
    pub fn phase_at(&self, n: usize) -> Result<T> {
        if n >= self.n_samples {
            return Err(arg(format!(
                "sample index {n} outside symbol of {} samples",
                self.n_samples
            )));
        }
        Ok(self.phase_unchecked(n))
    }

    /// Polynomial evaluated without the index bound; `n = n_samples` gives the
    /// phase one sample past the symbol, which is where the next symbol starts.
    pub fn phase_unchecked(&self, n: usize) -> T {
        let n = T::of(n as f64);
        T::of(0.5) * self.a2 * n * n + self.a1 * n + self.a0
    }
}

/// PSK mapping: data on `a0`, `a1 = a2 = 0`.
pub fn params_for_psk<T: Real>(phase_cycles: T, n_samples: usize) -> PhaseParams<T> {
    PhaseParams {
        a2: T::zero(),
        a1: T::zero(),
        a0: frac(phase_cycles),
        n_samples,
    }
}

/// FSK mapping: data on `a1 = f / fs`, `a2 = 0`, `a0` held by the caller.
pub fn params_for_fsk<T: Real>(
    f_hz: f64,
    sample_rate: f64,
    n_samples: usize,
    a0: T,
) -> Result<PhaseParams<T>> {
    if !(sample_rate > 0.0) {
        return Err(config("sample rate must be positive"));
    }
    if f_hz.abs() >= sample_rate / 2.0 {
        return Err(config(format!(
            "tone {f_hz} Hz violates Nyquist for {sample_rate} Hz sampling"
        )));
    }
    PhaseParams::new(T::zero(), T::of(f_hz / sample_rate), a0, n_samples)
}

/// CSS mapping: chirp rate on `a2 = k / fs²`, start frequency on `a1`, `a0 = 0`.
pub fn params_for_css<T: Real>(
    f0_hz: f64,
    chirp_rate_hz_per_s: f64,
    sample_rate: f64,
    n_samples: usize,
) -> Result<PhaseParams<T>> {
    if !(sample_rate > 0.0) {
        return Err(config("sample rate must be positive"));
    }
    let a2 = chirp_rate_hz_per_s / (sample_rate * sample_rate);
    let a1 = f0_hz / sample_rate;
    PhaseParams::new(T::of(a2), T::of(a1), T::zero(), n_samples)
}

/// Tone offsets `(f_for_0, f_for_1)` of a minimum-shift keyed stream at
/// `data_rate`: `∓R/4`, i.e. a separation of half the data rate.
pub fn msk_tone_offsets(data_rate: f64) -> (f64, f64) {
    (-data_rate / 4.0, data_rate / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn phase_of_zero_polynomial() {
        let p = PhaseParams::new(0.0, 0.0, 0.0, 8).unwrap();
        assert_eq!(p.phase_at(5).unwrap(), 0.0);
    }

    #[test]
    fn phase_of_psk_half_cycle() {
        let p = PhaseParams::new(0.0, 0.0, 0.5, 8).unwrap();
        assert_eq!(p.phase_at(3).unwrap(), 0.5);
    }

    #[test]
    fn phase_of_full_polynomial() {
        // ½·0.01·4² + 0.1·4 = 0.08 + 0.4
        let p = PhaseParams::new(0.01, 0.1, 0.0, 16).unwrap();
        assert!((p.phase_at(4).unwrap() - 0.48_f64).abs() < 1e-15);
    }

    #[test]
    fn phase_index_out_of_range() {
        let p = PhaseParams::new(0.0_f64, 0.0, 0.0, 8).unwrap();
        assert!(matches!(p.phase_at(8), Err(Error::Argument(_))));
    }

    #[test]
    fn rejects_zero_length_and_nyquist() {
        assert!(PhaseParams::new(0.0_f64, 0.0, 0.0, 0).is_err());
        assert!(PhaseParams::new(0.0_f64, 0.5, 0.0, 4).is_err());
        assert!(PhaseParams::new(0.0_f64, -0.5, 0.0, 4).is_err());
        // ends at 0.1 + 0.1·4 = 0.5
        assert!(PhaseParams::new(0.1_f64, 0.1, 0.0, 5).is_err());
        assert!(PhaseParams::new(0.1_f64, 0.1, 0.0, 4).is_ok());
    }

    #[test]
    fn psk_mapping() {
        assert_eq!(params_for_psk(0.0_f64, 64), PhaseParams { a2: 0.0, a1: 0.0, a0: 0.0, n_samples: 64 });
        assert_eq!(params_for_psk(0.5_f64, 64).a0, 0.5);
        assert_eq!(params_for_psk(1.25_f64, 64).a0, 0.25);
    }

    #[test]
    fn fsk_mapping() {
        let p = params_for_fsk(250e3, 1e6, 8, 0.0_f64).unwrap();
        assert_eq!(p.a1, 0.25);
        assert_eq!(p.a2, 0.0);
        assert_eq!(params_for_fsk(0.0, 1e6, 8, 0.0_f64).unwrap().a1, 0.0);
        assert!(params_for_fsk::<f64>(500e3, 1e6, 8, 0.0).is_err());
    }

    #[test]
    fn msk_separation_is_half_rate() {
        let (f0, f1) = msk_tone_offsets(1e6);
        assert_eq!(f1 - f0, 500e3);
        assert_eq!(f1, 250e3);
    }

    #[test]
    fn css_mapping() {
        let fs = 1e6;
        let k = 1e8;
        let p = params_for_css::<f64>(0.0, k, fs, 64).unwrap();
        assert_eq!(p.a1, 0.0);
        assert_eq!(p.a2, k / (fs * fs));
        assert_eq!(p.a0, 0.0);
    }

    #[test]
    fn css_rejects_chirp_ending_at_nyquist() {
        let fs = 1e6;
        let n = 101;
        // f(n) = k·n/fs²·fs reaches fs/2 at n = 100
        let k = 0.5 * fs * fs / 100.0;
        assert!(params_for_css::<f64>(0.0, k, fs, n).is_err());
        assert!(params_for_css::<f64>(0.0, k, fs, n - 1).is_ok());
    }
}
