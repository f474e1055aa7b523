use num_complex::Complex;

use super::PhaseParams;
use crate::error::{arg, config, Error, Result};
use crate::scalar::{frac, Real};

/// Real part of the synthesized baseband, `cos(2π·phase(n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBaseband<T> {
    samples: Vec<T>,
    sample_rate: f64,
}

impl<T: Real> RealBaseband<T> {
    pub fn new(samples: Vec<T>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) {
            return Err(config("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !(s.abs() <= T::one())) {
            return Err(arg(format!("sample {i} = {} outside [-1, 1]", samples[i])));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Quantized switch-state stream, one level per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSequence {
    levels: Vec<u16>,
    bits: u8,
    sample_rate: f64,
}

impl SwitchSequence {
    pub fn new(levels: Vec<u16>, bits: u8, sample_rate: f64) -> Result<Self> {
        if bits == 0 || bits > 16 {
            return Err(arg(format!("quantizer width {bits} not in 1..=16")));
        }
        if levels.is_empty() {
            return Err(arg("switch sequence must not be empty"));
        }
        if !(sample_rate > 0.0) {
            return Err(config("sample rate must be positive"));
        }
        let limit = 1u32 << bits;
        if let Some(i) = levels.iter().position(|&l| u32::from(l) >= limit) {
            return Err(arg(format!("level {} at {i} exceeds {bits}-bit range", levels[i])));
        }
        Ok(Self { levels, bits, sample_rate })
    }

    /// One-bit sequence holding each input bit for `samples_per_bit` samples.
    pub fn from_bits(bits: &[u8], samples_per_bit: usize, sample_rate: f64) -> Result<Self> {
        if samples_per_bit == 0 {
            return Err(arg("samples_per_bit must be at least 1"));
        }
        let levels = bits
            .iter()
            .flat_map(|&b| std::iter::repeat_n(u16::from(b & 1), samples_per_bit))
            .collect();
        Self::new(levels, 1, sample_rate)
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Number of distinct levels, `2^bits`.
    pub fn level_count(&self) -> usize {
        1usize << self.bits
    }

    /// Appends another sequence of the same width and rate.
    pub fn concat(&mut self, other: &SwitchSequence) -> Result<()> {
        if other.bits != self.bits || other.sample_rate != self.sample_rate {
            return Err(arg("cannot concatenate sequences of different width or rate"));
        }
        self.levels.extend_from_slice(&other.levels);
        Ok(())
    }
}

#[inline]
fn cos_cycles<T: Real>(phase: T) -> T {
    (T::two_pi() * frac(phase)).cos()
}

/// `cos(2π·phase_at(n))` for every sample of the symbol.
pub fn synth_baseband<T: Real>(params: &PhaseParams<T>, sample_rate: f64) -> Result<RealBaseband<T>> {
    params.validate()?;
    let samples = (0..params.n_samples)
        .map(|n| cos_cycles(params.phase_unchecked(n)))
        .collect();
    RealBaseband::new(samples, sample_rate)
}

/// Complex baseband `exp(j·2π·phase_at(n))`, i.e. the signal whose real part
/// [`synth_baseband`] returns.
pub fn synth_complex<T: Real>(params: &PhaseParams<T>) -> Result<Vec<Complex<T>>> {
    params.validate()?;
    Ok((0..params.n_samples)
        .map(|n| {
            let ph = T::two_pi() * frac(params.phase_unchecked(n));
            Complex::new(ph.cos(), ph.sin())
        })
        .collect())
}

/// Concatenated real baseband of a symbol stream.
pub fn synth_symbols<T: Real>(symbols: &[PhaseParams<T>], sample_rate: f64) -> Result<RealBaseband<T>> {
    if symbols.is_empty() {
        return Err(arg("no symbols to synthesize"));
    }
    let mut out = Vec::with_capacity(symbols.iter().map(|s| s.n_samples).sum());
    for s in symbols {
        s.validate()?;
        out.extend((0..s.n_samples).map(|n| cos_cycles(s.phase_unchecked(n))));
    }
    RealBaseband::new(out, sample_rate)
}

/// Concatenated complex baseband of a symbol stream.
pub fn synth_symbols_complex<T: Real>(symbols: &[PhaseParams<T>]) -> Result<Vec<Complex<T>>> {
    let mut out = Vec::with_capacity(symbols.iter().map(|s| s.n_samples).sum());
    for s in symbols {
        out.extend(synth_complex(s)?);
    }
    Ok(out)
}

/// Uniform mid-rise quantizer of `[-1, 1]` into `2^bits` levels:
/// `floor((s + 1)/2 · 2^bits)`, clamped to the top level. With one bit,
/// `s ≥ 0` reflects (level 1) and `s < 0` absorbs (level 0).
pub fn quantize<T: Real>(bb: &RealBaseband<T>, bits: u8) -> Result<SwitchSequence> {
    if bits == 0 || bits > 16 {
        return Err(arg(format!("quantizer width {bits} not in 1..=16")));
    }
    let count = 1u32 << bits;
    let scale = T::of(f64::from(count));
    let half = T::of(0.5);
    let levels = bb
        .samples
        .iter()
        .map(|&s| {
            let raw = ((s + T::one()) * half * scale).floor();
            let raw = raw.max(T::zero()).to_u32().unwrap_or(0);
            raw.min(count - 1) as u16
        })
        .collect();
    SwitchSequence::new(levels, bits, bb.sample_rate)
}

/// Period, in samples, of the shifting square wave: `fs / f_shift` rounded to
/// the nearest even count (at least 2) so the wave keeps a 50% duty cycle.
pub fn shift_square_period(sample_rate: f64, f_shift: f64) -> usize {
    let half = (sample_rate / f_shift / 2.0).round().max(1.0);
    2 * half as usize
}

/// XORs a one-bit sequence with a square wave at `f_shift`, translating the
/// reflected spectrum by `±f_shift`.
pub fn apply_freq_shift(seq: &SwitchSequence, f_shift: f64) -> Result<SwitchSequence> {
    apply_freq_shift_from(seq, f_shift, 0)
}

/// As [`apply_freq_shift`], with the square wave starting at absolute sample
/// index `start` so consecutive blocks stay phase aligned.
pub fn apply_freq_shift_from(seq: &SwitchSequence, f_shift: f64, start: usize) -> Result<SwitchSequence> {
    if seq.bits != 1 {
        return Err(Error::Unsupported(format!(
            "XOR frequency shifting needs a 1-bit sequence, got {} bits",
            seq.bits
        )));
    }
    if !(f_shift > 0.0 && f_shift < seq.sample_rate / 2.0) {
        return Err(config(format!(
            "shift frequency {f_shift} Hz must lie in (0, {})",
            seq.sample_rate / 2.0
        )));
    }
    let period = shift_square_period(seq.sample_rate, f_shift);
    let half = period / 2;
    let levels = seq
        .levels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let square = u16::from((start + i) % period < half);
            l ^ square
        })
        .collect();
    Ok(SwitchSequence {
        levels,
        bits: 1,
        sample_rate: seq.sample_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a2: f64, a1: f64, a0: f64, n: usize) -> PhaseParams<f64> {
        PhaseParams { a2, a1, a0, n_samples: n }
    }

    #[test]
    fn synth_zero_phase_is_ones() {
        let bb = synth_baseband(&p(0.0, 0.0, 0.0, 4), 1.0).unwrap();
        assert_eq!(bb.samples(), &[1.0; 4]);
    }

    #[test]
    fn synth_half_cycle_is_minus_ones() {
        let bb = synth_baseband(&p(0.0, 0.0, 0.5, 4), 1.0).unwrap();
        assert_eq!(bb.samples(), &[-1.0; 4]);
    }

    #[test]
    fn synth_quarter_rate_tone() {
        let bb = synth_baseband(&p(0.0, 0.25, 0.0, 4), 1.0).unwrap();
        for (got, want) in bb.samples().iter().zip([1.0, 0.0, -1.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn synth_rejects_nyquist_violation() {
        assert!(matches!(
            synth_baseband(&p(0.0, 0.6, 0.0, 4), 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn quantize_one_bit_extremes() {
        let bb = RealBaseband::new(vec![1.0, -1.0], 1.0).unwrap();
        assert_eq!(quantize(&bb, 1).unwrap().levels(), &[1, 0]);
    }

    #[test]
    fn quantize_two_bits() {
        let bb = RealBaseband::new(vec![1.0, 0.2, -0.2, -1.0], 1.0).unwrap();
        assert_eq!(quantize(&bb, 2).unwrap().levels(), &[3, 2, 1, 0]);
    }

    #[test]
    fn quantize_tone_with_tie_rule() {
        // cos(π/2) rounds to +6e-17 and cos(3π/2) to -1.8e-16 in f64.
        let bb = synth_baseband(&p(0.0, 0.25, 0.0, 4), 1.0).unwrap();
        assert_eq!(quantize(&bb, 1).unwrap().levels(), &[1, 1, 0, 0]);
        let exact_zero = RealBaseband::new(vec![0.0_f64], 1.0).unwrap();
        assert_eq!(quantize(&exact_zero, 1).unwrap().levels(), &[1]);
    }

    #[test]
    fn shift_inverts_ones() {
        let seq = SwitchSequence::new(vec![1; 12], 1, 4.0).unwrap();
        let out = apply_freq_shift(&seq, 1.0).unwrap();
        assert_eq!(out.levels(), &[0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1]);
    }

    #[test]
    fn shift_of_zeros_is_square_wave() {
        let seq = SwitchSequence::new(vec![0; 10], 1, 1e6).unwrap();
        let out = apply_freq_shift(&seq, 200e3).unwrap();
        // period 5 rounds to the even count 6
        assert_eq!(shift_square_period(1e6, 200e3), 6);
        assert_eq!(out.levels(), &[1, 1, 1, 0, 0, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn shift_rejects_multibit() {
        let seq = SwitchSequence::new(vec![0, 3], 2, 1e6).unwrap();
        assert!(matches!(apply_freq_shift(&seq, 1e5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn switch_sequence_invariants() {
        assert!(SwitchSequence::new(vec![2], 1, 1.0).is_err());
        assert!(SwitchSequence::new(vec![], 1, 1.0).is_err());
        assert!(SwitchSequence::new(vec![3], 2, 1.0).is_ok());
    }
}
