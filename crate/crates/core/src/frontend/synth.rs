use num_complex::Complex;

use super::{IqBuffer, PllState};
use crate::baseband::SwitchSequence;
use crate::error::{arg, config, Error, Result};
use crate::scalar::{frac, Real};

/// Default time constant of the optional switch edge model (≈ 33 MHz switch).
pub const DEFAULT_TRANSITION_TAU_S: f64 = 30e-9;

/// Edge shape of switch transitions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SwitchEdges {
    #[default]
    Instant,
    /// First-order response with the given time constant in seconds.
    FirstOrder(f64),
}

impl SwitchEdges {
    fn smoothing<T: Real>(self, sample_rate: f64) -> Option<T> {
        match self {
            SwitchEdges::Instant => None,
            SwitchEdges::FirstOrder(tau) if tau > 0.0 => Some(T::of((-1.0 / (tau * sample_rate)).exp())),
            SwitchEdges::FirstOrder(_) => None,
        }
    }
}

/// `10^(dBm/20)`: amplitude with 0 dBm as unit full scale.
pub fn dbm_to_amplitude<T: Real>(dbm: f64) -> T {
    T::of(10f64.powf(dbm / 20.0))
}

/// Backscatter synthesis: each excitation sample is multiplied by the
/// reflection coefficient selected by the switch level.
pub fn synth_passive<T: Real>(
    excitation: &IqBuffer<T>,
    seq: &SwitchSequence,
    gamma_levels: &[Complex<T>],
) -> Result<IqBuffer<T>> {
    synth_passive_with(excitation, seq, gamma_levels, SwitchEdges::Instant)
}

pub fn synth_passive_with<T: Real>(
    excitation: &IqBuffer<T>,
    seq: &SwitchSequence,
    gamma_levels: &[Complex<T>],
    edges: SwitchEdges,
) -> Result<IqBuffer<T>> {
    if excitation.is_empty() || seq.is_empty() {
        return Err(arg("empty excitation or switch sequence"));
    }
    if gamma_levels.len() != seq.level_count() {
        return Err(arg(format!(
            "{} reflection levels supplied for a {}-bit switch",
            gamma_levels.len(),
            seq.bits()
        )));
    }
    if let Some(g) = gamma_levels.iter().find(|g| g.norm() > T::one() + T::of(1e-9)) {
        return Err(config(format!("reflection level {g} exceeds unit magnitude")));
    }
    if (excitation.sample_rate() - seq.sample_rate()).abs() > 1e-9 * excitation.sample_rate() {
        return Err(config(format!(
            "switch sequence at {} Hz is not aligned to the {} Hz excitation",
            seq.sample_rate(),
            excitation.sample_rate()
        )));
    }
    let len = excitation.len().min(seq.len());
    if excitation.len() != seq.len() {
        log::warn!(
            "passive synthesis truncated to {len} samples (excitation {}, switch {})",
            excitation.len(),
            seq.len()
        );
    }
    let alpha = edges.smoothing::<T>(seq.sample_rate());
    let mut gamma = gamma_levels[usize::from(seq.levels()[0])];
    let out = excitation.samples()[..len]
        .iter()
        .zip(&seq.levels()[..len])
        .map(|(x, &l)| {
            let target = gamma_levels[usize::from(l)];
            gamma = match alpha {
                Some(a) => gamma * a + target * (T::one() - a),
                None => target,
            };
            x * gamma
        })
        .collect();
    Ok(IqBuffer::new(out, excitation.sample_rate(), excitation.center_freq())?.with_timestamp(excitation.timestamp()))
}

/// Fundamental of the fastest toggle in the sequence, Hz.
fn switching_bandwidth(seq: &SwitchSequence) -> f64 {
    let levels = seq.levels();
    let mut min_run = usize::MAX;
    let mut run = 1;
    for w in levels.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            min_run = min_run.min(run);
            run = 1;
        }
    }
    if min_run == usize::MAX {
        return 0.0;
    }
    seq.sample_rate() / (2.0 * min_run as f64)
}

/// Active synthesis: the switch gates the PLL carrier. The buffer is
/// referenced `if_offset` below the carrier, so the gated carrier appears
/// as `seq[n]·exp(j2π·if_offset·n/fs)` scaled to the PLL output power.
pub fn synth_active<T: Real>(pll: &PllState, if_offset: f64, seq: &SwitchSequence) -> Result<IqBuffer<T>> {
    if !pll.settled {
        return Err(Error::State(format!(
            "PLL not locked: {:.1} ms of {:.1} ms settle time elapsed",
            pll.elapsed * 1e3,
            pll.settle_time * 1e3
        )));
    }
    if seq.bits() != 1 {
        return Err(Error::Unsupported("active gating needs a 1-bit switch sequence".into()));
    }
    let fs = seq.sample_rate();
    let bw = switching_bandwidth(seq);
    if if_offset.abs() + bw >= fs / 2.0 {
        return Err(config(format!(
            "IF offset {if_offset} Hz plus switching bandwidth {bw} Hz exceeds Nyquist at {fs} Hz"
        )));
    }
    let amp = T::of(pll.amplitude());
    let step = if_offset / fs;
    let out = seq
        .levels()
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            if l == 0 {
                return Complex::new(T::zero(), T::zero());
            }
            let ph = frac(step * n as f64) * std::f64::consts::TAU;
            Complex::new(amp * T::of(ph.cos()), amp * T::of(ph.sin()))
        })
        .collect();
    IqBuffer::new(out, fs, pll.freq - if_offset)
}
