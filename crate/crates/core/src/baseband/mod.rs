//! Parameterized phase-polynomial baseband.
//!
//! Every symbol is described by four numbers: a chirp rate `a2`
//! (cycles/sample²), a frequency `a1` (cycles/sample), a phase offset `a0`
//! (cycles) and a length `n_samples`. The symbol phase is
//! `½·a2·n² + a1·n + a0` cycles; the real part of the resulting complex
//! exponential is quantized into the switch-state stream that drives either
//! the antenna impedance (passive) or the carrier gate (active).
//!
//! PSK carries data on `a0`, FSK on `a1`, CSS on `a2`.

mod params;
mod signal;

pub use params::{
    msk_tone_offsets, params_for_css, params_for_fsk, params_for_psk, PhaseParams,
};
pub use signal::{
    apply_freq_shift, apply_freq_shift_from, quantize, shift_square_period, synth_baseband,
    synth_complex, synth_symbols, synth_symbols_complex, RealBaseband, SwitchSequence,
};
