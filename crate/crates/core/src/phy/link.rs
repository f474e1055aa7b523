//! Waveform-level modulate/demodulate pairs used by the BER harness.

use num_complex::Complex;

use super::amp::line_code;
use super::maps::{aiot_bpsk_map, css_map, fsk_map, fsk_tones, gfsk_bits_map};
use super::{manchester_decide, LineCoding, Modulation, Protocol, ProtocolConfig};
use crate::baseband::{
    apply_freq_shift, quantize, synth_complex, synth_symbols, synth_symbols_complex, PhaseParams, SwitchSequence,
};
use crate::dsp::mean_power;
use crate::error::{config, Error, Result};
use crate::frontend::{
    configure_topology, ook_receive, pll_tune, synth_active, synth_passive, IqBuffer, RadioMode, PLL_SETTLE_S,
};
use crate::scalar::{frac, Real};

/// Known BPSK prefix resolving the π ambiguity of the blind phase estimate.
pub const BPSK_PILOT: [u8; 8] = [0, 0, 1, 1, 0, 1, 0, 1];

/// How the modulated stream reaches the air.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TxPath {
    /// Ideal complex exponential, `exp(j·2π·phase)`.
    #[default]
    Iq,
    /// One-bit switch reflecting a unit excitation tone.
    Passive,
    /// One-bit switch gating the PLL carrier.
    Active,
}

/// Receiver output.
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    pub bits: Vec<u8>,
    /// Positive favours a 1; magnitude normalised by the mean magnitude.
    pub soft: Vec<f64>,
    pub rssi_dbm: f64,
}

fn symbol_params<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Result<Vec<PhaseParams<T>>> {
    match cfg.modulation {
        Modulation::Bpsk => {
            let mut all = BPSK_PILOT.to_vec();
            all.extend_from_slice(bits);
            Ok(aiot_bpsk_map(&all, cfg))
        }
        Modulation::Msk | Modulation::Fsk if cfg.protocol == Protocol::BleAdv => gfsk_bits_map(bits, cfg),
        Modulation::Msk | Modulation::Fsk => fsk_map(bits, cfg),
        Modulation::Css => css_map(bits, cfg),
        Modulation::Ook => Err(Error::Unsupported("OOK has no phase-polynomial form".into())),
    }
}

fn mix<T: Real>(samples: &mut [Complex<T>], f: f64, fs: f64) {
    for (n, z) in samples.iter_mut().enumerate() {
        let ph = frac(f / fs * n as f64) * std::f64::consts::TAU;
        *z *= Complex::new(T::of(ph.cos()), T::of(ph.sin()));
    }
}

fn switch_to_air<T: Real>(seq: &SwitchSequence, cfg: &ProtocolConfig, path: TxPath) -> Result<IqBuffer<T>> {
    let fs = seq.sample_rate();
    match path {
        TxPath::Passive => {
            let topo = configure_topology(RadioMode::Passive);
            let levels = [false, true].map(|s| topo.passive_gamma::<T>(s).expect("passive topology"));
            let exc = IqBuffer::tone(T::one(), seq.len(), fs, cfg.band)?;
            synth_passive(&exc, seq, &levels)
        }
        TxPath::Active => {
            let pll = pll_tune(cfg.band, 0.0)?.advance(PLL_SETTLE_S);
            synth_active(&pll, 0.0, seq)
        }
        TxPath::Iq => unreachable!("IQ path does not use the switch"),
    }
}

fn mode_of(path: TxPath) -> Option<RadioMode> {
    match path {
        TxPath::Iq => None,
        TxPath::Passive => Some(RadioMode::Passive),
        TxPath::Active => Some(RadioMode::Active),
    }
}

/// Bits to a unit-amplitude complex-baseband waveform at `cfg.band`.
///
/// On the switch paths everything is one-bit: OOK maps chips straight to
/// switch states; phase modulations are sign-quantized and need a subcarrier
/// to keep the real switch waveform's mirror image out of the receiver band.
pub fn modulate<T: Real>(bits: &[u8], cfg: &ProtocolConfig, path: TxPath) -> Result<IqBuffer<T>> {
    match mode_of(path) {
        Some(m) => cfg.validate_for(m)?,
        None => cfg.validate()?,
    }
    let fs = cfg.sample_rate();
    let sps = cfg.samples_per_symbol;
    if cfg.modulation == Modulation::Ook {
        let chips = line_code(bits, cfg)?;
        if path == TxPath::Iq {
            let mut s: Vec<Complex<T>> = chips
                .iter()
                .flat_map(|&c| std::iter::repeat(Complex::new(T::of(f64::from(c)), T::zero())).take(sps))
                .collect();
            if let Some(sc) = cfg.subcarrier_hz {
                mix(&mut s, sc, fs);
            }
            return IqBuffer::new(s, fs, cfg.band);
        }
        if cfg.subcarrier_hz.is_some() {
            return Err(Error::Unsupported(
                "XOR subcarrier on switch OOK turns the envelope constant; use the IQ path".into(),
            ));
        }
        return switch_to_air(&SwitchSequence::from_bits(&chips, sps, fs)?, cfg, path);
    }
    let symbols = symbol_params::<T>(bits, cfg)?;
    if path == TxPath::Iq {
        let mut s = synth_symbols_complex(&symbols)?;
        if cfg.modulation == Modulation::Bpsk {
            if let Some(sc) = cfg.subcarrier_hz {
                mix(&mut s, sc, fs);
            }
        }
        return IqBuffer::new(s, fs, cfg.band);
    }
    let Some(sc) = cfg.subcarrier_hz else {
        return Err(config(format!("{} over a switch path needs a subcarrier", cfg.modulation)));
    };
    let reach = match cfg.modulation {
        Modulation::Css => cfg.chirp_bandwidth() / 2.0,
        Modulation::Bpsk => cfg.symbol_rate(),
        _ => cfg.tone_separation() / 2.0 + cfg.symbol_rate(),
    };
    if sc <= reach {
        return Err(config(format!("subcarrier {sc} Hz overlaps its own mirror (need > {reach} Hz)")));
    }
    let seq = quantize(&synth_symbols(&symbols, fs)?, 1)?;
    let seq = if cfg.modulation == Modulation::Bpsk {
        apply_freq_shift(&seq, sc)?
    } else {
        seq
    };
    switch_to_air(&seq, cfg, path)
}

fn normalise(soft: &mut [f64]) {
    let m = soft.iter().map(|s| s.abs()).sum::<f64>() / soft.len().max(1) as f64;
    if m > 0.0 {
        soft.iter_mut().for_each(|s| *s /= m);
    }
}

/// Correlates each symbol against `reference` conjugated; symbol phase
/// origin is the start of the symbol.
fn symbol_energy<T: Real>(chunk: &[Complex<T>], reference: &[Complex<T>]) -> f64 {
    let acc: Complex<T> = chunk.iter().zip(reference).map(|(x, r)| x * r.conj()).sum();
    acc.norm_sqr().as_f64()
}

fn tone_ref<T: Real>(f: f64, fs: f64, n: usize) -> Vec<Complex<T>> {
    let p = PhaseParams::new(T::zero(), T::of(f / fs), T::zero(), n).expect("tone within Nyquist");
    synth_complex(&p).expect("valid tone")
}

/// Receiver matched to `cfg`: coherent correlation for BPSK, dual-tone
/// energy for FSK/MSK, dechirp energy for CSS, the envelope receiver for OOK.
pub fn demodulate<T: Real>(rx: &IqBuffer<T>, cfg: &ProtocolConfig) -> Result<Demodulated> {
    cfg.validate()?;
    if (rx.sample_rate() - cfg.sample_rate()).abs() > 1e-6 * cfg.sample_rate() {
        return Err(config(format!(
            "buffer at {} Hz does not match the configured {} Hz",
            rx.sample_rate(),
            cfg.sample_rate()
        )));
    }
    let rssi_dbm = 10.0 * mean_power(rx.samples()).as_f64().max(1e-300).log10();
    let sps = cfg.samples_per_symbol;
    let fs = cfg.sample_rate();
    let (bits, mut soft) = match cfg.modulation {
        Modulation::Ook => {
            let d = ook_receive(rx, cfg.symbol_rate(), 0.0)?;
            match cfg.line_coding {
                LineCoding::Manchester => manchester_decide(&d.soft),
                LineCoding::Nrz => {
                    let soft = d.soft.iter().map(|s| s - d.threshold).collect();
                    (d.bits, soft)
                }
            }
        }
        Modulation::Bpsk => demod_bpsk(rx, cfg)?,
        Modulation::Msk | Modulation::Fsk => {
            let (f0, f1) = fsk_tones(cfg);
            let r0 = tone_ref::<T>(f0, fs, sps);
            let r1 = tone_ref::<T>(f1, fs, sps);
            rx.samples()
                .chunks_exact(sps)
                .map(|c| {
                    let d = symbol_energy(c, &r1) - symbol_energy(c, &r0);
                    (u8::from(d > 0.0), d)
                })
                .unzip()
        }
        Modulation::Css => {
            let p = css_map::<T>(&[1, 0], cfg)?;
            let up = synth_complex(&p[0])?;
            let down = synth_complex(&p[1])?;
            rx.samples()
                .chunks_exact(sps)
                .map(|c| {
                    let d = symbol_energy(c, &up) - symbol_energy(c, &down);
                    (u8::from(d > 0.0), d)
                })
                .unzip()
        }
    };
    normalise(&mut soft);
    Ok(Demodulated { bits, soft, rssi_dbm })
}

fn demod_bpsk<T: Real>(rx: &IqBuffer<T>, cfg: &ProtocolConfig) -> Result<(Vec<u8>, Vec<f64>)> {
    let sps = cfg.samples_per_symbol;
    let mut s: Vec<Complex<f64>> = rx
        .samples()
        .iter()
        .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    if let Some(sc) = cfg.subcarrier_hz {
        // the switch waveform carries a DC term next to the subcarrier
        let dc = s.iter().sum::<Complex<f64>>() / s.len() as f64;
        s.iter_mut().for_each(|z| *z -= dc);
        mix(&mut s, -sc, cfg.sample_rate());
    }
    let z: Vec<Complex<f64>> = s.chunks_exact(sps).map(|c| c.iter().sum()).collect();
    if z.len() < BPSK_PILOT.len() {
        return Err(Error::Decode {
            index: z.len(),
            reason: "burst shorter than the BPSK pilot".into(),
        });
    }
    let theta = z.iter().map(|v| v * v).sum::<Complex<f64>>().arg() / 2.0;
    let rot = Complex::from_polar(1.0, -theta);
    let mut y: Vec<f64> = z.iter().map(|v| -(v * rot).re).collect();
    let pilot_errors = y
        .iter()
        .zip(BPSK_PILOT)
        .filter(|(v, p)| u8::from(**v > 0.0) != *p)
        .count();
    if 2 * pilot_errors > BPSK_PILOT.len() {
        y.iter_mut().for_each(|v| *v = -*v);
    }
    let y = y.split_off(BPSK_PILOT.len());
    Ok((y.iter().map(|&v| u8::from(v > 0.0)).collect(), y))
}
