//! Bit-to-[`PhaseParams`] mappings.

use super::{AirFrame, ProtocolConfig, BLE_SYMBOL_RATE};
use crate::baseband::{params_for_css, params_for_psk, PhaseParams};
use crate::error::{config, Result};
use crate::scalar::{frac, Real};

/// BPSK: bit `b` becomes a constant-phase symbol at `a0 = b/2` cycles.
pub fn aiot_bpsk_map<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Vec<PhaseParams<T>> {
    bits.iter()
        .map(|&b| params_for_psk(T::of(0.5 * f64::from(b)), cfg.samples_per_symbol))
        .collect()
}

/// Continuous-phase FSK from per-symbol frequency ramps `(f_start, f_end)`
/// in Hz. Each symbol starts where the previous one would have continued:
/// `a0[k+1] = frac(phase of symbol k at n = N)`.
pub fn cpfsk_map<T: Real>(ramps: &[(f64, f64)], sps: usize, sample_rate: f64) -> Result<Vec<PhaseParams<T>>> {
    let mut out: Vec<PhaseParams<T>> = Vec::with_capacity(ramps.len());
    let mut a0 = T::zero();
    for &(f0, f1) in ramps {
        let a1 = f0 / sample_rate;
        let a2 = if sps > 1 {
            (f1 - f0) / sample_rate / (sps - 1) as f64
        } else {
            0.0
        };
        let p = PhaseParams::new(T::of(a2), T::of(a1), a0, sps)?;
        a0 = frac(p.phase_unchecked(sps));
        out.push(p);
    }
    Ok(out)
}

/// Tones `offset ∓ separation/2` for bits 0/1, where `offset` is the
/// configured subcarrier (0 when unset).
pub fn fsk_tones(cfg: &ProtocolConfig) -> (f64, f64) {
    let c = cfg.subcarrier_hz.unwrap_or(0.0);
    let h = cfg.tone_separation() / 2.0;
    (c - h, c + h)
}

/// MSK: tones `±R/4` around the configured offset, continuous phase.
pub fn aiot_msk_map<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Result<Vec<PhaseParams<T>>> {
    fsk_map(bits, cfg)
}

/// Continuous-phase binary FSK at the configured tone separation.
pub fn fsk_map<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Result<Vec<PhaseParams<T>>> {
    cfg.validate()?;
    let (f0, f1) = fsk_tones(cfg);
    let ramps: Vec<(f64, f64)> = bits
        .iter()
        .map(|&b| if b == 1 { (f1, f1) } else { (f0, f0) })
        .collect();
    cpfsk_map(&ramps, cfg.samples_per_symbol, cfg.sample_rate())
}

/// Unit-area Gaussian taps for a filter of bandwidth-time product `bt` at
/// `sps` samples per symbol, spanning ±3 symbols.
pub fn gaussian_taps(bt: f64, sps: usize) -> Vec<f64> {
    let sigma = sps as f64 * (2f64.ln()).sqrt() / (std::f64::consts::TAU * bt);
    let half = 3 * sps as isize;
    let taps: Vec<f64> = (-half..=half)
        .map(|k| (-(k as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / s).collect()
}

/// Per-sample frequency track of `bits`, optionally smoothed by a Gaussian
/// filter with edge replication.
fn frequency_track(bits: &[u8], tones: (f64, f64), sps: usize, bt: Option<f64>) -> Vec<f64> {
    let raw: Vec<f64> = bits
        .iter()
        .flat_map(|&b| std::iter::repeat(if b == 1 { tones.1 } else { tones.0 }).take(sps))
        .collect();
    let Some(bt) = bt else { return raw };
    let taps = gaussian_taps(bt, sps);
    let half = (taps.len() / 2) as isize;
    let last = raw.len() as isize - 1;
    (0..raw.len() as isize)
        .map(|n| {
            taps.iter()
                .enumerate()
                .map(|(i, t)| t * raw[(n + i as isize - half).clamp(0, last) as usize])
                .sum()
        })
        .collect()
}

/// BLE GFSK: `±250 kHz` at 1 Msym/s with continuous phase. With a Gaussian
/// BT configured, each symbol follows a linear frequency ramp between the
/// filtered track's values at its first and last sample.
pub fn ble_gfsk_map<T: Real>(frame: &AirFrame, cfg: &ProtocolConfig) -> Result<Vec<PhaseParams<T>>> {
    gfsk_bits_map(frame.bits(), cfg)
}

pub fn gfsk_bits_map<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Result<Vec<PhaseParams<T>>> {
    cfg.validate()?;
    if cfg.data_rate != BLE_SYMBOL_RATE {
        return Err(config(format!("GFSK symbol rate {} must be 1 Msym/s", cfg.data_rate)));
    }
    let fs = cfg.sample_rate();
    let ratio = fs / BLE_SYMBOL_RATE;
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(config(format!("sample rate {fs} is not a multiple of 1 MHz")));
    }
    let sps = cfg.samples_per_symbol;
    let track = frequency_track(bits, fsk_tones(cfg), sps, cfg.gaussian_bt);
    let ramps: Vec<(f64, f64)> = track.chunks(sps).map(|c| (c[0], c[c.len() - 1])).collect();
    cpfsk_map(&ramps, sps, fs)
}

/// Binary CSS: `1` sweeps up across the configured bandwidth, `0` sweeps down.
pub fn css_map<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Result<Vec<PhaseParams<T>>> {
    cfg.validate()?;
    let fs = cfg.sample_rate();
    let b = cfg.chirp_bandwidth();
    let c = cfg.subcarrier_hz.unwrap_or(0.0);
    let n = cfg.samples_per_symbol;
    // sweep the full bandwidth over the N-1 sample steps of a symbol
    let k = b * fs / (n - 1) as f64;
    let up = params_for_css::<T>(c - b / 2.0, k, fs, n)?;
    let down = params_for_css::<T>(c + b / 2.0, -k, fs, n)?;
    Ok(bits.iter().map(|&bit| if bit == 1 { up } else { down }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::Modulation;
    use proptest::prelude::*;

    fn boundary_jump(p: &[PhaseParams<f64>]) -> f64 {
        p.windows(2)
            .map(|w| {
                let d = frac(w[0].phase_unchecked(w[0].n_samples)) - w[1].a0;
                d.abs().min(1.0 - d.abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn bpsk_phases() {
        let cfg = ProtocolConfig::aiot_bpsk(1e3);
        let p = aiot_bpsk_map::<f64>(&[0, 1], &cfg);
        assert_eq!(p[0].a0, 0.0);
        assert_eq!(p[1].a0, 0.5);
        assert!(p.iter().all(|s| s.a1 == 0.0 && s.a2 == 0.0));
    }

    #[test]
    fn msk_separation_is_half_rate() {
        let cfg = ProtocolConfig::aiot_msk(1e6);
        assert_eq!(cfg.modulation, Modulation::Msk);
        let (f0, f1) = fsk_tones(&cfg);
        assert_eq!(f1 - f0, 500e3);
        let p = aiot_msk_map::<f64>(&[0, 1], &cfg).unwrap();
        assert!((p[1].a1 - p[0].a1 - 500e3 / 8e6).abs() < 1e-15);
    }

    #[test]
    fn gfsk_rejects_fractional_rate() {
        let mut cfg = ProtocolConfig::ble_adv(37).unwrap();
        cfg.samples_per_symbol = 8;
        assert!(gfsk_bits_map::<f64>(&[1, 0], &cfg).is_ok());
        cfg.data_rate = 1.5e6;
        assert!(gfsk_bits_map::<f64>(&[1, 0], &cfg).is_err());
    }

    #[test]
    fn gaussian_taps_sum_to_one() {
        let t = gaussian_taps(0.5, 8);
        assert_eq!(t.len(), 49);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(t[24] > t[23] && (t[23] - t[25]).abs() < 1e-15);
    }

    #[test]
    fn css_directions() {
        let cfg = ProtocolConfig::css(1e3, 64);
        let p = css_map::<f64>(&[1, 0], &cfg).unwrap();
        assert!(p[0].a2 > 0.0 && p[1].a2 < 0.0);
        assert!((p[0].end_frequency() * cfg.sample_rate() - cfg.chirp_bandwidth() / 2.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn msk_phase_continuity(bits in prop::collection::vec(0u8..2, 2..1000)) {
            let p = aiot_msk_map::<f64>(&bits, &ProtocolConfig::aiot_msk(1e6)).unwrap();
            prop_assert!(boundary_jump(&p) < 1e-9);
        }

        #[test]
        fn gfsk_phase_continuity(bits in prop::collection::vec(0u8..2, 2..400), shaped in any::<bool>()) {
            let mut cfg = ProtocolConfig::ble_adv(37).unwrap();
            cfg.gaussian_bt = shaped.then_some(0.5);
            let p = gfsk_bits_map::<f64>(&bits, &cfg).unwrap();
            prop_assert!(boundary_jump(&p) < 1e-9);
        }
    }
}
