//! 802.11 ambient-power OOK links.

use num_complex::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{AMP_DOWNLINK_RATES, Protocol};
use super::{manchester_encode, LineCoding, ProtocolConfig};
use crate::baseband::{apply_freq_shift, SwitchSequence};
use crate::dsp::ifft;
use crate::error::{config, Result};
use crate::frontend::{IqBuffer, RadioMode};
use crate::scalar::Real;

/// Seed of the fixed subcarrier population used for OFDM-synthesized OOK.
pub const DOWNLINK_SUBCARRIER_SEED: u64 = 0x0a11_ba5e;

/// Line-codes `bits` per the configuration.
pub fn line_code(bits: &[u8], cfg: &ProtocolConfig) -> Result<Vec<u8>> {
    match cfg.line_coding {
        LineCoding::Nrz => {
            super::bits::check_bits(bits)?;
            Ok(bits.to_vec())
        }
        LineCoding::Manchester => manchester_encode(bits),
    }
}

/// Manchester chips to switch states: chip 1 reflects (passive) or routes the
/// carrier to the antenna (active), chip 0 absorbs. In passive mode a
/// configured subcarrier is applied by XOR with a square wave.
pub fn amp_uplink_modulate(bits: &[u8], cfg: &ProtocolConfig, mode: RadioMode) -> Result<SwitchSequence> {
    if cfg.protocol != Protocol::Amp80211 {
        return Err(config(format!("{} is not an 802.11 AMP configuration", cfg.protocol)));
    }
    cfg.validate_for(mode)?;
    let chips = manchester_encode(bits)?;
    let seq = SwitchSequence::from_bits(&chips, cfg.samples_per_symbol, cfg.sample_rate())?;
    match (mode, cfg.subcarrier_hz) {
        (RadioMode::Passive, Some(f)) => apply_freq_shift(&seq, f),
        _ => Ok(seq),
    }
}

/// Time-domain OFDM symbol with the seeded subcarrier population, unit mean
/// power, cyclic prefix of a fifth of the symbol when it divides evenly.
fn ofdm_on_symbol<T: Real>(sps: usize) -> Vec<Complex<T>> {
    let (n_fft, cp) = if sps % 5 == 0 { (sps * 4 / 5, sps / 5) } else { (sps, 0) };
    // used band: ±26 of 64 bins, as in a 20 MHz legacy channel
    let edge = (n_fft * 26 / 64).max(1);
    let used: Vec<isize> = (1..=edge as isize).flat_map(|k| [k, -k]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(DOWNLINK_SUBCARRIER_SEED);
    let n_on = (used.len() / 2).max(1);
    let mut bins = vec![Complex::new(T::zero(), T::zero()); n_fft];
    for i in sample(&mut rng, used.len(), n_on) {
        let k = used[i].rem_euclid(n_fft as isize) as usize;
        let q: u8 = rng.random_range(0..4);
        let ph = std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * f64::from(q);
        bins[k] = Complex::new(T::of(ph.cos()), T::of(ph.sin()));
    }
    let body = ifft(&bins);
    let mut out: Vec<Complex<T>> = body[n_fft - cp..].to_vec();
    out.extend_from_slice(&body);
    let p: f64 = out.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>() / out.len() as f64;
    let g = T::of(1.0 / p.sqrt());
    out.iter().map(|z| z * g).collect()
}

/// OOK downlink synthesized from OFDM symbols: every ON chip is one OFDM
/// symbol over the fixed subcarrier population, every OFF chip is silence.
pub fn amp_downlink_synthesize<T: Real>(bits: &[u8], cfg: &ProtocolConfig) -> Result<IqBuffer<T>> {
    if !AMP_DOWNLINK_RATES.contains(&cfg.data_rate) {
        return Err(config(format!("downlink rate {} not in 250 kbps, 1 Mbps", cfg.data_rate)));
    }
    cfg.validate()?;
    let chips = line_code(bits, cfg)?;
    let sps = cfg.samples_per_symbol;
    let on = ofdm_on_symbol::<T>(sps);
    let off = vec![Complex::new(T::zero(), T::zero()); sps];
    let mut s = Vec::with_capacity(chips.len() * sps);
    for &c in &chips {
        s.extend_from_slice(if c == 1 { &on } else { &off });
    }
    IqBuffer::new(s, cfg.sample_rate(), cfg.band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::frontend::{envelope, ook_receive};

    #[test]
    fn passive_rates() {
        let bits = [1, 0, 1, 1];
        assert!(amp_uplink_modulate(&bits, &ProtocolConfig::amp_uplink(250e3), RadioMode::Passive).is_ok());
        assert!(matches!(
            amp_uplink_modulate(&bits, &ProtocolConfig::amp_uplink(4e6), RadioMode::Passive),
            Err(Error::Capability(_))
        ));
        assert!(amp_uplink_modulate(&bits, &ProtocolConfig::amp_uplink(4e6), RadioMode::Active).is_ok());
    }

    #[test]
    fn chips_to_states() {
        let mut cfg = ProtocolConfig::amp_uplink(250e3);
        cfg.samples_per_symbol = 2;
        let s = amp_uplink_modulate(&[1, 0], &cfg, RadioMode::Passive).unwrap();
        assert_eq!(s.levels(), &[1, 1, 0, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn downlink_contrast() {
        let cfg = ProtocolConfig::amp_downlink(250e3);
        let rx: IqBuffer<f64> = amp_downlink_synthesize(&[1, 0, 1], &cfg).unwrap();
        let env = envelope(&rx, 0.0);
        let sps = cfg.samples_per_symbol;
        let e: Vec<f64> = env.chunks(sps).map(|c| c.iter().sum::<f64>() / sps as f64).collect();
        assert!(e[0] > 0.5 && e[2] > 0.5 && e[1] == 0.0);
        assert!((rx.samples()[..sps].iter().map(|z| z.norm_sqr()).sum::<f64>() / sps as f64 - 1.0).abs() < 1e-9);
        let d = ook_receive(&rx, cfg.symbol_rate(), 0.0).unwrap();
        assert_eq!(d.bits, vec![1, 0, 1]);
    }

    #[test]
    fn downlink_rates() {
        assert!(amp_downlink_synthesize::<f64>(&[1], &ProtocolConfig::amp_downlink(4e6)).is_err());
        let cfg = ProtocolConfig::amp_downlink(1e6);
        assert_eq!(cfg.samples_per_symbol, 20);
        assert!(amp_downlink_synthesize::<f32>(&[1, 0], &cfg).is_ok());
    }
}
