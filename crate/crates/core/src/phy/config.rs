use std::fmt;
use std::str::FromStr;

use crate::error::{config, Error, Result};
use crate::frontend::RadioMode;

/// Uplink rates of the 802.11 ambient-power amendment.
pub const AMP_UPLINK_RATES: [f64; 3] = [250e3, 1e6, 4e6];
/// Downlink OOK rates of the same amendment.
pub const AMP_DOWNLINK_RATES: [f64; 2] = [250e3, 1e6];
/// Uplink rate restricted to active stations.
pub const AMP_ACTIVE_ONLY_RATE: f64 = 4e6;
pub const BLE_SYMBOL_RATE: f64 = 1e6;
pub const BLE_ADV_CHANNELS: [u8; 3] = [37, 38, 39];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Amp80211,
    Aiot3gpp,
    BleAdv,
    Css,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Ook,
    Bpsk,
    Msk,
    Fsk,
    Css,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LineCoding {
    #[default]
    Nrz,
    Manchester,
}

macro_rules! text_enum {
    ($t:ty, $what:literal, $($v:ident => $s:literal),+) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$v => $s),+ })
            }
        }
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok(Self::$v),)+
                    other => Err(config(format!(concat!("unknown ", $what, " `{}`"), other))),
                }
            }
        }
    };
}

text_enum!(Protocol, "protocol", Amp80211 => "amp", Aiot3gpp => "aiot", BleAdv => "ble", Css => "css");
text_enum!(Modulation, "modulation", Ook => "ook", Bpsk => "bpsk", Msk => "msk", Fsk => "fsk", Css => "css");
text_enum!(LineCoding, "line coding", Nrz => "nrz", Manchester => "manchester");

/// Center frequency of a BLE advertising channel.
pub fn ble_channel_freq(channel: u8) -> Result<f64> {
    match channel {
        37 => Ok(2.402e9),
        38 => Ok(2.426e9),
        39 => Ok(2.480e9),
        c => Err(config(format!("BLE advertising channel {c} not in 37..=39"))),
    }
}

/// Physical-layer configuration of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    /// Information rate, bits/s.
    pub data_rate: f64,
    pub modulation: Modulation,
    /// Samples per channel symbol (per Manchester chip when line coded).
    pub samples_per_symbol: usize,
    pub channel: u8,
    /// RF center frequency, Hz.
    pub band: f64,
    /// Offset at which the modulated stream is placed, Hz. Switch paths
    /// realize it by XOR with a square wave.
    pub subcarrier_hz: Option<f64>,
    pub line_coding: LineCoding,
    /// Gaussian frequency-track filter bandwidth-time product.
    pub gaussian_bt: Option<f64>,
    /// FSK tone separation; defaults to the data rate for plain FSK and half
    /// of it for MSK.
    pub tone_separation_hz: Option<f64>,
    /// CSS sweep width; defaults to a quarter of the sample rate.
    pub chirp_bandwidth_hz: Option<f64>,
}

impl ProtocolConfig {
    fn base(protocol: Protocol, data_rate: f64, modulation: Modulation, sps: usize, band: f64) -> Self {
        Self {
            protocol,
            data_rate,
            modulation,
            samples_per_symbol: sps,
            channel: 0,
            band,
            subcarrier_hz: None,
            line_coding: LineCoding::Nrz,
            gaussian_bt: None,
            tone_separation_hz: None,
            chirp_bandwidth_hz: None,
        }
    }

    /// Manchester OOK uplink.
    pub fn amp_uplink(rate: f64) -> Self {
        Self {
            line_coding: LineCoding::Manchester,
            channel: 6,
            ..Self::base(Protocol::Amp80211, rate, Modulation::Ook, 8, 2.437e9)
        }
    }

    /// OFDM-synthesized OOK downlink on a 20 MHz channel.
    pub fn amp_downlink(rate: f64) -> Self {
        let sps = (20e6 / rate).round().max(1.0) as usize;
        Self {
            channel: 6,
            ..Self::base(Protocol::Amp80211, rate, Modulation::Ook, sps, 2.437e9)
        }
    }

    pub fn aiot_bpsk(rate: f64) -> Self {
        Self::base(Protocol::Aiot3gpp, rate, Modulation::Bpsk, 8, 915e6)
    }

    pub fn aiot_msk(rate: f64) -> Self {
        Self::base(Protocol::Aiot3gpp, rate, Modulation::Msk, 8, 915e6)
    }

    pub fn aiot_fsk(rate: f64) -> Self {
        Self::base(Protocol::Aiot3gpp, rate, Modulation::Fsk, 8, 915e6)
    }

    pub fn aiot_ook(rate: f64) -> Self {
        Self::base(Protocol::Aiot3gpp, rate, Modulation::Ook, 8, 915e6)
    }

    pub fn ble_adv(channel: u8) -> Result<Self> {
        Ok(Self {
            channel,
            tone_separation_hz: Some(BLE_SYMBOL_RATE / 2.0),
            ..Self::base(Protocol::BleAdv, BLE_SYMBOL_RATE, Modulation::Fsk, 8, ble_channel_freq(channel)?)
        })
    }

    pub fn css(rate: f64, sps: usize) -> Self {
        Self::base(Protocol::Css, rate, Modulation::Css, sps, 915e6)
    }

    /// Channel symbols per second.
    pub fn symbol_rate(&self) -> f64 {
        match self.line_coding {
            LineCoding::Nrz => self.data_rate,
            LineCoding::Manchester => 2.0 * self.data_rate,
        }
    }

    pub fn sample_rate(&self) -> f64 {
        self.symbol_rate() * self.samples_per_symbol as f64
    }

    pub fn tone_separation(&self) -> f64 {
        self.tone_separation_hz.unwrap_or(match self.modulation {
            Modulation::Msk => self.data_rate / 2.0,
            _ => self.data_rate,
        })
    }

    pub fn chirp_bandwidth(&self) -> f64 {
        self.chirp_bandwidth_hz.unwrap_or(self.sample_rate() / 4.0)
    }

    /// Structural checks independent of the device mode.
    pub fn validate(&self) -> Result<()> {
        if !(self.data_rate > 0.0 && self.data_rate.is_finite()) {
            return Err(config(format!("data rate {} must be positive", self.data_rate)));
        }
        if self.samples_per_symbol < 2 {
            return Err(config("samples_per_symbol must be at least 2"));
        }
        let allowed: &[Modulation] = match self.protocol {
            Protocol::Amp80211 => &[Modulation::Ook],
            Protocol::Aiot3gpp => &[Modulation::Bpsk, Modulation::Msk, Modulation::Fsk, Modulation::Ook],
            Protocol::BleAdv => &[Modulation::Fsk, Modulation::Msk],
            Protocol::Css => &[Modulation::Css],
        };
        if !allowed.contains(&self.modulation) {
            return Err(config(format!("{} cannot carry {}", self.protocol, self.modulation)));
        }
        if self.protocol == Protocol::Amp80211 && !AMP_UPLINK_RATES.contains(&self.data_rate) {
            return Err(config(format!("802.11 AMP rate {} not in 250 kbps, 1 Mbps, 4 Mbps", self.data_rate)));
        }
        if self.protocol == Protocol::BleAdv {
            let f = ble_channel_freq(self.channel)?;
            if (f - self.band).abs() > 1.0 {
                return Err(config(format!("BLE channel {} is at {f} Hz, band says {}", self.channel, self.band)));
            }
            if self.data_rate != BLE_SYMBOL_RATE {
                return Err(config("BLE advertising runs at 1 Msym/s"));
            }
        }
        let fs = self.sample_rate();
        if let Some(sc) = self.subcarrier_hz {
            if !(sc > 0.0 && sc < fs / 2.0) {
                return Err(config(format!("subcarrier {sc} Hz outside (0, {})", fs / 2.0)));
            }
        }
        if matches!(self.modulation, Modulation::Fsk | Modulation::Msk) {
            let top = self.subcarrier_hz.unwrap_or(0.0) + self.tone_separation() / 2.0;
            if top >= fs / 2.0 {
                return Err(config(format!("FSK tones reach {top} Hz, above Nyquist at {fs} Hz")));
            }
        }
        if let Some(bt) = self.gaussian_bt {
            if !(bt > 0.0) {
                return Err(config(format!("Gaussian BT {bt} must be positive")));
            }
        }
        Ok(())
    }

    /// Adds the device-class restriction: the top AMP uplink rate is
    /// reserved for active stations.
    pub fn validate_for(&self, mode: RadioMode) -> Result<()> {
        self.validate()?;
        if self.protocol == Protocol::Amp80211 && self.data_rate == AMP_ACTIVE_ONLY_RATE && mode == RadioMode::Passive {
            return Err(Error::Capability(
                "4 Mbps uplink is reserved for active stations".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ble_channels() {
        assert_eq!(ble_channel_freq(37).unwrap(), 2.402e9);
        assert!(ProtocolConfig::ble_adv(36).is_err());
        let c = ProtocolConfig::ble_adv(37).unwrap();
        c.validate().unwrap();
        assert_eq!(c.sample_rate(), 8e6);
    }

    #[test]
    fn amp_rate_gating() {
        for r in AMP_UPLINK_RATES {
            ProtocolConfig::amp_uplink(r).validate_for(RadioMode::Active).unwrap();
        }
        ProtocolConfig::amp_uplink(250e3).validate_for(RadioMode::Passive).unwrap();
        assert!(matches!(
            ProtocolConfig::amp_uplink(4e6).validate_for(RadioMode::Passive),
            Err(Error::Capability(_))
        ));
        assert!(ProtocolConfig::amp_uplink(2e6).validate().is_err());
    }

    #[test]
    fn manchester_doubles_symbol_rate() {
        let c = ProtocolConfig::amp_uplink(250e3);
        assert_eq!(c.symbol_rate(), 500e3);
        assert_eq!(c.sample_rate(), 4e6);
    }

    #[test]
    fn text_forms() {
        assert_eq!("BLE".parse::<Protocol>().unwrap(), Protocol::BleAdv);
        assert_eq!(Modulation::Msk.to_string(), "msk");
        assert!("qam".parse::<Modulation>().is_err());
    }

    #[test]
    fn protocol_modulation_pairs() {
        let mut c = ProtocolConfig::amp_uplink(1e6);
        c.modulation = Modulation::Bpsk;
        assert!(c.validate().is_err());
    }
}
