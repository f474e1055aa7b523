use std::fmt;
use std::str::FromStr;

use crate::error::{config, Error, Result};
use crate::frontend::{RadioMode, PLL_MAX_HZ, PLL_MIN_HZ};
use crate::phy::{ble_channel_freq, LineCoding, Modulation, Protocol, ProtocolConfig};
use crate::units::{parse_bool, parse_int, parse_quantity, Unit};

/// Operating mode register; also the radio state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeviceMode {
    Sleep,
    Passive,
    Active,
}

impl DeviceMode {
    pub fn radio(self) -> Option<RadioMode> {
        match self {
            DeviceMode::Sleep => None,
            DeviceMode::Passive => Some(RadioMode::Passive),
            DeviceMode::Active => Some(RadioMode::Active),
        }
    }
}

impl fmt::Display for DeviceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceMode::Sleep => "sleep",
            DeviceMode::Passive => "passive",
            DeviceMode::Active => "active",
        })
    }
}

impl FromStr for DeviceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sleep" => Ok(DeviceMode::Sleep),
            "passive" => Ok(DeviceMode::Passive),
            "active" => Ok(DeviceMode::Active),
            o => Err(config(format!("unknown mode `{o}`"))),
        }
    }
}

/// Energy-plane thresholds carried in the bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRegisters {
    pub v_activate: f64,
    pub v_cutoff: f64,
}

impl Default for EnergyRegisters {
    fn default() -> Self {
        Self {
            v_activate: 3.3,
            v_cutoff: 2.0,
        }
    }
}

/// Register keys recognised by [`RegisterBank::set`].
pub const REGISTER_KEYS: &[&str] = &[
    "mode",
    "device_id",
    "freq",
    "power",
    "payload_id",
    "channel",
    "sensor_enable",
    "protocol",
    "modulation",
    "data_rate",
    "samples_per_symbol",
    "subcarrier",
    "line_coding",
    "gaussian_bt",
    "sample_rate",
    "v_activate",
    "v_cutoff",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterBank {
    pub mode: DeviceMode,
    pub device_id: u8,
    /// Carrier frequency; required in active mode.
    pub freq: Option<f64>,
    pub power_dbm: f64,
    pub payload_id: String,
    pub channel: Option<u8>,
    pub sensor_enable: bool,
    pub phy: ProtocolConfig,
    /// Optional explicit sample rate; must agree with the PHY configuration.
    pub sample_rate: Option<f64>,
    pub energy: EnergyRegisters,
}

impl Default for RegisterBank {
    fn default() -> Self {
        Self {
            mode: DeviceMode::Passive,
            device_id: 1,
            freq: None,
            power_dbm: 0.0,
            payload_id: String::new(),
            channel: None,
            sensor_enable: false,
            phy: ProtocolConfig::amp_uplink(250e3),
            sample_rate: None,
            energy: EnergyRegisters::default(),
        }
    }
}

fn interp(register: &str, reason: impl Into<String>) -> Error {
    Error::Interpretation {
        register: register.to_string(),
        reason: reason.into(),
    }
}

impl RegisterBank {
    /// Whole-bank consistency checks run after every write.
    pub fn validate(&self) -> Result<()> {
        if self.mode == DeviceMode::Active {
            if let Some(f) = self.freq {
                if !(PLL_MIN_HZ..=PLL_MAX_HZ).contains(&f) {
                    return Err(Error::Range {
                        what: "freq",
                        value: f,
                        min: PLL_MIN_HZ,
                        max: PLL_MAX_HZ,
                    });
                }
            }
        }
        if !(-40.0..=20.0).contains(&self.power_dbm) {
            return Err(Error::Range {
                what: "power",
                value: self.power_dbm,
                min: -40.0,
                max: 20.0,
            });
        }
        if self.phy.protocol == Protocol::BleAdv {
            if let Some(c) = self.channel {
                ble_channel_freq(c)?;
            }
        }
        if !(self.energy.v_cutoff > 0.0 && self.energy.v_cutoff < self.energy.v_activate) {
            return Err(config(format!(
                "v_cutoff {} must be positive and below v_activate {}",
                self.energy.v_cutoff, self.energy.v_activate
            )));
        }
        if let Some(m) = self.mode.radio() {
            self.phy.validate_for(m)?;
        } else {
            self.phy.validate()?;
        }
        Ok(())
    }

    /// Validated write. The bank is returned only if the write and the
    /// resulting bank are both valid; `self` is never modified.
    pub fn set(&self, key: &str, value: &str) -> Result<Self> {
        let mut b = self.clone();
        let key = key.trim();
        match key {
            "mode" => b.mode = value.parse()?,
            "device_id" => b.device_id = small_int(value, key, 255)? as u8,
            "freq" => b.freq = Some(parse_quantity(value, Unit::Hertz)?),
            "power" | "power_dbm" => b.power_dbm = parse_quantity(value, Unit::Decibel)?,
            "payload_id" => b.payload_id = value.trim().to_string(),
            "channel" => {
                let c = small_int(value, key, 255)? as u8;
                b.channel = Some(c);
                b.phy.channel = c;
                if b.phy.protocol == Protocol::BleAdv {
                    let f = ble_channel_freq(c)?;
                    b.phy.band = f;
                    b.freq = Some(f);
                }
            }
            "sensor_enable" => b.sensor_enable = parse_bool(value)?,
            "protocol" => {
                let p: Protocol = value.parse()?;
                let rate = b.phy.data_rate;
                b.phy = match p {
                    Protocol::Amp80211 => ProtocolConfig::amp_uplink(rate),
                    Protocol::Aiot3gpp => ProtocolConfig::aiot_bpsk(rate),
                    Protocol::BleAdv => {
                        let ch = b.channel.unwrap_or(37);
                        b.channel = Some(ch);
                        b.freq = Some(ble_channel_freq(ch)?);
                        ProtocolConfig::ble_adv(ch)?
                    }
                    Protocol::Css => ProtocolConfig::css(rate, 64),
                };
            }
            "modulation" => b.phy.modulation = value.parse::<Modulation>()?,
            "data_rate" => b.phy.data_rate = parse_quantity(value, Unit::BitRate)?,
            "samples_per_symbol" => b.phy.samples_per_symbol = small_int(value, key, 1 << 16)? as usize,
            "subcarrier" => {
                b.phy.subcarrier_hz = match value.trim() {
                    "none" | "off" | "" => None,
                    v => Some(parse_quantity(v, Unit::Hertz)?),
                }
            }
            "line_coding" => b.phy.line_coding = value.parse::<LineCoding>()?,
            "gaussian_bt" => {
                b.phy.gaussian_bt = match value.trim() {
                    "none" | "off" => None,
                    v => Some(parse_quantity(v, Unit::Plain)?),
                }
            }
            "sample_rate" => b.sample_rate = Some(parse_quantity(value, Unit::Hertz)?),
            "v_activate" => b.energy.v_activate = parse_quantity(value, Unit::Volts)?,
            "v_cutoff" => b.energy.v_cutoff = parse_quantity(value, Unit::Volts)?,
            other => return Err(Error::UnknownRegister(other.to_string())),
        }
        b.validate()?;
        Ok(b)
    }

    /// Applies writes in order, stopping at the first failure.
    pub fn apply_all<'a>(&self, writes: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        writes.into_iter().try_fold(self.clone(), |b, (k, v)| b.set(k, v))
    }

    /// Consistency needed before the bank is translated to commands.
    pub(crate) fn check_interpretable(&self) -> Result<()> {
        self.validate()?;
        if self.mode == DeviceMode::Active && self.freq.is_none() {
            return Err(interp("freq", "active mode needs a carrier frequency"));
        }
        if let Some(fs) = self.sample_rate {
            let phy_fs = self.phy.sample_rate();
            if (fs - phy_fs).abs() > 1e-6 * phy_fs {
                return Err(interp(
                    "sample_rate",
                    format!(
                        "{fs} Hz disagrees with {} sym/s × {} samples = {phy_fs} Hz",
                        self.phy.symbol_rate(),
                        self.phy.samples_per_symbol
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn small_int(value: &str, key: &str, max: u64) -> Result<u64> {
    let v = parse_int(value)?;
    if v > max {
        return Err(interp(key, format!("{v} exceeds {max}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ble_workflow() {
        let b = RegisterBank::default()
            .apply_all([("protocol", "ble"), ("mode", "active"), ("power", "+2dBm"), ("channel", "37")])
            .unwrap();
        assert_eq!(b.power_dbm, 2.0);
        assert_eq!(b.freq, Some(2.402e9));
        assert_eq!(b.phy.band, 2.402e9);
        assert!(b.set("channel", "12").is_err());
    }

    #[test]
    fn pll_bounds_are_atomic() {
        let b = RegisterBank::default().set("mode", "active").unwrap();
        let e = b.set("freq", "6.9GHz").unwrap_err();
        assert!(matches!(e, Error::Range { what: "freq", .. }));
        assert_eq!(b.freq, None);
        // passive mode does not tune the PLL
        assert!(RegisterBank::default().set("freq", "6.9GHz").is_ok());
    }

    #[test]
    fn sensor_and_unknown_keys() {
        assert!(RegisterBank::default().set("sensor_enable", "true").unwrap().sensor_enable);
        assert_eq!(
            RegisterBank::default().set("colour", "red"),
            Err(Error::UnknownRegister("colour".into()))
        );
    }

    #[test]
    fn capability_through_registers() {
        let b = RegisterBank::default();
        assert!(matches!(b.set("data_rate", "4Mbps"), Err(Error::Capability(_))));
        let a = b.set("mode", "active").unwrap().set("data_rate", "4Mbps").unwrap();
        assert!(a.set("mode", "passive").is_err());
    }

    fn arb_write() -> impl Strategy<Value = (&'static str, String)> {
        prop_oneof![
            prop::sample::select(vec!["passive", "active", "sleep", "hover"]).prop_map(|v| ("mode", v.to_string())),
            (1.0e6..8.0e9f64).prop_map(|f| ("freq", format!("{f}"))),
            (-50.0..30.0f64).prop_map(|p| ("power", format!("{p}dBm"))),
            prop::sample::select(vec!["250kbps", "1Mbps", "4Mbps", "3Mbps"]).prop_map(|v| ("data_rate", v.to_string())),
            any::<bool>().prop_map(|v| ("sensor_enable", v.to_string())),
            prop::sample::select(vec!["amp", "aiot", "ble"]).prop_map(|v| ("protocol", v.to_string())),
            (0u8..50).prop_map(|c| ("channel", c.to_string())),
            Just(("bogus", "1".to_string())),
        ]
    }

    proptest! {
        #[test]
        fn failed_writes_leave_no_trace(writes in prop::collection::vec(arb_write(), 1..20)) {
            let mut bank = RegisterBank::default();
            let mut successes = Vec::new();
            for (k, v) in &writes {
                match bank.set(k, v) {
                    Ok(b) => { bank = b; successes.push((*k, v.as_str())); }
                    Err(_) => {}
                }
            }
            let replay = RegisterBank::default().apply_all(successes).unwrap();
            prop_assert_eq!(replay, bank);
        }
    }
}
