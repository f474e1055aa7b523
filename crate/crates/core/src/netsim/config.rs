//! Sectioned `key = value` configuration text and the scenario built from it.

use std::collections::BTreeSet;

use super::channel::{ChannelModel, PathKind};
use crate::control::RegisterBank;
use crate::energy::{EnergyMode, EnergyState};
use crate::error::{Error, Result};
use crate::units::{parse_int, parse_quantity, Unit};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    /// Rejects keys outside `allowed`.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(parse_error(e.line, format!("unknown key `{}` in [{}]", e.key, self.name))),
            None => Ok(()),
        }
    }

    pub fn quantity(&self, key: &str, unit: Unit) -> Result<Option<f64>> {
        self.get(key)
            .map(|e| parse_quantity(&e.value, unit).map_err(|err| at(e, err)))
            .transpose()
    }

    pub fn quantity_or(&self, key: &str, unit: Unit, default: f64) -> Result<f64> {
        Ok(self.quantity(key, unit)?.unwrap_or(default))
    }

    pub fn int(&self, key: &str) -> Result<Option<u64>> {
        self.get(key).map(|e| parse_int(&e.value).map_err(|err| at(e, err))).transpose()
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str, unit: Unit) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|v| parse_quantity(v, unit).map_err(|err| at(e, err)))
                    .collect()
            })
            .transpose()
    }
}

pub fn parse_error(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("line {line}"),
        reason: reason.into(),
    }
}

/// Re-homes an error onto the entry's line.
pub fn at(e: &Entry, err: Error) -> Error {
    match err {
        Error::Parse { .. } => err,
        other => parse_error(e.line, format!("`{}`: {other}", e.key)),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub sections: Vec<Section>,
}

impl ConfigFile {
    /// Keys before the first header land in a section named `""`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = vec![Section { name: String::new(), line: 0, entries: Vec::new() }];
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_error(n, "unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    return Err(parse_error(n, "empty section name"));
                }
                sections.push(Section { name: name.to_string(), line: n, entries: Vec::new() });
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| parse_error(n, format!("expected key = value, found {line:?}")))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(parse_error(n, "empty key"));
            }
            sections.last_mut().expect("root section").entries.push(Entry {
                key: key.to_string(),
                value: v.trim().to_string(),
                line: n,
            });
        }
        Ok(Self { sections })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().rev().find(|s| s.name == name)
    }

    pub fn sections_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections
            .iter()
            .filter(move |s| s.name == prefix || s.name.strip_prefix(prefix).is_some_and(|r| r.starts_with('.')))
    }

    /// Fails on any section outside `known` (prefix matches allow `name.N`).
    pub fn expect_sections(&self, known: &[&str]) -> Result<()> {
        for s in &self.sections {
            let base = s.name.split('.').next().unwrap_or("");
            if !s.name.is_empty() && !known.contains(&base) {
                return Err(parse_error(s.line, format!("unknown section [{}]", s.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    pub registers: RegisterBank,
    pub energy: EnergyState,
    pub position: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Excitation {
    /// Unmodulated carrier.
    Tone,
    /// Carrier keyed with downlink data.
    Ook,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gateway {
    pub tx_power_dbm: f64,
    pub excitation: Excitation,
    pub position: (f64, f64),
}

impl Default for Gateway {
    fn default() -> Self {
        Self {
            tx_power_dbm: 15.0,
            excitation: Excitation::Tone,
            position: (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub devices: Vec<Device>,
    pub gateway: Gateway,
    pub channel: ChannelModel,
    pub duration: f64,
    pub metrics: BTreeSet<String>,
}

const CHANNEL_KEYS: &[&str] = &[
    "path",
    "exponent",
    "ref_loss_db",
    "noise_density",
    "noise_density_dbm_hz",
    "noise_bandwidth",
    "noise_offset",
    "excitation_m",
    "seed",
];
const DEVICE_ENERGY_KEYS: &[&str] = &["capacitance", "voltage", "leakage", "v_max", "position"];
pub const METRICS: &[&str] = &["ber", "goodput", "prr", "energy", "duty", "latency"];

fn position(e: &Entry) -> Result<(f64, f64)> {
    let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => {
            let x = parse_quantity(x, Unit::Meters).map_err(|err| at(e, err))?;
            let y = parse_quantity(y, Unit::Meters).map_err(|err| at(e, err))?;
            Ok((x, y))
        }
        _ => Err(parse_error(e.line, format!("position must be `x, y`, found {:?}", e.value))),
    }
}

pub fn parse_channel(s: &Section) -> Result<ChannelModel> {
    s.expect_keys(CHANNEL_KEYS)?;
    let mut ch = ChannelModel::default();
    let excitation_m = s.quantity("excitation_m", Unit::Meters)?;
    if let Some(e) = s.get("path") {
        ch.path = match e.value.as_str() {
            "direct" => PathKind::Direct,
            "backscatter" => PathKind::Backscatter { excitation_m },
            other => return Err(parse_error(e.line, format!("unknown path {other:?} (direct|backscatter)"))),
        };
    }
    ch.exponent = s.quantity_or("exponent", Unit::Plain, ch.exponent)?;
    ch.ref_loss_db = s.quantity_or("ref_loss_db", Unit::Decibel, ch.ref_loss_db)?;
    if let Some(n0) = s.quantity("noise_density", Unit::Plain)? {
        ch.noise_density = n0;
    }
    if let Some(dbm) = s.quantity("noise_density_dbm_hz", Unit::Decibel)? {
        ch.noise_density = 1e-3 * 10f64.powf(dbm / 10.0);
    }
    ch.noise_bandwidth = s.quantity("noise_bandwidth", Unit::Hertz)?;
    ch.noise_offset_hz = s.quantity_or("noise_offset", Unit::Hertz, 0.0)?;
    if let Some(seed) = s.int("seed")? {
        ch.seed = seed;
    }
    ch.validate().map_err(|err| parse_error(s.line, format!("[{}]: {err}", s.name)))?;
    Ok(ch)
}

fn parse_device(s: &Section) -> Result<Device> {
    let mut bank = RegisterBank::default();
    let mut energy = EnergyState::default();
    let mut pos = (0.0, 0.0);
    for e in &s.entries {
        match e.key.as_str() {
            "capacitance" => energy.capacitance = parse_quantity(&e.value, Unit::Farads).map_err(|err| at(e, err))?,
            "voltage" => energy.voltage = parse_quantity(&e.value, Unit::Volts).map_err(|err| at(e, err))?,
            "leakage" => energy.leakage = parse_quantity(&e.value, Unit::Amperes).map_err(|err| at(e, err))?,
            "v_max" => energy.v_max = parse_quantity(&e.value, Unit::Volts).map_err(|err| at(e, err))?,
            "position" => pos = position(e)?,
            key => {
                bank = bank.set(key, &e.value).map_err(|err| match err {
                    Error::UnknownRegister(k) => parse_error(e.line, format!("unknown register `{k}`")),
                    other => at(e, other),
                })?;
            }
        }
    }
    energy.v_activate = bank.energy.v_activate;
    energy.v_cutoff = bank.energy.v_cutoff;
    if energy.voltage >= energy.v_activate {
        energy.mode = EnergyMode::Sleeping;
    }
    energy
        .validate()
        .map_err(|err| parse_error(s.line, format!("[{}]: {err}", s.name)))?;
    debug_assert!(DEVICE_ENERGY_KEYS.contains(&"position"));
    Ok(Device { registers: bank, energy, position: pos })
}

fn parse_gateway(s: &Section) -> Result<Gateway> {
    s.expect_keys(&["tx_power_dbm", "excitation", "position"])?;
    let mut g = Gateway::default();
    g.tx_power_dbm = s.quantity_or("tx_power_dbm", Unit::Decibel, g.tx_power_dbm)?;
    if let Some(e) = s.get("excitation") {
        g.excitation = match e.value.as_str() {
            "tone" => Excitation::Tone,
            "ook" => Excitation::Ook,
            other => return Err(parse_error(e.line, format!("unknown excitation {other:?} (tone|ook)"))),
        };
    }
    if let Some(e) = s.get("position") {
        g.position = position(e)?;
    }
    Ok(g)
}

impl Scenario {
    /// Builds a scenario from `[device]`/`[device.N]`, `[gateway]`,
    /// `[channel]` and `[run]`; other sections are left to their consumers.
    pub fn from_config(cfg: &ConfigFile) -> Result<Self> {
        let devices = cfg.sections_named("device").map(parse_device).collect::<Result<Vec<_>>>()?;
        let devices = if devices.is_empty() {
            vec![Device {
                registers: RegisterBank::default(),
                energy: EnergyState::default(),
                position: (1.0, 0.0),
            }]
        } else {
            devices
        };
        let gateway = cfg.section("gateway").map(parse_gateway).transpose()?.unwrap_or_default();
        let channel = cfg.section("channel").map(parse_channel).transpose()?.unwrap_or_default();
        let mut duration = 1.0;
        let mut metrics: BTreeSet<String> = ["ber".to_string()].into();
        if let Some(run) = cfg.section("run") {
            run.expect_keys(&["duration", "metrics"])?;
            duration = run.quantity_or("duration", Unit::Seconds, duration)?;
            if let Some(e) = run.get("metrics") {
                metrics = BTreeSet::new();
                for m in e.value.split(',').map(str::trim) {
                    if !METRICS.contains(&m) {
                        return Err(parse_error(e.line, format!("unknown metric `{m}`")));
                    }
                    metrics.insert(m.to_string());
                }
            }
            if !(duration > 0.0) {
                return Err(parse_error(run.line, "duration must be positive"));
            }
        }
        Ok(Self { devices, gateway, channel, duration, metrics })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_config(&ConfigFile::parse(text)?)
    }
}

/// Reads and parses a scenario file.
pub fn scenario_parse(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::parse(&text).map_err(|e| match e {
        Error::Parse { location, reason } => Error::Parse {
            location: format!("{}:{}", path.display(), location.trim_start_matches("line ")),
            reason,
        },
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# uplink test
[gateway]
tx_power_dbm = 15
[channel]
path = backscatter
excitation_m = 0.5
ref_loss_db = 42.13
noise_density_dbm_hz = -158
[device.1]
protocol = amp
data_rate = 250kbps
capacitance = 90mF
voltage = 3.0
position = 10, 0
[run]
duration = 2s
metrics = ber, energy
";

    #[test]
    fn full_scenario() {
        let s = Scenario::parse(GOOD).unwrap();
        assert_eq!(s.devices.len(), 1);
        assert_eq!(s.devices[0].position, (10.0, 0.0));
        assert_eq!(s.devices[0].energy.voltage, 3.0);
        assert_eq!(s.channel.path, PathKind::Backscatter { excitation_m: Some(0.5) });
        assert!((s.channel.noise_density - 1.58489e-19).abs() < 1e-23);
        assert_eq!(s.duration, 2.0);
        assert!(s.metrics.contains("energy"));
    }

    #[test]
    fn unknown_register_names_key_and_line() {
        let text = "[device]\nprotocol = amp\ncolour = red\n";
        match Scenario::parse(text).unwrap_err() {
            Error::Parse { location, reason } => {
                assert_eq!(location, "line 3");
                assert!(reason.contains("colour"), "{reason}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(ConfigFile::parse("[x\n"), Err(Error::Parse { .. })));
        let e = ConfigFile::parse("a = 1\nnonsense\n").unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "line 2"));
        let e = Scenario::parse("[channel]\nexponent = -1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = Scenario::parse("[device]\ndata_rate = fast\n").unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "line 2"), "{e}");
    }
}
