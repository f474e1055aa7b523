use std::collections::{BTreeMap, BTreeSet};

use super::frame::{types, InteractionFrame};
use super::registers::RegisterBank;
use crate::error::Result;
use crate::frontend::RadioMode;
use crate::phy::bits::bytes_to_bits_msb;
use crate::phy::Modulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PowerDomain {
    Fpga,
    Pll,
    Sensor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    EnableDomain(PowerDomain),
    TunePll { freq: f64, power_dbm: f64 },
    ConfigureTopology(RadioMode),
    PhyFrame(InteractionFrame),
    PayloadFrame(InteractionFrame),
    EnterSleep,
}

pub fn modulation_code(m: Modulation) -> u8 {
    match m {
        Modulation::Ook => 0,
        Modulation::Bpsk => 1,
        Modulation::Msk => 2,
        Modulation::Fsk => 3,
        Modulation::Css => 4,
    }
}

/// Translates a bank into hardware commands in dependency order: power
/// domains, PLL (active only), topology, PHY parameter frames, payload frames.
pub fn interpret(bank: &RegisterBank) -> Result<Vec<Command>> {
    bank.check_interpretable()?;
    let Some(radio) = bank.mode.radio() else {
        return Ok(vec![Command::EnterSleep]);
    };
    let mut cmds = vec![Command::EnableDomain(PowerDomain::Fpga)];
    if radio == RadioMode::Active {
        cmds.push(Command::EnableDomain(PowerDomain::Pll));
    }
    if bank.sensor_enable {
        cmds.push(Command::EnableDomain(PowerDomain::Sensor));
    }
    if radio == RadioMode::Active {
        let freq = bank.freq.expect("checked by check_interpretable");
        cmds.push(Command::TunePll {
            freq,
            power_dbm: bank.power_dbm,
        });
    }
    cmds.push(Command::ConfigureTopology(radio));

    let id = bank.device_id;
    let phy = &bank.phy;
    let frame = |ty, v: u64, w| InteractionFrame::with_value(id, ty, v, w).map(Command::PhyFrame);
    cmds.push(frame(types::SAMPLE_RATE, phy.sample_rate().round() as u64, 32)?);
    cmds.push(frame(types::SAMPLE_COUNT, phy.samples_per_symbol as u64, 32)?);
    cmds.push(frame(types::SYMBOL_DURATION, (1e9 / phy.symbol_rate()).round() as u64, 32)?);
    cmds.push(frame(types::MODULATION, u64::from(modulation_code(phy.modulation)), 8)?);
    if let Some(sc) = phy.subcarrier_hz {
        cmds.push(frame(types::SHIFT_FREQ, sc.round() as u64, 32)?);
    }
    for chunk in bank.payload_id.as_bytes().chunks(16) {
        let mut block = chunk.to_vec();
        block.resize(16, 0);
        cmds.push(Command::PayloadFrame(InteractionFrame::new(
            id,
            types::PAYLOAD,
            bytes_to_bits_msb(&block),
        )?));
    }
    Ok(cmds)
}

/// Simulated FPGA-side hardware the commands act on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HardwareModel {
    pub id: u8,
    pub domains: BTreeSet<PowerDomain>,
    pub pll: Option<(f64, f64)>,
    pub topology: Option<RadioMode>,
    /// Latest value per PHY frame type.
    pub phy: BTreeMap<u8, u64>,
    pub payload: Vec<Vec<u8>>,
    pub asleep: bool,
}

impl HardwareModel {
    pub fn new(id: u8) -> Self {
        Self {
            id,
            ..Default::default()
        }
    }

    /// Applies one command batch. A batch containing payload frames replaces
    /// the payload buffer. Frames addressed to another id are dropped and
    /// reported in the returned diagnostics.
    pub fn apply(&mut self, cmds: &[Command]) -> Vec<String> {
        let mut diag = Vec::new();
        let mut payload: Option<Vec<Vec<u8>>> = None;
        for c in cmds {
            match c {
                Command::EnableDomain(d) => {
                    self.asleep = false;
                    self.domains.insert(*d);
                }
                Command::TunePll { freq, power_dbm } => self.pll = Some((*freq, *power_dbm)),
                Command::ConfigureTopology(m) => {
                    self.topology = Some(*m);
                    if *m == RadioMode::Passive {
                        self.domains.remove(&PowerDomain::Pll);
                        self.pll = None;
                    }
                }
                Command::PhyFrame(f) | Command::PayloadFrame(f) if f.id != self.id => {
                    diag.push(format!("dropped frame type {:#04x} for id {:#04x}", f.type_field, f.id));
                }
                Command::PhyFrame(f) => {
                    self.phy.insert(f.type_field, f.value());
                }
                Command::PayloadFrame(f) => payload.get_or_insert_with(Vec::new).push(f.data().to_vec()),
                Command::EnterSleep => {
                    self.domains.clear();
                    self.pll = None;
                    self.topology = None;
                    self.asleep = true;
                }
            }
        }
        if let Some(p) = payload {
            self.payload = p;
        }
        diag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ble_bank() -> RegisterBank {
        RegisterBank::default()
            .apply_all([
                ("protocol", "ble"),
                ("mode", "active"),
                ("power", "+2dBm"),
                ("channel", "37"),
                ("payload_id", "temp-01"),
            ])
            .unwrap()
    }

    #[test]
    fn active_ble_order() {
        let c = interpret(&ble_bank()).unwrap();
        assert_eq!(c[0], Command::EnableDomain(PowerDomain::Fpga));
        assert_eq!(c[1], Command::EnableDomain(PowerDomain::Pll));
        assert_eq!(c[2], Command::TunePll { freq: 2.402e9, power_dbm: 2.0 });
        assert_eq!(c[3], Command::ConfigureTopology(RadioMode::Active));
        assert!(matches!(&c[4], Command::PhyFrame(f) if f.type_field == types::SAMPLE_RATE && f.value() == 8_000_000));
        assert!(matches!(c.last(), Some(Command::PayloadFrame(_))));
    }

    #[test]
    fn passive_has_no_pll() {
        let c = interpret(&RegisterBank::default()).unwrap();
        assert!(!c.iter().any(|c| matches!(c, Command::TunePll { .. } | Command::EnableDomain(PowerDomain::Pll))));
        assert!(c.contains(&Command::ConfigureTopology(RadioMode::Passive)));
    }

    #[test]
    fn deterministic_and_idempotent() {
        let b = ble_bank();
        assert_eq!(interpret(&b).unwrap(), interpret(&b).unwrap());
        let c = interpret(&b).unwrap();
        let mut once = HardwareModel::new(b.device_id);
        once.apply(&c);
        let mut twice = once.clone();
        twice.apply(&c);
        assert_eq!(once, twice);
        assert_eq!(once.pll, Some((2.402e9, 2.0)));
    }

    #[test]
    fn interpretation_errors() {
        let b = RegisterBank::default().set("mode", "active").unwrap();
        let e = interpret(&b).unwrap_err();
        assert!(e.to_string().contains("`freq`"));
        let b = RegisterBank::default().set("sample_rate", "3MHz").unwrap();
        assert!(interpret(&b).unwrap_err().to_string().contains("sample_rate"));
        assert!(interpret(&RegisterBank::default().set("sample_rate", "4MHz").unwrap()).is_ok());
    }

    #[test]
    fn foreign_frames_dropped() {
        let c = interpret(&ble_bank()).unwrap();
        let mut hw = HardwareModel::new(9);
        let d = hw.apply(&c);
        assert!(!d.is_empty());
        assert!(hw.phy.is_empty() && hw.payload.is_empty());
    }

    #[test]
    fn sleep_clears() {
        let mut hw = HardwareModel::new(1);
        hw.apply(&interpret(&ble_bank()).unwrap());
        let s = interpret(&ble_bank().set("mode", "sleep").unwrap()).unwrap();
        assert_eq!(s, vec![Command::EnterSleep]);
        hw.apply(&s);
        assert!(hw.asleep && hw.pll.is_none());
    }
}
