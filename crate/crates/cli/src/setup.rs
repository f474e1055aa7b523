//! Config loading and the register/channel plumbing shared by subcommands.

use std::path::Path;

use ambisim::control::RegisterBank;
use ambisim::netsim::{parse_error, ChannelModel, ConfigFile, LinkAnchors, LinkCalibration, Scenario, Section};
use ambisim::units::Unit;

use crate::failure::{CliResult, Failure};
use crate::PhyArgs;

pub fn load_config(path: Option<&Path>) -> CliResult<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    ConfigFile::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

pub fn split_kv(s: &str) -> CliResult<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Failure::Usage(format!("expected KEY=VALUE, found {s:?}")))
}

impl PhyArgs {
    fn writes(&self) -> Vec<(&'static str, &str)> {
        let mut w = Vec::new();
        // protocol resets the PHY, so it goes first
        for (k, v) in [
            ("protocol", &self.protocol),
            ("modulation", &self.modulation),
            ("data_rate", &self.rate),
            ("samples_per_symbol", &self.sps),
            ("subcarrier", &self.subcarrier),
            ("channel", &self.channel),
            ("line_coding", &self.line_coding),
        ] {
            if let Some(v) = v {
                w.push((k, v.as_str()));
            }
        }
        w
    }

    /// `[device]` registers with the command-line writes applied on top.
    pub fn bank(&self, cfg: &ConfigFile) -> CliResult<RegisterBank> {
        let scn = Scenario::from_config(cfg)?;
        let mut bank = scn.devices[0].registers.clone();
        for (k, v) in self.writes() {
            bank = bank.set(k, v)?;
        }
        for s in &self.sets {
            let (k, v) = split_kv(s)?;
            bank = bank.set(k, v)?;
        }
        Ok(bank)
    }

    pub fn record(&self, run: &mut crate::output::Run) {
        for (k, v) in self.writes() {
            run.param(k, v);
        }
        if !self.sets.is_empty() {
            run.param("set", self.sets.clone());
        }
    }
}

fn required(s: &Section, key: &str, unit: Unit) -> CliResult<f64> {
    s.quantity(key, unit)?
        .ok_or_else(|| parse_error(s.line, format!("[{}] needs `{key}`", s.name)).into())
}

/// Rebuilds a calibration from a frozen `[link]` section.
pub fn link_from_section(s: &Section) -> CliResult<LinkCalibration> {
    s.expect_keys(&["ref_loss_db", "exponent", "downlink_n0", "uplink_n0", "excitation_m", "gateway_tx_dbm"])?;
    let d = LinkAnchors::default();
    let anchors = LinkAnchors {
        exponent: s.quantity_or("exponent", Unit::Plain, d.exponent)?,
        excitation_m: s.quantity_or("excitation_m", Unit::Meters, d.excitation_m)?,
        gateway_tx_dbm: s.quantity_or("gateway_tx_dbm", Unit::Decibel, d.gateway_tx_dbm)?,
        ..d
    };
    Ok(LinkCalibration {
        anchors,
        ref_loss_db: required(s, "ref_loss_db", Unit::Decibel)?,
        downlink_n0: required(s, "downlink_n0", Unit::Plain)?,
        uplink_n0: required(s, "uplink_n0", Unit::Plain)?,
        report: Vec::new(),
    })
}

/// `[channel]` if present, else a noiseless channel with no path loss; the seed always comes from `--seed`.
pub fn channel(cfg: &ConfigFile, seed: u64) -> CliResult<ChannelModel> {
    let scn = Scenario::from_config(cfg)?;
    Ok(scn.channel.with_seed(seed))
}

pub fn channel_record(run: &mut crate::output::Run, ch: &ChannelModel) {
    run.param("channel.path", format!("{:?}", ch.path));
    run.param("channel.exponent", ch.exponent);
    run.param("channel.ref_loss_db", ch.ref_loss_db);
    run.param("channel.noise_density_w_hz", ch.noise_density);
    run.param("channel.noise_bandwidth_hz", ch.noise_bandwidth);
    run.param("channel.seed", ch.seed);
}
