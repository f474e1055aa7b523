//! Fits the log-distance budget to the measured range anchors.

use super::analytic::{analytic_ber, db_to_lin, lin_to_db, required_ebn0};
use super::channel::{ChannelModel, PathKind};
use crate::error::{config, Result};
use crate::phy::{Modulation, ProtocolConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkAnchors {
    /// Downlink OOK reaches this far at `target_ber`.
    pub downlink_range_m: f64,
    pub downlink_rate: f64,
    /// On-level received power at the downlink range, dBm.
    pub sensitivity_dbm: f64,
    /// Passive uplink reaches this far at `target_ber`.
    pub uplink_range_m: f64,
    pub uplink_rate: f64,
    pub target_ber: f64,
    /// Gateway data / excitation tone power.
    pub gateway_tx_dbm: f64,
    /// Exciter-to-tag leg of the passive uplink.
    pub excitation_m: f64,
    pub exponent: f64,
}

impl Default for LinkAnchors {
    fn default() -> Self {
        Self {
            downlink_range_m: 44.0,
            downlink_rate: 250e3,
            sensitivity_dbm: -60.0,
            uplink_range_m: 28.0,
            uplink_rate: 250e3,
            target_ber: 0.01,
            gateway_tx_dbm: 15.0,
            excitation_m: 0.5,
            exponent: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkCalibration {
    pub anchors: LinkAnchors,
    pub ref_loss_db: f64,
    /// Tag envelope-receiver noise density, W/Hz.
    pub downlink_n0: f64,
    /// Gateway receiver noise density, W/Hz.
    pub uplink_n0: f64,
    pub report: Vec<String>,
}

/// Main-lobe noise bandwidth used for OOK receivers: twice the bit rate.
pub fn ook_noise_bandwidth(bit_rate: f64) -> f64 {
    2.0 * bit_rate
}

/// On-level power to average power of a half-duty OOK stream, dB.
const OOK_AVERAGE_DB: f64 = -3.010_299_956_6;

pub fn calibrate_link(a: &LinkAnchors) -> Result<LinkCalibration> {
    let positive = [a.downlink_range_m, a.downlink_rate, a.uplink_range_m, a.uplink_rate, a.excitation_m, a.exponent];
    if positive.iter().any(|v| !(*v > 0.0)) || !(0.0 < a.target_ber && a.target_ber < 0.5) {
        return Err(config("link anchors must be positive and the target BER in (0, 0.5)"));
    }
    let gamma = required_ebn0(Modulation::Ook, a.target_ber);
    let ref_loss_db = a.gateway_tx_dbm - a.sensitivity_dbm - 10.0 * a.exponent * a.downlink_range_m.log10();
    let n0_dl_dbm = a.sensitivity_dbm + OOK_AVERAGE_DB - lin_to_db(a.downlink_rate) - lin_to_db(gamma);
    let ch = ChannelModel { ref_loss_db, exponent: a.exponent, ..Default::default() };
    let p_ul_on = a.gateway_tx_dbm - ch.leg_loss_db(a.excitation_m) - ch.leg_loss_db(a.uplink_range_m);
    let p_ul = p_ul_on + OOK_AVERAGE_DB;
    let n0_ul_dbm = p_ul - lin_to_db(a.uplink_rate) - lin_to_db(gamma);
    let report = vec![
        format!("required Eb/N0 for {:e} OOK BER: {:.3} dB", a.target_ber, lin_to_db(gamma)),
        format!(
            "ref_loss {:.3} dB at 1 m (exponent {}): {} dBm reaches {} dBm at {} m",
            ref_loss_db, a.exponent, a.gateway_tx_dbm, a.sensitivity_dbm, a.downlink_range_m
        ),
        format!("downlink noise density {:.3} dBm/Hz", n0_dl_dbm),
        format!(
            "uplink: {} dBm excitation {} m from the tag, {:.3} dBm average at {} m -> gateway noise density {:.3} dBm/Hz",
            a.gateway_tx_dbm, a.excitation_m, p_ul, a.uplink_range_m, n0_ul_dbm
        ),
        "ref_loss absorbs antenna gains and corridor propagation; it is a fitted constant, not a physical one".into(),
    ];
    Ok(LinkCalibration {
        anchors: *a,
        ref_loss_db,
        downlink_n0: 1e-3 * db_to_lin(n0_dl_dbm),
        uplink_n0: 1e-3 * db_to_lin(n0_ul_dbm),
        report,
    })
}

impl LinkCalibration {
    pub fn downlink_channel(&self, seed: u64) -> ChannelModel {
        ChannelModel {
            path: PathKind::Direct,
            exponent: self.anchors.exponent,
            ref_loss_db: self.ref_loss_db,
            noise_density: self.downlink_n0,
            noise_bandwidth: Some(ook_noise_bandwidth(self.anchors.downlink_rate)),
            noise_offset_hz: 0.0,
            seed,
        }
    }

    pub fn uplink_channel(&self, seed: u64) -> ChannelModel {
        ChannelModel {
            path: PathKind::Backscatter { excitation_m: Some(self.anchors.excitation_m) },
            noise_density: self.uplink_n0,
            noise_bandwidth: Some(ook_noise_bandwidth(self.anchors.uplink_rate)),
            ..self.downlink_channel(seed)
        }
    }

    pub fn downlink_config(&self) -> ProtocolConfig {
        ProtocolConfig::amp_downlink(self.anchors.downlink_rate)
    }

    pub fn uplink_config(&self) -> ProtocolConfig {
        ProtocolConfig::amp_uplink(self.anchors.uplink_rate)
    }

    /// Analytic BER of the OOK link at distance `d` over `ch`.
    pub fn analytic_ber(&self, ch: &ChannelModel, rate: f64, d: f64) -> f64 {
        let p = self.anchors.gateway_tx_dbm - ch.path_loss_db(d) + OOK_AVERAGE_DB;
        let ebn0 = p - lin_to_db(rate) - lin_to_db(ch.noise_density * 1e3);
        analytic_ber(Modulation::Ook, db_to_lin(ebn0))
    }

    /// Distance where the analytic BER reaches the target.
    pub fn analytic_crossing(&self, ch: &ChannelModel, rate: f64) -> f64 {
        let (mut lo, mut hi) = (1e-3f64, 1e6f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if self.analytic_ber(ch, rate, mid) < self.anchors.target_ber {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo * hi).sqrt()
    }

    /// `key = value` lines for a `[link]` config section.
    pub fn to_config(&self) -> String {
        format!(
            "[link]\nref_loss_db = {}\nexponent = {}\ndownlink_n0 = {:e}\nuplink_n0 = {:e}\nexcitation_m = {}\ngateway_tx_dbm = {}\n",
            self.ref_loss_db, self.anchors.exponent, self.downlink_n0, self.uplink_n0, self.anchors.excitation_m, self.anchors.gateway_tx_dbm
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_reproduced() {
        let c = calibrate_link(&LinkAnchors::default()).unwrap();
        assert!((c.ref_loss_db - 42.1309).abs() < 1e-3, "{}", c.ref_loss_db);
        let dl = c.analytic_crossing(&c.downlink_channel(0), 250e3);
        let ul = c.analytic_crossing(&c.uplink_channel(0), 250e3);
        assert!((dl - 44.0).abs() < 1e-6 && (ul - 28.0).abs() < 1e-6, "{dl} {ul}");
        assert!(c.to_config().contains("ref_loss_db = 42.13"));
    }
}
