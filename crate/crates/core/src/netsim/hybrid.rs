//! Gateway-driven active/passive mode selection over a mobility trace.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::analytic::{ber_noncoherent, db_to_lin, lin_to_db, per_from_ber};
use super::calibrate::{calibrate_link, LinkAnchors};
use super::channel::ChannelModel;
use super::mobility::MobilityTrace;
use crate::control::{DeviceMode, LatencyTable};
use crate::energy::PowerProfile;
use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    pub gateway_xy: (f64, f64),
    /// Gateway downlink and excitation power.
    pub gateway_tx_dbm: f64,
    pub active_tx_dbm: f64,
    /// Active→Passive when the uplink RSSI exceeds this.
    pub rssi_threshold_dbm: f64,
    /// Passive→Active also when a received passive beacon is weaker than this.
    pub passive_floor_dbm: Option<f64>,
    pub beacon_interval_s: f64,
    pub packet_bits: usize,
    pub uplink_rate: f64,
    /// Mode command frame length.
    pub command_bits: usize,
    pub downlink_rate: f64,
    /// Per-leg indoor propagation; its noise fields are unused.
    pub channel: ChannelModel,
    /// Gateway noise density for active uplinks, W/Hz.
    pub active_n0: f64,
    /// Gateway noise density for backscatter, W/Hz. Higher than `active_n0`
    /// because the gateway's own carrier leaks into its receiver.
    pub backscatter_n0: f64,
    /// Tag envelope-receiver noise density, W/Hz (the corridor fit by default).
    pub downlink_n0: f64,
    /// Power lost converting the excitation into one switching sideband, dB.
    pub conversion_loss_db: f64,
    pub rssi_sigma_db: f64,
    pub profile: PowerProfile,
    pub latencies: LatencyTable,
}

impl Default for HybridConfig {
    /// 2.4 GHz indoor room: free-space loss at 1 m less 5 dBi of combined
    /// antenna gain, 1 Mbps BLE beacons of 376 bits each second.
    fn default() -> Self {
        Self {
            gateway_xy: (2.0, 2.0),
            gateway_tx_dbm: 20.0,
            active_tx_dbm: 6.0,
            rssi_threshold_dbm: -35.0,
            passive_floor_dbm: None,
            beacon_interval_s: 1.0,
            packet_bits: 376,
            uplink_rate: 1e6,
            command_bits: 48,
            downlink_rate: 250e3,
            channel: ChannelModel { ref_loss_db: 35.2, exponent: 2.0, ..Default::default() },
            active_n0: 1e-3 * db_to_lin(-166.0),
            backscatter_n0: 1e-3 * db_to_lin(-146.0),
            downlink_n0: calibrate_link(&LinkAnchors::default()).expect("default anchors").downlink_n0,
            conversion_loss_db: 20.0 * std::f64::consts::PI.log10(),
            rssi_sigma_db: 2.0,
            profile: PowerProfile::prototype(),
            latencies: LatencyTable::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Hybrid,
    AlwaysActive,
    AlwaysPassive,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Hybrid => "hybrid",
            Policy::AlwaysActive => "always_active",
            Policy::AlwaysPassive => "always_passive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyResult {
    pub policy: Policy,
    pub packets: u64,
    pub delivered: u64,
    pub prr: f64,
    pub energy_j: f64,
    /// Energy relative to Always-Active on the same trace.
    pub normalized_energy: f64,
    pub passive_fraction: f64,
    pub switches: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridReport {
    pub hybrid: PolicyResult,
    pub active: PolicyResult,
    pub passive: PolicyResult,
    /// Distance inside which the active RSSI clears the threshold.
    pub zone_radius_m: f64,
}

impl HybridReport {
    pub fn results(&self) -> [PolicyResult; 3] {
        [self.hybrid, self.active, self.passive]
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.profile.validate()?;
        if !(self.beacon_interval_s > 0.0 && self.uplink_rate > 0.0 && self.downlink_rate > 0.0) {
            return Err(config("beacon interval and rates must be positive"));
        }
        if self.latencies.latency(DeviceMode::Passive, DeviceMode::Active).as_secs_f64() >= self.beacon_interval_s {
            return Err(config("mode switch latency must fit inside a beacon interval"));
        }
        Ok(())
    }

    fn leg(&self, d: f64) -> f64 {
        self.channel.leg_loss_db(d.max(0.1))
    }

    /// Received uplink power at the gateway in `mode`, dBm.
    pub fn uplink_dbm(&self, mode: DeviceMode, d: f64) -> f64 {
        match mode {
            DeviceMode::Passive => self.gateway_tx_dbm - 2.0 * self.leg(d) - self.conversion_loss_db,
            _ => self.active_tx_dbm - self.leg(d),
        }
    }

    fn ebn0(p_dbm: f64, rate: f64, n0: f64) -> f64 {
        db_to_lin(p_dbm - lin_to_db(rate) - lin_to_db(n0 * 1e3))
    }

    /// Beacon delivery probability in `mode` at distance `d`.
    pub fn packet_success(&self, mode: DeviceMode, d: f64) -> f64 {
        let n0 = if mode == DeviceMode::Passive { self.backscatter_n0 } else { self.active_n0 };
        let ber = ber_noncoherent(Self::ebn0(self.uplink_dbm(mode, d), self.uplink_rate, n0));
        1.0 - per_from_ber(ber, self.packet_bits)
    }

    pub fn command_success(&self, d: f64) -> f64 {
        // OOK on-level to average power: −3 dB
        let p = self.gateway_tx_dbm - self.leg(d) - 3.010_299_956_6;
        let ber = ber_noncoherent(Self::ebn0(p, self.downlink_rate, self.downlink_n0));
        1.0 - per_from_ber(ber, self.command_bits)
    }

    pub fn zone_radius(&self) -> f64 {
        let margin = self.active_tx_dbm - self.rssi_threshold_dbm - self.channel.ref_loss_db;
        10f64.powf(margin / (10.0 * self.channel.exponent))
    }
}

/// Per-beacon random numbers shared by all policies.
struct Draws {
    packet: f64,
    rssi: f64,
    command: f64,
}

fn run_policy(cfg: &HybridConfig, policy: Policy, dists: &[f64], draws: &[Draws]) -> PolicyResult {
    let t = cfg.beacon_interval_s;
    let p_active = cfg.profile.power(DeviceMode::Active);
    let lat_pa = cfg.latencies.latency(DeviceMode::Passive, DeviceMode::Active).as_secs_f64();
    let lat_ap = cfg.latencies.latency(DeviceMode::Active, DeviceMode::Passive).as_secs_f64();
    let mut mode = match policy {
        Policy::AlwaysPassive => DeviceMode::Passive,
        _ => DeviceMode::Active,
    };
    let (mut delivered, mut energy, mut passive_beacons, mut switches) = (0u64, 0.0, 0u64, 0u64);
    for (&d, r) in dists.iter().zip(draws) {
        let ok = r.packet < cfg.packet_success(mode, d);
        delivered += u64::from(ok);
        passive_beacons += u64::from(mode == DeviceMode::Passive);
        energy += cfg.profile.power(mode) * t;
        if policy != Policy::Hybrid {
            continue;
        }
        let rssi = cfg.uplink_dbm(mode, d) + cfg.rssi_sigma_db * r.rssi;
        let target = match mode {
            DeviceMode::Active if ok && rssi > cfg.rssi_threshold_dbm => DeviceMode::Passive,
            DeviceMode::Passive if !ok => DeviceMode::Active,
            DeviceMode::Passive if cfg.passive_floor_dbm.is_some_and(|f| rssi < f) => DeviceMode::Active,
            m => m,
        };
        if target != mode && r.command < cfg.command_success(d) {
            // the next interval starts with the switch at active power
            let lat = if target == DeviceMode::Active { lat_pa } else { lat_ap };
            energy += (p_active - cfg.profile.power(target)) * lat;
            mode = target;
            switches += 1;
        }
    }
    let packets = dists.len() as u64;
    PolicyResult {
        policy,
        packets,
        delivered,
        prr: delivered as f64 / packets.max(1) as f64,
        energy_j: energy,
        normalized_energy: 0.0,
        passive_fraction: passive_beacons as f64 / packets.max(1) as f64,
        switches,
    }
}

/// Replays `trace` one beacon per interval and scores the three policies
/// with common random numbers.
pub fn hybrid_policy_run(cfg: &HybridConfig, trace: &MobilityTrace, seed: u64) -> Result<HybridReport> {
    cfg.validate()?;
    let t0 = trace.points()[0].0;
    let n = (trace.duration() / cfg.beacon_interval_s).floor() as usize + 1;
    let dists: Vec<f64> = (0..n)
        .map(|k| {
            let (x, y) = trace.position_at(t0 + k as f64 * cfg.beacon_interval_s);
            ((x - cfg.gateway_xy.0).powi(2) + (y - cfg.gateway_xy.1).powi(2)).sqrt()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Draws> = (0..n)
        .map(|_| Draws {
            packet: rng.random(),
            rssi: rng.sample(StandardNormal),
            command: rng.random(),
        })
        .collect();
    let mut active = run_policy(cfg, Policy::AlwaysActive, &dists, &draws);
    let mut passive = run_policy(cfg, Policy::AlwaysPassive, &dists, &draws);
    let mut hybrid = run_policy(cfg, Policy::Hybrid, &dists, &draws);
    let base = active.energy_j;
    for r in [&mut active, &mut passive, &mut hybrid] {
        r.normalized_energy = r.energy_j / base;
    }
    Ok(HybridReport {
        hybrid,
        active,
        passive,
        zone_radius_m: cfg.zone_radius(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pinned(d: f64) -> MobilityTrace {
        MobilityTrace::new(vec![(0.0, 2.0 + d, 2.0), (600.0, 2.0 + d, 2.0)]).unwrap()
    }

    #[test]
    fn pinned_near_goes_passive() {
        let r = hybrid_policy_run(&HybridConfig::default(), &pinned(0.5), 1).unwrap();
        assert!(r.hybrid.passive_fraction > 0.99);
        assert_eq!(r.hybrid.prr, 1.0);
        assert!(r.hybrid.normalized_energy < 0.11);
    }

    #[test]
    fn pinned_far_stays_active() {
        let r = hybrid_policy_run(&HybridConfig::default(), &pinned(15.0), 1).unwrap();
        assert_eq!(r.hybrid.passive_fraction, 0.0);
        assert!(r.passive.prr < 0.01);
        assert_eq!(r.hybrid.prr, r.active.prr);
    }

    #[test]
    fn zone_radius_matches_threshold() {
        let c = HybridConfig::default();
        let d = c.zone_radius();
        assert!((c.uplink_dbm(DeviceMode::Active, d) - c.rssi_threshold_dbm).abs() < 1e-9);
    }
}
