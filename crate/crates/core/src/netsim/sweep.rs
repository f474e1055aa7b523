use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::analytic::{analytic_ber, db_to_lin, lin_to_db, wilson_interval};
use super::channel::{add_noise, channel_apply, ChannelModel, PathKind};
use crate::dsp::mean_power;
use crate::error::{config, Result};
use crate::frontend::IqBuffer;
use crate::phy::{demodulate, modulate, LineCoding, Modulation, ProtocolConfig, TxPath};

pub const DEFAULT_PACKET_BYTES: usize = 128;
const WILSON_Z: f64 = 1.959_963_985;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    DistanceM(Vec<f64>),
    /// Eb/N0 at the receiver; path loss is bypassed.
    EbN0Db(Vec<f64>),
}

impl SweepAxis {
    pub fn points(&self) -> &[f64] {
        match self {
            SweepAxis::DistanceM(v) | SweepAxis::EbN0Db(v) => v,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::DistanceM(_) => "distance_m",
            SweepAxis::EbN0Db(_) => "ebn0_db",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub bits_per_point: usize,
    pub packet_bytes: usize,
    pub path: TxPath,
    /// Transmit (or excitation) power at the antenna for distance sweeps.
    pub tx_power_dbm: f64,
    pub seed: u64,
    /// BER the sweep should resolve; only used for the sample-size warning.
    pub target_ber: f64,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, bits_per_point: usize, seed: u64) -> Self {
        Self {
            axis,
            bits_per_point,
            packet_bytes: DEFAULT_PACKET_BYTES,
            path: TxPath::Iq,
            tx_power_dbm: 0.0,
            seed,
            target_ber: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub x: f64,
    /// Eb/N0 at the receiver input, dB (infinite when noiseless).
    pub ebn0_db: f64,
    pub rx_power_dbm: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub packets: u64,
    pub packet_errors: u64,
    pub per: f64,
    pub goodput_bps: f64,
    pub analytic_ber: f64,
    pub seed: u64,
}

impl SweepRow {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

pub const SWEEP_HEADER: [&str; 16] = [
    "index",
    "x",
    "ebn0_db",
    "rx_power_dbm",
    "bits",
    "errors",
    "ber",
    "ci_low",
    "ci_high",
    "ci_half_width",
    "packets",
    "packet_errors",
    "per",
    "goodput_bps",
    "analytic_ber",
    "seed",
];

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            format!("{}", self.x),
            format!("{:.4}", self.ebn0_db),
            format!("{:.4}", self.rx_power_dbm),
            self.bits.to_string(),
            self.errors.to_string(),
            format!("{:.6e}", self.ber),
            format!("{:.6e}", self.ci_low),
            format!("{:.6e}", self.ci_high),
            format!("{:.6e}", self.half_width()),
            self.packets.to_string(),
            self.packet_errors.to_string(),
            format!("{:.6}", self.per),
            format!("{:.3}", self.goodput_bps),
            format!("{:.6e}", self.analytic_ber),
            self.seed.to_string(),
        ]
    }
}

/// Paths a protocol may use over a given channel.
fn check_combination(cfg: &ProtocolConfig, ch: &ChannelModel, spec: &SweepSpec) -> Result<()> {
    cfg.validate()?;
    ch.validate()?;
    let backscatter = matches!(ch.path, PathKind::Backscatter { .. });
    match (spec.path, backscatter) {
        (TxPath::Passive, false) => {
            return Err(config("passive transmission needs a backscatter channel"));
        }
        (TxPath::Active | TxPath::Iq, true) => {
            return Err(config("a backscatter channel needs the passive path"));
        }
        _ => {}
    }
    if spec.bits_per_point == 0 || spec.packet_bytes == 0 {
        return Err(config("bits per point and packet length must be positive"));
    }
    if let SweepAxis::DistanceM(d) = &spec.axis {
        if let Some(x) = d.iter().find(|x| !(**x > 0.0)) {
            return Err(config(format!("sweep distance {x} m must be positive")));
        }
    }
    if cfg.modulation == Modulation::Ook && cfg.line_coding == LineCoding::Manchester && spec.path == TxPath::Iq && cfg.subcarrier_hz.is_some()
    {
        return Err(config("Manchester OOK with a subcarrier is not modelled"));
    }
    Ok(())
}

/// Point seed: master seed XOR point index.
pub fn point_seed(master: u64, index: usize) -> u64 {
    master ^ index as u64
}

struct PacketResult {
    bits: u64,
    errors: u64,
}

fn run_packet(
    cfg: &ProtocolConfig,
    ch: &ChannelModel,
    spec: &SweepSpec,
    x: f64,
    seed: u64,
    packet: u64,
    n_bits: usize,
) -> Result<PacketResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(packet);
    let bits: Vec<u8> = (0..n_bits).map(|_| rng.random_range(0..2u8)).collect();
    let noise_seed = rng.next_u64();
    let mut tx: IqBuffer<f64> = modulate(&bits, cfg, spec.path)?;
    let rx = match spec.axis {
        SweepAxis::DistanceM(_) => {
            tx.scale(10f64.powf(spec.tx_power_dbm / 20.0));
            channel_apply(&tx, &ch.with_seed(noise_seed), x)?
        }
        SweepAxis::EbN0Db(_) => {
            // Eb from the transmitted waveform's average power
            let eb = mean_power(tx.samples()) / cfg.data_rate;
            let n0_mw = eb / db_to_lin(x);
            let noisy = ChannelModel { noise_density: n0_mw * 1e-3, seed: noise_seed, ..*ch };
            add_noise(&mut tx, &noisy)?;
            tx
        }
    };
    let d = demodulate(&rx, cfg)?;
    let errors = d.bits.iter().zip(&bits).filter(|(a, b)| a != b).count() + bits.len().saturating_sub(d.bits.len());
    Ok(PacketResult {
        bits: bits.len() as u64,
        errors: errors as u64,
    })
}

/// Operating point of a sweep abscissa: `(Eb/N0 dB, rx power dBm)`.
fn operating_point(cfg: &ProtocolConfig, ch: &ChannelModel, spec: &SweepSpec, x: f64) -> Result<(f64, f64)> {
    let probe: IqBuffer<f64> = modulate(&[0, 1, 1, 0, 1, 0, 0, 1], cfg, spec.path)?;
    let p_tx = lin_to_db(mean_power(probe.samples())) + spec.tx_power_dbm;
    match spec.axis {
        SweepAxis::EbN0Db(_) => Ok((x, p_tx)),
        SweepAxis::DistanceM(_) => {
            let p_rx = p_tx - ch.path_loss_db(x);
            let n0_dbm_hz = lin_to_db(ch.noise_density * 1e3);
            Ok((p_rx - lin_to_db(cfg.data_rate) - n0_dbm_hz, p_rx))
        }
    }
}

/// Monte-Carlo BER over the sweep. Points run in parallel, each on its own
/// RNG stream, in packets of `packet_bytes`.
pub fn ber_sweep(cfg: &ProtocolConfig, ch: &ChannelModel, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    check_combination(cfg, ch, spec)?;
    if (spec.bits_per_point as f64) < 10.0 / spec.target_ber {
        log::warn!(
            "{} bits per point cannot resolve a BER of {:e}; use at least {}",
            spec.bits_per_point,
            spec.target_ber,
            (10.0 / spec.target_ber).ceil()
        );
    }
    let packet_bits = spec.packet_bytes * 8;
    let n_packets = spec.bits_per_point.div_ceil(packet_bits);
    spec.axis
        .points()
        .par_iter()
        .enumerate()
        .map(|(index, &x)| {
            let seed = point_seed(spec.seed, index);
            let results: Result<Vec<PacketResult>> = (0..n_packets)
                .into_par_iter()
                .map(|p| {
                    let n = packet_bits.min(spec.bits_per_point - p * packet_bits);
                    run_packet(cfg, ch, spec, x, seed, p as u64, n)
                })
                .collect();
            let results = results?;
            let bits: u64 = results.iter().map(|r| r.bits).sum();
            let errors: u64 = results.iter().map(|r| r.errors).sum();
            let packet_errors = results.iter().filter(|r| r.errors > 0).count() as u64;
            let packets = results.len() as u64;
            let (ebn0_db, rx_power_dbm) = operating_point(cfg, ch, spec, x)?;
            let (ci_low, ci_high) = wilson_interval(errors, bits, WILSON_Z);
            let per = packet_errors as f64 / packets as f64;
            Ok(SweepRow {
                index,
                x,
                ebn0_db,
                rx_power_dbm,
                bits,
                errors,
                ber: errors as f64 / bits as f64,
                ci_low,
                ci_high,
                packets,
                packet_errors,
                per,
                goodput_bps: cfg.data_rate * (1.0 - per),
                analytic_ber: analytic_ber(cfg.modulation, db_to_lin(ebn0_db)),
                seed,
            })
        })
        .collect()
}

/// Distance where a BER curve crosses `target`, by log-linear interpolation
/// between the bracketing points. `None` if the sweep never brackets it.
pub fn crossing_distance(rows: &[SweepRow], target: f64) -> Option<f64> {
    let floor = |b: f64| b.max(1e-12).ln();
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.ber <= target && b.ber > target {
            let t = (floor(target) - floor(a.ber)) / (floor(b.ber) - floor(a.ber));
            Some(a.x + t * (b.x - a.x))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_is_error_free() {
        let spec = SweepSpec::new(SweepAxis::DistanceM(vec![1.0, 10.0, 100.0]), 4096, 1);
        let rows = ber_sweep(&ProtocolConfig::aiot_bpsk(1e5), &ChannelModel::default(), &spec).unwrap();
        assert!(rows.iter().all(|r| r.errors == 0 && r.goodput_bps == 1e5));
    }

    #[test]
    fn deterministic() {
        let spec = SweepSpec::new(SweepAxis::EbN0Db(vec![2.0, 4.0]), 5000, 9);
        let cfg = ProtocolConfig::aiot_fsk(1e5);
        let a = ber_sweep(&cfg, &ChannelModel::default(), &spec).unwrap();
        let b = ber_sweep(&cfg, &ChannelModel::default(), &spec).unwrap();
        assert_eq!(a, b);
        assert!(a[0].errors > a[1].errors);
    }

    #[test]
    fn rejects_bad_combination() {
        let mut spec = SweepSpec::new(SweepAxis::DistanceM(vec![1.0]), 100, 1);
        spec.path = TxPath::Passive;
        assert!(ber_sweep(&ProtocolConfig::amp_uplink(250e3), &ChannelModel::default(), &spec).is_err());
    }

    #[test]
    fn crossing_interpolates() {
        let row = |x, ber| SweepRow {
            index: 0,
            x,
            ebn0_db: 0.0,
            rx_power_dbm: 0.0,
            bits: 1,
            errors: 0,
            ber,
            ci_low: 0.0,
            ci_high: 0.0,
            packets: 0,
            packet_errors: 0,
            per: 0.0,
            goodput_bps: 0.0,
            analytic_ber: 0.0,
            seed: 0,
        };
        let rows = [row(10.0, 1e-3), row(20.0, 1e-1)];
        assert!((crossing_distance(&rows, 1e-2).unwrap() - 15.0).abs() < 1e-9);
        assert_eq!(crossing_distance(&rows[..1], 1e-2), None);
    }
}
