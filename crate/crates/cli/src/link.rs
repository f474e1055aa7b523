//! modulate, demodulate, ber-sweep, calibrate-link.

use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ambisim::netsim::{
    ber_sweep as run_sweep, calibrate_link, channel_apply, crossing_distance, io_iq_read, io_iq_write, ConfigFile,
    LinkAnchors, LinkCalibration, Section, SweepAxis, SweepSpec, SWEEP_HEADER,
};
use ambisim::phy::bits::{bits_to_hex, bytes_to_bits_msb};
use ambisim::phy::{ble_adv_build, ble_adv_parse, demodulate as demod};
use ambisim::phy::{modulate as modul, Protocol, ProtocolConfig, TxPath};
use ambisim::units::Unit;
use ambisim::IqBufferF32;

use crate::failure::{CliResult, Failure};
use crate::output::Run;
use crate::setup::{channel, channel_record, link_from_section};
use crate::PhyArgs;

fn parse_path(s: &str) -> CliResult<TxPath> {
    match s {
        "iq" => Ok(TxPath::Iq),
        "passive" => Ok(TxPath::Passive),
        "active" => Ok(TxPath::Active),
        o => Err(Failure::Config(format!("unknown transmit path `{o}` (iq|passive|active)"))),
    }
}

fn hex_bytes(s: &str) -> CliResult<Vec<u8>> {
    let s = s.trim().trim_start_matches("0x");
    if s.len() % 2 != 0 {
        return Err(Failure::Usage(format!("hex payload {s:?} has an odd number of digits")));
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(|e| Failure::Usage(format!("hex payload: {e}"))))
        .collect()
}

#[derive(Args, Debug)]
pub struct ModulateArgs {
    #[command(flatten)]
    phy: PhyArgs,
    /// Payload bytes as hex; random bits from the seed when absent.
    #[arg(long)]
    hex: Option<String>,
    /// Number of random bits when no payload is given.
    #[arg(long, default_value_t = 64)]
    bits: usize,
    /// iq, passive or active.
    #[arg(long, default_value = "iq")]
    path: String,
    /// Pass the waveform through the `[channel]` model at this distance.
    #[arg(long)]
    distance: Option<f64>,
    /// Advertiser address for BLE frames, 12 hex digits.
    #[arg(long, default_value = "C0FFEE000001")]
    adv_address: String,
    #[arg(long, default_value = "tx.iq")]
    output: String,
}

fn payload_bits(run: &Run, a: &ModulateArgs, phy: &ProtocolConfig) -> CliResult<Vec<u8>> {
    let bytes = match &a.hex {
        Some(h) => hex_bytes(h)?,
        None if phy.protocol == Protocol::BleAdv => {
            let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
            (0..a.bits.div_ceil(8).min(31)).map(|_| rng.random()).collect()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
            return Ok((0..a.bits).map(|_| rng.random_range(0..2u8)).collect());
        }
    };
    if phy.protocol != Protocol::BleAdv {
        return Ok(bytes_to_bits_msb(&bytes));
    }
    let addr = hex_bytes(&a.adv_address)?;
    let addr: [u8; 6] = addr
        .try_into()
        .map_err(|_| Failure::Usage("advertiser address must be 6 bytes".into()))?;
    Ok(ble_adv_build(&bytes, addr, phy.channel)?.bits().to_vec())
}

pub fn modulate(run: &mut Run, cfg: &ConfigFile, a: &ModulateArgs) -> CliResult<()> {
    let bank = a.phy.bank(cfg)?;
    let path = parse_path(&a.path)?;
    let bits = payload_bits(run, a, &bank.phy)?;
    let mut iq: IqBufferF32 = modul(&bits, &bank.phy, path)?;
    a.phy.record(run);
    run.param("path", a.path.as_str());
    run.param("bits", bits.len());
    run.param("bits_hex", bits_to_hex(&bits).to_uppercase());
    if let Some(d) = a.distance {
        let ch = channel(cfg, run.seed)?;
        iq = channel_apply(&iq, &ch, d)?;
        channel_record(run, &ch);
        run.param("distance_m", d);
    }
    io_iq_write(&run.path(&a.output), &iq)?;
    run.artifact(&a.output);
    run.artifact(&format!("{}.meta", a.output));
    println!("{} samples at {} Hz -> {}", iq.len(), iq.sample_rate(), run.path(&a.output).display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct DemodulateArgs {
    #[command(flatten)]
    phy: PhyArgs,
    /// IQ file with its `.meta` sidecar.
    #[arg(long)]
    input: PathBuf,
    /// Keep only the first N decided bits.
    #[arg(long)]
    expect_bits: Option<usize>,
}

pub fn demodulate(run: &mut Run, cfg: &ConfigFile, a: &DemodulateArgs) -> CliResult<()> {
    let bank = a.phy.bank(cfg)?;
    let rx = io_iq_read(&a.input)?;
    let mut d = demod(&rx, &bank.phy)?;
    if let Some(n) = a.expect_bits {
        d.bits.truncate(n);
        d.soft.truncate(n);
    }
    a.phy.record(run);
    run.param("input", a.input.display().to_string());
    run.write_csv(
        "demod.csv",
        &["index", "bit", "soft"],
        d.bits.iter().zip(&d.soft).enumerate().map(|(i, (b, s))| vec![i.to_string(), b.to_string(), format!("{s:.6}")]),
    )?;
    println!("bits: 0x{}", bits_to_hex(&d.bits).to_uppercase());
    println!("rssi_dbm: {:.3}", d.rssi_dbm);
    if bank.phy.protocol == Protocol::BleAdv {
        match ble_adv_parse(&d.bits, bank.phy.channel) {
            Ok(p) => println!("ble: crc ok, payload {:02X?}", p.adv_data),
            Err(e) => println!("ble: {e}"),
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    phy: PhyArgs,
    /// distance or ebn0.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated sweep points (m or dB).
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    packet_bytes: Option<usize>,
    /// iq, passive or active.
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    tx_power: Option<f64>,
    #[arg(long)]
    target_ber: Option<f64>,
    /// Use the calibrated `uplink` or `downlink` budget instead of `[channel]`.
    #[arg(long)]
    link: Option<String>,
}

fn text<'a>(arg: &'a Option<String>, sweep: Option<&'a Section>, key: &str) -> Option<&'a str> {
    arg.as_deref().or_else(|| sweep.and_then(|s| s.text(key)))
}

pub fn ber_sweep(run: &mut Run, cfg: &ConfigFile, a: &SweepArgs) -> CliResult<()> {
    let sweep = cfg.section("sweep");
    if let Some(s) = sweep {
        s.expect_keys(&["axis", "points", "bits", "packet_bytes", "path", "tx_power_dbm", "target_ber", "link"])?;
    }
    let link = text(&a.link, sweep, "link");
    let points = match &a.points {
        Some(p) => p
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("sweep point {x:?}: {e}"))))
            .collect::<CliResult<Vec<_>>>()?,
        None => sweep
            .map(|s| s.list("points", Unit::Plain))
            .transpose()?
            .flatten()
            .ok_or_else(|| Failure::Config("no sweep points: give --points or [sweep] points".into()))?,
    };
    let axis = match text(&a.axis, sweep, "axis").unwrap_or("distance") {
        "distance" => SweepAxis::DistanceM(points),
        "ebn0" => SweepAxis::EbN0Db(points),
        o => return Err(Failure::Config(format!("unknown sweep axis `{o}` (distance|ebn0)"))),
    };
    let int = |arg: Option<usize>, key: &str, default: usize| -> CliResult<usize> {
        match arg {
            Some(v) => Ok(v),
            None => Ok(sweep.map(|s| s.int(key)).transpose()?.flatten().map_or(default, |v| v as usize)),
        }
    };
    let float = |arg: Option<f64>, key: &str, unit: Unit| -> CliResult<Option<f64>> {
        match arg {
            Some(v) => Ok(Some(v)),
            None => Ok(sweep.map(|s| s.quantity(key, unit)).transpose()?.flatten()),
        }
    };
    let mut spec = SweepSpec::new(axis, int(a.bits, "bits", 100_000)?, run.seed);
    spec.packet_bytes = int(a.packet_bytes, "packet_bytes", spec.packet_bytes)?;
    if let Some(t) = float(a.target_ber, "target_ber", Unit::Plain)? {
        spec.target_ber = t;
    }

    let (phy, ch, default_path, default_power) = match link {
        Some(which) => {
            let cal = match cfg.section("link") {
                Some(s) => link_from_section(s)?,
                None => calibrate_link(&LinkAnchors::default())?,
            };
            let rate = a.phy.rate.as_deref().map(|r| ambisim::units::parse_quantity(r, Unit::BitRate)).transpose()?;
            match which {
                "uplink" => {
                    let phy = rate.map_or_else(|| cal.uplink_config(), ProtocolConfig::amp_uplink);
                    let mut ch = cal.uplink_channel(run.seed);
                    ch.noise_bandwidth = Some(ambisim::netsim::ook_noise_bandwidth(phy.data_rate));
                    (phy, ch, TxPath::Passive, cal.anchors.gateway_tx_dbm)
                }
                "downlink" => {
                    let phy = rate.map_or_else(|| cal.downlink_config(), ProtocolConfig::amp_downlink);
                    let mut ch = cal.downlink_channel(run.seed);
                    ch.noise_bandwidth = Some(ambisim::netsim::ook_noise_bandwidth(phy.data_rate));
                    (phy, ch, TxPath::Iq, cal.anchors.gateway_tx_dbm)
                }
                o => return Err(Failure::Config(format!("unknown link `{o}` (uplink|downlink)"))),
            }
        }
        None => {
            let bank = a.phy.bank(cfg)?;
            let ch = channel(cfg, run.seed)?;
            let path = match ch.path {
                ambisim::netsim::PathKind::Backscatter { .. } => TxPath::Passive,
                ambisim::netsim::PathKind::Direct => TxPath::Iq,
            };
            (bank.phy, ch, path, 0.0)
        }
    };
    spec.path = match text(&a.path, sweep, "path") {
        Some(p) => parse_path(p)?,
        None => default_path,
    };
    spec.tx_power_dbm = float(a.tx_power, "tx_power_dbm", Unit::Decibel)?.unwrap_or(default_power);

    let rows = run_sweep(&phy, &ch, &spec)?;

    a.phy.record(run);
    if let Some(l) = link {
        run.param("link", l);
    }
    run.param("axis", spec.axis.name());
    run.param("points", spec.axis.points().to_vec());
    run.param("bits_per_point", spec.bits_per_point);
    run.param("packet_bytes", spec.packet_bytes);
    run.param("path", format!("{:?}", spec.path).to_lowercase());
    run.param("tx_power_dbm", spec.tx_power_dbm);
    run.param("target_ber", spec.target_ber);
    run.param("protocol", phy.protocol.to_string());
    run.param("modulation", phy.modulation.to_string());
    run.param("data_rate", phy.data_rate);
    run.param("samples_per_symbol", phy.samples_per_symbol);
    channel_record(run, &ch);
    run.write_csv("ber_sweep.csv", &SWEEP_HEADER, rows.iter().map(|r| r.record()))?;

    for r in &rows {
        println!("{} = {:>8}: ber {:.3e} ± {:.1e}  analytic {:.3e}", spec.axis.name(), r.x, r.ber, r.half_width(), r.analytic_ber);
    }
    if matches!(spec.axis, SweepAxis::DistanceM(_)) {
        match crossing_distance(&rows, 0.01) {
            Some(d) => println!("1% BER crossing: {d:.2} m"),
            None => println!("1% BER crossing: outside the swept range"),
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 44.0)]
    downlink_range: f64,
    #[arg(long, default_value_t = 250e3)]
    downlink_rate: f64,
    /// On-level power at the downlink range, dBm.
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    sensitivity: f64,
    #[arg(long, default_value_t = 28.0)]
    uplink_range: f64,
    #[arg(long, default_value_t = 250e3)]
    uplink_rate: f64,
    #[arg(long, default_value_t = 0.01)]
    target_ber: f64,
    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    tx_power: f64,
    #[arg(long, default_value_t = 0.5)]
    excitation: f64,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
}

pub fn calibrate(run: &mut Run, a: &CalibrateArgs) -> CliResult<()> {
    let anchors = LinkAnchors {
        downlink_range_m: a.downlink_range,
        downlink_rate: a.downlink_rate,
        sensitivity_dbm: a.sensitivity,
        uplink_range_m: a.uplink_range,
        uplink_rate: a.uplink_rate,
        target_ber: a.target_ber,
        gateway_tx_dbm: a.tx_power,
        excitation_m: a.excitation,
        exponent: a.exponent,
    };
    let cal: LinkCalibration = calibrate_link(&anchors)?;
    for (k, v) in [
        ("downlink_range_m", a.downlink_range),
        ("downlink_rate", a.downlink_rate),
        ("sensitivity_dbm", a.sensitivity),
        ("uplink_range_m", a.uplink_range),
        ("uplink_rate", a.uplink_rate),
        ("target_ber", a.target_ber),
        ("gateway_tx_dbm", a.tx_power),
        ("excitation_m", a.excitation),
        ("exponent", a.exponent),
        ("ref_loss_db", cal.ref_loss_db),
        ("downlink_n0_w_hz", cal.downlink_n0),
        ("uplink_n0_w_hz", cal.uplink_n0),
    ] {
        run.param(k, v);
    }
    run.write("link.cfg", cal.to_config())?;
    let mut report = cal.report.join("\n");
    report.push('\n');
    run.write("calibration.txt", &report)?;
    print!("{report}");
    Ok(())
}
