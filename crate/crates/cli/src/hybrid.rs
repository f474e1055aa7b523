//! hybrid-demo.

use std::fs::File;
use std::path::PathBuf;

use clap::Args;

use ambisim::netsim::{
    hybrid_policy_run, point_seed, random_waypoint, ConfigFile, HybridConfig, MobilityTrace, Room, WaypointConfig,
};

use crate::failure::{CliResult, Failure};
use crate::output::Run;

#[derive(Args, Debug)]
pub struct HybridArgs {
    /// Number of seeded random-waypoint traces.
    #[arg(long, default_value_t = 1)]
    traces: usize,
    /// Replay this `time_s,x_m,y_m` CSV instead of generating traces.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Active→Passive RSSI threshold, dBm.
    #[arg(long, default_value_t = -35.0, allow_hyphen_values = true)]
    threshold: f64,
    /// Return to active when a passive beacon arrives weaker than this, dBm.
    #[arg(long, allow_hyphen_values = true)]
    passive_floor: Option<f64>,
    /// Generated trace length, s.
    #[arg(long, default_value_t = 4.0 * 3600.0)]
    duration: f64,
    #[arg(long, default_value_t = 4.0)]
    room_width: f64,
    #[arg(long, default_value_t = 4.0)]
    room_depth: f64,
    /// Write the generated trace(s) as mobility_<n>.csv.
    #[arg(long)]
    write_traces: bool,
}

pub fn hybrid_demo(run: &mut Run, _cfg: &ConfigFile, a: &HybridArgs) -> CliResult<()> {
    let hc = HybridConfig {
        rssi_threshold_dbm: a.threshold,
        passive_floor_dbm: a.passive_floor,
        gateway_xy: (a.room_width / 2.0, a.room_depth / 2.0),
        ..HybridConfig::default()
    };
    let wp = WaypointConfig {
        room: Room { width_m: a.room_width, depth_m: a.room_depth },
        duration_s: a.duration,
        ..WaypointConfig::default()
    };
    let traces: Vec<(u64, MobilityTrace)> = match &a.trace {
        Some(p) => {
            let f = File::open(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            vec![(run.seed, MobilityTrace::read_csv(f)?)]
        }
        None => (0..a.traces)
            .map(|i| {
                let s = point_seed(run.seed, i);
                Ok((s, random_waypoint(&wp, s)?))
            })
            .collect::<CliResult<_>>()?,
    };
    if traces.is_empty() {
        return Err(Failure::Usage("--traces must be at least 1".into()));
    }

    run.param("traces", traces.len());
    run.param("trace_file", a.trace.as_ref().map(|p| p.display().to_string()));
    run.param("rssi_threshold_dbm", hc.rssi_threshold_dbm);
    run.param("passive_floor_dbm", hc.passive_floor_dbm);
    run.param("gateway_xy", vec![hc.gateway_xy.0, hc.gateway_xy.1]);
    run.param("gateway_tx_dbm", hc.gateway_tx_dbm);
    run.param("active_tx_dbm", hc.active_tx_dbm);
    run.param("beacon_interval_s", hc.beacon_interval_s);
    run.param("packet_bits", hc.packet_bits);
    run.param("uplink_rate", hc.uplink_rate);
    run.param("command_bits", hc.command_bits);
    run.param("downlink_rate", hc.downlink_rate);
    run.param("ref_loss_db", hc.channel.ref_loss_db);
    run.param("exponent", hc.channel.exponent);
    run.param("rssi_sigma_db", hc.rssi_sigma_db);
    run.param("zone_radius_m", hc.zone_radius());
    if a.trace.is_none() {
        run.param("room_m", vec![a.room_width, a.room_depth]);
        run.param("duration_s", a.duration);
    }

    let mut rows = Vec::new();
    for (i, (seed, tr)) in traces.iter().enumerate() {
        if a.write_traces && a.trace.is_none() {
            let name = format!("mobility_{i}.csv");
            tr.write_csv(File::create(run.path(&name))?)?;
            run.artifact(&name);
        }
        let rep = hybrid_policy_run(&hc, tr, *seed)?;
        for r in rep.results() {
            rows.push(vec![
                i.to_string(),
                seed.to_string(),
                r.policy.to_string(),
                r.packets.to_string(),
                r.delivered.to_string(),
                format!("{:.6}", r.prr),
                format!("{:.6}", r.energy_j),
                format!("{:.6}", r.normalized_energy),
                format!("{:.6}", r.passive_fraction),
                r.switches.to_string(),
            ]);
        }
        println!(
            "trace {i}: hybrid prr {:.4} energy {:.3} | always-active prr {:.4} | always-passive prr {:.4} energy {:.3}",
            rep.hybrid.prr, rep.hybrid.normalized_energy, rep.active.prr, rep.passive.prr, rep.passive.normalized_energy
        );
    }
    run.write_csv(
        "hybrid.csv",
        &[
            "trace",
            "seed",
            "policy",
            "packets",
            "delivered",
            "prr",
            "energy_j",
            "energy_norm_to_always_active",
            "passive_fraction",
            "switches",
        ],
        rows,
    )?;
    Ok(())
}
