//! energy-sim.

use std::fs::File;
use std::path::PathBuf;

use clap::Args;

use ambisim::control::{DeviceMode, LatencyTable};
use ambisim::energy::{
    calibrate_harvesters, read_harvest_trace, run_duty_cycle_mode, run_exhaustion_mode, write_timeline_csv,
    DutySchedule, HarvestSource, PowerProfile, SimConfig, Timeline,
};
use ambisim::netsim::{ConfigFile, Scenario};

use crate::failure::{CliResult, Failure};
use crate::output::Run;

#[derive(Args, Debug)]
pub struct EnergyArgs {
    /// duty or exhaustion.
    #[arg(long, default_value = "duty")]
    mode: String,
    /// rf, led, sunlight, battery or trace.
    #[arg(long, default_value = "rf")]
    source: String,
    /// RF transmitter EIRP, dBm.
    #[arg(long, default_value_t = 36.0, allow_hyphen_values = true)]
    eirp: f64,
    /// RF transmitter distance, m.
    #[arg(long, default_value_t = 0.3)]
    distance: f64,
    /// Light irradiance, W/m².
    #[arg(long, default_value_t = 164.0)]
    irradiance: f64,
    /// Constant harvested power for `battery`, mW (before the converter).
    #[arg(long, default_value_t = 5.0)]
    harvest_mw: f64,
    /// Two-column (time_s, power_w) CSV for `trace`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// passive or active.
    #[arg(long, default_value = "passive")]
    task: String,
    /// Task draw override, mW; defaults to the profile's power in the task mode.
    #[arg(long)]
    task_mw: Option<f64>,
    /// prototype or asic.
    #[arg(long, default_value = "prototype")]
    profile: String,
    /// RTC wake period in duty mode, s.
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    /// Task length per wake, s; defaults to the whole period.
    #[arg(long)]
    on_time: Option<f64>,
    #[arg(long, default_value_t = 600.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0.1)]
    record_interval: f64,
    /// Storage capacitance override, F.
    #[arg(long)]
    capacitance: Option<f64>,
    /// Initial voltage override, V.
    #[arg(long)]
    voltage: Option<f64>,
}

fn source(a: &EnergyArgs, cal: &ambisim::energy::HarvestCalibration) -> CliResult<HarvestSource> {
    Ok(match a.source.as_str() {
        "rf" => cal.rf(a.eirp, a.distance),
        "led" => cal.led(a.irradiance),
        "sunlight" => cal.sunlight(a.irradiance),
        "battery" => HarvestSource::Battery(a.harvest_mw * 1e-3),
        "trace" => {
            let p = a.trace.as_ref().ok_or_else(|| Failure::Usage("--source trace needs --trace FILE".into()))?;
            let f = File::open(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            HarvestSource::Trace(read_harvest_trace(f)?)
        }
        o => return Err(Failure::Config(format!("unknown source `{o}` (rf|led|sunlight|battery|trace)"))),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

pub fn energy_sim(run: &mut Run, cfg: &ConfigFile, a: &EnergyArgs) -> CliResult<()> {
    let scn = Scenario::from_config(cfg)?;
    let mut state = scn.devices[0].energy;
    if let Some(c) = a.capacitance {
        state.capacitance = c;
    }
    if let Some(v) = a.voltage {
        state = state.with_voltage(v);
    }
    let profile = match a.profile.as_str() {
        "prototype" => PowerProfile::prototype(),
        "asic" => PowerProfile::asic(),
        o => return Err(Failure::Config(format!("unknown profile `{o}` (prototype|asic)"))),
    };
    let task: DeviceMode = a.task.parse()?;
    if task == DeviceMode::Sleep {
        return Err(Failure::Config("the task mode cannot be sleep".into()));
    }
    let cal = calibrate_harvesters(&profile, &state)?;
    let src = source(a, &cal)?;
    let sim = SimConfig { dt: a.dt, record_interval: a.record_interval, ..SimConfig::default() };
    let task_power = a.task_mw.map_or_else(|| profile.power(task), |mw| mw * 1e-3);

    let tl: Timeline = match a.mode.as_str() {
        "duty" => {
            let schedule = DutySchedule { period: a.period, on_duration: a.on_time.unwrap_or(a.period), task };
            run_duty_cycle_mode(&state, &profile, &src, &schedule, &LatencyTable::default(), a.horizon, &sim)?
        }
        "exhaustion" => run_exhaustion_mode(&state, &profile, &src, task_power, a.horizon, &sim)?,
        o => return Err(Failure::Config(format!("unknown mode `{o}` (duty|exhaustion)"))),
    };

    run.param("mode", a.mode.as_str());
    run.param("source", a.source.as_str());
    match a.source.as_str() {
        "rf" => {
            run.param("eirp_dbm", a.eirp);
            run.param("distance_m", a.distance);
        }
        "led" | "sunlight" => run.param("irradiance_w_m2", a.irradiance),
        "battery" => run.param("harvest_w", a.harvest_mw * 1e-3),
        _ => run.param("trace", a.trace.as_ref().map(|p| p.display().to_string())),
    }
    run.param("task", task.to_string());
    run.param("task_power_w", task_power);
    run.param("profile", a.profile.as_str());
    if a.mode == "duty" {
        run.param("period_s", a.period);
        run.param("on_time_s", a.on_time.unwrap_or(a.period));
    }
    run.param("horizon_s", a.horizon);
    run.param("dt_s", sim.dt);
    run.param("record_interval_s", sim.record_interval);
    run.param("converter_efficiency", sim.converter_efficiency);
    run.param("capacitance_f", state.capacitance);
    run.param("initial_voltage_v", state.voltage);
    run.param("v_activate_v", state.v_activate);
    run.param("v_cutoff_v", state.v_cutoff);
    run.param("v_max_v", state.v_max);
    run.param("leakage_a", state.leakage);

    let f = File::create(run.path("timeline.csv"))?;
    write_timeline_csv(f, &tl)?;
    run.artifact("timeline.csv");
    let st = &tl.stats;
    run.write_csv(
        "energy_summary.csv",
        &[
            "horizon_s",
            "first_activation_s",
            "on_time_s",
            "duty",
            "wakes",
            "skipped_wakes",
            "activations",
            "brownouts",
            "mean_period_s",
            "mean_charge_s",
            "mean_discharge_s",
            "harvested_j",
            "residual_j",
        ],
        [vec![
            format!("{:.6}", st.horizon),
            opt(st.first_activation),
            format!("{:.6}", st.on_time),
            format!("{:.6}", st.duty),
            st.wakes.to_string(),
            st.skipped_wakes.to_string(),
            st.activations.to_string(),
            st.brownouts.to_string(),
            opt(st.mean_period),
            opt(st.mean_charge_time),
            opt(st.mean_discharge_time),
            format!("{:.6e}", tl.budget.harvested),
            format!("{:.3e}", tl.budget.residual()),
        ]],
    )?;
    println!("duty {:.4}, activations {}, brownouts {}", st.duty, st.activations, st.brownouts);
    if let (Some(p), Some(c), Some(d)) = (st.mean_period, st.mean_charge_time, st.mean_discharge_time) {
        println!("period {p:.3} s (charge {c:.3} s, discharge {d:.3} s)");
    }
    Ok(())
}
