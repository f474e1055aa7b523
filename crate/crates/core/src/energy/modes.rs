//! Duty Cycle and Exhaustion operating modes on a fixed-step integrator.

use std::fmt;

use super::{step_energy_flux, EnergyMode, EnergyState, HarvestSource, PowerProfile, CONVERTER_EFFICIENCY};
use crate::control::{DeviceMode, LatencyTable};
use crate::error::{arg, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integrator step, s.
    pub dt: f64,
    /// Applied to every harvested watt before it reaches the capacitor.
    pub converter_efficiency: f64,
    /// Spacing of recorded voltage samples, s. Events are always recorded.
    pub record_interval: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            converter_efficiency: CONVERTER_EFFICIENCY,
            record_interval: 0.1,
        }
    }
}

impl SimConfig {
    fn validate(&self, horizon: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(arg(format!("dt {} must be positive", self.dt)));
        }
        if !(0.0..=1.0).contains(&self.converter_efficiency) {
            return Err(arg("converter efficiency must lie in [0, 1]"));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(arg(format!("horizon {horizon} must be non-negative")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutySchedule {
    pub period: f64,
    pub on_duration: f64,
    /// Radio mode of the task; its wake latency is paid at task power.
    pub task: DeviceMode,
}

impl DutySchedule {
    /// `on_duration == period`: the task wants to run all the time.
    pub fn continuous(period: f64, task: DeviceMode) -> Self {
        Self { period, on_duration: period, task }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyEvent {
    /// Reached the activation voltage.
    Activated,
    /// RTC tick that started a wake.
    Wake,
    /// RTC tick ignored because the store is below the cut-off.
    WakeSkipped,
    /// Task finished, back to sleep.
    TaskDone,
    /// Fell below the cut-off while running.
    Brownout,
}

impl fmt::Display for EnergyEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyEvent::Activated => "activated",
            EnergyEvent::Wake => "wake",
            EnergyEvent::WakeSkipped => "wake_skipped",
            EnergyEvent::TaskDone => "task_done",
            EnergyEvent::Brownout => "brownout",
        })
    }
}

impl fmt::Display for EnergyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyMode::Harvesting => "harvesting",
            EnergyMode::Running => "running",
            EnergyMode::Sleeping => "sleeping",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineSample {
    pub t: f64,
    pub voltage: f64,
    pub mode: EnergyMode,
    pub event: Option<EnergyEvent>,
}

/// Summed energy flows over a run, J.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBudget {
    pub start: f64,
    pub end: f64,
    pub harvested: f64,
    pub consumed: f64,
    pub leaked: f64,
    pub clamped: f64,
    /// Largest single-step flux magnitude seen.
    pub max_step_flux: f64,
}

impl EnergyBudget {
    /// `E_end − E_start − (harvested − consumed − leaked − clamped)`.
    pub fn residual(&self) -> f64 {
        self.end - self.start - (self.harvested - self.consumed - self.leaked - self.clamped)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimelineStats {
    pub horizon: f64,
    pub first_activation: Option<f64>,
    /// Total time spent in the task (wake latency excluded), s.
    pub on_time: f64,
    /// Task time fraction over whole charge cycles after the first activation,
    /// or over the tail of the run when fewer than two activations occurred.
    pub duty: f64,
    pub wakes: usize,
    pub skipped_wakes: usize,
    pub activations: usize,
    pub brownouts: usize,
    /// Mean activation-to-activation time over whole cycles.
    pub mean_period: Option<f64>,
    pub mean_charge_time: Option<f64>,
    pub mean_discharge_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    pub samples: Vec<TimelineSample>,
    pub events: Vec<(f64, EnergyEvent)>,
    pub stats: TimelineStats,
    pub budget: EnergyBudget,
}

impl Timeline {
    pub fn events_of(&self, kind: EnergyEvent) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().filter(move |e| e.1 == kind).map(|e| e.0)
    }
}

struct Recorder {
    cfg: SimConfig,
    tl: Timeline,
    next_sample: f64,
    /// Cumulative on-time at each activation.
    on_at_activation: Vec<f64>,
}

impl Recorder {
    fn new(cfg: SimConfig, s: &EnergyState) -> Self {
        let mut tl = Timeline::default();
        tl.budget.start = s.energy();
        tl.samples.push(TimelineSample {
            t: 0.0,
            voltage: s.voltage,
            mode: s.mode,
            event: None,
        });
        Self {
            cfg,
            tl,
            next_sample: cfg.record_interval,
            on_at_activation: Vec::new(),
        }
    }

    fn event(&mut self, t: f64, s: &EnergyState, e: EnergyEvent) {
        match e {
            EnergyEvent::Activated => {
                self.on_at_activation.push(self.tl.stats.on_time);
                self.tl.stats.activations += 1;
                self.tl.stats.first_activation.get_or_insert(t);
            }
            EnergyEvent::Wake => self.tl.stats.wakes += 1,
            EnergyEvent::WakeSkipped => self.tl.stats.skipped_wakes += 1,
            EnergyEvent::Brownout => self.tl.stats.brownouts += 1,
            EnergyEvent::TaskDone => {}
        }
        self.tl.events.push((t, e));
        self.tl.samples.push(TimelineSample {
            t,
            voltage: s.voltage,
            mode: s.mode,
            event: Some(e),
        });
    }

    fn step(&mut self, s: &EnergyState, t: f64, dt: f64, p_h: f64, p_load: f64) -> EnergyState {
        let (n, f) = step_energy_flux(s, dt, p_h, p_load);
        let b = &mut self.tl.budget;
        b.harvested += f.harvested;
        b.consumed += f.consumed;
        b.leaked += f.leaked;
        b.clamped += f.clamped;
        b.max_step_flux = b.max_step_flux.max(f.harvested + f.consumed + f.leaked);
        let t_end = t + dt;
        if self.cfg.record_interval > 0.0 && t_end >= self.next_sample - 1e-12 {
            self.tl.samples.push(TimelineSample {
                t: t_end,
                voltage: n.voltage,
                mode: n.mode,
                event: None,
            });
            while self.next_sample <= t_end + 1e-12 {
                self.next_sample += self.cfg.record_interval;
            }
        }
        n
    }

    fn finish(mut self, s: &EnergyState, horizon: f64) -> Timeline {
        let st = &mut self.tl.stats;
        st.horizon = horizon;
        self.tl.budget.end = s.energy();
        let acts: Vec<f64> = self.tl.events.iter().filter(|e| e.1 == EnergyEvent::Activated).map(|e| e.0).collect();
        if acts.len() >= 2 {
            let span = acts[acts.len() - 1] - acts[0];
            st.duty = (self.on_at_activation[acts.len() - 1] - self.on_at_activation[0]) / span;
            st.mean_period = Some(span / (acts.len() - 1) as f64);
            let mut charge = Vec::new();
            let mut discharge = Vec::new();
            let mut last_act = None;
            let mut last_brown = None;
            for &(t, e) in &self.tl.events {
                match e {
                    EnergyEvent::Activated => {
                        if let Some(b) = last_brown.take() {
                            charge.push(t - b);
                        }
                        last_act = Some(t);
                    }
                    EnergyEvent::Brownout => {
                        if let Some(a) = last_act.take() {
                            discharge.push(t - a);
                        }
                        last_brown = Some(t);
                    }
                    _ => {}
                }
            }
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            st.mean_charge_time = mean(&charge);
            st.mean_discharge_time = mean(&discharge);
        } else if let Some(&t0) = acts.first() {
            let span = horizon - t0;
            if span > 0.0 {
                st.duty = (st.on_time - self.on_at_activation[0]) / span;
            }
        }
        self.tl
    }
}

fn harvest_fn<'a>(src: &'a HarvestSource, eff: f64) -> Result<impl Fn(f64) -> f64 + 'a> {
    let constant = if src.is_constant() { Some(src.power_at(0.0)? * eff) } else { None };
    // trace sources cannot fail
    Ok(move |t: f64| constant.unwrap_or_else(|| src.power_at(t).unwrap_or(0.0) * eff))
}

/// Applies the threshold rules to an initial state.
fn normalize(state: &EnergyState) -> EnergyState {
    let mut s = *state;
    if s.mode == EnergyMode::Harvesting && s.voltage >= s.v_activate {
        s.mode = EnergyMode::Sleeping;
    } else if s.mode != EnergyMode::Harvesting && s.voltage < s.v_cutoff {
        s.mode = EnergyMode::Harvesting;
    }
    s
}

fn step_count(horizon: f64, dt: f64) -> u64 {
    (horizon / dt).round() as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Idle,
    Waking(f64),
    On(f64),
}

/// Sleeps at `p_sleep`, and on every RTC tick (multiples of `period`) wakes
/// into the task: the sleep-to-task latency at task power, then
/// `on_duration` at task power. A tick that arrives mid-task extends it. A
/// tick is skipped when the store is below the cut-off or still recovering
/// from a brownout.
pub fn run_duty_cycle_mode(
    state: &EnergyState,
    profile: &PowerProfile,
    source: &HarvestSource,
    schedule: &DutySchedule,
    latencies: &LatencyTable,
    horizon: f64,
    cfg: &SimConfig,
) -> Result<Timeline> {
    cfg.validate(horizon)?;
    state.validate()?;
    profile.validate()?;
    let DutySchedule { period, on_duration, task } = *schedule;
    if !(period > 0.0) || !(0.0..=period).contains(&on_duration) {
        return Err(arg(format!("schedule needs 0 ≤ on ({on_duration}) ≤ period ({period}), period > 0")));
    }
    if task == DeviceMode::Sleep {
        return Err(arg("duty-cycle task cannot be sleep"));
    }
    let ph = harvest_fn(source, cfg.converter_efficiency)?;
    let p_task = profile.power(task);
    let latency = latencies.latency(DeviceMode::Sleep, task).as_secs_f64();
    let dt = cfg.dt;
    let eps = 1e-9 * dt;

    let mut s = normalize(state);
    if s.mode == EnergyMode::Running {
        s.mode = EnergyMode::Sleeping;
    }
    let mut rec = Recorder::new(*cfg, &s);
    if s.mode == EnergyMode::Sleeping {
        rec.event(0.0, &s, EnergyEvent::Activated);
    }
    let mut phase = Phase::Idle;
    let mut tick = 0u64;
    for i in 0..step_count(horizon, dt) {
        let t = i as f64 * dt;
        while tick as f64 * period <= t + eps {
            tick += 1;
            match phase {
                Phase::Idle => {
                    if s.mode == EnergyMode::Harvesting || s.voltage < s.v_cutoff {
                        rec.event(t, &s, EnergyEvent::WakeSkipped);
                    } else {
                        s.mode = EnergyMode::Running;
                        phase = if latency > 0.0 { Phase::Waking(latency) } else { Phase::On(on_duration) };
                        rec.event(t, &s, EnergyEvent::Wake);
                    }
                }
                Phase::Waking(_) => {}
                Phase::On(r) => phase = Phase::On(r.max(on_duration)),
            }
        }
        if phase == Phase::On(0.0) {
            phase = Phase::Idle;
            s.mode = EnergyMode::Sleeping;
            rec.event(t, &s, EnergyEvent::TaskDone);
        }
        let load = if phase == Phase::Idle { profile.p_sleep } else { p_task };
        let prev = s.mode;
        s = rec.step(&s, t, dt, ph(t), load);
        let t_end = t + dt;
        if prev == EnergyMode::Running && s.mode == EnergyMode::Harvesting {
            phase = Phase::Idle;
            rec.event(t_end, &s, EnergyEvent::Brownout);
            continue;
        }
        if prev == EnergyMode::Harvesting && s.mode == EnergyMode::Sleeping {
            rec.event(t_end, &s, EnergyEvent::Activated);
        }
        phase = match phase {
            Phase::Idle => Phase::Idle,
            Phase::Waking(r) if r - dt > eps => Phase::Waking(r - dt),
            Phase::Waking(r) => Phase::On((on_duration - (dt - r)).max(0.0)),
            Phase::On(r) => {
                rec.tl.stats.on_time += dt.min(r);
                if r - dt > eps {
                    Phase::On(r - dt)
                } else {
                    s.mode = EnergyMode::Sleeping;
                    rec.event(t_end, &s, EnergyEvent::TaskDone);
                    Phase::Idle
                }
            }
        };
    }
    Ok(rec.finish(&s, horizon))
}

/// Charges at the sleep floor until the activation voltage, then runs at
/// `task_power` until the cut-off, and repeats.
pub fn run_exhaustion_mode(
    state: &EnergyState,
    profile: &PowerProfile,
    source: &HarvestSource,
    task_power: f64,
    horizon: f64,
    cfg: &SimConfig,
) -> Result<Timeline> {
    cfg.validate(horizon)?;
    state.validate()?;
    profile.validate()?;
    if !(task_power > 0.0) {
        return Err(arg(format!("task power {task_power} W must be positive")));
    }
    let ph = harvest_fn(source, cfg.converter_efficiency)?;
    let dt = cfg.dt;

    let mut s = normalize(state);
    let mut rec = Recorder::new(*cfg, &s);
    if s.mode != EnergyMode::Harvesting {
        s.mode = EnergyMode::Running;
        rec.event(0.0, &s, EnergyEvent::Activated);
    }
    for i in 0..step_count(horizon, dt) {
        let t = i as f64 * dt;
        let running = s.mode == EnergyMode::Running;
        let load = if running { task_power } else { profile.p_sleep };
        s = rec.step(&s, t, dt, ph(t), load);
        let t_end = t + dt;
        if running {
            rec.tl.stats.on_time += dt;
            if s.mode == EnergyMode::Harvesting {
                rec.event(t_end, &s, EnergyEvent::Brownout);
            }
        } else if s.mode == EnergyMode::Sleeping {
            s.mode = EnergyMode::Running;
            rec.event(t_end, &s, EnergyEvent::Activated);
        }
    }
    Ok(rec.finish(&s, horizon))
}
