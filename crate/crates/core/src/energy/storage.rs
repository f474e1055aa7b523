use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyMode {
    /// Below the activation threshold, charging.
    Harvesting,
    Running,
    /// Charged enough to run, idling at the sleep floor.
    Sleeping,
}

/// Storage capacitor with PMIC hysteresis thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyState {
    pub capacitance: f64,
    pub voltage: f64,
    pub v_activate: f64,
    pub v_cutoff: f64,
    pub v_max: f64,
    /// Constant leakage current, A.
    pub leakage: f64,
    pub mode: EnergyMode,
}

impl Default for EnergyState {
    /// 90 mF at the cut-off voltage; 2 µA leakage drains a full capacitor
    /// by about 3 % per hour.
    fn default() -> Self {
        Self {
            capacitance: 0.09,
            voltage: 2.0,
            v_activate: 3.3,
            v_cutoff: 2.0,
            v_max: 5.5,
            leakage: 2e-6,
            mode: EnergyMode::Harvesting,
        }
    }
}

impl EnergyState {
    pub fn new(capacitance: f64, voltage: f64, v_activate: f64, v_cutoff: f64) -> Result<Self> {
        let s = Self {
            capacitance,
            voltage,
            v_activate,
            v_cutoff,
            ..Self::default()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_voltage(mut self, v: f64) -> Self {
        self.voltage = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacitance > 0.0 && self.capacitance.is_finite()) {
            return Err(config(format!("capacitance {} F must be positive", self.capacitance)));
        }
        if !(0.0 < self.v_cutoff && self.v_cutoff < self.v_activate && self.v_activate <= self.v_max) {
            return Err(config(format!(
                "thresholds must satisfy 0 < v_cutoff ({}) < v_activate ({}) ≤ v_max ({})",
                self.v_cutoff, self.v_activate, self.v_max
            )));
        }
        if !(0.0..=self.v_max).contains(&self.voltage) {
            return Err(config(format!("voltage {} outside [0, {}]", self.voltage, self.v_max)));
        }
        if self.leakage < 0.0 {
            return Err(config("leakage must be non-negative"));
        }
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.capacitance * self.voltage * self.voltage
    }

    pub fn energy_at(&self, v: f64) -> f64 {
        0.5 * self.capacitance * v * v
    }

    pub fn max_energy(&self) -> f64 {
        self.energy_at(self.v_max)
    }

    /// Energy between the two thresholds, J.
    pub fn hysteresis_energy(&self) -> f64 {
        self.energy_at(self.v_activate) - self.energy_at(self.v_cutoff)
    }
}

/// Result of one integration step with its energy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFlux {
    pub harvested: f64,
    pub consumed: f64,
    pub leaked: f64,
    /// Energy discarded (positive) or not delivered (negative) at the clamps.
    pub clamped: f64,
}

/// One explicit step:
/// `E' = clamp(E + (p_harvest − p_load)·dt − V·I_leak·dt, 0, E_max)`.
/// A running device drops to harvesting below the cut-off; a harvesting one
/// becomes eligible to run (sleeping) once it reaches the activation level.
pub fn step_energy(state: &EnergyState, dt: f64, p_harvest: f64, p_load: f64) -> EnergyState {
    step_energy_flux(state, dt, p_harvest, p_load).0
}

pub fn step_energy_flux(state: &EnergyState, dt: f64, p_harvest: f64, p_load: f64) -> (EnergyState, StepFlux) {
    let p_harvest = p_harvest.max(0.0);
    let leaked = state.voltage * state.leakage * dt;
    let raw = state.energy() + (p_harvest - p_load) * dt - leaked;
    let e = raw.clamp(0.0, state.max_energy());
    let mut s = *state;
    s.voltage = (2.0 * e / s.capacitance).sqrt();
    if s.mode == EnergyMode::Running && s.voltage < s.v_cutoff {
        s.mode = EnergyMode::Harvesting;
    } else if s.mode == EnergyMode::Harvesting && s.voltage >= s.v_activate {
        s.mode = EnergyMode::Sleeping;
    }
    let flux = StepFlux {
        harvested: p_harvest * dt,
        consumed: p_load * dt,
        leaked,
        clamped: raw - e,
    };
    (s, flux)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium() {
        let s = EnergyState { leakage: 0.0, voltage: 3.0, ..Default::default() };
        let n = step_energy(&s, 1e-3, 0.01, 0.01);
        assert!((n.voltage - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_capacitance_rejected() {
        assert!(EnergyState::new(0.0, 2.0, 3.3, 2.0).is_err());
        assert!(EnergyState::new(0.09, 2.0, 2.0, 3.3).is_err());
        assert!(EnergyState::new(0.09, 2.5, 3.3, 2.0).is_ok());
    }

    #[test]
    fn discharge_time_matches_closed_form() {
        let mut s = EnergyState {
            leakage: 0.0,
            voltage: 3.3,
            mode: EnergyMode::Running,
            ..Default::default()
        };
        let (ph, pl, dt) = (1e-3, 50e-3, 1e-4);
        let expect = s.hysteresis_energy() / (pl - ph);
        let mut t = 0.0;
        while s.mode == EnergyMode::Running {
            s = step_energy(&s, dt, ph, pl);
            t += dt;
        }
        assert!((t - expect).abs() / expect < 0.01, "{t} vs {expect}");
    }

    #[test]
    fn clamps() {
        let s = EnergyState { voltage: 5.5, ..Default::default() };
        let (n, f) = step_energy_flux(&s, 1.0, 1.0, 0.0);
        assert_eq!(n.voltage, 5.5);
        assert!(f.clamped > 0.0);
        let s = EnergyState { voltage: 0.01, ..Default::default() };
        assert_eq!(step_energy(&s, 1.0, 0.0, 1.0).voltage, 0.0);
    }

    #[test]
    fn leakage_under_five_percent_per_hour() {
        let mut s = EnergyState { voltage: 5.5, ..Default::default() };
        let e0 = s.energy();
        for _ in 0..3600 {
            s = step_energy(&s, 1.0, 0.0, 0.0);
        }
        let loss = 1.0 - s.energy() / e0;
        assert!(loss > 0.0 && loss < 0.05, "{loss}");
    }
}
