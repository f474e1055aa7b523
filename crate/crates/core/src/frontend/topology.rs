use std::fmt;

use num_complex::Complex;

use crate::error::{config, Result};
use crate::scalar::Real;

/// Transmission mode of the hybrid radio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadioMode {
    Passive,
    Active,
}

impl fmt::Display for RadioMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadioMode::Passive => "passive",
            RadioMode::Active => "active",
        })
    }
}

impl std::str::FromStr for RadioMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "passive" | "backscatter" => Ok(RadioMode::Passive),
            "active" => Ok(RadioMode::Active),
            other => Err(config(format!("unknown radio mode `{other}`"))),
        }
    }
}

/// Where the mode switch connects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeRoute {
    FiftyOhm,
    Pll,
}

/// What the data switch presents in one of its two states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataRoute {
    /// Terminated into the 50 Ω load.
    FiftyOhm,
    /// Forwarded to the antenna.
    Antenna,
    /// Left open (full reflection).
    Open,
}

/// Dual-switch routing of the front-end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchTopology {
    mode: RadioMode,
    mode_switch: ModeRoute,
    data_switch: [DataRoute; 2],
}

impl SwitchTopology {
    /// Validated constructor: the PLL route implies active mode and never
    /// faces an open circuit.
    pub fn new(mode: RadioMode, mode_switch: ModeRoute, data_switch: [DataRoute; 2]) -> Result<Self> {
        match (mode, mode_switch) {
            (RadioMode::Passive, ModeRoute::FiftyOhm) | (RadioMode::Active, ModeRoute::Pll) => {}
            _ => {
                return Err(config(format!(
                    "mode {mode} cannot use mode-switch route {mode_switch:?}"
                )))
            }
        }
        if mode_switch == ModeRoute::Pll && data_switch.contains(&DataRoute::Open) {
            return Err(config("PLL routed into an open circuit"));
        }
        Ok(Self {
            mode,
            mode_switch,
            data_switch,
        })
    }

    pub fn mode(&self) -> RadioMode {
        self.mode
    }

    pub fn mode_switch(&self) -> ModeRoute {
        self.mode_switch
    }

    pub fn data_route(&self, state: bool) -> DataRoute {
        self.data_switch[usize::from(state)]
    }

    /// Reflection coefficient presented in `state` (passive mode only).
    pub fn passive_gamma<T: Real>(&self, state: bool) -> Option<Complex<T>> {
        if self.mode != RadioMode::Passive {
            return None;
        }
        Some(match self.data_route(state) {
            DataRoute::Open => Complex::new(T::one(), T::zero()),
            DataRoute::FiftyOhm | DataRoute::Antenna => Complex::new(T::zero(), T::zero()),
        })
    }

    /// True when the PLL output could see an unterminated port.
    pub fn pll_faces_open(&self) -> bool {
        self.mode_switch == ModeRoute::Pll && self.data_switch.contains(&DataRoute::Open)
    }
}

/// Switch routing for a mode. Passive toggles between absorbing (Γ = 0) and
/// reflecting (Γ = 1); active alternates the PLL between the 50 Ω load and the antenna.
pub fn configure_topology(mode: RadioMode) -> SwitchTopology {
    let (route, data) = match mode {
        RadioMode::Passive => (ModeRoute::FiftyOhm, [DataRoute::FiftyOhm, DataRoute::Open]),
        RadioMode::Active => (ModeRoute::Pll, [DataRoute::FiftyOhm, DataRoute::Antenna]),
    };
    SwitchTopology::new(mode, route, data).expect("built-in topologies are valid")
}
