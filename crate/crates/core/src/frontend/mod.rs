//! Unified active/passive RF front-end model.
//!
//! All RF signals are simulated at complex baseband around a declared center
//! frequency. The same one-bit switch stream either toggles the antenna
//! impedance (passive: the incident excitation is multiplied by Γ) or gates
//! the PLL carrier towards the antenna (active: the switch acts as a mixer).

mod iq;
mod ook_rx;
mod pll;
mod reflection;
mod synth;
mod topology;

pub use iq::IqBuffer;
pub use ook_rx::{envelope, ook_receive, percentile, OokDecision};
pub use pll::{pll_tune, PllState, PLL_MAX_HZ, PLL_MIN_HZ, PLL_SETTLE_S};
pub use reflection::{reflection_coefficient, Impedance};
pub use synth::{
    dbm_to_amplitude, synth_active, synth_passive, synth_passive_with, SwitchEdges,
    DEFAULT_TRANSITION_TAU_S,
};
pub use topology::{configure_topology, DataRoute, ModeRoute, RadioMode, SwitchTopology};
