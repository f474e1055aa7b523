pub mod baseband;
pub mod dsp;
pub mod error;
pub mod frontend;
pub mod scalar;
pub use error::{Error, Result};
pub mod phy;
pub mod control;
pub mod units;
pub mod energy;
pub mod netsim;

pub type PhaseParamsF32 = baseband::PhaseParams<f32>;
pub type PhaseParamsF64 = baseband::PhaseParams<f64>;
pub type RealBasebandF32 = baseband::RealBaseband<f32>;
pub type RealBasebandF64 = baseband::RealBaseband<f64>;
pub type IqBufferF32 = frontend::IqBuffer<f32>;
pub type IqBufferF64 = frontend::IqBuffer<f64>;
pub type ImpedanceF32 = frontend::Impedance<f32>;
pub type ImpedanceF64 = frontend::Impedance<f64>;
