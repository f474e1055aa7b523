//! Channel models, link calibration and the experiment harness.

mod analytic;
mod calibrate;
mod channel;
mod config;
mod hybrid;
mod iq_io;
mod mobility;
mod sweep;

pub use analytic::*;
pub use calibrate::*;
pub use channel::*;
pub use config::*;
pub use hybrid::*;
pub use iq_io::*;
pub use mobility::*;
pub use sweep::*;
