//! Parameterized control plane: MCU↔FPGA frames, the four-wire link, the
//! register bank and its interpreter, and the radio-mode state machine.

mod actor;
mod frame;
mod interpreter;
mod radio;
mod registers;
mod wire;

pub use actor::ControlActor;
pub use frame::{
    frame_decode, frame_dump, frame_encode, header_false_sync_offsets, types, DecodeReport, InteractionFrame,
    LocatedFrame, Rejected, TypeTable, FRAME_PREAMBLE, HEADER_BITS, MAX_DATA_BITS, PREAMBLE_BITS,
};
pub use interpreter::{interpret, modulation_code, Command, HardwareModel, PowerDomain};
pub use radio::{LatencyComponent, LatencyTable, RadioState};
pub use registers::{DeviceMode, EnergyRegisters, RegisterBank, REGISTER_KEYS};
pub use wire::{sample_rising_edges, wire_transfer, Direction, Line, WireConfig, WireEvent, WireTransfer};
