//! Protocol bit streams to phase parameters or switch states, and back.
//!
//! Bit order: BLE fields go on air LSB first; 802.11 AMP and 3GPP ambient
//! IoT payloads are taken MSB first as supplied. Manchester polarity is the
//! IEEE one, `1 → [1, 0]`.

pub mod bits;
mod ble;
mod config;
mod frame;
mod golden;
mod link;
mod manchester;
mod maps;
mod amp;

pub use amp::{amp_downlink_synthesize, amp_uplink_modulate, line_code, DOWNLINK_SUBCARRIER_SEED};
pub use ble::{
    ble_adv_build, ble_adv_build_with, ble_adv_parse, ble_crc24, ble_crc24_bits, ble_whiten, AdvHeader,
    BleAdvPacket, ADV_NONCONN_IND, BLE_ADV_ACCESS_ADDRESS, BLE_CRC_INIT, BLE_CRC_POLY, BLE_MAX_ADV_DATA,
    BLE_PREAMBLE,
};
pub use config::{
    ble_channel_freq, LineCoding, Modulation, Protocol, ProtocolConfig, AMP_ACTIVE_ONLY_RATE, AMP_DOWNLINK_RATES,
    AMP_UPLINK_RATES, BLE_ADV_CHANNELS, BLE_SYMBOL_RATE,
};
pub use frame::{AirFrame, FieldSpan};
pub use golden::{read_golden, write_golden, GoldenFrame};
pub use link::{demodulate, modulate, Demodulated, TxPath, BPSK_PILOT};
pub use manchester::{manchester_decide, manchester_decode, manchester_encode};
pub use maps::{
    aiot_bpsk_map, aiot_msk_map, ble_gfsk_map, cpfsk_map, css_map, fsk_map, fsk_tones, gaussian_taps,
    gfsk_bits_map,
};
