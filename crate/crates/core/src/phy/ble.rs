//! BLE advertising-channel link layer framing.
//!
//! Multi-byte fields go on air least significant bit first. After the access
//! address, PDU and CRC are whitened with the channel-seeded LFSR.

use super::bits::{bits_to_bytes_lsb, bytes_to_bits_lsb, check_bits};
use super::frame::{spans, AirFrame};
use super::ProtocolConfig;
use crate::error::{arg, Error, Result};

pub const BLE_PREAMBLE: u8 = 0xAA;
pub const BLE_ADV_ACCESS_ADDRESS: u32 = 0x8E89_BED6;
pub const BLE_CRC_POLY: u32 = 0x0006_5B;
pub const BLE_CRC_INIT: u32 = 0x55_5555;
pub const BLE_MAX_ADV_DATA: usize = 31;
pub const ADV_NONCONN_IND: u8 = 0x2;

// reflected forms used by the bit-serial loops below
const CRC_INIT_REFLECTED: u32 = 0xAA_AAAA;
const CRC_POLY_REFLECTED: u32 = 0xDA_6000;

/// First 16 bits of an advertising PDU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvHeader {
    pub pdu_type: u8,
    pub ch_sel: bool,
    pub tx_add: bool,
    pub rx_add: bool,
}

impl Default for AdvHeader {
    fn default() -> Self {
        Self {
            pdu_type: ADV_NONCONN_IND,
            ch_sel: false,
            tx_add: false,
            rx_add: false,
        }
    }
}

impl AdvHeader {
    fn to_bytes(self, len: u8) -> [u8; 2] {
        let b0 = (self.pdu_type & 0x0f)
            | (u8::from(self.ch_sel) << 5)
            | (u8::from(self.tx_add) << 6)
            | (u8::from(self.rx_add) << 7);
        [b0, len]
    }

    fn from_byte(b0: u8) -> Self {
        Self {
            pdu_type: b0 & 0x0f,
            ch_sel: b0 & 0x20 != 0,
            tx_add: b0 & 0x40 != 0,
            rx_add: b0 & 0x80 != 0,
        }
    }
}

/// Advertising packet recovered by [`ble_adv_parse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BleAdvPacket {
    pub header: AdvHeader,
    pub adv_address: [u8; 6],
    pub adv_data: Vec<u8>,
}

/// XORs `bits` in place with the whitening sequence of `channel` (an involution).
pub fn ble_whiten(bits: &mut [u8], channel: u8) {
    let mut lfsr = (channel & 0x3f) | 0x40;
    for b in bits {
        let out = lfsr & 1;
        *b ^= out;
        lfsr >>= 1;
        if out == 1 {
            lfsr ^= 0x44;
        }
    }
}

/// CRC-24 over air-order bits; returns the 24 CRC bits in air order.
pub fn ble_crc24_bits(bits: &[u8]) -> Vec<u8> {
    let mut state = CRC_INIT_REFLECTED;
    for &b in bits {
        let fb = (state ^ u32::from(b)) & 1;
        state >>= 1;
        if fb == 1 {
            state ^= CRC_POLY_REFLECTED;
        }
    }
    (0..24).map(|i| ((state >> i) & 1) as u8).collect()
}

/// CRC-24 of a byte string. The value's most significant bit is sent first.
pub fn ble_crc24(bytes: &[u8]) -> u32 {
    ble_crc24_bits(&bytes_to_bits_lsb(bytes))
        .iter()
        .fold(0u32, |acc, &b| (acc << 1) | u32::from(b))
}

pub fn ble_adv_build(payload: &[u8], adv_address: [u8; 6], channel: u8) -> Result<AirFrame> {
    ble_adv_build_with(AdvHeader::default(), payload, adv_address, channel)
}

/// Preamble ∥ access address ∥ whitened(PDU ∥ CRC).
pub fn ble_adv_build_with(header: AdvHeader, payload: &[u8], adv_address: [u8; 6], channel: u8) -> Result<AirFrame> {
    if payload.len() > BLE_MAX_ADV_DATA {
        return Err(arg(format!(
            "AdvData of {} bytes exceeds {BLE_MAX_ADV_DATA}",
            payload.len()
        )));
    }
    let cfg = ProtocolConfig::ble_adv(channel)?;
    let len = (6 + payload.len()) as u8;
    let mut pdu = header.to_bytes(len).to_vec();
    pdu.extend_from_slice(&adv_address);
    pdu.extend_from_slice(payload);
    let pdu_bits = bytes_to_bits_lsb(&pdu);
    let mut body = pdu_bits.clone();
    body.extend(ble_crc24_bits(&pdu_bits));
    ble_whiten(&mut body, channel);

    let mut bits = bytes_to_bits_lsb(&[BLE_PREAMBLE]);
    bits.extend(bytes_to_bits_lsb(&BLE_ADV_ACCESS_ADDRESS.to_le_bytes()));
    bits.extend(body);
    let fields = spans(&[
        ("preamble", 8),
        ("access_address", 32),
        ("header", 16),
        ("adv_address", 48),
        ("adv_data", 8 * payload.len()),
        ("crc", 24),
    ]);
    AirFrame::new(bits, cfg, fields)
}

fn decode_err(index: usize, reason: impl Into<String>) -> Error {
    Error::Decode {
        index,
        reason: reason.into(),
    }
}

/// Sniffer-style parse of a frame starting at bit 0: checks preamble and
/// access address, de-whitens, reads the length and verifies the CRC.
pub fn ble_adv_parse(bits: &[u8], channel: u8) -> Result<BleAdvPacket> {
    check_bits(bits)?;
    if bits.len() < 40 + 16 {
        return Err(decode_err(bits.len(), "frame shorter than preamble, address and header"));
    }
    if bits[..8] != bytes_to_bits_lsb(&[BLE_PREAMBLE])[..] {
        return Err(decode_err(0, "preamble mismatch"));
    }
    if bits[8..40] != bytes_to_bits_lsb(&BLE_ADV_ACCESS_ADDRESS.to_le_bytes())[..] {
        return Err(decode_err(8, "access address mismatch"));
    }
    let mut body = bits[40..].to_vec();
    ble_whiten(&mut body, channel);
    let head = bits_to_bytes_lsb(&body[..16])?;
    let len = usize::from(head[1]);
    if !(6..=6 + BLE_MAX_ADV_DATA).contains(&len) {
        return Err(decode_err(48, format!("PDU length {len} out of range")));
    }
    let pdu_bits = 16 + 8 * len;
    if body.len() < pdu_bits + 24 {
        return Err(decode_err(bits.len(), format!("truncated: PDU length {len} needs {} bits", 40 + pdu_bits + 24)));
    }
    let crc = ble_crc24_bits(&body[..pdu_bits]);
    if crc[..] != body[pdu_bits..pdu_bits + 24] {
        return Err(decode_err(40 + pdu_bits, "CRC mismatch"));
    }
    let pdu = bits_to_bytes_lsb(&body[..pdu_bits])?;
    let mut adv_address = [0u8; 6];
    adv_address.copy_from_slice(&pdu[2..8]);
    Ok(BleAdvPacket {
        header: AdvHeader::from_byte(pdu[0]),
        adv_address,
        adv_data: pdu[8..].to_vec(),
    })
}
