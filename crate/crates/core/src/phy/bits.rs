//! Bit-vector helpers. Bits are stored one per `u8`, each 0 or 1.

use crate::error::{arg, Result};

/// Byte to bits, least significant bit first (BLE air order).
pub fn bytes_to_bits_lsb(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).map(move |i| (b >> i) & 1)).collect()
}

/// Byte to bits, most significant bit first.
pub fn bytes_to_bits_msb(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1)).collect()
}

pub fn bits_to_bytes_lsb(bits: &[u8]) -> Result<Vec<u8>> {
    check_bits(bits)?;
    if bits.len() % 8 != 0 {
        return Err(arg(format!("{} bits is not a whole number of bytes", bits.len())));
    }
    Ok(bits
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i)))
        .collect())
}

pub fn bits_to_bytes_msb(bits: &[u8]) -> Result<Vec<u8>> {
    check_bits(bits)?;
    if bits.len() % 8 != 0 {
        return Err(arg(format!("{} bits is not a whole number of bytes", bits.len())));
    }
    Ok(bits.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b)).collect())
}

/// `width` bits of `value`, most significant first.
pub fn uint_to_bits_msb(value: u64, width: usize) -> Vec<u8> {
    (0..width).rev().map(|i| ((value >> i) & 1) as u8).collect()
}

pub fn bits_to_uint_msb(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1))
}

pub fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(i) => Err(arg(format!("element {i} = {} is not a bit", bits[i]))),
        None => Ok(()),
    }
}

/// Hex rendering of a bit stream: transmit order, the first bit in the MSB of
/// the first nibble. A trailing partial nibble is zero padded.
pub fn bits_to_hex(bits: &[u8]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << (3 - i)));
            char::from_digit(u32::from(v), 16).unwrap_or('0')
        })
        .collect()
}

/// Inverse of [`bits_to_hex`] truncated to `n_bits`.
pub fn hex_to_bits(hex: &str, n_bits: usize) -> Result<Vec<u8>> {
    let hex = hex.trim().trim_start_matches("0x");
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for (i, ch) in hex.chars().enumerate() {
        let v = ch
            .to_digit(16)
            .ok_or_else(|| arg(format!("character {i} ({ch:?}) is not hexadecimal")))?;
        bits.extend((0..4).rev().map(|k| ((v >> k) & 1) as u8));
    }
    if n_bits > bits.len() {
        return Err(arg(format!("{n_bits} bits requested from {} hex bits", bits.len())));
    }
    bits.truncate(n_bits);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(bytes_to_bits_lsb(&[0xAA]), vec![0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(bytes_to_bits_msb(&[0xAA]), vec![1, 0, 1, 0, 1, 0, 1, 0]);
        let b = [0x12, 0xfe, 0x00, 0x81];
        assert_eq!(bits_to_bytes_lsb(&bytes_to_bits_lsb(&b)).unwrap(), b);
        assert_eq!(bits_to_bytes_msb(&bytes_to_bits_msb(&b)).unwrap(), b);
    }

    #[test]
    fn hex_roundtrip() {
        let bits = uint_to_bits_msb(0xE256E20102, 40);
        assert_eq!(bits_to_hex(&bits), "e256e20102");
        assert_eq!(hex_to_bits("E256E20102", 40).unwrap(), bits);
        assert_eq!(bits_to_uint_msb(&bits), 0xE256E20102);
        assert!(hex_to_bits("zz", 8).is_err());
    }
}
