use std::collections::BTreeMap;

use crate::error::{arg, Result};
use crate::phy::bits::{bits_to_hex, bits_to_uint_msb, check_bits, uint_to_bits_msb};

pub const FRAME_PREAMBLE: u32 = 0xE2_56E2;
pub const PREAMBLE_BITS: usize = 24;
pub const HEADER_BITS: usize = 40;
pub const MAX_DATA_BITS: usize = 128;

/// Type codes of the default data-length table.
pub mod types {
    pub const SAMPLE_RATE: u8 = 0x01;
    pub const SAMPLE_COUNT: u8 = 0x02;
    pub const SYMBOL_DURATION: u8 = 0x03;
    pub const MODULATION: u8 = 0x04;
    pub const SHIFT_FREQ: u8 = 0x05;
    pub const PAYLOAD: u8 = 0x10;
}

/// MCU↔FPGA frame: preamble ∥ id ∥ type ∥ data, MSB first in every field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InteractionFrame {
    pub id: u8,
    pub type_field: u8,
    data: Vec<u8>,
}

impl InteractionFrame {
    pub fn new(id: u8, type_field: u8, data: Vec<u8>) -> Result<Self> {
        check_bits(&data)?;
        if data.len() > MAX_DATA_BITS {
            return Err(arg(format!("{} data bits exceed {MAX_DATA_BITS}", data.len())));
        }
        Ok(Self { id, type_field, data })
    }

    /// Frame carrying `value` in `width` bits.
    pub fn with_value(id: u8, type_field: u8, value: u64, width: usize) -> Result<Self> {
        Self::new(id, type_field, uint_to_bits_msb(value, width))
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn value(&self) -> u64 {
        bits_to_uint_msb(&self.data)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = uint_to_bits_msb(u64::from(FRAME_PREAMBLE), PREAMBLE_BITS);
        out.extend(uint_to_bits_msb(u64::from(self.id), 8));
        out.extend(uint_to_bits_msb(u64::from(self.type_field), 8));
        out.extend_from_slice(&self.data);
        out
    }

    pub fn to_hex(&self) -> String {
        bits_to_hex(&self.encode())
    }
}

pub fn frame_encode(id: u8, type_field: u8, data_bits: &[u8]) -> Result<Vec<u8>> {
    Ok(InteractionFrame::new(id, type_field, data_bits.to_vec())?.encode())
}

/// Data length per type code; the frame has no length field of its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTable(BTreeMap<u8, usize>);

impl TypeTable {
    pub fn new() -> Self {
        Self(BTreeMap::new())
    }

    pub fn with(mut self, type_field: u8, len: usize) -> Result<Self> {
        if len > MAX_DATA_BITS {
            return Err(arg(format!("type {type_field:#04x}: {len} bits exceed {MAX_DATA_BITS}")));
        }
        self.0.insert(type_field, len);
        Ok(self)
    }

    pub fn len_of(&self, type_field: u8) -> Option<usize> {
        self.0.get(&type_field).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }
}

impl Default for TypeTable {
    /// PHY parameter and payload frames emitted by the interpreter.
    fn default() -> Self {
        let mut t = BTreeMap::new();
        t.insert(types::SAMPLE_RATE, 32);
        t.insert(types::SAMPLE_COUNT, 32);
        t.insert(types::SYMBOL_DURATION, 32);
        t.insert(types::MODULATION, 8);
        t.insert(types::SHIFT_FREQ, 32);
        t.insert(types::PAYLOAD, 128);
        Self(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedFrame {
    /// Bit offset of the preamble.
    pub offset: usize,
    pub frame: InteractionFrame,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub offset: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecodeReport {
    pub frames: Vec<LocatedFrame>,
    /// Half-open bit ranges not covered by any frame.
    pub gaps: Vec<(usize, usize)>,
    /// Preamble matches that did not yield a frame.
    pub rejected: Vec<Rejected>,
}

/// Sliding exact-match correlator: on a preamble hit the header is parsed,
/// the type looked up and the frame consumed; unknown types and truncated
/// frames are reported and the scan resumes one bit later.
pub fn frame_decode(stream: &[u8], table: &TypeTable) -> Result<DecodeReport> {
    check_bits(stream)?;
    let pre = uint_to_bits_msb(u64::from(FRAME_PREAMBLE), PREAMBLE_BITS);
    let mut rep = DecodeReport::default();
    let mut gap_start = 0;
    let mut i = 0;
    while i + PREAMBLE_BITS <= stream.len() {
        if stream[i..i + PREAMBLE_BITS] != pre[..] {
            i += 1;
            continue;
        }
        if i + HEADER_BITS > stream.len() {
            rep.rejected.push(Rejected {
                offset: i,
                reason: "header truncated".into(),
            });
            i += 1;
            continue;
        }
        let id = bits_to_uint_msb(&stream[i + 24..i + 32]) as u8;
        let ty = bits_to_uint_msb(&stream[i + 32..i + 40]) as u8;
        let Some(len) = table.len_of(ty) else {
            rep.rejected.push(Rejected {
                offset: i,
                reason: format!("unknown type {ty:#04x}"),
            });
            i += 1;
            continue;
        };
        let end = i + HEADER_BITS + len;
        if end > stream.len() {
            rep.rejected.push(Rejected {
                offset: i,
                reason: format!("type {ty:#04x} needs {len} data bits, stream ends first"),
            });
            i += 1;
            continue;
        }
        if i > gap_start {
            rep.gaps.push((gap_start, i));
        }
        rep.frames.push(LocatedFrame {
            offset: i,
            frame: InteractionFrame {
                id,
                type_field: ty,
                data: stream[i + HEADER_BITS..end].to_vec(),
            },
        });
        i = end;
        gap_start = end;
    }
    if stream.len() > gap_start {
        rep.gaps.push((gap_start, stream.len()));
    }
    Ok(rep)
}

/// Offsets `1..=16` at which the preamble reappears inside the 40-bit header
/// of `(id, type)`.
pub fn header_false_sync_offsets(id: u8, type_field: u8) -> Vec<usize> {
    let h = InteractionFrame {
        id,
        type_field,
        data: Vec::new(),
    }
    .encode();
    let pre = &h[..PREAMBLE_BITS];
    (1..=HEADER_BITS - PREAMBLE_BITS)
        .filter(|&o| &h[o..o + PREAMBLE_BITS] == pre)
        .collect()
}

/// Frame dump: one frame per line, hex followed by field annotations.
pub fn frame_dump(frames: &[InteractionFrame]) -> String {
    frames
        .iter()
        .map(|f| {
            format!(
                "{}  preamble={FRAME_PREAMBLE:06X} id={:02X} type={:02X} data[{}]={}\n",
                f.to_hex(),
                f.id,
                f.type_field,
                f.data.len(),
                bits_to_hex(&f.data)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let f = InteractionFrame::new(0x01, 0x02, vec![]).unwrap();
        assert_eq!(f.to_hex(), "e256e20102");
        let bits = frame_encode(0, 0, &[0; 8]).unwrap();
        assert_eq!(bits.len(), 48);
        assert_eq!(&bits[40..], &[0; 8]);
        assert!(frame_encode(1, 2, &[0; 129]).is_err());
        assert!(frame_encode(1, 2, &[0; 128]).is_ok());
    }

    #[test]
    fn exact_match_policy() {
        let t = TypeTable::default();
        let mut s = InteractionFrame::with_value(3, types::MODULATION, 0x5a, 8).unwrap().encode();
        s[5] ^= 1;
        let r = frame_decode(&s, &t).unwrap();
        assert!(r.frames.is_empty());
        assert_eq!(r.gaps, vec![(0, 48)]);
    }

    #[test]
    fn unknown_type_is_rejected() {
        let s = frame_encode(3, 0x77, &[]).unwrap();
        let r = frame_decode(&s, &TypeTable::default()).unwrap();
        assert!(r.frames.is_empty());
        assert_eq!(r.rejected.len(), 1);
        assert!(r.rejected[0].reason.contains("0x77"));
    }

    #[test]
    fn false_sync_census() {
        // the preamble overlaps itself at 16 bits, so exactly one header
        // (id 0x56, type 0xE2) contains a second copy
        let mut hits = Vec::new();
        for id in 0..=255u8 {
            for ty in 0..=255u8 {
                let o = header_false_sync_offsets(id, ty);
                if !o.is_empty() {
                    hits.push((id, ty, o));
                }
            }
        }
        assert_eq!(hits, vec![(0x56, 0xE2, vec![16])]);
    }

    #[test]
    fn gaps_and_padding() {
        let t = TypeTable::default();
        let f = InteractionFrame::with_value(9, types::SAMPLE_COUNT, 8, 32).unwrap();
        let mut s = vec![1, 0, 1];
        s.extend(f.encode());
        s.extend([0, 0]);
        let r = frame_decode(&s, &t).unwrap();
        assert_eq!(r.frames, vec![LocatedFrame { offset: 3, frame: f }]);
        assert_eq!(r.gaps, vec![(0, 3), (75, 77)]);
    }

    #[test]
    fn dump_format() {
        let f = InteractionFrame::with_value(1, types::MODULATION, 2, 8).unwrap();
        assert_eq!(frame_dump(&[f]), "e256e2010402  preamble=E256E2 id=01 type=04 data[8]=02\n");
    }

    fn arb_frame() -> impl Strategy<Value = InteractionFrame> {
        let t = TypeTable::default();
        let entries: Vec<(u8, usize)> = t.iter().collect();
        (any::<u8>(), prop::sample::select(entries)).prop_flat_map(|(id, (ty, len))| {
            prop::collection::vec(0u8..2, len).prop_map(move |d| InteractionFrame::new(id, ty, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(f in arb_frame()) {
            let r = frame_decode(&f.encode(), &TypeTable::default()).unwrap();
            prop_assert_eq!(r.frames.len(), 1);
            prop_assert_eq!(&r.frames[0].frame, &f);
            prop_assert!(r.gaps.is_empty());
        }

        #[test]
        fn clean_stream_reencodes(fs in prop::collection::vec(arb_frame(), 1..6)) {
            let stream: Vec<u8> = fs.iter().flat_map(|f| f.encode()).collect();
            let r = frame_decode(&stream, &TypeTable::default()).unwrap();
            let again: Vec<u8> = r.frames.iter().flat_map(|l| l.frame.encode()).collect();
            prop_assert_eq!(again, stream);
        }
    }
}
