use super::bits::check_bits;
use super::ProtocolConfig;
use crate::error::{arg, Result};

/// Named bit range within an [`AirFrame`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpan {
    pub name: &'static str,
    pub start: usize,
    pub len: usize,
}

impl FieldSpan {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Line-coded-ready bit vector with its field map.
#[derive(Debug, Clone, PartialEq)]
pub struct AirFrame {
    bits: Vec<u8>,
    protocol: ProtocolConfig,
    annotations: Vec<FieldSpan>,
}

impl AirFrame {
    /// Spans must be contiguous from bit 0 and cover the whole vector.
    pub fn new(bits: Vec<u8>, protocol: ProtocolConfig, annotations: Vec<FieldSpan>) -> Result<Self> {
        check_bits(&bits)?;
        let mut at = 0;
        for s in &annotations {
            if s.start != at {
                return Err(arg(format!(
                    "field `{}` starts at bit {} but the previous field ends at {at}",
                    s.name, s.start
                )));
            }
            at = s.end();
        }
        if at != bits.len() {
            return Err(arg(format!("fields cover {at} of {} bits", bits.len())));
        }
        Ok(Self {
            bits,
            protocol,
            annotations,
        })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn protocol(&self) -> &ProtocolConfig {
        &self.protocol
    }

    pub fn annotations(&self) -> &[FieldSpan] {
        &self.annotations
    }

    pub fn field(&self, name: &str) -> Option<&[u8]> {
        self.annotations
            .iter()
            .find(|s| s.name == name)
            .map(|s| &self.bits[s.start..s.end()])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Builds contiguous spans from `(name, len)` pairs.
pub(crate) fn spans(fields: &[(&'static str, usize)]) -> Vec<FieldSpan> {
    let mut at = 0;
    fields
        .iter()
        .map(|&(name, len)| {
            let s = FieldSpan { name, start: at, len };
            at += len;
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_must_tile() {
        let cfg = ProtocolConfig::aiot_bpsk(1e3);
        let f = AirFrame::new(vec![1, 0, 1], cfg.clone(), spans(&[("a", 1), ("b", 2)])).unwrap();
        assert_eq!(f.field("b"), Some(&[0u8, 1][..]));
        assert!(AirFrame::new(vec![1, 0, 1], cfg.clone(), spans(&[("a", 1)])).is_err());
        let gap = vec![
            FieldSpan { name: "a", start: 0, len: 1 },
            FieldSpan { name: "b", start: 2, len: 1 },
        ];
        assert!(AirFrame::new(vec![1, 0, 1], cfg, gap).is_err());
    }
}
