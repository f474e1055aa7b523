//! Golden-vector text format.
//!
//! ```text
//! # protocol: ble_adv
//! <label> <bit count> <hex, first bit in the MSB>
//! ```
//! Blank lines and further `#` lines are ignored.

use super::bits::{bits_to_hex, hex_to_bits};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenFrame {
    pub label: String,
    pub bits: Vec<u8>,
}

pub fn write_golden(protocol: &str, frames: &[GoldenFrame]) -> String {
    let mut s = format!("# protocol: {protocol}\n");
    for f in frames {
        s.push_str(&format!("{} {} {}\n", f.label, f.bits.len(), bits_to_hex(&f.bits)));
    }
    s
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("line {line}"),
        reason: reason.into(),
    }
}

/// Returns the protocol tag and the frames.
pub fn read_golden(text: &str) -> Result<(String, Vec<GoldenFrame>)> {
    let mut protocol = None;
    let mut frames = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some(tag) = c.trim().strip_prefix("protocol:") {
                protocol = Some(tag.trim().to_string());
            }
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [label, n, hex] = parts[..] else {
            return Err(parse_err(i + 1, "expected `<label> <bits> <hex>`"));
        };
        let n: usize = n.parse().map_err(|_| parse_err(i + 1, format!("bad bit count `{n}`")))?;
        if hex.len() != n.div_ceil(4) {
            return Err(parse_err(i + 1, format!("{} hex digits for {n} bits", hex.len())));
        }
        let bits = hex_to_bits(hex, n).map_err(|e| parse_err(i + 1, e.to_string()))?;
        frames.push(GoldenFrame {
            label: label.to_string(),
            bits,
        });
    }
    let protocol = protocol.ok_or_else(|| parse_err(1, "missing `# protocol:` header"))?;
    Ok((protocol, frames))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let f = vec![GoldenFrame {
            label: "x".into(),
            bits: vec![1, 0, 1, 1, 0, 1],
        }];
        let text = write_golden("demo", &f);
        assert_eq!(text, "# protocol: demo\nx 6 b4\n");
        assert_eq!(read_golden(&text).unwrap(), ("demo".to_string(), f));
    }

    #[test]
    fn errors_carry_line() {
        let e = read_golden("# protocol: a\n\nx 8\n").unwrap_err();
        assert!(e.to_string().contains("line 3"));
        assert!(read_golden("x 4 f\n").is_err());
        assert!(read_golden("# protocol: a\nx 9 ff\n").is_err());
    }
}
