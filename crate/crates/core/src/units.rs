//! Text quantities with unit suffixes, as written in register and scenario files.

use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Hertz,
    BitRate,
    Seconds,
    Volts,
    Watts,
    Farads,
    Amperes,
    Meters,
    /// dB or dBm; an optional `dB`/`dBm` suffix is accepted.
    Decibel,
    Plain,
}

fn scales(unit: Unit) -> &'static [(&'static str, f64)] {
    match unit {
        Unit::Hertz => &[("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)],
        Unit::BitRate => &[("gbps", 1e9), ("mbps", 1e6), ("kbps", 1e3), ("bps", 1.0)],
        Unit::Seconds => &[("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9), ("min", 60.0), ("h", 3600.0), ("s", 1.0)],
        Unit::Volts => &[("mv", 1e-3), ("v", 1.0)],
        Unit::Watts => &[("mw", 1e-3), ("uw", 1e-6), ("µw", 1e-6), ("nw", 1e-9), ("w", 1.0)],
        Unit::Farads => &[("mf", 1e-3), ("uf", 1e-6), ("µf", 1e-6), ("nf", 1e-9), ("f", 1.0)],
        Unit::Amperes => &[("ma", 1e-3), ("ua", 1e-6), ("µa", 1e-6), ("na", 1e-9), ("a", 1.0)],
        Unit::Meters => &[("mm", 1e-3), ("cm", 1e-2), ("km", 1e3), ("m", 1.0)],
        Unit::Decibel => &[("dbm", 1.0), ("db", 1.0)],
        Unit::Plain => &[],
    }
}

/// Parses `"2.402GHz"`, `"+2 dBm"`, `"250kbps"`, `"30 ms"`; a bare number is
/// taken in the base unit.
pub fn parse_quantity(text: &str, unit: Unit) -> Result<f64> {
    let s = text.trim();
    let lower = s.to_lowercase();
    let mut number = lower.as_str();
    let mut scale = 1.0;
    for &(suffix, k) in scales(unit) {
        if let Some(head) = lower.strip_suffix(suffix) {
            number = head;
            scale = k;
            break;
        }
    }
    let number = number.trim().trim_start_matches('+');
    let v: f64 = number
        .parse()
        .map_err(|_| config(format!("cannot read `{s}` as a {unit:?} quantity")))?;
    if !v.is_finite() {
        return Err(config(format!("`{s}` is not finite")));
    }
    Ok(v * scale)
}

pub fn parse_bool(text: &str) -> Result<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(config(format!("`{other}` is not a boolean"))),
    }
}

/// Integer with optional `0x` prefix.
pub fn parse_int(text: &str) -> Result<u64> {
    let t = text.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => t.parse(),
    };
    r.map_err(|_| config(format!("`{t}` is not an unsigned integer")))
}
