//! Four-wire synchronous MCU↔FPGA link at the event level.
//!
//! The master asserts EN, then for every bit drives the data line after a
//! falling CLK edge and raises CLK half a period later; the slave samples on
//! rising edges. Lines: CLK, MOSI (MCU→FPGA data), MISO (FPGA→MCU data), EN.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Result};
use crate::phy::bits::check_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    Clk,
    Mosi,
    Miso,
    En,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Line::Clk => "CLK",
            Line::Mosi => "MOSI",
            Line::Miso => "MISO",
            Line::En => "EN",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// MCU clocks, data on MOSI.
    McuToFpga,
    /// FPGA clocks, data on MISO; the MCU decodes by edge detection.
    FpgaToMcu,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireConfig {
    pub clock_hz: f64,
    /// Peak data-edge jitter as a fraction of the clock period; each data
    /// edge moves by a uniform draw in `[-jitter, jitter]` periods.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for WireConfig {
    fn default() -> Self {
        Self {
            clock_hz: 1e6,
            jitter: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireEvent {
    pub t: f64,
    pub line: Line,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WireTransfer {
    pub direction: Direction,
    /// Time-ordered line transitions.
    pub trace: Vec<WireEvent>,
    pub received: Vec<u8>,
    /// Bits whose data edge left the setup/hold window around its sampling edge.
    pub violations: Vec<usize>,
}

pub fn wire_transfer(bits: &[u8], direction: Direction, cfg: WireConfig) -> Result<WireTransfer> {
    check_bits(bits)?;
    if !(cfg.clock_hz > 0.0) || cfg.jitter < 0.0 {
        return Err(arg("clock must be positive and jitter non-negative"));
    }
    let period = 1.0 / cfg.clock_hz;
    let data_line = match direction {
        Direction::McuToFpga => Line::Mosi,
        Direction::FpgaToMcu => Line::Miso,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trace = vec![WireEvent {
        t: 0.0,
        line: Line::En,
        level: 1,
    }];
    let mut data_edges = Vec::with_capacity(bits.len());
    for (k, &b) in bits.iter().enumerate() {
        let t0 = k as f64 * period;
        let d = if cfg.jitter > 0.0 {
            rng.random_range(-cfg.jitter..=cfg.jitter) * period
        } else {
            0.0
        };
        data_edges.push(t0 + d);
        trace.push(WireEvent {
            t: t0,
            line: Line::Clk,
            level: 0,
        });
        trace.push(WireEvent {
            t: t0 + d,
            line: data_line,
            level: b,
        });
        trace.push(WireEvent {
            t: t0 + period / 2.0,
            line: Line::Clk,
            level: 1,
        });
    }
    let end = bits.len() as f64 * period;
    trace.push(WireEvent {
        t: end,
        line: Line::Clk,
        level: 0,
    });
    trace.push(WireEvent {
        t: end,
        line: Line::En,
        level: 0,
    });
    trace.sort_by(|a, b| a.t.total_cmp(&b.t));

    let received = sample_rising_edges(&trace, data_line);
    let violations = data_edges
        .iter()
        .enumerate()
        .filter(|(k, &t)| (t - *k as f64 * period).abs() >= period / 2.0)
        .map(|(k, _)| k)
        .collect();
    Ok(WireTransfer {
        direction,
        trace,
        received,
        violations,
    })
}

/// Slave side: tracks line levels through the trace and latches the data
/// line on every CLK rising edge while EN is high. Simultaneous events apply
/// in trace order.
pub fn sample_rising_edges(trace: &[WireEvent], data_line: Line) -> Vec<u8> {
    let (mut clk, mut en, mut data) = (0u8, 0u8, 0u8);
    let mut out = Vec::new();
    for e in trace {
        match e.line {
            Line::Clk => {
                if clk == 0 && e.level == 1 && en == 1 {
                    out.push(data);
                }
                clk = e.level;
            }
            Line::En => en = e.level,
            l if l == data_line => data = e.level,
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::frame_encode;

    #[test]
    fn clean_transfer() {
        let bits = frame_encode(1, 2, &[]).unwrap();
        for dir in [Direction::McuToFpga, Direction::FpgaToMcu] {
            let w = wire_transfer(&bits, dir, WireConfig::default()).unwrap();
            assert_eq!(w.received, bits);
            assert!(w.violations.is_empty());
            assert!(w.trace.windows(2).all(|p| p[0].t <= p[1].t));
        }
        let w = wire_transfer(&bits, Direction::FpgaToMcu, WireConfig::default()).unwrap();
        assert!(w.trace.iter().all(|e| e.line != Line::Mosi));
    }

    #[test]
    fn small_jitter_is_harmless() {
        let bits = frame_encode(0xA5, 0x5A, &[1, 0, 1, 1, 0, 0, 1, 0]).unwrap();
        let cfg = WireConfig { jitter: 0.4, seed: 11, ..Default::default() };
        let w = wire_transfer(&bits, Direction::McuToFpga, cfg).unwrap();
        assert_eq!(w.received, bits);
        assert!(w.violations.is_empty());
    }

    #[test]
    fn excessive_jitter_is_flagged() {
        let bits = frame_encode(1, 2, &[]).unwrap();
        for seed in 0..20 {
            let cfg = WireConfig { jitter: 0.6, seed, ..Default::default() };
            let w = wire_transfer(&bits, Direction::McuToFpga, cfg).unwrap();
            assert!(!w.violations.is_empty(), "seed {seed}");
        }
    }
}
