use crate::error::{Error, Result};

/// Lowest synthesizable carrier, Hz.
pub const PLL_MIN_HZ: f64 = 54e6;
/// Highest synthesizable carrier, Hz.
pub const PLL_MAX_HZ: f64 = 6.8e9;
/// Lock time after a retune, seconds.
pub const PLL_SETTLE_S: f64 = 0.030;

/// Fractional-N carrier synthesizer state, advanced on the simulated clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PllState {
    pub freq: f64,
    pub power_dbm: f64,
    pub settled: bool,
    pub settle_time: f64,
    /// Time elapsed since the last tune command.
    pub elapsed: f64,
}

impl PllState {
    /// Advances the simulated clock by `dt` seconds.
    pub fn advance(mut self, dt: f64) -> Self {
        self.elapsed += dt.max(0.0);
        if self.elapsed >= self.settle_time {
            self.settled = true;
        }
        self
    }

    /// Output amplitude with 0 dBm mapped to unit full scale.
    pub fn amplitude(&self) -> f64 {
        10f64.powf(self.power_dbm / 20.0)
    }
}

/// Programs a new carrier. The returned state is unlocked until the clock
/// advances past the settle time.
pub fn pll_tune(target_freq: f64, target_power_dbm: f64) -> Result<PllState> {
    if !(PLL_MIN_HZ..=PLL_MAX_HZ).contains(&target_freq) {
        return Err(Error::Range {
            what: "PLL frequency",
            value: target_freq,
            min: PLL_MIN_HZ,
            max: PLL_MAX_HZ,
        });
    }
    if !target_power_dbm.is_finite() {
        return Err(Error::Config("PLL output power must be finite".into()));
    }
    Ok(PllState {
        freq: target_freq,
        power_dbm: target_power_dbm,
        settled: false,
        settle_time: PLL_SETTLE_S,
        elapsed: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tunes_the_measured_carriers() {
        for f in [920e6, 2.402e9, 5.8e9] {
            let s = pll_tune(f, 0.0).unwrap();
            assert!(!s.settled);
            assert_eq!(s.settle_time, 0.030);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(pll_tune(6.9e9, 0.0), Err(Error::Range { .. })));
        assert!(matches!(pll_tune(50e6, 0.0), Err(Error::Range { .. })));
        assert!(pll_tune(54e6, 0.0).is_ok());
        assert!(pll_tune(6.8e9, 0.0).is_ok());
    }

    #[test]
    fn settles_after_thirty_ms() {
        let s = pll_tune(2.402e9, 2.0).unwrap();
        assert!(!s.advance(0.029).settled);
        assert!(s.advance(0.029).advance(0.001).settled);
        assert!(s.advance(0.030).settled);
    }

    #[test]
    fn amplitude_reference() {
        assert_eq!(pll_tune(1e9, 0.0).unwrap().amplitude(), 1.0);
        assert!((pll_tune(1e9, 20.0).unwrap().amplitude() - 10.0).abs() < 1e-12);
    }
}
