use crate::control::DeviceMode;
use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileKind {
    #[default]
    Prototype,
    Asic,
}

/// Per-mode power draw in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub p_passive: f64,
    pub p_active: f64,
    pub p_sleep: f64,
    pub asic_passive: f64,
    pub asic_active: f64,
    pub kind: ProfileKind,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            p_passive: 24.8e-3,
            p_active: 249e-3,
            p_sleep: 18e-6,
            asic_passive: 61.18e-6,
            asic_active: 17.2e-3,
            kind: ProfileKind::Prototype,
        }
    }
}

impl PowerProfile {
    pub fn prototype() -> Self {
        Self::default()
    }

    pub fn asic() -> Self {
        Self {
            kind: ProfileKind::Asic,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.p_passive, self.p_active, self.p_sleep, self.asic_passive, self.asic_active];
        if all.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(config("every profile power must be positive"));
        }
        if !(self.p_sleep < self.p_passive && self.p_passive < self.p_active) {
            return Err(config("prototype powers must order sleep < passive < active"));
        }
        if !(self.p_sleep < self.asic_passive && self.asic_passive < self.asic_active) {
            return Err(config("ASIC powers must order sleep < passive < active"));
        }
        Ok(())
    }

    /// Draw in `mode` for this profile's kind. Both kinds share the sleep floor.
    pub fn power(&self, mode: DeviceMode) -> f64 {
        match (self.kind, mode) {
            (_, DeviceMode::Sleep) => self.p_sleep,
            (ProfileKind::Prototype, DeviceMode::Passive) => self.p_passive,
            (ProfileKind::Prototype, DeviceMode::Active) => self.p_active,
            (ProfileKind::Asic, DeviceMode::Passive) => self.asic_passive,
            (ProfileKind::Asic, DeviceMode::Active) => self.asic_active,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering() {
        for p in [PowerProfile::prototype(), PowerProfile::asic()] {
            p.validate().unwrap();
            assert!(p.power(DeviceMode::Sleep) < p.power(DeviceMode::Passive));
            assert!(p.power(DeviceMode::Passive) < p.power(DeviceMode::Active));
        }
        let bad = PowerProfile { p_sleep: 0.1, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
