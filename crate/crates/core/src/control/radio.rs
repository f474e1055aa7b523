use std::time::Duration;

use super::registers::DeviceMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatencyComponent {
    McuWake,
    Regulators,
    FpgaInit,
    PllSettle,
}

/// Component latencies of mode switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyTable {
    pub mcu_wake: Duration,
    pub regulators: Duration,
    pub fpga_init: Duration,
    pub pll_settle: Duration,
}

impl Default for LatencyTable {
    fn default() -> Self {
        Self {
            mcu_wake: Duration::from_micros(300),
            regulators: Duration::from_micros(500),
            fpga_init: Duration::from_millis(58),
            pll_settle: Duration::from_millis(30),
        }
    }
}

impl LatencyTable {
    pub fn of(&self, c: LatencyComponent) -> Duration {
        match c {
            LatencyComponent::McuWake => self.mcu_wake,
            LatencyComponent::Regulators => self.regulators,
            LatencyComponent::FpgaInit => self.fpga_init,
            LatencyComponent::PllSettle => self.pll_settle,
        }
    }

    /// Components paid, in order, when switching `from → to`.
    pub fn components(&self, from: DeviceMode, to: DeviceMode) -> Vec<LatencyComponent> {
        use DeviceMode::*;
        use LatencyComponent::*;
        match (from, to) {
            (Sleep, Active) => vec![McuWake, Regulators, FpgaInit, PllSettle],
            (Sleep, Passive) => vec![McuWake, Regulators, FpgaInit],
            (Passive, Active) => vec![Regulators, PllSettle],
            _ => Vec::new(),
        }
    }

    pub fn schedule(&self, from: DeviceMode, to: DeviceMode) -> Vec<(LatencyComponent, Duration)> {
        self.components(from, to).into_iter().map(|c| (c, self.of(c))).collect()
    }

    pub fn latency(&self, from: DeviceMode, to: DeviceMode) -> Duration {
        self.schedule(from, to).iter().map(|(_, d)| *d).sum()
    }
}

/// Radio mode with an in-flight transition. `current` only changes once the
/// whole latency of the pending transition has elapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadioState {
    pub current: DeviceMode,
    pending: Option<(DeviceMode, Duration)>,
    pub clock: Duration,
    latencies: LatencyTable,
}

impl RadioState {
    pub fn new(current: DeviceMode, latencies: LatencyTable) -> Self {
        Self {
            current,
            pending: None,
            clock: Duration::ZERO,
            latencies,
        }
    }

    pub fn pending_target(&self) -> Option<DeviceMode> {
        self.pending.map(|p| p.0)
    }

    pub fn pending_latency(&self) -> Duration {
        self.pending.map_or(Duration::ZERO, |p| p.1)
    }

    pub fn latencies(&self) -> &LatencyTable {
        &self.latencies
    }

    /// Starts a transition. A transition already in flight is replaced and
    /// costed from the mode that is actually current. Zero-latency
    /// transitions complete immediately.
    pub fn transition(&self, target: DeviceMode) -> (Self, Vec<(LatencyComponent, Duration)>) {
        let sched = self.latencies.schedule(self.current, target);
        let total: Duration = sched.iter().map(|(_, d)| *d).sum();
        let mut s = self.clone();
        if total.is_zero() {
            s.current = target;
            s.pending = None;
        } else {
            s.pending = Some((target, total));
        }
        (s, sched)
    }

    /// Advances the simulated clock.
    pub fn advance(&self, dt: Duration) -> Self {
        let mut s = self.clone();
        s.clock += dt;
        if let Some((target, left)) = s.pending {
            if dt >= left {
                s.current = target;
                s.pending = None;
            } else {
                s.pending = Some((target, left - dt));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DeviceMode::*;

    #[test]
    fn prototype_latencies() {
        let t = LatencyTable::default();
        assert_eq!(t.latency(Sleep, Active), Duration::from_micros(88_800));
        assert_eq!(t.latency(Sleep, Passive), Duration::from_micros(58_800));
        assert_eq!(t.latency(Sleep, Sleep), Duration::ZERO);
        assert_eq!(t.latency(Active, Sleep), Duration::ZERO);
        assert_eq!(t.latency(Passive, Active), Duration::from_micros(30_500));
    }

    #[test]
    fn additivity() {
        let t = LatencyTable::default();
        let no_pll = LatencyTable { pll_settle: Duration::ZERO, ..t };
        assert_eq!(no_pll.latency(Sleep, Active), t.latency(Sleep, Passive));
        let sum: Duration = t.components(Sleep, Active).iter().map(|&c| t.of(c)).sum();
        assert_eq!(sum, t.latency(Sleep, Active));
    }

    #[test]
    fn current_changes_only_after_latency() {
        let s = RadioState::new(Sleep, LatencyTable::default());
        let (s, _) = s.transition(Active);
        assert_eq!(s.current, Sleep);
        let s = s.advance(Duration::from_micros(88_799));
        assert_eq!(s.current, Sleep);
        assert_eq!(s.pending_latency(), Duration::from_micros(1));
        let s = s.advance(Duration::from_micros(1));
        assert_eq!(s.current, Active);
        assert_eq!(s.clock, Duration::from_micros(88_800));
        let (s, sched) = s.transition(Sleep);
        assert!(sched.is_empty());
        assert_eq!(s.current, Sleep);
    }
}
