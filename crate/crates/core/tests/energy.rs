use ambisim::control::{DeviceMode, LatencyTable};
use ambisim::energy::*;
use proptest::prelude::*;

// Charge/discharge phase times from numerical quadrature of
// dE/dt = P − I·sqrt(2E/C) between the thresholds.
const ORACLE_5MW_PASSIVE: (f64, f64) = (67.014747, 15.382970);
const ORACLE_20MW_ACTIVE: (f64, f64) = (16.690358, 1.345672);

fn cfg() -> SimConfig {
    SimConfig::default()
}

#[test]
fn exhaustion_period_matches_two_phase_oracle() {
    let p = PowerProfile::prototype();
    for (ph, task, (tc, td)) in [(5e-3, 24.8e-3, ORACLE_5MW_PASSIVE), (20e-3, 249e-3, ORACLE_20MW_ACTIVE)] {
        let tl = run_exhaustion_mode(&EnergyState::default(), &p, &HarvestSource::Battery(ph), task, 20.0 * (tc + td), &cfg()).unwrap();
        let st = &tl.stats;
        let period = st.mean_period.unwrap();
        assert!((period - (tc + td)).abs() / (tc + td) < 0.01, "period {period}");
        assert!((st.mean_charge_time.unwrap() - tc).abs() / tc < 0.01);
        assert!((st.mean_discharge_time.unwrap() - td).abs() / td < 0.02);
        assert!((st.duty - td / (tc + td)).abs() / (td / (tc + td)) < 0.05, "duty {}", st.duty);
    }
}

#[test]
fn solar_led_anchor_duty() {
    let p = PowerProfile::prototype();
    let s = EnergyState::default();
    let cal = calibrate_harvesters(&p, &s).unwrap();
    let sch = DutySchedule::continuous(1.0, DeviceMode::Active);
    let tl = run_duty_cycle_mode(&s, &p, &cal.led(164.0), &sch, &LatencyTable::default(), 2000.0, &cfg()).unwrap();
    assert!((tl.stats.duty - 0.02).abs() < 0.01, "{}", tl.stats.duty);
}

#[test]
fn dt_convergence() {
    let p = PowerProfile::prototype();
    let run = |dt| {
        let c = SimConfig { dt, ..cfg() };
        run_exhaustion_mode(&EnergyState::default(), &p, &HarvestSource::Battery(5e-3), 24.8e-3, 800.0, &c)
            .unwrap()
            .stats
            .mean_period
            .unwrap()
    };
    let (a, b) = (run(1e-3), run(1e-4));
    assert!((a - b).abs() / b < 1e-3, "{a} {b}");
}

#[test]
fn profile_ordering_per_unit_time() {
    for p in [PowerProfile::prototype(), PowerProfile::asic()] {
        let e = |m| p.power(m) * 3600.0;
        assert!(e(DeviceMode::Sleep) <= e(DeviceMode::Passive));
        assert!(e(DeviceMode::Passive) <= e(DeviceMode::Active));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accounting_closes(ph in 0.0f64..0.05, task in 1e-3f64..0.3, v0 in 0.0f64..5.5) {
        let s = EnergyState::default().with_voltage(v0);
        let tl = run_exhaustion_mode(&s, &PowerProfile::prototype(), &HarvestSource::Battery(ph), task, 120.0, &cfg()).unwrap();
        prop_assert!(tl.budget.residual().abs() <= tl.budget.max_step_flux);
        for smp in &tl.samples {
            prop_assert!(smp.voltage >= 0.0 && smp.voltage <= s.v_max);
        }
    }

    #[test]
    fn exhaustion_hysteresis(ph in 1e-3f64..0.02, task in 0.03f64..0.3) {
        let s = EnergyState::default();
        let tl = run_exhaustion_mode(&s, &PowerProfile::prototype(), &HarvestSource::Battery(ph), task, 300.0, &cfg()).unwrap();
        let mut last: Option<f64> = None;
        for smp in tl.samples.iter().filter(|x| x.event.is_some()) {
            match smp.event.unwrap() {
                EnergyEvent::Activated => prop_assert!(smp.voltage >= s.v_activate),
                EnergyEvent::Brownout => prop_assert!(smp.voltage <= s.v_cutoff),
                _ => {}
            }
            if let Some(t) = last {
                prop_assert!(smp.t - t >= cfg().dt - 1e-12, "chatter at {}", smp.t);
            }
            last = Some(smp.t);
        }
    }

    #[test]
    fn duty_monotone_in_harvest(ph in 1e-3f64..0.02, k in 1.2f64..3.0) {
        let p = PowerProfile::prototype();
        let duty = |ph| {
            run_exhaustion_mode(&EnergyState::default(), &p, &HarvestSource::Battery(ph), 24.8e-3, 1500.0, &cfg())
                .unwrap()
                .stats
                .duty
        };
        prop_assert!(duty(ph * k) + 5e-3 >= duty(ph));
    }
}
