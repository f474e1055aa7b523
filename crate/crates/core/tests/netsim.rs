use ambisim::netsim::*;
use ambisim::phy::{ProtocolConfig, TxPath};
use ambisim::IqBufferF32;
use num_complex::Complex;
use proptest::prelude::*;

fn bpsk_rows(seed: u64, ebn0: &[f64], bits: usize) -> Vec<SweepRow> {
    let spec = SweepSpec::new(SweepAxis::EbN0Db(ebn0.to_vec()), bits, seed);
    ber_sweep(&ProtocolConfig::aiot_bpsk(1e5), &ChannelModel::default(), &spec).unwrap()
}

#[test]
fn confidence_intervals_cover_the_analytic_ber() {
    let mut covered = 0;
    let mut total = 0;
    for seed in 0..40u64 {
        for r in bpsk_rows(seed, &[2.0, 4.0], 20_000) {
            total += 1;
            covered += usize::from(r.ci_low <= r.analytic_ber && r.analytic_ber <= r.ci_high);
        }
    }
    assert!(covered as f64 >= 0.9 * total as f64, "{covered}/{total}");
}

#[test]
fn backscatter_ber_dominates_direct() {
    let cal = calibrate_link(&LinkAnchors::default()).unwrap();
    let cfg = ProtocolConfig::amp_uplink(250e3);
    let ds: Vec<f64> = vec![16.0, 24.0, 32.0, 40.0];
    let mut spec = SweepSpec::new(SweepAxis::DistanceM(ds.clone()), 20_000, 5);
    spec.tx_power_dbm = 15.0;
    spec.path = TxPath::Passive;
    let bs = ber_sweep(&cfg, &cal.uplink_channel(0), &spec).unwrap();
    let direct_ch = ChannelModel { path: PathKind::Direct, ..cal.uplink_channel(0) };
    spec.path = TxPath::Active;
    let dir = ber_sweep(&cfg, &direct_ch, &spec).unwrap();
    for (b, d) in bs.iter().zip(&dir) {
        // the direct link at these ranges is essentially error free
        assert!(b.ber + 3.0 * b.half_width() >= d.ber, "{} m: {} < {}", b.x, b.ber, d.ber);
        assert!(b.rx_power_dbm < d.rx_power_dbm);
    }
    assert!(bs.last().unwrap().ber > dir.last().unwrap().ber);
}

#[test]
fn ook_ber_does_not_rise_with_snr() {
    let mut ch = ChannelModel::default();
    ch.noise_bandwidth = Some(ook_noise_bandwidth(1e5));
    let spec = SweepSpec::new(SweepAxis::EbN0Db(vec![4.0, 6.0, 8.0, 10.0, 12.0]), 40_000, 9);
    let rows = ber_sweep(&ProtocolConfig::aiot_ook(1e5), &ch, &spec).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].ber <= w[0].ber + w[0].half_width(), "{} dB {} > {} dB {}", w[1].x, w[1].ber, w[0].x, w[0].ber);
    }
}

#[test]
fn sweep_rows_are_deterministic() {
    assert_eq!(bpsk_rows(3, &[3.0, 5.0], 5000), bpsk_rows(3, &[3.0, 5.0], 5000));
    assert_ne!(bpsk_rows(3, &[3.0], 5000)[0].errors, bpsk_rows(4, &[3.0], 5000)[0].errors);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn hybrid_sits_between_the_fixed_policies(seed in any::<u64>()) {
        let wp = WaypointConfig { duration_s: 1800.0, ..Default::default() };
        let trace = random_waypoint(&wp, seed).unwrap();
        let r = hybrid_policy_run(&HybridConfig::default(), &trace, seed).unwrap();
        prop_assert!(r.passive.energy_j <= r.hybrid.energy_j && r.hybrid.energy_j <= r.active.energy_j);
        prop_assert!(r.passive.prr <= r.hybrid.prr && r.hybrid.prr <= r.active.prr);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn iq_file_roundtrip_is_bit_exact(s in prop::collection::vec((any::<f32>(), any::<f32>()), 1..300), fs in 1e3f64..1e8) {
        let s: Vec<Complex<f32>> = s.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| Complex::new(a, b)).collect();
        prop_assume!(!s.is_empty());
        let buf = IqBufferF32::new(s, fs, 2.4e9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.iq");
        io_iq_write(&p, &buf).unwrap();
        let back = io_iq_read(&p).unwrap();
        prop_assert_eq!(back.samples().len(), buf.samples().len());
        for (a, b) in back.samples().iter().zip(buf.samples()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}

#[test]
fn truncated_iq_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.iq");
    let buf = IqBufferF32::tone(1.0, 8, 1e6, 0.0).unwrap();
    io_iq_write(&p, &buf).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    std::fs::write(&p, &bytes[..bytes.len() - 4]).unwrap();
    assert!(matches!(io_iq_read(&p), Err(ambisim::Error::Parse { .. })));
}

#[test]
fn scenario_errors_name_key_and_line() {
    let text = "[device]\nmode = passive\n\n# comment\nwarp_drive = on\n";
    match Scenario::parse(text) {
        Err(ambisim::Error::Parse { location, reason }) => {
            assert_eq!(location, "line 5");
            assert!(reason.contains("warp_drive"), "{reason}");
        }
        other => panic!("{other:?}"),
    }
}
