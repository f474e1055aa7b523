use std::time::Duration;

use ambisim::control::*;
use proptest::prelude::*;

fn arb_frame() -> impl Strategy<Value = InteractionFrame> {
    (any::<u8>(), any::<u8>(), prop::collection::vec(0u8..2, 0..=MAX_DATA_BITS))
        .prop_map(|(id, t, d)| InteractionFrame::new(id, t, d).unwrap())
}

fn table_for(frames: &[InteractionFrame]) -> Option<TypeTable> {
    let mut t = TypeTable::new();
    for f in frames {
        match t.len_of(f.type_field) {
            Some(n) if n != f.data().len() => return None,
            _ => t = t.with(f.type_field, f.data().len()).unwrap(),
        }
    }
    Some(t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn clean_stream_decodes_to_its_frames(frames in prop::collection::vec(arb_frame(), 1..5)) {
        let table = table_for(&frames);
        prop_assume!(table.is_some());
        let stream: Vec<u8> = frames.iter().flat_map(|f| f.encode()).collect();
        let rep = frame_decode(&stream, &table.unwrap()).unwrap();
        let got: Vec<InteractionFrame> = rep.frames.iter().map(|l| l.frame.clone()).collect();
        prop_assert_eq!(&got, &frames);
        prop_assert!(rep.gaps.is_empty() && rep.rejected.is_empty());
        let again: Vec<u8> = got.iter().flat_map(|f| f.encode()).collect();
        prop_assert_eq!(again, stream);
    }

    #[test]
    fn oversized_data_is_rejected(extra in 1usize..64) {
        prop_assert!(InteractionFrame::new(1, 2, vec![0; MAX_DATA_BITS + extra]).is_err());
    }

    #[test]
    fn interpreting_twice_equals_once(mode in prop::sample::select(vec!["sleep", "passive", "active"]), id in 0u8..=255) {
        let mut bank = RegisterBank::default().set("device_id", &id.to_string()).unwrap();
        bank = bank.set("freq", "2.44 GHz").unwrap().set("mode", mode).unwrap();
        let cmds = interpret(&bank).unwrap();
        let mut once = HardwareModel::new(id);
        once.apply(&cmds);
        let mut twice = once.clone();
        twice.apply(&cmds);
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn latency_is_additive_and_pll_free_passive() {
    let t = LatencyTable::default();
    for (from, to) in [
        (DeviceMode::Sleep, DeviceMode::Active),
        (DeviceMode::Sleep, DeviceMode::Passive),
        (DeviceMode::Passive, DeviceMode::Active),
    ] {
        let sum: Duration = t.components(from, to).iter().map(|&c| t.of(c)).sum();
        assert_eq!(t.latency(from, to), sum);
    }
    let active = t.latency(DeviceMode::Sleep, DeviceMode::Active);
    assert_eq!(active - t.pll_settle, t.latency(DeviceMode::Sleep, DeviceMode::Passive));
}
