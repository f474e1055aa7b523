use ambisim::baseband::SwitchSequence;
use ambisim::dsp::{fft, frequency_bin};
use ambisim::frontend::{reflection_coefficient, synth_passive, Impedance, IqBuffer};
use ambisim::IqBufferF64;
use num_complex::Complex;
use proptest::prelude::*;

const FS: f64 = 16e6;

fn offset_tone(f0: f64, len: usize) -> IqBufferF64 {
    let s = (0..len)
        .map(|n| Complex::from_polar(1.0, std::f64::consts::TAU * f0 * n as f64 / FS))
        .collect();
    IqBuffer::new(s, FS, 2.4e9).unwrap()
}

fn square(period: usize, len: usize) -> SwitchSequence {
    let bits: Vec<u8> = (0..len / (period / 2)).map(|i| (i % 2 == 0) as u8).collect();
    SwitchSequence::from_bits(&bits, period / 2, FS).unwrap()
}

#[test]
fn gated_tone_has_odd_harmonic_sidebands() {
    let (period, len) = (64usize, 1 << 14);
    let f_b = FS / period as f64;
    let f0 = FS / 256.0;
    let levels = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
    let out = synth_passive(&offset_tone(f0, len), &square(period, len), &levels).unwrap();
    let spec = fft(out.samples(), len);
    let mag = |f: f64| spec[frequency_bin(f, len, FS)].norm();
    for sign in [1.0, -1.0] {
        let first = mag(f0 + sign * f_b);
        assert!(first > 0.25 * len as f64, "no sideband at {}", f0 + sign * f_b);
        for k in [3.0, 5.0] {
            let ratio = mag(f0 + sign * k * f_b) / first;
            assert!((ratio * k - 1.0).abs() < 0.02, "k {k}: ratio {ratio}");
        }
        assert!(mag(f0 + sign * 2.0 * f_b) < 1e-6 * first);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn passive_output_never_exceeds_excitation(
        loads in prop::collection::vec((0.0f64..500.0, -500.0f64..500.0), 2),
        bits in prop::collection::vec(0u8..2, 1..64),
        amp in 0.01f64..10.0,
    ) {
        let levels: Vec<Complex<f64>> = loads
            .iter()
            .map(|&(r, x)| reflection_coefficient(&Impedance::ohms(r, x)).unwrap())
            .collect();
        let seq = SwitchSequence::from_bits(&bits, 4, FS).unwrap();
        let exc = IqBuffer::tone(amp, seq.len(), FS, 2.4e9).unwrap();
        let out = synth_passive(&exc, &seq, &levels).unwrap();
        prop_assert!(out.energy() <= exc.energy() * (1.0 + 1e-12));
    }
}
