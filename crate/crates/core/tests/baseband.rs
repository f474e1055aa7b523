use ambisim::baseband::*;
use ambisim::dsp::{bin_frequency, linear_fit, magnitude_spectrum, peak_bin, stft_peak_track, tone_correlation, Window};
use ambisim::{PhaseParamsF32, PhaseParamsF64};
use num_complex::Complex;
use proptest::prelude::*;

const FS: f64 = 1e6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cosine_bound_and_level_range(a2 in -1e-4f64..1e-4, a1 in -0.4f64..0.4, a0 in -3.0f64..3.0, n in 1usize..600, bits in 1u8..=8) {
        prop_assume!(PhaseParamsF64::new(a2, a1, a0, n).is_ok());
        let p = PhaseParamsF64::new(a2, a1, a0, n).unwrap();
        let bb = synth_baseband(&p, FS).unwrap();
        prop_assert!(bb.samples().iter().all(|s| (-1.0..=1.0).contains(s)));
        let q = quantize(&bb, bits).unwrap();
        prop_assert!(q.levels().iter().all(|&l| u32::from(l) < 1 << bits));
    }

    #[test]
    fn fsk_peak_within_one_bin(f in -0.45f64..0.45, n in 256usize..2048, a0 in 0.0f64..1.0) {
        let f_hz = f * FS;
        let p = params_for_fsk::<f64>(f_hz, FS, n, a0).unwrap();
        let bb = synth_baseband(&p, FS).unwrap();
        let x: Vec<Complex<f64>> = bb.samples().iter().map(|&s| Complex::new(s, 0.0)).collect();
        let spec = magnitude_spectrum(&x, Window::Rectangular, n);
        let got = bin_frequency(peak_bin(&spec, 0), n, FS).abs();
        prop_assert!((got - f_hz.abs()).abs() <= FS / n as f64 + 1e-9, "{got} vs {f_hz}");
    }

    #[test]
    fn xor_shift_is_an_involution(bits in prop::collection::vec(0u8..2, 1..80), sps in 1usize..16, half in 2usize..20) {
        let seq = SwitchSequence::from_bits(&bits, sps, FS).unwrap();
        let f_shift = FS / (2 * half) as f64;
        let twice = apply_freq_shift(&apply_freq_shift(&seq, f_shift).unwrap(), f_shift).unwrap();
        prop_assert_eq!(twice.levels(), seq.levels());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn css_slope_recovered(bw in 0.1f64..0.4, n in 2048usize..8192) {
        let rate = bw * FS / (n as f64 / FS);
        let p = params_for_css::<f64>(-bw * FS / 2.0, rate, FS, n).unwrap();
        let x = synth_complex(&p).unwrap();
        let track = stft_peak_track(&x, FS, 128, 32, 8);
        let (slope, _) = linear_fit(&track);
        let want = p.a2 * FS * FS;
        prop_assert!((slope - want).abs() / want < 0.05, "{slope} vs {want}");
    }
}

#[test]
fn psk_argmax_picks_transmitted_phase() {
    for a0 in [0.0, 0.5] {
        for n in [1usize, 4, 16, 64] {
            let x = synth_complex(&params_for_psk(a0, n)).unwrap();
            let score = |c: f64| {
                let rot = Complex::from_polar(1.0, -std::f64::consts::TAU * c);
                (tone_correlation(&x, 0.0) * rot).re
            };
            let pick = if score(0.0) >= score(0.5) { 0.0 } else { 0.5 };
            assert_eq!(pick, a0, "a0 {a0} n {n}");
        }
    }
}

#[test]
fn f32_and_f64_agree() {
    let p64 = PhaseParamsF64::new(1e-5, 0.1, 0.25, 500).unwrap();
    let p32 = PhaseParamsF32::new(1e-5, 0.1, 0.25, 500).unwrap();
    let a = synth_baseband(&p64, FS).unwrap();
    let b = synth_baseband(&p32, FS).unwrap();
    for (x, y) in a.samples().iter().zip(b.samples()) {
        assert!((x - f64::from(*y)).abs() < 1e-3);
    }
}
