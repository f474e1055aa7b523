//! Closed-form error rates used as oracles and by the link budget.

use statrs::function::erf::erfc;

use crate::phy::Modulation;

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Coherent BPSK, `Q(√(2·Eb/N0))`.
pub fn ber_bpsk(ebn0: f64) -> f64 {
    q_function((2.0 * ebn0).sqrt())
}

/// Noncoherent orthogonal binary signalling, `½·exp(−Eb/2N0)`. Also the
/// high-SNR form for envelope-detected OOK with `Eb` the average bit energy.
pub fn ber_noncoherent(ebn0: f64) -> f64 {
    0.5 * (-ebn0 / 2.0).exp()
}

pub fn analytic_ber(modulation: Modulation, ebn0: f64) -> f64 {
    match modulation {
        Modulation::Bpsk => ber_bpsk(ebn0),
        _ => ber_noncoherent(ebn0),
    }
}

/// Eb/N0 (linear) at which [`analytic_ber`] equals `ber`.
pub fn required_ebn0(modulation: Modulation, ber: f64) -> f64 {
    match modulation {
        Modulation::Bpsk => {
            let (mut lo, mut hi) = (0.0f64, 100.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if ber_bpsk(mid) > ber {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
        _ => 2.0 * (1.0 / (2.0 * ber)).ln(),
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Packet error rate for independent bit errors.
pub fn per_from_ber(ber: f64, bits: usize) -> f64 {
    1.0 - (1.0 - ber).powi(bits as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Q(1) and Q(3) from tables
        assert!((q_function(1.0) - 0.158_655_253_9).abs() < 1e-9);
        assert!((q_function(3.0) - 1.349_898_031_6e-3).abs() < 1e-12);
        // BPSK at 9.6 dB is the textbook 1e-5 point
        assert!((ber_bpsk(db_to_lin(9.5879)) / 1e-5 - 1.0).abs() < 0.01);
    }

    #[test]
    fn inverse() {
        for m in [Modulation::Bpsk, Modulation::Ook] {
            let g = required_ebn0(m, 0.01);
            assert!((analytic_ber(m, g) - 0.01).abs() < 1e-9);
        }
    }

    #[test]
    fn wilson() {
        let (lo, hi) = wilson_interval(10, 100, 1.96);
        assert!((lo - 0.0552).abs() < 1e-3 && (hi - 0.1744).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 1000, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.004);
    }
}
