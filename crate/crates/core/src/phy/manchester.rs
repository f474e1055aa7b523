use crate::error::{Error, Result};
use super::bits::check_bits;

/// IEEE polarity: `1 → [1, 0]`, `0 → [0, 1]`.
pub fn manchester_encode(bits: &[u8]) -> Result<Vec<u8>> {
    check_bits(bits)?;
    Ok(bits.iter().flat_map(|&b| [b, 1 - b]).collect())
}

/// Error index is the chip-pair (= bit) position.
pub fn manchester_decode(chips: &[u8]) -> Result<Vec<u8>> {
    if chips.len() % 2 != 0 {
        return Err(Error::Decode {
            index: chips.len() / 2,
            reason: format!("odd chip count {}", chips.len()),
        });
    }
    chips
        .chunks(2)
        .enumerate()
        .map(|(i, p)| match (p[0], p[1]) {
            (1, 0) => Ok(1),
            (0, 1) => Ok(0),
            (a, b) => Err(Error::Decode {
                index: i,
                reason: format!("illegal chip pair [{a}, {b}]"),
            }),
        })
        .collect()
}

/// Soft decision by comparing the two half-bit energies. Never fails on a
/// noisy pair; `soft[i] = first − second`.
pub fn manchester_decide(chip_soft: &[f64]) -> (Vec<u8>, Vec<f64>) {
    chip_soft
        .chunks_exact(2)
        .map(|p| {
            let d = p[0] - p[1];
            (u8::from(d > 0.0), d)
        })
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polarity() {
        assert_eq!(manchester_encode(&[1, 0]).unwrap(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn illegal_pairs() {
        assert_eq!(
            manchester_decode(&[1, 1]),
            Err(Error::Decode {
                index: 0,
                reason: "illegal chip pair [1, 1]".into()
            })
        );
        assert!(matches!(manchester_decode(&[1, 0, 0, 0]), Err(Error::Decode { index: 1, .. })));
        assert!(matches!(manchester_decode(&[1, 0, 1]), Err(Error::Decode { .. })));
    }

    #[test]
    fn soft_decisions() {
        let (b, s) = manchester_decide(&[0.9, 0.1, 0.2, 0.7]);
        assert_eq!(b, vec![1, 0]);
        assert!((s[1] + 0.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn inverse_and_balance(bits in prop::collection::vec(0u8..2, 0..1024)) {
            let chips = manchester_encode(&bits).unwrap();
            prop_assert_eq!(chips.iter().filter(|&&c| c == 1).count() * 2, chips.len());
            prop_assert_eq!(manchester_decode(&chips).unwrap(), bits);
        }
    }
}
