use num_complex::Complex;

use crate::error::{config, Error, Result};
use crate::scalar::Real;

/// Load impedance seen by the antenna, with its reference impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impedance<T> {
    pub z: Complex<T>,
    pub z0: T,
}

impl<T: Real> Impedance<T> {
    pub fn new(z: Complex<T>, z0: T) -> Result<Self> {
        if !(z0 > T::zero()) || !z0.is_finite() {
            return Err(config(format!("reference impedance {z0} must be positive")));
        }
        Ok(Self { z, z0 })
    }

    /// Load against the usual 50 Ω reference.
    pub fn ohms(re: T, im: T) -> Self {
        Self {
            z: Complex::new(re, im),
            z0: T::of(50.0),
        }
    }

    pub fn open(z0: T) -> Self {
        Self {
            z: Complex::new(T::infinity(), T::zero()),
            z0,
        }
    }

    pub fn short(z0: T) -> Self {
        Self {
            z: Complex::new(T::zero(), T::zero()),
            z0,
        }
    }

    pub fn matched(z0: T) -> Self {
        Self {
            z: Complex::new(z0, T::zero()),
            z0,
        }
    }

    pub fn is_passive(&self) -> bool {
        self.z.re >= T::zero()
    }
}

/// `Γ = (Z − Z0)/(Z + Z0)`; an infinite load is the open-circuit limit `Γ = 1`.
pub fn reflection_coefficient<T: Real>(imp: &Impedance<T>) -> Result<Complex<T>> {
    let z = imp.z;
    if z.re.is_infinite() || z.im.is_infinite() {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let den = z + imp.z0;
    if den.norm_sqr() == T::zero() {
        return Err(Error::Singularity(format!(
            "load {z} cancels the reference impedance {}",
            imp.z0
        )));
    }
    Ok((z - imp.z0) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matched_load_absorbs() {
        let g = reflection_coefficient(&Impedance::<f64>::matched(50.0)).unwrap();
        assert_eq!(g, Complex::new(0.0, 0.0));
    }

    #[test]
    fn open_reflects_in_phase() {
        let g = reflection_coefficient(&Impedance::<f64>::open(50.0)).unwrap();
        assert_eq!(g, Complex::new(1.0, 0.0));
    }

    #[test]
    fn short_reflects_inverted() {
        let g = reflection_coefficient(&Impedance::<f64>::short(50.0)).unwrap();
        assert_eq!(g, Complex::new(-1.0, 0.0));
    }

    #[test]
    fn negative_reference_is_singular() {
        let imp = Impedance::<f64>::ohms(-50.0, 0.0);
        assert!(matches!(reflection_coefficient(&imp), Err(Error::Singularity(_))));
    }

    #[test]
    fn reference_must_be_positive() {
        assert!(Impedance::new(Complex::new(1.0_f64, 0.0), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn passive_loads_never_amplify(re in 0.0f64..1e6, im in -1e6f64..1e6, z0 in 1.0f64..300.0) {
            let imp = Impedance::new(Complex::new(re, im), z0).unwrap();
            let g = reflection_coefficient(&imp).unwrap();
            prop_assert!(g.norm() <= 1.0 + 1e-12);
        }
    }
}
