use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dsp::{fft, ifft, mean_power};
use crate::error::{arg, config, Result};
use crate::frontend::IqBuffer;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    Direct,
    /// Excitation leg then reflection leg. With `excitation_m` unset both
    /// legs span the link distance (monostatic reader).
    Backscatter { excitation_m: Option<f64> },
}

/// Log-distance path loss plus complex AWGN. Amplitude is referenced so that
/// a unit-magnitude sample carries 1 mW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub path: PathKind,
    pub exponent: f64,
    /// Loss at 1 m, per leg.
    pub ref_loss_db: f64,
    /// One-sided noise density, W/Hz.
    pub noise_density: f64,
    /// Noise is limited to this two-sided bandwidth around `noise_offset_hz`;
    /// `None` leaves it white across the sample rate.
    pub noise_bandwidth: Option<f64>,
    pub noise_offset_hz: f64,
    pub seed: u64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            path: PathKind::Direct,
            exponent: 2.0,
            ref_loss_db: 0.0,
            noise_density: 0.0,
            noise_bandwidth: None,
            noise_offset_hz: 0.0,
            seed: 0,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > 0.0) || !self.ref_loss_db.is_finite() {
            return Err(config("path-loss exponent must be positive and reference loss finite"));
        }
        if !(self.noise_density >= 0.0) {
            return Err(config("noise density must be non-negative"));
        }
        if let Some(b) = self.noise_bandwidth {
            if !(b > 0.0) {
                return Err(config("noise bandwidth must be positive"));
            }
        }
        if let PathKind::Backscatter { excitation_m: Some(d) } = self.path {
            if !(d > 0.0) {
                return Err(config("excitation distance must be positive"));
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn leg_loss_db(&self, d: f64) -> f64 {
        self.ref_loss_db + 10.0 * self.exponent * d.log10()
    }

    /// Total loss over the link at distance `d`, dB.
    pub fn path_loss_db(&self, d: f64) -> f64 {
        match self.path {
            PathKind::Direct => self.leg_loss_db(d),
            PathKind::Backscatter { excitation_m } => self.leg_loss_db(excitation_m.unwrap_or(d)) + self.leg_loss_db(d),
        }
    }

    /// Noise power per sample at `fs`, mW.
    pub fn noise_power_mw(&self, fs: f64) -> f64 {
        1e3 * self.noise_density * self.noise_bandwidth.map_or(fs, |b| b.min(fs))
    }
}

/// Scales by the path loss at `distance_m` and adds noise drawn from the
/// model's seed.
pub fn channel_apply<T: Real>(tx: &IqBuffer<T>, ch: &ChannelModel, distance_m: f64) -> Result<IqBuffer<T>> {
    if !(distance_m > 0.0) {
        return Err(arg(format!("distance {distance_m} m must be positive")));
    }
    ch.validate()?;
    let gain = 10f64.powf(-ch.path_loss_db(distance_m) / 20.0);
    let mut out = tx.clone();
    out.scale(T::of(gain));
    add_noise(&mut out, ch)?;
    Ok(out)
}

/// Adds the model's noise without path loss.
pub fn add_noise<T: Real>(buf: &mut IqBuffer<T>, ch: &ChannelModel) -> Result<()> {
    if ch.noise_density == 0.0 || buf.is_empty() {
        return Ok(());
    }
    let fs = buf.sample_rate();
    let mut rng = ChaCha8Rng::seed_from_u64(ch.seed);
    let sigma = (1e3 * ch.noise_density * fs / 2.0).sqrt();
    let mut noise: Vec<Complex<f64>> = (0..buf.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(re * sigma, im * sigma)
        })
        .collect();
    if let Some(b) = ch.noise_bandwidth {
        if b < fs {
            noise = band_limit(&noise, fs, ch.noise_offset_hz, b);
        }
    }
    for (z, n) in buf.samples_mut().iter_mut().zip(noise) {
        *z += Complex::new(T::of(n.re), T::of(n.im));
    }
    Ok(())
}

/// Ideal brick-wall filter keeping `|f − center| ≤ width/2`.
fn band_limit(x: &[Complex<f64>], fs: f64, center: f64, width: f64) -> Vec<Complex<f64>> {
    let n = x.len();
    let mut spec = fft(x, n);
    for (k, v) in spec.iter_mut().enumerate() {
        let f = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 } * fs / n as f64;
        // distance on the circle of aliases
        let d = (f - center + fs / 2.0).rem_euclid(fs) - fs / 2.0;
        if d.abs() > width / 2.0 {
            *v = Complex::new(0.0, 0.0);
        }
    }
    let scale = 1.0 / n as f64;
    ifft(&spec).into_iter().map(|z| z * scale).collect()
}

/// `10·log10(mean power) + offset` over the last `window` samples (all
/// samples when `None`).
pub fn rssi_estimate<T: Real>(rx: &IqBuffer<T>, offset_db: f64, window: Option<usize>) -> Result<f64> {
    if rx.is_empty() {
        return Err(arg("RSSI of an empty buffer"));
    }
    let s = rx.samples();
    let w = window.unwrap_or(s.len()).clamp(1, s.len());
    let p = mean_power(&s[s.len() - w..]).as_f64();
    Ok(10.0 * p.max(1e-300).log10() + offset_db)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize) -> IqBuffer<f64> {
        IqBuffer::tone(1.0, n, 1e6, 0.0).unwrap()
    }

    #[test]
    fn reference_distance_is_lossless() {
        let ch = ChannelModel::default();
        let rx = channel_apply(&tone(64), &ch, 1.0).unwrap();
        assert_eq!(rx.samples(), tone(64).samples());
    }

    #[test]
    fn backscatter_adds_one_leg() {
        let d = ChannelModel { ref_loss_db: 30.0, ..Default::default() };
        let b = ChannelModel { path: PathKind::Backscatter { excitation_m: None }, ..d };
        let pd = rssi_estimate(&channel_apply(&tone(16), &d, 7.0).unwrap(), 0.0, None).unwrap();
        let pb = rssi_estimate(&channel_apply(&tone(16), &b, 7.0).unwrap(), 0.0, None).unwrap();
        assert!((pd - pb - d.leg_loss_db(7.0)).abs() < 1e-9);
    }

    #[test]
    fn noise_power_and_determinism() {
        let ch = ChannelModel { noise_density: 1e-9, seed: 5, ..Default::default() };
        let z = IqBuffer::new(vec![Complex::new(0.0, 0.0); 1 << 16], 1e6, 0.0).unwrap();
        let a = channel_apply(&z, &ch, 1.0).unwrap();
        let p = mean_power(a.samples());
        assert!((p / ch.noise_power_mw(1e6) - 1.0).abs() < 0.03, "{p}");
        assert_eq!(a, channel_apply(&z, &ch, 1.0).unwrap());
        let lim = ChannelModel { noise_bandwidth: Some(1e5), ..ch };
        let p = mean_power(channel_apply(&z, &lim, 1.0).unwrap().samples());
        assert!((p / lim.noise_power_mw(1e6) - 1.0).abs() < 0.05, "{p}");
    }

    #[test]
    fn rssi_reference() {
        assert!(rssi_estimate(&tone(10), 0.0, None).unwrap().abs() < 1e-12);
        let mut h = tone(10);
        h.scale(0.5);
        assert!((rssi_estimate(&h, 0.0, Some(4)).unwrap() + 6.0206).abs() < 1e-3);
    }
}
