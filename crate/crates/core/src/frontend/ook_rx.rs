use super::IqBuffer;
use crate::error::{arg, Error, Result};
use crate::scalar::Real;

/// Output of the envelope receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct OokDecision {
    pub bits: Vec<u8>,
    /// Mean filtered envelope over each bit period.
    pub soft: Vec<f64>,
    pub threshold: f64,
}

/// `|x[n]|` followed by a one-pole RC low-pass with time constant `tau` seconds.
/// A non-positive `tau` disables the filter.
pub fn envelope<T: Real>(rx: &IqBuffer<T>, tau: f64) -> Vec<f64> {
    let alpha = if tau > 0.0 {
        (-1.0 / (tau * rx.sample_rate())).exp()
    } else {
        0.0
    };
    let mut y = 0.0;
    let mut first = true;
    rx.samples()
        .iter()
        .map(|x| {
            let m = x.norm().as_f64();
            y = if first { m } else { alpha * y + (1.0 - alpha) * m };
            first = false;
            y
        })
        .collect()
}

/// Linear-interpolated percentile (`p` in `[0, 100]`) of unsorted values.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(arg("percentile of an empty set"));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Range {
            what: "percentile",
            value: p,
            min: 0.0,
            max: 100.0,
        });
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Noncoherent on-off keying receiver: envelope, RC filter, integrate and
/// dump per bit, then a threshold halfway between the 10th and 90th
/// percentiles of the per-bit values.
pub fn ook_receive<T: Real>(rx: &IqBuffer<T>, bit_rate: f64, tau: f64) -> Result<OokDecision> {
    if !(bit_rate > 0.0) {
        return Err(arg(format!("bit rate {bit_rate} must be positive")));
    }
    let spb = rx.sample_rate() / bit_rate;
    if spb < 1.0 {
        return Err(arg(format!(
            "bit rate {bit_rate} exceeds the sample rate {}",
            rx.sample_rate()
        )));
    }
    let env = envelope(rx, tau);
    let n_bits = (env.len() as f64 / spb + 1e-9).floor() as usize;
    if n_bits == 0 {
        return Err(arg("buffer shorter than one bit"));
    }
    let soft: Vec<f64> = (0..n_bits)
        .map(|k| {
            let a = (k as f64 * spb).round() as usize;
            let b = (((k + 1) as f64 * spb).round() as usize).min(env.len());
            env[a..b].iter().sum::<f64>() / (b - a) as f64
        })
        .collect();
    let p10 = percentile(&soft, 10.0)?;
    let p90 = percentile(&soft, 90.0)?;
    if !(p90 - p10 > 1e-9 * p90.abs().max(1e-30)) {
        return Err(Error::NoSignal(format!(
            "envelope range [{p10:.3e}, {p90:.3e}] has no contrast"
        )));
    }
    let threshold = 0.5 * (p10 + p90);
    let bits = soft.iter().map(|&s| u8::from(s > threshold)).collect();
    Ok(OokDecision {
        bits,
        soft,
        threshold,
    })
}
