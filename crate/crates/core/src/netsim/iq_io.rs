//! Raw IQ files: interleaved little-endian f32 pairs plus a `.meta` sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::frontend::IqBuffer;
use crate::scalar::Real;

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

pub fn iq_to_bytes<T: Real>(buf: &IqBuffer<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(buf.len() * 8);
    for z in buf.samples() {
        out.extend_from_slice(&(z.re.as_f64() as f32).to_le_bytes());
        out.extend_from_slice(&(z.im.as_f64() as f32).to_le_bytes());
    }
    out
}

pub fn iq_metadata<T: Real>(buf: &IqBuffer<T>) -> String {
    format!(
        "format = cf32_le\nsamples = {}\nsample_rate = {}\ncenter_freq = {}\ntimestamp = {}\n",
        buf.len(),
        buf.sample_rate(),
        buf.center_freq(),
        buf.timestamp()
    )
}

/// Writes `path` and its sidecar.
pub fn io_iq_write<T: Real>(path: &Path, buf: &IqBuffer<T>) -> Result<()> {
    fs::write(path, iq_to_bytes(buf))?;
    fs::write(sidecar_path(path), iq_metadata(buf))?;
    Ok(())
}

fn perr(path: &Path, reason: impl Into<String>) -> Error {
    Error::Parse {
        location: path.display().to_string(),
        reason: reason.into(),
    }
}

pub fn iq_from_bytes(bytes: &[u8], sample_rate: f64, center_freq: f64) -> Result<IqBuffer<f32>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse {
            location: format!("byte {}", bytes.len() - bytes.len() % 8),
            reason: format!("{} bytes is not a whole number of I/Q f32 pairs", bytes.len()),
        });
    }
    let f = |c: &[u8]| f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
    let samples = bytes.chunks_exact(8).map(|c| Complex::new(f(&c[..4]), f(&c[4..]))).collect();
    IqBuffer::new(samples, sample_rate, center_freq)
}

pub fn io_iq_read(path: &Path) -> Result<IqBuffer<f32>> {
    let meta_path = sidecar_path(path);
    let meta = fs::read_to_string(&meta_path)?;
    let mut fs_hz = None;
    let mut fc = 0.0;
    let mut ts = 0.0;
    let mut count = None;
    for (i, line) in meta.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| perr(&meta_path, format!("line {}: expected key = value", i + 1)))?;
        let num = || v.trim().parse::<f64>().map_err(|_| perr(&meta_path, format!("line {}: bad number {:?}", i + 1, v.trim())));
        match k.trim() {
            "format" if v.trim() == "cf32_le" => {}
            "format" => return Err(perr(&meta_path, format!("unsupported format {:?}", v.trim()))),
            "samples" => count = Some(num()? as usize),
            "sample_rate" => fs_hz = Some(num()?),
            "center_freq" => fc = num()?,
            "timestamp" => ts = num()?,
            other => return Err(perr(&meta_path, format!("line {}: unknown key {other:?}", i + 1))),
        }
    }
    let fs_hz = fs_hz.ok_or_else(|| perr(&meta_path, "missing sample_rate"))?;
    let bytes = fs::read(path)?;
    let buf = iq_from_bytes(&bytes, fs_hz, fc).map_err(|e| match e {
        Error::Parse { reason, .. } => perr(path, reason),
        e => e,
    })?;
    if let Some(n) = count {
        if n != buf.len() {
            return Err(perr(path, format!("sidecar promises {n} samples, file holds {}", buf.len())));
        }
    }
    Ok(buf.with_timestamp(ts))
}
