use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Room {
    pub width_m: f64,
    pub depth_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointConfig {
    pub room: Room,
    pub speed_min: f64,
    pub speed_max: f64,
    pub pause_max_s: f64,
    pub duration_s: f64,
    /// Output sample spacing.
    pub step_s: f64,
}

impl Default for WaypointConfig {
    /// Slow indoor walking in a 4 m × 4 m room for four hours.
    fn default() -> Self {
        Self {
            room: Room { width_m: 4.0, depth_m: 4.0 },
            speed_min: 0.3,
            speed_max: 1.2,
            pause_max_s: 60.0,
            duration_s: 4.0 * 3600.0,
            step_s: 1.0,
        }
    }
}

/// `(t, x, y)` samples, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    points: Vec<(f64, f64, f64)>,
}

impl MobilityTrace {
    pub fn new(points: Vec<(f64, f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(config("mobility trace is empty"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(config("mobility trace times must increase"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }

    pub fn duration(&self) -> f64 {
        self.points[self.points.len() - 1].0 - self.points[0].0
    }

    pub fn position_at(&self, t: f64) -> (f64, f64) {
        let p = &self.points;
        match p.iter().position(|q| q.0 > t) {
            Some(0) => (p[0].1, p[0].2),
            None => (p[p.len() - 1].1, p[p.len() - 1].2),
            Some(i) => {
                let (a, b) = (p[i - 1], p[i]);
                let u = (t - a.0) / (b.0 - a.0);
                (a.1 + u * (b.1 - a.1), a.2 + u * (b.2 - a.2))
            }
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["time_s", "x_m", "y_m"])?;
        for (t, x, y) in &self.points {
            wr.write_record([format!("{t:.3}"), format!("{x:.4}"), format!("{y:.4}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(r);
        let mut pts = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match vals {
                Ok(v) if v.len() == 3 => pts.push((v[0], v[1], v[2])),
                _ => {
                    return Err(Error::Parse {
                        location: format!("line {line}"),
                        reason: "expected time_s,x_m,y_m".into(),
                    })
                }
            }
        }
        Self::new(pts)
    }
}

/// Random-waypoint walk: pick a uniform destination, walk there at a
/// uniform speed, pause, repeat.
pub fn random_waypoint(cfg: &WaypointConfig, seed: u64) -> Result<MobilityTrace> {
    let Room { width_m: w, depth_m: h } = cfg.room;
    if !(w > 0.0 && h > 0.0 && cfg.step_s > 0.0 && cfg.duration_s > 0.0) {
        return Err(config("room, step and duration must be positive"));
    }
    if !(0.0 < cfg.speed_min && cfg.speed_min <= cfg.speed_max) || cfg.pause_max_s < 0.0 {
        return Err(config("need 0 < speed_min ≤ speed_max and a non-negative pause"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut legs = Vec::new();
    let mut t = 0.0;
    let mut pos = (rng.random_range(0.0..w), rng.random_range(0.0..h));
    legs.push((t, pos.0, pos.1));
    while t < cfg.duration_s {
        let dest = (rng.random_range(0.0..w), rng.random_range(0.0..h));
        let v = rng.random_range(cfg.speed_min..=cfg.speed_max);
        let dist = ((dest.0 - pos.0).powi(2) + (dest.1 - pos.1).powi(2)).sqrt();
        t += (dist / v).max(1e-6);
        legs.push((t, dest.0, dest.1));
        let pause = if cfg.pause_max_s > 0.0 { rng.random_range(0.0..cfg.pause_max_s) } else { 0.0 };
        if pause > 0.0 {
            t += pause;
            legs.push((t, dest.0, dest.1));
        }
        pos = dest;
    }
    let legs = MobilityTrace::new(legs)?;
    let n = (cfg.duration_s / cfg.step_s).round() as usize;
    let pts = (0..=n)
        .map(|i| {
            let t = i as f64 * cfg.step_s;
            let (x, y) = legs.position_at(t);
            (t, x, y)
        })
        .collect();
    MobilityTrace::new(pts)
}
