use std::io::{Read, Write};

use super::{HarvestTrace, Timeline};
use crate::error::{Error, Result};

/// Reads `time_s,power_w` rows (a header row is optional).
pub fn read_harvest_trace<R: Read>(r: R) -> Result<HarvestTrace> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut pts = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        let perr = |reason: String| Error::Parse { location: format!("line {line}"), reason };
        if rec.len() != 2 {
            return Err(perr(format!("expected 2 columns, found {}", rec.len())));
        }
        let (a, b) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match (a, b) {
            (Ok(t), Ok(p)) => pts.push((t, p)),
            _ if i == 0 => continue,
            _ => return Err(perr(format!("non-numeric row {:?}", rec.iter().collect::<Vec<_>>()))),
        }
    }
    HarvestTrace::new(pts)
}

/// Writes `time_s,voltage_v,mode,event`.
pub fn write_timeline_csv<W: Write>(w: W, tl: &Timeline) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["time_s", "voltage_v", "mode", "event"])?;
    for s in &tl.samples {
        let ev = s.event.map(|e| e.to_string()).unwrap_or_default();
        wr.write_record([format!("{:.6}", s.t), format!("{:.6}", s.voltage), s.mode.to_string(), ev])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{EnergyMode, TimelineSample};

    #[test]
    fn trace_roundtrip_and_errors() {
        let t = read_harvest_trace("time_s,power_w\n0,0.001\n10, 0.002\n".as_bytes()).unwrap();
        assert_eq!(t.points(), &[(0.0, 0.001), (10.0, 0.002)]);
        let e = read_harvest_trace("0,1\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "line 2"), "{e}");
    }

    #[test]
    fn timeline_csv() {
        let tl = Timeline {
            samples: vec![TimelineSample { t: 0.5, voltage: 2.25, mode: EnergyMode::Running, event: None }],
            ..Default::default()
        };
        let mut out = Vec::new();
        write_timeline_csv(&mut out, &tl).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "time_s,voltage_v,mode,event\n0.500000,2.250000,running,\n");
    }
}
