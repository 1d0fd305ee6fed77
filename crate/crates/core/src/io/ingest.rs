//! Loading delimited exports from other recording setups.
//!
//! A column map names which source column feeds each internal channel:
//!
//! ```text
//! delimiter = ,
//! time_unit = s
//! timestamp = RecordingTime
//! gaze_x = GazePointX
//! gaze_y = GazePointY
//! pupil_left = PupilLeft
//! ```
//!
//! Only `timestamp` is mandatory. Channels whose columns are not mapped are
//! marked absent in the session header.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::Error;
use crate::gaze::GazeSample;
use crate::io::session::{Session, SessionHeader};
use crate::record::{Channels, FrameRecord, Operation};
use crate::scenario::Positions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeUnit {
    #[default]
    Ms,
    S,
    Us,
}

impl FromStr for TimeUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ms" => Ok(TimeUnit::Ms),
            "s" => Ok(TimeUnit::S),
            "us" => Ok(TimeUnit::Us),
            _ => Err(format!("unknown time unit {s:?} (expected s, ms or us)")),
        }
    }
}

const FIELDS: [&str; 15] = [
    "timestamp",
    "gaze_x",
    "gaze_y",
    "validity",
    "pupil_left",
    "pupil_right",
    "brake",
    "accel",
    "speed",
    "p_e",
    "p_f",
    "p_l",
    "lane",
    "lateral_offset",
    "steer",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ColumnMap {
    pub delimiter: u8,
    pub time_unit: TimeUnit,
    /// Internal field name to source column name.
    pub columns: BTreeMap<String, String>,
}

impl FromStr for ColumnMap {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self, Error> {
        let mut m = ColumnMap { delimiter: b',', ..Default::default() };
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::format("column map", k + 1, msg);
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "delimiter" => {
                    m.delimiter = match value {
                        "tab" | "\\t" => b'\t',
                        v if v.len() == 1 => v.as_bytes()[0],
                        v => return Err(err(format!("delimiter must be one character, got {v:?}"))),
                    }
                }
                "time_unit" => m.time_unit = value.parse().map_err(err)?,
                f if FIELDS.contains(&f) => {
                    m.columns.insert(f.to_string(), value.to_string());
                }
                other => return Err(err(format!("unknown field {other:?}"))),
            }
        }
        if !m.columns.contains_key("timestamp") {
            return Err(Error::Config("column map must name the timestamp column".into()));
        }
        Ok(m)
    }
}

/// Moves the decimal point so unit conversion introduces no rounding.
fn to_ms(text: &str, unit: TimeUnit) -> Option<f64> {
    let shift: i32 = match unit {
        TimeUnit::Ms => 0,
        TimeUnit::S => 3,
        TimeUnit::Us => -3,
    };
    let t = text.trim();
    if shift == 0 || t.contains(['e', 'E']) {
        return t.parse::<f64>().ok().map(|v| v * 10f64.powi(shift));
    }
    let (neg, t) = t.strip_prefix('-').map_or((false, t), |r| (true, r));
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits: String = format!("{int}{frac}");
    let point = int.len() as i32 + shift;
    let s = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    s.parse::<f64>().ok().map(|v| if neg { -v } else { v })
}

pub fn ingest_external(path: &Path, map: &ColumnMap) -> Result<Session, Error> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let mut rdr = csv::ReaderBuilder::new().delimiter(map.delimiter).flexible(false).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::format(&name, 1, e.to_string()))?.clone();
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (field, col) in &map.columns {
        let i = headers
            .iter()
            .position(|h| h.trim() == col)
            .ok_or_else(|| Error::format(&name, 1, format!("missing column {col:?} mapped to {field}")))?;
        index.insert(field.as_str(), i);
    }
    let has = |f: &str| index.contains_key(f);
    let gaze_on = has("gaze_x") && has("gaze_y");
    let pupil_on = has("pupil_left") || has("pupil_right");
    let op_on = has("brake") && has("accel") && has("speed");
    let pos_on = has("p_e") && has("p_f") && has("p_l");
    let lat_on = has("lane") && has("lateral_offset");

    struct Row {
        line: usize,
        t: f64,
        cells: Vec<String>,
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::format(&name, line, e.to_string()))?;
        let ts = &rec[index["timestamp"]];
        let t = to_ms(ts, map.time_unit)
            .filter(|t| t.is_finite())
            .ok_or_else(|| Error::format(&name, line, format!("bad timestamp {ts:?}")))?;
        rows.push(Row { line, t, cells: rec.iter().map(str::to_string).collect() });
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    for w in rows.windows(2) {
        if w[0].t == w[1].t {
            return Err(Error::format(&name, w[1].line, format!("duplicate timestamp {} ms (also on line {})", w[1].t, w[0].line)));
        }
    }

    let num = |r: &Row, f: &str| -> Result<Option<f64>, Error> {
        let Some(&i) = index.get(f) else { return Ok(None) };
        let c = r.cells[i].trim();
        if c.is_empty() || c.eq_ignore_ascii_case("nan") {
            return Ok(None);
        }
        c.parse::<f64>().map(Some).map_err(|_| Error::format(&name, r.line, format!("bad {f} value {c:?}")))
    };

    let mut frames = Vec::new();
    let mut gaze = Vec::new();
    for r in &rows {
        if gaze_on || pupil_on {
            let valid = match index.get("validity") {
                Some(&i) => {
                    let c = r.cells[i].trim().to_ascii_lowercase();
                    matches!(c.as_str(), "1" | "true" | "valid")
                }
                None => true,
            };
            let point = match (num(r, "gaze_x")?, num(r, "gaze_y")?) {
                (Some(x), Some(y)) if valid => Some([x, y]),
                _ => None,
            };
            gaze.push(GazeSample { timestamp_ms: r.t, point, pupil_left: num(r, "pupil_left")?, pupil_right: num(r, "pupil_right")? });
        }
        if op_on {
            let z = |v: Option<f64>| v.unwrap_or(0.0);
            frames.push(FrameRecord {
                frame: frames.len() as u64,
                time_ms: r.t,
                op: Operation { brake: z(num(r, "brake")?), accel: z(num(r, "accel")?), speed: z(num(r, "speed")?) },
                pos: Positions { p_e: z(num(r, "p_e")?), p_f: z(num(r, "p_f")?), p_l: z(num(r, "p_l")?) },
                lane: z(num(r, "lane")?).max(0.0) as usize,
                lateral_offset: z(num(r, "lateral_offset")?),
                steer: z(num(r, "steer")?),
                indicators: [false, false],
                quads: None,
            });
        }
    }
    if !gaze_on && !pupil_on && !op_on {
        return Err(Error::Config("column map names no gaze, pupil or operation columns".into()));
    }
    let mut header = SessionHeader::new("ingest");
    header.channels = Channels {
        operation: op_on,
        position: op_on && pos_on,
        lateral: op_on && lat_on,
        display: false,
        gaze: gaze_on,
        pupil: pupil_on,
    };
    Ok(Session::new(header, frames, gaze))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seconds_convert_exactly() {
        assert_eq!(to_ms("0.1", TimeUnit::S), Some(100.0));
        assert_eq!(to_ms("12.345678", TimeUnit::S), Some(12345.678));
        assert_eq!(to_ms("7", TimeUnit::S), Some(7000.0));
        assert_eq!(to_ms("0.0005", TimeUnit::S), Some(0.5));
        assert_eq!(to_ms("-1.5", TimeUnit::S), Some(-1500.0));
        assert_eq!(to_ms("1500", TimeUnit::Us), Some(1.5));
        assert_eq!(to_ms("2.5", TimeUnit::Ms), Some(2.5));
    }

    #[test]
    fn map_needs_timestamp() {
        assert!("gaze_x = X".parse::<ColumnMap>().is_err());
        let m: ColumnMap = "delimiter = tab\ntime_unit = s\ntimestamp = T # seconds".parse().unwrap();
        assert_eq!(m.delimiter, b'\t');
        assert_eq!(m.time_unit, TimeUnit::S);
        assert_eq!(m.columns["timestamp"], "T");
    }
}
