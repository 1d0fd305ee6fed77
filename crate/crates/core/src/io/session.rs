//! Newline-delimited JSON session files.
//!
//! Line 1 is the header; every following line is a frame record or a gaze
//! sample, tagged by its `type` field. Floats are written with 9
//! significant digits and object keys in sorted order, so writing a parsed
//! file reproduces it byte for byte. Fields this version does not know are
//! kept and written back unchanged.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::Error;
use crate::gaze::{AreaSet, GazeSample};
use crate::record::{Channels, FrameRecord, Operation};
use crate::scenario::{CameraSpec, Positions, RoadSpec, ScenarioConfig, ScreenPoint, ScreenQuadSet, TruckGeometry};
use crate::units::{sig9, FPS, FRAME_MS};

pub const FORMAT_VERSION: &str = "atmasim-session/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub version: String,
    pub fps: u32,
    /// What produced the file: `simulate`, `serve` or `ingest`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub road: Option<RoadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truck: Option<TruckGeometry>,
    #[serde(default)]
    pub areas: AreaSet,
    pub channels: Channels,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl SessionHeader {
    pub fn new(source: &str) -> Self {
        Self {
            version: FORMAT_VERSION.to_string(),
            fps: FPS,
            source: source.to_string(),
            scenario: None,
            road: None,
            camera: None,
            truck: None,
            areas: AreaSet::default(),
            channels: Channels::ALL,
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub header: SessionHeader,
    pub frames: Vec<FrameRecord>,
    pub gaze: Vec<GazeSample>,
    /// Unrecognised fields of frame records, by position in `frames`.
    pub frame_extra: BTreeMap<usize, Map<String, Value>>,
    /// Unrecognised fields of gaze records, by position in `gaze`.
    pub gaze_extra: BTreeMap<usize, Map<String, Value>>,
}

impl Session {
    pub fn new(header: SessionHeader, frames: Vec<FrameRecord>, gaze: Vec<GazeSample>) -> Self {
        Self { header, frames, gaze, frame_extra: BTreeMap::new(), gaze_extra: BTreeMap::new() }
    }
}

#[derive(Serialize, Deserialize)]
struct FrameLine {
    i: u64,
    t_ms: f64,
    /// brake, accel, speed
    o: [f64; 3],
    /// p_e, p_f, p_l
    p: [f64; 3],
    lane: usize,
    y: f64,
    #[serde(default)]
    steer: f64,
    #[serde(default)]
    ind: [bool; 2],
    /// follower, lead, follower sign, lead sign; `null` for hidden vertices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<Vec<Option<[f64; 2]>>>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct GazeLine {
    t_ms: f64,
    g: Option<[f64; 2]>,
    u: [Option<f64>; 2],
    valid: bool,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

pub(crate) fn encode_quads(q: &ScreenQuadSet) -> Vec<Option<[f64; 2]>> {
    [&q.follower, &q.lead, &q.follower_sign, &q.lead_sign]
        .into_iter()
        .flat_map(|pts| pts.iter().map(|p| p.visible.then_some([p.x, p.y])))
        .collect()
}

fn decode_quads(d: &[Option<[f64; 2]>]) -> Option<ScreenQuadSet> {
    if d.len() != 32 {
        return None;
    }
    let obj = |k: usize| {
        let mut out = [ScreenPoint::HIDDEN; 8];
        for (j, p) in d[k * 8..k * 8 + 8].iter().enumerate() {
            if let Some([x, y]) = p {
                out[j] = ScreenPoint { x: *x, y: *y, visible: true };
            }
        }
        out
    };
    Some(ScreenQuadSet { follower: obj(0), lead: obj(1), follower_sign: obj(2), lead_sign: obj(3) })
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| Number::from_f64(sig9(x))) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn line<T: Serialize>(kind: &str, body: &T) -> String {
    let mut v = serde_json::to_value(body).expect("session records serialise");
    round_floats(&mut v);
    if let Value::Object(m) = &mut v {
        m.insert("type".into(), Value::String(kind.into()));
    }
    serde_json::to_string(&v).expect("session records serialise")
}

pub fn session_to_string(s: &Session) -> String {
    let mut out = String::with_capacity(64 * (s.frames.len() + s.gaze.len()) + 1024);
    out.push_str(&line("header", &s.header));
    out.push('\n');
    for (k, f) in s.frames.iter().enumerate() {
        let rec = FrameLine {
            i: f.frame,
            t_ms: f.time_ms,
            o: [f.op.brake, f.op.accel, f.op.speed],
            p: [f.pos.p_e, f.pos.p_f, f.pos.p_l],
            lane: f.lane,
            y: f.lateral_offset,
            steer: f.steer,
            ind: f.indicators,
            d: f.quads.as_ref().map(encode_quads),
            extra: s.frame_extra.get(&k).cloned().unwrap_or_default(),
        };
        out.push_str(&line("frame", &rec));
        out.push('\n');
    }
    for (k, g) in s.gaze.iter().enumerate() {
        let rec = GazeLine {
            t_ms: g.timestamp_ms,
            g: g.point,
            u: [g.pupil_left, g.pupil_right],
            valid: g.point.is_some(),
            extra: s.gaze_extra.get(&k).cloned().unwrap_or_default(),
        };
        out.push_str(&line("gaze", &rec));
        out.push('\n');
    }
    out
}

pub fn write_session(path: &Path, s: &Session) -> Result<(), Error> {
    fs::write(path, session_to_string(s))?;
    Ok(())
}

pub fn read_session(path: &Path) -> Result<Session, Error> {
    let text = fs::read_to_string(path)?;
    parse_session(&text, &path.display().to_string())
}

/// Parses session text; `name` labels error messages.
pub fn parse_session(text: &str, name: &str) -> Result<Session, Error> {
    let err = |line: usize, msg: String| Error::format(name, line, msg);
    let mut header: Option<SessionHeader> = None;
    let mut s = Session::new(SessionHeader::new(""), Vec::new(), Vec::new());
    for (k, raw) in text.lines().enumerate() {
        let n = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut v: Value = serde_json::from_str(raw).map_err(|e| err(n, format!("invalid JSON: {e}")))?;
        let kind = v
            .as_object_mut()
            .and_then(|m| m.remove("type"))
            .and_then(|t| t.as_str().map(str::to_string))
            .ok_or_else(|| err(n, "record has no \"type\" field".into()))?;
        match (kind.as_str(), header.is_some()) {
            ("header", false) => {
                let h: SessionHeader = serde_json::from_value(v).map_err(|e| err(n, format!("bad header: {e}")))?;
                if h.version != FORMAT_VERSION {
                    return Err(err(n, format!("unsupported version {:?}, expected {FORMAT_VERSION:?}", h.version)));
                }
                if h.fps != FPS {
                    return Err(err(n, format!("header fps is {}, analysis requires {FPS}", h.fps)));
                }
                header = Some(h);
            }
            ("header", true) => return Err(err(n, "second header".into())),
            (_, false) => return Err(err(n, "first record must be the header".into())),
            ("frame", true) => {
                let f: FrameLine = serde_json::from_value(v).map_err(|e| err(n, format!("bad frame record: {e}")))?;
                let expected = s.frames.len() as u64;
                if f.i != expected {
                    return Err(err(n, format!("frame index {} out of sequence, expected {expected}", f.i)));
                }
                if let Some(prev) = s.frames.last() {
                    // Ingested recordings jitter; only reject another frame rate.
                    if (f.t_ms - prev.time_ms - FRAME_MS).abs() > FRAME_MS / 2.0 {
                        return Err(err(n, format!("frame spacing {:.6} ms does not match {FPS} fps", f.t_ms - prev.time_ms)));
                    }
                }
                let quads = match &f.d {
                    Some(d) => Some(decode_quads(d).ok_or_else(|| err(n, "display record needs 32 vertices".into()))?),
                    None => None,
                };
                if !f.extra.is_empty() {
                    s.frame_extra.insert(s.frames.len(), f.extra);
                }
                s.frames.push(FrameRecord {
                    frame: f.i,
                    time_ms: f.t_ms,
                    op: Operation { brake: f.o[0], accel: f.o[1], speed: f.o[2] },
                    pos: Positions { p_e: f.p[0], p_f: f.p[1], p_l: f.p[2] },
                    lane: f.lane,
                    lateral_offset: f.y,
                    steer: f.steer,
                    indicators: f.ind,
                    quads,
                });
            }
            ("gaze", true) => {
                let g: GazeLine = serde_json::from_value(v).map_err(|e| err(n, format!("bad gaze record: {e}")))?;
                if !g.extra.is_empty() {
                    s.gaze_extra.insert(s.gaze.len(), g.extra);
                }
                s.gaze.push(GazeSample {
                    timestamp_ms: g.t_ms,
                    point: if g.valid { g.g } else { None },
                    pupil_left: g.u[0],
                    pupil_right: g.u[1],
                });
            }
            (other, true) => return Err(err(n, format!("unknown record type {other:?}"))),
        }
    }
    s.header = header.ok_or_else(|| err(1, "missing header".into()))?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::frame_time_ms;

    fn sample() -> Session {
        let frames = (0..3)
            .map(|i| FrameRecord {
                frame: i,
                time_ms: frame_time_ms(i),
                op: Operation { brake: 0.0, accel: 0.1 * i as f64, speed: 1.0 / 3.0 },
                pos: Positions { p_e: 10560.0, p_f: 1800.0, p_l: 1945.0 },
                lane: 0,
                lateral_offset: 0.0,
                steer: 0.0,
                indicators: [false, false],
                quads: (i == 1).then(ScreenQuadSet::hidden),
            })
            .collect();
        let gaze = vec![GazeSample { timestamp_ms: 3.0, point: Some([0.25, 0.5]), pupil_left: Some(3.1), pupil_right: None }];
        Session::new(SessionHeader::new("simulate"), frames, gaze)
    }

    #[test]
    fn byte_identical_round_trip() {
        let a = session_to_string(&sample());
        let b = session_to_string(&parse_session(&a, "t").unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_fields_survive() {
        let mut text = session_to_string(&sample());
        text = text.replacen("\"i\":1,", "\"i\":1,\"wheel\":0.25,", 1);
        let s = parse_session(&text, "t").unwrap();
        assert_eq!(s.frame_extra[&1]["wheel"], 0.25);
        let canonical = session_to_string(&s);
        assert!(canonical.contains("\"wheel\":0.25"));
        assert_eq!(session_to_string(&parse_session(&canonical, "t").unwrap()), canonical);
    }

    #[test]
    fn corrupt_line_is_named() {
        let text = session_to_string(&sample());
        let mut lines: Vec<&str> = text.lines().collect();
        lines[2] = "{not json";
        let e = parse_session(&lines.join("\n"), "s.ndjson").unwrap_err().to_string();
        assert!(e.contains("s.ndjson:3"), "{e}");
    }

    #[test]
    fn wrong_fps_rejected() {
        let text = session_to_string(&sample()).replacen("\"fps\":60", "\"fps\":30", 1);
        let e = parse_session(&text, "t").unwrap_err().to_string();
        assert!(e.contains("fps is 30"), "{e}");
    }

    #[test]
    fn empty_gaze_is_valid() {
        let mut s = sample();
        s.gaze.clear();
        let back = parse_session(&session_to_string(&s), "t").unwrap();
        assert!(back.gaze.is_empty());
        assert_eq!(back.frames.len(), 3);
    }
}
