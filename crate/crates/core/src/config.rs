//! Plain-text run configuration.
//!
//! One `key = value` per line, `#` starts a comment. Scenario keys are bare
//! (`traffic_volume`, `atma_gap`, `ego_start_behind_atma`,
//! `npv_mean_spacing`, `atma_speed`, `seed`); everything else is prefixed by
//! its section: `road.`, `dynamics.`, `truck.`, `camera.`, `area.`, `ivt.`,
//! `screen.`. Areas take four comma-separated numbers `x0,y0,x1,y1`.
//! `max_frames` caps a simulated run.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::Error;
use crate::gaze::{AreaSet, IvtParams, ScreenGeometry};
use crate::scenario::{CameraSpec, Dynamics, RoadSpec, ScenarioConfig, TrafficVolume, TruckGeometry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub road: RoadSpec,
    pub dynamics: Dynamics,
    pub truck: TruckGeometry,
    pub camera: CameraSpec,
    pub area: AreaSet,
    pub ivt: IvtParams,
    pub screen: ScreenGeometry,
    pub max_frames: u64,
}

impl Config {
    pub fn new(volume: TrafficVolume, seed: u64) -> Self {
        Self {
            scenario: ScenarioConfig::new(volume, seed),
            road: RoadSpec::default(),
            dynamics: Dynamics::default(),
            truck: TruckGeometry::default(),
            camera: CameraSpec::default(),
            area: AreaSet::default(),
            ivt: IvtParams::default(),
            screen: ScreenGeometry::default(),
            max_frames: 60 * 60 * 10,
        }
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.scenario.validate()?;
        self.road.validate().map_err(Error::Config)?;
        self.truck.validate().map_err(Error::Config)?;
        self.camera.validate().map_err(Error::Config)?;
        self.area.validate().map_err(Error::Config)?;
        if !(self.ivt.threshold_deg_s > 0.0 && self.ivt.window_ms > 0.0 && self.ivt.min_fixation_ms >= 0.0) {
            return Err(Error::Config("ivt parameters must be positive".into()));
        }
        if !(self.screen.width_cm > 0.0 && self.screen.height_cm > 0.0 && self.screen.distance_cm > 0.0) {
            return Err(Error::Config("screen dimensions must be positive".into()));
        }
        if self.max_frames == 0 {
            return Err(Error::Config("max_frames must be positive".into()));
        }
        Ok(())
    }

    /// Every key with its current value, in file syntax.
    pub fn to_text(&self) -> String {
        let v = serde_json::to_value(self).expect("config serialises");
        let mut out = String::new();
        let Value::Object(top) = v else { unreachable!() };
        for (section, body) in &top {
            match body {
                Value::Object(fields) => {
                    for (k, val) in fields {
                        let key = if section == "scenario" { k.clone() } else { format!("{section}.{k}") };
                        out.push_str(&format!("{key} = {}\n", scalar_text(val)));
                    }
                }
                other => out.push_str(&format!("{section} = {}\n", scalar_text(other))),
            }
        }
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(m) if m.contains_key("x0") => ["x0", "y0", "x1", "y1"].map(|k| m[k].to_string()).join(","),
        other => other.to_string(),
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", k + 1)))?;
            entries.push((k + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let volume = match entries.iter().rev().find(|e| e.1 == "traffic_volume") {
            Some((n, _, v)) => v.parse::<TrafficVolume>().map_err(|e| Error::Config(format!("line {n}: {e}")))?,
            None => TrafficVolume::Low,
        };
        let mut tree = serde_json::to_value(Config::new(volume, 0)).expect("config serialises");
        for (n, key, value) in &entries {
            let err = |msg: String| Error::Config(format!("line {n}: {msg}"));
            let path: Vec<&str> = match key.split_once('.') {
                None if key == "max_frames" => vec![key.as_str()],
                None => vec!["scenario", key.as_str()],
                Some((section, field)) if section != "scenario" => vec![section, field],
                Some(_) => return Err(err(format!("unknown key {key:?}"))),
            };
            let slot = path
                .iter()
                .try_fold(&mut tree, |node, p| node.get_mut(*p))
                .ok_or_else(|| err(format!("unknown key {key:?}")))?;
            *slot = parse_like(slot, value).map_err(|m| err(format!("{key}: {m}")))?;
        }
        let cfg: Config = serde_json::from_value(tree).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `text` into a value of the same shape as `current`.
fn parse_like(current: &Value, text: &str) -> Result<Value, String> {
    let number = |s: &str| -> Result<f64, String> {
        s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("expected a number, got {s:?}"))
    };
    match current {
        Value::Number(n) if n.is_u64() => {
            text.parse::<u64>().map(Value::from).map_err(|_| format!("expected a non-negative integer, got {text:?}"))
        }
        Value::Number(_) => Ok(Value::Number(Number::from_f64(number(text)?).expect("finite"))),
        Value::String(_) => Ok(Value::String(text.to_string())),
        Value::Bool(_) => text.parse::<bool>().map(Value::Bool).map_err(|_| format!("expected true or false, got {text:?}")),
        Value::Object(m) if m.contains_key("x0") => {
            let parts: Vec<&str> = text.split(',').collect();
            if parts.len() != 4 {
                return Err("expected x0,y0,x1,y1".into());
            }
            let mut out = Map::new();
            for (k, p) in ["x0", "y0", "x1", "y1"].iter().zip(parts) {
                out.insert(k.to_string(), Value::Number(Number::from_f64(number(p)?).expect("finite")));
            }
            Ok(Value::Object(out))
        }
        _ => Err("not a settable value".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_volume() {
        let c: Config = "traffic_volume = high\nseed = 7".parse().unwrap();
        assert_eq!(c.scenario.npv_mean_spacing, 160.0);
        assert_eq!(c.scenario.seed, 7);
        let c: Config = "seed = 7\nnpv_mean_spacing = 500 # custom\ntraffic_volume = high".parse().unwrap();
        assert_eq!(c.scenario.npv_mean_spacing, 500.0);
    }

    #[test]
    fn sections_and_areas() {
        let c: Config = "road.length = 12000\narea.speedometer = 0.3,0.8,0.45,0.95\nivt.threshold_deg_s = 45".parse().unwrap();
        assert_eq!(c.road.length, 12000.0);
        assert_eq!(c.area.speedometer.x0, 0.3);
        assert_eq!(c.ivt.threshold_deg_s, 45.0);
    }

    #[test]
    fn errors() {
        assert!("bogus = 1".parse::<Config>().is_err());
        assert!("atma_gap = wide".parse::<Config>().is_err());
        assert!("atma_gap = -5".parse::<Config>().is_err());
        assert!("seed".parse::<Config>().is_err());
        assert!("traffic_volume = medium".parse::<Config>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = Config::new(TrafficVolume::High, 42);
        let back: Config = c.to_text().parse().unwrap();
        assert_eq!(back, c);
    }
}
