//! Synthetic eye-tracker stream.
//!
//! A profile is a sequence of dwells on named targets. Each frame emits one
//! sample at the current target's screen centroid plus Gaussian noise.
//! Between two dwells the gaze sweeps linearly across `saccade_samples`
//! extra samples so the velocity filter sees a real transition.
//!
//! Profile files use `key = value` settings and `dwell <target> <ms>
//! [noise]` lines:
//!
//! ```text
//! noise = 0.002
//! repeat = true
//! pupil_left = 3.0
//! pupil_right = absent
//! pupil_passing_increment = 0.4
//! dwell road 1500
//! dwell follower 400
//! ```

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaze::{convex_hull, AreaSet, GazeSample, Point};
use crate::scenario::{ScreenPoint, ScreenQuadSet};
use crate::units::FRAME_MS;

#[derive(Debug, Error, PartialEq)]
#[error("gaze profile line {line}: {message}")]
pub struct ProfileError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GazeTarget {
    Follower,
    Lead,
    FollowerSign,
    LeadSign,
    Speedometer,
    Tachometer,
    LeftMirror,
    RightMirror,
    RearMirror,
    Road,
}

impl GazeTarget {
    pub const ALL: [GazeTarget; 10] = [
        GazeTarget::Follower,
        GazeTarget::Lead,
        GazeTarget::FollowerSign,
        GazeTarget::LeadSign,
        GazeTarget::Speedometer,
        GazeTarget::Tachometer,
        GazeTarget::LeftMirror,
        GazeTarget::RightMirror,
        GazeTarget::RearMirror,
        GazeTarget::Road,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GazeTarget::Follower => "follower",
            GazeTarget::Lead => "lead",
            GazeTarget::FollowerSign => "follower_sign",
            GazeTarget::LeadSign => "lead_sign",
            GazeTarget::Speedometer => "speedometer",
            GazeTarget::Tachometer => "tachometer",
            GazeTarget::LeftMirror => "left_mirror",
            GazeTarget::RightMirror => "right_mirror",
            GazeTarget::RearMirror => "rear_mirror",
            GazeTarget::Road => "road",
        }
    }

    pub fn is_truck(self) -> bool {
        matches!(self, GazeTarget::Follower | GazeTarget::Lead | GazeTarget::FollowerSign | GazeTarget::LeadSign)
    }
}

impl FromStr for GazeTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GazeTarget::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown gaze target '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dwell {
    pub target: GazeTarget,
    pub duration_ms: f64,
    /// Normalised screen units; falls back to the profile default.
    pub noise_std: Option<f64>,
}

/// Pupil diameter generator. The base diameters are arbitrary defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilModel {
    /// mm; `None` models an eye the tracker never captures.
    pub left_mm: Option<f64>,
    pub right_mm: Option<f64>,
    /// mm added while the ego is off its starting lane.
    pub passing_increment_mm: f64,
    pub noise_std: f64,
}

impl Default for PupilModel {
    fn default() -> Self {
        Self { left_mm: Some(3.0), right_mm: Some(3.0), passing_increment_mm: 0.3, noise_std: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeProfile {
    pub dwells: Vec<Dwell>,
    pub noise_std: f64,
    pub pupil: PupilModel,
    /// Restart from the first dwell after the last one.
    pub repeat: bool,
    pub saccade_samples: usize,
    pub road_point: Point,
    /// Added to every gaze timestamp.
    pub timestamp_offset_ms: f64,
}

impl Default for GazeProfile {
    fn default() -> Self {
        Self {
            dwells: Vec::new(),
            noise_std: 0.002,
            pupil: PupilModel::default(),
            repeat: true,
            saccade_samples: 2,
            road_point: [0.5, 0.45],
            timestamp_offset_ms: 0.0,
        }
    }
}

impl GazeProfile {
    pub fn validate(&self) -> Result<(), String> {
        for d in &self.dwells {
            if d.duration_ms + 1e-9 < FRAME_MS {
                return Err(format!("dwell on {} lasts {} ms, shorter than one sample", d.target.name(), d.duration_ms));
            }
        }
        let positive = |v: Option<f64>| v.is_none_or(|v| v > 0.0);
        if !positive(self.pupil.left_mm) || !positive(self.pupil.right_mm) {
            return Err("pupil diameters must be positive".into());
        }
        if self.noise_std < 0.0 || self.pupil.noise_std < 0.0 {
            return Err("noise must be non-negative".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let eye = |v: Option<f64>| v.map_or("absent".to_string(), |v| v.to_string());
        let mut out = format!(
            "noise = {}\nrepeat = {}\nsaccade_samples = {}\nroad_point = {}, {}\ntimestamp_offset_ms = {}\n\
             pupil_left = {}\npupil_right = {}\npupil_passing_increment = {}\npupil_noise = {}\n",
            self.noise_std,
            self.repeat,
            self.saccade_samples,
            self.road_point[0],
            self.road_point[1],
            self.timestamp_offset_ms,
            eye(self.pupil.left_mm),
            eye(self.pupil.right_mm),
            self.pupil.passing_increment_mm,
            self.pupil.noise_std
        );
        for d in &self.dwells {
            match d.noise_std {
                Some(n) => out.push_str(&format!("dwell {} {} {}\n", d.target.name(), d.duration_ms, n)),
                None => out.push_str(&format!("dwell {} {}\n", d.target.name(), d.duration_ms)),
            }
        }
        out
    }
}

impl FromStr for GazeProfile {
    type Err = ProfileError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut p = GazeProfile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |m: String| ProfileError { line, message: m };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| err(format!("bad number '{}': {e}", s.trim())));
            if let Some(rest) = body.strip_prefix("dwell ") {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if !(2..=3).contains(&words.len()) {
                    return Err(err("expected 'dwell <target> <ms> [noise]'".into()));
                }
                p.dwells.push(Dwell {
                    target: words[0].parse().map_err(err)?,
                    duration_ms: num(words[1])?,
                    noise_std: words.get(2).map(|w| num(w)).transpose()?,
                });
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{body}'")))?;
            let value = value.trim();
            let eye = |v: &str| if v == "absent" { Ok(None) } else { num(v).map(Some) };
            match key.trim() {
                "noise" => p.noise_std = num(value)?,
                "repeat" => p.repeat = value.parse().map_err(|_| err(format!("bad boolean '{value}'")))?,
                "saccade_samples" => p.saccade_samples = num(value)? as usize,
                "road_point" => {
                    let (x, y) = value.split_once(',').ok_or_else(|| err("road_point needs 'x, y'".into()))?;
                    p.road_point = [num(x)?, num(y)?];
                }
                "timestamp_offset_ms" => p.timestamp_offset_ms = num(value)?,
                "pupil_left" => p.pupil.left_mm = eye(value)?,
                "pupil_right" => p.pupil.right_mm = eye(value)?,
                "pupil_passing_increment" => p.pupil.passing_increment_mm = num(value)?,
                "pupil_noise" => p.pupil.noise_std = num(value)?,
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        p.validate().map_err(|m| ProfileError { line: 0, message: m })?;
        Ok(p)
    }
}

/// Area-weighted centroid of the hull of the visible vertices.
fn region_centroid(points: &[ScreenPoint]) -> Option<Point> {
    let pts: Vec<Point> = points.iter().filter(|p| p.visible).map(|p| [p.x, p.y]).collect();
    let hull = convex_hull(&pts);
    let n = hull.len();
    if n == 0 {
        return None;
    }
    let mean = [hull.iter().map(|p| p[0]).sum::<f64>() / n as f64, hull.iter().map(|p| p[1]).sum::<f64>() / n as f64];
    if n < 3 {
        return Some(mean);
    }
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (hull[i], hull[(i + 1) % n]);
        let c = p[0] * q[1] - q[0] * p[1];
        a += c;
        cx += (p[0] + q[0]) * c;
        cy += (p[1] + q[1]) * c;
    }
    if a.abs() < 1e-18 {
        return Some(mean);
    }
    Some([cx / (3.0 * a), cy / (3.0 * a)])
}

/// Screen location of a target this frame; `None` when it is off-screen.
pub fn target_point(target: GazeTarget, quads: &ScreenQuadSet, areas: &AreaSet, road_point: Point) -> Option<Point> {
    let p = match target {
        GazeTarget::Follower => region_centroid(&quads.follower)?,
        GazeTarget::Lead => region_centroid(&quads.lead)?,
        GazeTarget::FollowerSign => region_centroid(&quads.follower_sign)?,
        GazeTarget::LeadSign => region_centroid(&quads.lead_sign)?,
        GazeTarget::Speedometer => areas.speedometer.center(),
        GazeTarget::Tachometer => areas.tachometer.center(),
        GazeTarget::LeftMirror => areas.left_mirror.center(),
        GazeTarget::RightMirror => areas.right_mirror.center(),
        GazeTarget::RearMirror => areas.rear_mirror.center(),
        GazeTarget::Road => road_point,
    };
    ((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1])).then_some(p)
}

/// One synthesised sample plus what the generator intended.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSample {
    pub sample: GazeSample,
    /// Target of the current dwell, `None` while sweeping between dwells.
    pub target: Option<GazeTarget>,
    /// The eye moved between the previous sample and this one.
    pub in_transition: bool,
    /// A dwell ended on this frame: `(target, first frame, invalid frames)`.
    pub finished_dwell: Option<(GazeTarget, u64, u64)>,
}

#[derive(Debug, Clone)]
enum Phase {
    Dwell { index: usize, remaining: usize, first_frame: Option<u64>, invalid: u64, landing: bool },
    Sweep { to_index: usize, step: usize },
    Done,
}

/// Frame-by-frame generator for a [`GazeProfile`].
#[derive(Debug, Clone)]
pub struct GazeSynth {
    profile: GazeProfile,
    rng: ChaCha8Rng,
    phase: Phase,
    /// Last noise-free gaze location, the origin of the next sweep.
    last_point: Option<Point>,
}

impl GazeSynth {
    pub fn new(profile: GazeProfile, seed: u64) -> Self {
        let phase = if profile.dwells.is_empty() {
            Phase::Done
        } else {
            Self::dwell_phase(&profile, 0, false)
        };
        Self { profile, rng: ChaCha8Rng::seed_from_u64(seed ^ 0x6a7a_e5e0_0000_0001), phase, last_point: None }
    }

    fn dwell_phase(profile: &GazeProfile, index: usize, landing: bool) -> Phase {
        let samples = (profile.dwells[index].duration_ms / FRAME_MS).round().max(1.0) as usize;
        Phase::Dwell { index, remaining: samples, first_frame: None, invalid: 0, landing }
    }

    fn noisy(&mut self, p: Point, std: f64) -> Point {
        if std <= 0.0 {
            return p;
        }
        let n = Normal::new(0.0, std).expect("finite noise");
        [(p[0] + n.sample(&mut self.rng)).clamp(0.0, 1.0), (p[1] + n.sample(&mut self.rng)).clamp(0.0, 1.0)]
    }

    fn pupils(&mut self, passing: bool) -> (Option<f64>, Option<f64>) {
        let m = self.profile.pupil.clone();
        let inc = if passing { m.passing_increment_mm } else { 0.0 };
        let noise = Normal::new(0.0, m.noise_std.max(0.0)).expect("finite noise");
        let mut eye = |base: Option<f64>| base.map(|b| (b + inc + noise.sample(&mut self.rng)).max(0.1));
        let l = eye(m.left_mm);
        let r = eye(m.right_mm);
        (l, r)
    }

    fn next_index(&self, index: usize) -> Option<usize> {
        if index + 1 < self.profile.dwells.len() {
            Some(index + 1)
        } else if self.profile.repeat {
            Some(0)
        } else {
            None
        }
    }

    /// Emits the sample for `frame`. `passing` raises the pupil diameters.
    pub fn step(&mut self, frame: u64, timestamp_ms: f64, quads: &ScreenQuadSet, areas: &AreaSet, passing: bool) -> SynthSample {
        let ts = timestamp_ms + self.profile.timestamp_offset_ms;
        let road = self.profile.road_point;
        match self.phase.clone() {
            Phase::Done => {
                let (l, r) = self.pupils(passing);
                self.last_point = Some(road);
                SynthSample {
                    sample: GazeSample { timestamp_ms: ts, point: Some(road), pupil_left: l, pupil_right: r },
                    target: Some(GazeTarget::Road),
                    in_transition: false,
                    finished_dwell: None,
                }
            }
            Phase::Sweep { to_index, step } => {
                let target = self.profile.dwells[to_index].target;
                let to = target_point(target, quads, areas, road);
                let m = self.profile.saccade_samples;
                let point = match (self.last_point, to) {
                    (Some(a), Some(b)) => {
                        let f = step as f64 / (m + 1) as f64;
                        Some([a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f])
                    }
                    _ => None,
                };
                self.phase = if step < m {
                    Phase::Sweep { to_index, step: step + 1 }
                } else {
                    Self::dwell_phase(&self.profile, to_index, true)
                };
                let (l, r) = if point.is_some() { self.pupils(passing) } else { (None, None) };
                SynthSample {
                    sample: GazeSample { timestamp_ms: ts, point, pupil_left: l, pupil_right: r },
                    target: None,
                    in_transition: point.is_some(),
                    finished_dwell: None,
                }
            }
            Phase::Dwell { index, remaining, first_frame, invalid, landing } => {
                let dwell = self.profile.dwells[index].clone();
                let first_frame = first_frame.unwrap_or(frame);
                let clean = target_point(dwell.target, quads, areas, road);
                let std = dwell.noise_std.unwrap_or(self.profile.noise_std);
                let point = clean.map(|p| self.noisy(p, std));
                let in_transition = landing && point.is_some() && self.last_point.is_some();
                let invalid = invalid + u64::from(point.is_none());
                if clean.is_some() {
                    self.last_point = clean;
                } else {
                    self.last_point = None;
                }
                let (l, r) = if point.is_some() { self.pupils(passing) } else { (None, None) };

                let mut finished = None;
                if remaining > 1 {
                    self.phase = Phase::Dwell { index, remaining: remaining - 1, first_frame: Some(first_frame), invalid, landing: false };
                } else {
                    finished = Some((dwell.target, first_frame, invalid));
                    self.phase = match self.next_index(index) {
                        None => Phase::Done,
                        Some(next) => {
                            let next_target = self.profile.dwells[next].target;
                            let moving = self.profile.saccade_samples > 0
                                && match (self.last_point, target_point(next_target, quads, areas, road)) {
                                    (Some(a), Some(b)) => a != b,
                                    _ => false,
                                };
                            if moving {
                                Phase::Sweep { to_index: next, step: 1 }
                            } else {
                                Self::dwell_phase(&self.profile, next, false)
                            }
                        }
                    };
                }
                SynthSample {
                    sample: GazeSample { timestamp_ms: ts, point, pupil_left: l, pupil_right: r },
                    target: Some(dwell.target),
                    in_transition,
                    finished_dwell: finished,
                }
            }
        }
    }
}
