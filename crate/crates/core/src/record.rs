//! Per-frame telemetry as recorded by the simulator.

use serde::{Deserialize, Serialize};

use crate::scenario::{Positions, ScreenQuadSet};

/// Operation data for one frame: pedal inputs and ego speed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Operation {
    /// Brake pedal in [0, 1].
    pub brake: f64,
    /// Accelerator pedal in [0, 1].
    pub accel: f64,
    /// Ego speed, mph.
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: u64,
    pub time_ms: f64,
    pub op: Operation,
    pub pos: Positions,
    pub lane: usize,
    /// ft from the centre of `lane`, positive to the left.
    pub lateral_offset: f64,
    /// Steering input in [-1, 1], 0 for scripted runs.
    pub steer: f64,
    /// Left and right turn indicators.
    pub indicators: [bool; 2],
    /// Projected ATMA vertices; absent for sessions ingested without them.
    pub quads: Option<ScreenQuadSet>,
}

impl FrameRecord {
    /// Lateral coordinate from the right lane centre.
    pub fn lateral(&self, lane_width: f64) -> f64 {
        self.lane as f64 * lane_width + self.lateral_offset
    }
}

/// Which measurement channels a session carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channels {
    pub operation: bool,
    pub position: bool,
    pub lateral: bool,
    pub display: bool,
    pub gaze: bool,
    pub pupil: bool,
}

impl Channels {
    pub const ALL: Channels =
        Channels { operation: true, position: true, lateral: true, display: true, gaze: true, pupil: true };

    pub fn names(&self) -> Vec<&'static str> {
        [
            (self.operation, "operation"),
            (self.position, "position"),
            (self.lateral, "lateral"),
            (self.display, "display"),
            (self.gaze, "gaze"),
            (self.pupil, "pupil"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect()
    }
}

impl Default for Channels {
    fn default() -> Self {
        Channels::ALL
    }
}
