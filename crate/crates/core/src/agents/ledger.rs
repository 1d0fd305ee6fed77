//! Ground-truth record of what a scripted run actually did, for scoring the
//! detectors against.

use serde::{Deserialize, Serialize};

use super::gaze_synth::GazeTarget;
use crate::scenario::{Positions, VehicleState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerBrake {
    pub start_frame: u64,
    /// Inclusive.
    pub end_frame: u64,
    pub max_pedal: f64,
    /// mph at `start_frame` and at the first released frame.
    pub speed_start: f64,
    pub speed_release: f64,
    /// ft, follower rear relative to the ego front at the start.
    pub p_f_start: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerLaneChange {
    /// Frame whose input first asked for the new lane.
    pub intent_frame: Option<u64>,
    /// First frame the ego is off the origin lane centre.
    pub start_frame: u64,
    /// First frame settled on a lane centre again; `None` if the run ended mid-change.
    pub end_frame: Option<u64>,
    pub from_lane: usize,
    pub to_lane: usize,
    /// False when the ego returned to the lane it left.
    pub completed: bool,
    pub p_f_start: f64,
    pub p_l_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerDwell {
    pub target: GazeTarget,
    pub start_frame: u64,
    /// Inclusive; the dwell's last frame.
    pub end_frame: u64,
    /// Frames of this dwell whose sample was invalid (target off-screen).
    pub invalid_frames: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ledger {
    pub brakes: Vec<LedgerBrake>,
    pub lane_changes: Vec<LedgerLaneChange>,
    pub dwells: Vec<LedgerDwell>,
    /// `(rule index, frame)` of every fired script rule.
    pub fired_rules: Vec<(usize, u64)>,
    /// Frames of the synthetic stream that were transition (saccade) samples.
    pub saccade_frames: Vec<u64>,
    pub final_frame: u64,
}

impl Ledger {
    pub fn completed_changes(&self) -> impl Iterator<Item = &LedgerLaneChange> {
        self.lane_changes.iter().filter(|c| c.completed && c.end_frame.is_some())
    }
}

#[derive(Debug, Clone)]
struct OpenChange {
    intent_frame: Option<u64>,
    start_frame: u64,
    from_lane: usize,
    p_f_start: f64,
}

/// Builds a [`Ledger`] frame by frame as a scripted run progresses.
#[derive(Debug, Clone, Default)]
pub struct LedgerRecorder {
    ledger: Ledger,
    brake_open: Option<LedgerBrake>,
    change_open: Option<OpenChange>,
    last_target_lane: Option<usize>,
    intent_frame: Option<u64>,
    settled_lane: Option<usize>,
}

impl LedgerRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record frame `frame`: the ego state and positions at that frame and the
    /// inputs chosen on it.
    pub fn observe(&mut self, frame: u64, ego: &VehicleState, pos: &Positions, brake_input: f64) {
        // brakes
        match (&mut self.brake_open, brake_input > 0.0) {
            (None, true) => {
                self.brake_open = Some(LedgerBrake {
                    start_frame: frame,
                    end_frame: frame,
                    max_pedal: brake_input,
                    speed_start: ego.speed,
                    speed_release: ego.speed,
                    p_f_start: pos.p_f,
                })
            }
            (Some(b), true) => {
                b.end_frame = frame;
                b.max_pedal = b.max_pedal.max(brake_input);
            }
            (Some(_), false) => {
                let mut b = self.brake_open.take().unwrap();
                b.speed_release = ego.speed;
                self.ledger.brakes.push(b);
            }
            (None, false) => {}
        }

        // lane changes, from kinematics
        if self.last_target_lane != Some(ego.target_lane) {
            if self.last_target_lane.is_some() {
                self.intent_frame = Some(frame.saturating_sub(1));
            }
            self.last_target_lane = Some(ego.target_lane);
        }
        let centered = ego.lateral_offset == 0.0;
        let settled = *self.settled_lane.get_or_insert(ego.lane);
        match &self.change_open {
            None if !centered => {
                self.change_open = Some(OpenChange {
                    intent_frame: self.intent_frame.take(),
                    start_frame: frame,
                    from_lane: settled,
                    p_f_start: pos.p_f,
                });
            }
            Some(open) if centered => {
                let to_lane = ego.lane;
                self.ledger.lane_changes.push(LedgerLaneChange {
                    intent_frame: open.intent_frame,
                    start_frame: open.start_frame,
                    end_frame: Some(frame),
                    from_lane: open.from_lane,
                    to_lane,
                    completed: to_lane != open.from_lane,
                    p_f_start: open.p_f_start,
                    p_l_end: Some(pos.p_l),
                });
                self.change_open = None;
                self.settled_lane = Some(to_lane);
            }
            _ => {}
        }
        self.ledger.final_frame = frame;
    }

    pub fn record_dwell(&mut self, dwell: LedgerDwell) {
        self.ledger.dwells.push(dwell);
    }

    pub fn record_saccade_frame(&mut self, frame: u64) {
        self.ledger.saccade_frames.push(frame);
    }

    pub fn finish(mut self, fired_rules: Vec<(usize, u64)>, last_speed: f64) -> Ledger {
        if let Some(mut b) = self.brake_open.take() {
            b.speed_release = last_speed;
            self.ledger.brakes.push(b);
        }
        if let Some(open) = self.change_open.take() {
            self.ledger.lane_changes.push(LedgerLaneChange {
                intent_frame: open.intent_frame,
                start_frame: open.start_frame,
                end_frame: None,
                from_lane: open.from_lane,
                to_lane: open.from_lane,
                completed: false,
                p_f_start: open.p_f_start,
                p_l_end: None,
            });
        }
        self.ledger.fired_rules = fired_rules;
        self.ledger
    }
}
