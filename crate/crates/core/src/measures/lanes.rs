//! Lane changes from the lateral position trace.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneParams {
    pub lane_width: f64,
    /// Distance from a lane centre still counted as in the lane, ft.
    pub dead_band: f64,
    /// Lateral speed below which the car counts as settled, ft/s.
    pub settle_speed: f64,
}

impl Default for LaneParams {
    fn default() -> Self {
        Self { lane_width: 12.0, dead_band: 0.5, settle_speed: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneChange {
    pub start_frame: u64,
    pub end_frame: u64,
    pub from_lane: usize,
    pub to_lane: usize,
    /// The run ended before the change settled; `end_frame` is the last frame.
    pub unfinished: bool,
}

impl LaneChange {
    pub fn is_left(&self) -> bool {
        self.to_lane > self.from_lane
    }
}

/// A departure that returned to the original lane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneAbort {
    pub start_frame: u64,
    pub end_frame: u64,
    pub lane: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LaneDetection {
    pub changes: Vec<LaneChange>,
    pub aborts: Vec<LaneAbort>,
}

/// Hand-marked lane change, used instead of detection when present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneAnnotation {
    pub start_frame: u64,
    pub end_frame: u64,
}

impl LaneDetection {
    /// Builds changes from annotations, reading lanes at the marked frames.
    pub fn from_annotations(ann: &[LaneAnnotation], lateral: &[f64], first_frame: u64, params: &LaneParams) -> Self {
        let lane_at = |f: u64| {
            let i = (f.saturating_sub(first_frame) as usize).min(lateral.len().saturating_sub(1));
            (lateral[i] / params.lane_width).round().max(0.0) as usize
        };
        let mut out = LaneDetection::default();
        for a in ann {
            let (from, to) = (lane_at(a.start_frame.saturating_sub(1)), lane_at(a.end_frame));
            if from == to {
                out.aborts.push(LaneAbort { start_frame: a.start_frame, end_frame: a.end_frame, lane: from });
            } else {
                out.changes.push(LaneChange {
                    start_frame: a.start_frame,
                    end_frame: a.end_frame,
                    from_lane: from,
                    to_lane: to,
                    unfinished: false,
                });
            }
        }
        out
    }
}

enum State {
    Settled(usize),
    Moving { from: usize, target: usize, start: usize },
}

/// Detects lane changes in `lateral` (ft from the right lane centre, one
/// value per frame starting at `first_frame`).
///
/// A change starts at the first frame of the uninterrupted lateral motion
/// that carried the car out of its lane's dead band, and ends at the first
/// frame inside the target lane's dead band after which the car stops
/// moving sideways. Returning to the original lane records an abort.
pub fn detect_lane_changes(lateral: &[f64], first_frame: u64, fps: f64, params: &LaneParams) -> LaneDetection {
    let mut out = LaneDetection::default();
    if lateral.is_empty() {
        return out;
    }
    let w = params.lane_width;
    let center = |lane: usize| lane as f64 * w;
    let nearest = |y: f64| (y / w).round().max(0.0) as usize;
    let vel = |i: usize| if i == 0 || i >= lateral.len() { 0.0 } else { (lateral[i] - lateral[i - 1]) * fps };
    let settles = |i: usize, lane: usize| {
        (lateral[i] - center(lane)).abs() <= params.dead_band && vel(i + 1).abs() <= params.settle_speed
    };

    let mut state = State::Settled(nearest(lateral[0]));
    for i in 0..lateral.len() {
        let y = lateral[i];
        match state {
            State::Settled(lane) => {
                let off = y - center(lane);
                if off.abs() <= params.dead_band {
                    continue;
                }
                let dir = off.signum();
                let mut s = i;
                while s > 0 && dir * vel(s) > params.settle_speed {
                    s -= 1;
                }
                if s < i && !(dir * vel(s) > params.settle_speed) {
                    s += 1;
                }
                let target = if dir > 0.0 { lane + 1 } else { lane.saturating_sub(1) };
                if target == lane {
                    continue;
                }
                state = State::Moving { from: lane, target, start: s.min(i) };
            }
            State::Moving { from, target, start } => {
                if settles(i, target) {
                    out.changes.push(LaneChange {
                        start_frame: first_frame + start as u64,
                        end_frame: first_frame + i as u64,
                        from_lane: from,
                        to_lane: target,
                        unfinished: false,
                    });
                    state = State::Settled(target);
                } else if settles(i, from) {
                    out.aborts.push(LaneAbort {
                        start_frame: first_frame + start as u64,
                        end_frame: first_frame + i as u64,
                        lane: from,
                    });
                    state = State::Settled(from);
                }
            }
        }
    }
    if let State::Moving { from, target, start } = state {
        out.changes.push(LaneChange {
            start_frame: first_frame + start as u64,
            end_frame: first_frame + lateral.len() as u64 - 1,
            from_lane: from,
            to_lane: target,
            unfinished: true,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Constant-rate move from `a` to `b` starting at frame `k`.
    fn ramp(n: usize, k: usize, a: f64, b: f64, rate: f64) -> Vec<f64> {
        let step = rate / 60.0 * (b - a).signum();
        let mut y = a;
        (0..n)
            .map(|i| {
                if i >= k && y != b {
                    y += step;
                    if (b - y) * step.signum() <= 0.0 {
                        y = b;
                    }
                }
                y
            })
            .collect()
    }

    #[test]
    fn single_left_change() {
        let y = ramp(400, 50, 0.0, 12.0, 4.0);
        let d = detect_lane_changes(&y, 1000, 60.0, &LaneParams::default());
        assert_eq!(d.changes.len(), 1);
        let c = &d.changes[0];
        assert_eq!(c.start_frame, 1050);
        assert_eq!(c.end_frame, 1050 + 179);
        assert!(c.is_left() && !c.unfinished);
    }

    #[test]
    fn abort_is_not_a_change() {
        let mut y = ramp(100, 10, 0.0, 3.0, 4.0);
        y.extend(ramp(100, 0, 3.0, 0.0, 4.0));
        let d = detect_lane_changes(&y, 0, 60.0, &LaneParams::default());
        assert!(d.changes.is_empty());
        assert_eq!(d.aborts.len(), 1);
    }

    #[test]
    fn unfinished_change_is_flagged() {
        let y = ramp(100, 10, 0.0, 12.0, 4.0);
        let d = detect_lane_changes(&y, 0, 60.0, &LaneParams::default());
        assert_eq!(d.changes.len(), 1);
        assert!(d.changes[0].unfinished);
        assert_eq!(d.changes[0].end_frame, 99);
    }

    #[test]
    fn annotations_override() {
        let y = ramp(400, 50, 0.0, 12.0, 4.0);
        let d = LaneDetection::from_annotations(
            &[LaneAnnotation { start_frame: 40, end_frame: 240 }],
            &y,
            0,
            &LaneParams::default(),
        );
        assert_eq!(d.changes[0].start_frame, 40);
        assert_eq!(d.changes[0].to_lane, 1);
    }
}
