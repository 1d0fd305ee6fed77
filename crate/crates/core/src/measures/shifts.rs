//! Gaze shifts between the follower and lead trucks.

use serde::{Deserialize, Serialize};

use crate::gaze::ObjectFlags;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truck {
    Follower,
    Lead,
}

impl Truck {
    pub fn code(self) -> &'static str {
        match self {
            Truck::Follower => "FT",
            Truck::Lead => "LT",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftParams {
    /// Largest run of non-truck frames that still joins two truck runs.
    pub max_gap_frames: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruckRun {
    pub truck: Truck,
    /// Indices into the input series, inclusive.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeShiftSummary {
    pub runs: Vec<TruckRun>,
    /// Index into `runs` of the run each shift lands on.
    pub shifts: Vec<usize>,
    /// Frames on both trucks at once, left out of the runs.
    pub ambiguous_frames: usize,
}

impl GazeShiftSummary {
    pub fn shift_count(&self) -> usize {
        self.shifts.len()
    }

    pub fn has_shift(&self) -> bool {
        !self.shifts.is_empty()
    }

    /// Run sequence such as `FT>LT>FT`.
    pub fn pattern(&self) -> String {
        self.runs.iter().map(|r| r.truck.code()).collect::<Vec<_>>().join(">")
    }
}

pub fn gaze_shift_patterns(flags: &[ObjectFlags], params: &ShiftParams) -> GazeShiftSummary {
    let mut runs: Vec<TruckRun> = Vec::new();
    let mut shifts = Vec::new();
    let mut ambiguous = 0;
    // Whether the next truck frame is still adjacent to the last run.
    let mut linked = true;
    let mut gap = 0usize;
    for (i, f) in flags.iter().enumerate() {
        let truck = match (f.on_follower(), f.on_lead()) {
            (true, true) => {
                ambiguous += 1;
                continue;
            }
            (true, false) => Truck::Follower,
            (false, true) => Truck::Lead,
            (false, false) => {
                gap += 1;
                if params.max_gap_frames.is_some_and(|m| gap > m) {
                    linked = false;
                }
                continue;
            }
        };
        match runs.last_mut() {
            Some(last) if last.truck == truck && linked => last.end = i,
            Some(last) => {
                if linked && last.truck != truck {
                    shifts.push(runs.len());
                }
                runs.push(TruckRun { truck, start: i, end: i });
            }
            None => runs.push(TruckRun { truck, start: i, end: i }),
        }
        gap = 0;
        linked = true;
    }
    GazeShiftSummary { runs, shifts, ambiguous_frames: ambiguous }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FT: ObjectFlags = ObjectFlags { m_f: true, m_l: false, m_fs: false, m_ls: false };
    const LS: ObjectFlags = ObjectFlags { m_f: false, m_l: false, m_fs: false, m_ls: true };
    const ROAD: ObjectFlags = ObjectFlags { m_f: false, m_l: false, m_fs: false, m_ls: false };

    #[test]
    fn ft_lt_ft() {
        let s = gaze_shift_patterns(&[FT, FT, LS, LS, FT], &ShiftParams::default());
        assert_eq!(s.shift_count(), 2);
        assert_eq!(s.pattern(), "FT>LT>FT");
    }

    #[test]
    fn only_follower() {
        let s = gaze_shift_patterns(&[FT, ROAD, FT], &ShiftParams::default());
        assert_eq!(s.shift_count(), 0);
        assert!(!s.has_shift());
        assert_eq!(s.runs.len(), 1);
    }

    #[test]
    fn road_between_trucks_keeps_adjacency() {
        let mut m = vec![FT; 60];
        m.extend(vec![ROAD; 120]);
        m.extend(vec![LS; 60]);
        assert_eq!(gaze_shift_patterns(&m, &ShiftParams::default()).shift_count(), 1);
        let capped = gaze_shift_patterns(&m, &ShiftParams { max_gap_frames: Some(30) });
        assert_eq!(capped.shift_count(), 0);
        assert_eq!(capped.runs.len(), 2);
    }

    #[test]
    fn both_trucks_is_skipped() {
        let both = ObjectFlags { m_f: true, m_l: true, ..Default::default() };
        let s = gaze_shift_patterns(&[FT, both, FT], &ShiftParams::default());
        assert_eq!((s.shift_count(), s.ambiguous_frames, s.runs.len()), (0, 1, 1));
    }
}
