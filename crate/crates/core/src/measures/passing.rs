//! The passing phase bounded by the lane changes around the ATMA.

use serde::{Deserialize, Serialize};

use super::lanes::LaneChange;
use crate::scenario::Positions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassingPhase {
    /// Start of the last lane change begun behind the follower.
    pub t_s: Option<u64>,
    /// End of the first settled lane change finished ahead of the lead.
    pub t_e: Option<u64>,
}

impl PassingPhase {
    pub fn complete(&self) -> bool {
        matches!((self.t_s, self.t_e), (Some(s), Some(e)) if s < e)
    }

    pub fn contains(&self, frame: u64) -> bool {
        match (self.t_s, self.t_e) {
            (Some(s), Some(e)) if s < e => (s..=e).contains(&frame),
            _ => false,
        }
    }
}

/// `positions[i]` belongs to absolute frame `first_frame + i`.
pub fn passing_phase(changes: &[LaneChange], positions: &[Positions], first_frame: u64) -> PassingPhase {
    let at = |f: u64| f.checked_sub(first_frame).and_then(|i| positions.get(i as usize));
    let t_s = changes.iter().filter(|c| at(c.start_frame).is_some_and(|p| p.p_f > 0.0)).map(|c| c.start_frame).max();
    let t_e = changes
        .iter()
        .filter(|c| !c.unfinished && at(c.end_frame).is_some_and(|p| p.p_l < 0.0))
        .map(|c| c.end_frame)
        .min();
    PassingPhase { t_s, t_e }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn change(s: u64, e: u64, from: usize, to: usize) -> LaneChange {
        LaneChange { start_frame: s, end_frame: e, from_lane: from, to_lane: to, unfinished: false }
    }

    /// Ego closes on the ATMA at 1 ft per frame from 300 ft behind.
    fn positions(n: usize) -> Vec<Positions> {
        (0..n)
            .map(|i| {
                let p_f = 300.0 - i as f64;
                Positions { p_e: 5000.0, p_f, p_l: p_f + 160.0 }
            })
            .collect()
    }

    #[test]
    fn full_pass() {
        let pos = positions(800);
        let ph = passing_phase(&[change(100, 280, 0, 1), change(600, 780, 1, 0)], &pos, 0);
        assert_eq!(ph, PassingPhase { t_s: Some(100), t_e: Some(780) });
        assert!(ph.complete());
        assert!(ph.contains(500) && !ph.contains(99));
    }

    #[test]
    fn early_return_is_incomplete() {
        let pos = positions(800);
        let ph = passing_phase(&[change(100, 200, 0, 1), change(220, 290, 1, 0)], &pos, 0);
        assert_eq!(ph.t_s, Some(220));
        assert_eq!(ph.t_e, None);
        assert!(!ph.complete());
    }
}
