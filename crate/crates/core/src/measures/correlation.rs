//! Speed against distance-to-ATMA correlations in 100 ft segments.

use serde::{Deserialize, Serialize};

use super::stats::pearson;
use crate::scenario::Positions;

/// Segment indices -10 ..= 10.
pub const SEGMENTS: std::ops::RangeInclusive<i32> = -10..=10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentCorrelation {
    pub segment: i32,
    pub r: Option<f64>,
    pub samples: usize,
}

/// Segment for one frame. Negative segments lie behind the follower
/// (segment -k covers follower distances in (100(k-1), 100k] ft), 0 is
/// alongside the ATMA and positive segments lie ahead of the lead.
pub fn segment_index(p: &Positions) -> Option<i32> {
    if p.p_f > 0.0 {
        let k = (p.p_f / 100.0).ceil();
        (k <= 10.0).then_some(-(k as i32))
    } else if p.p_l >= 0.0 {
        Some(0)
    } else {
        let k = (-p.p_l / 100.0).ceil();
        (k <= 10.0).then_some(k as i32)
    }
}

/// Pearson r between speed and distance to the ATMA centre per segment.
pub fn segment_correlations(speeds: &[f64], positions: &[Positions]) -> Vec<SegmentCorrelation> {
    assert_eq!(speeds.len(), positions.len());
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); 21];
    let mut ys: Vec<Vec<f64>> = vec![Vec::new(); 21];
    for (v, p) in speeds.iter().zip(positions) {
        if let Some(k) = segment_index(p) {
            let slot = (k + 10) as usize;
            xs[slot].push(*v);
            ys[slot].push(p.atma_center());
        }
    }
    SEGMENTS
        .map(|k| {
            let slot = (k + 10) as usize;
            SegmentCorrelation { segment: k, r: pearson(&xs[slot], &ys[slot]), samples: xs[slot].len() }
        })
        .collect()
}

/// Counts of sessions per segment and r bin of width 0.1 over [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationGrid {
    /// `counts[segment + 10][bin]`, bin 0 covering [-1, -0.9).
    pub counts: Vec<[u32; 20]>,
    pub undefined: Vec<u32>,
}

pub fn correlation_grid(sessions: &[Vec<SegmentCorrelation>]) -> CorrelationGrid {
    let mut counts = vec![[0u32; 20]; 21];
    let mut undefined = vec![0u32; 21];
    for s in sessions {
        for c in s {
            let slot = (c.segment + 10) as usize;
            match c.r {
                Some(r) => counts[slot][(((r + 1.0) * 10.0).floor() as usize).min(19)] += 1,
                None => undefined[slot] += 1,
            }
        }
    }
    CorrelationGrid { counts, undefined }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(p_f: f64) -> Positions {
        Positions { p_e: 1000.0, p_f, p_l: p_f + 160.0 }
    }

    #[test]
    fn segment_edges() {
        assert_eq!(segment_index(&pos(100.0)), Some(-1));
        assert_eq!(segment_index(&pos(100.5)), Some(-2));
        assert_eq!(segment_index(&pos(1000.0)), Some(-10));
        assert_eq!(segment_index(&pos(1000.5)), None);
        assert_eq!(segment_index(&pos(-50.0)), Some(0));
        assert_eq!(segment_index(&pos(-160.0)), Some(0));
        assert_eq!(segment_index(&pos(-160.5)), Some(1));
        assert_eq!(segment_index(&pos(-1160.0)), Some(10));
    }

    #[test]
    fn constant_speed_segment_is_undefined() {
        let positions: Vec<Positions> = (0..50).map(|i| pos(150.0 - i as f64)).collect();
        let speeds = vec![30.0; 50];
        let c = segment_correlations(&speeds, &positions);
        assert_eq!(c.len(), 21);
        let s2 = c.iter().find(|c| c.segment == -2).unwrap();
        assert_eq!(s2.samples, 50);
        assert_eq!(s2.r, None);
    }

    #[test]
    fn decelerating_approach_is_positive() {
        let positions: Vec<Positions> = (0..100).map(|i| pos(199.0 - i as f64 * 0.9)).collect();
        let speeds: Vec<f64> = (0..100).map(|i| 40.0 - i as f64 * 0.1).collect();
        let c = segment_correlations(&speeds, &positions);
        let s2 = c.iter().find(|c| c.segment == -2).unwrap();
        assert!((s2.r.unwrap() - 1.0).abs() < 1e-9);
    }
}
