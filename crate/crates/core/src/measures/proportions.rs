//! Share of fixation samples on each ATMA object by distance to the follower.

use serde::{Deserialize, Serialize};

use super::stats::{mean, sample_variance};
use crate::gaze::{ObjectFlags, SampleLabel};

/// Six 100 ft bins covering follower distances (0, 600].
pub const PROPORTION_BINS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtmaObject {
    Follower,
    FollowerSign,
    Lead,
    LeadSign,
}

impl AtmaObject {
    pub const ALL: [AtmaObject; 4] = [AtmaObject::Follower, AtmaObject::FollowerSign, AtmaObject::Lead, AtmaObject::LeadSign];

    pub fn name(self) -> &'static str {
        match self {
            AtmaObject::Follower => "follower",
            AtmaObject::FollowerSign => "follower_sign",
            AtmaObject::Lead => "lead",
            AtmaObject::LeadSign => "lead_sign",
        }
    }

    pub fn hit(self, f: &ObjectFlags) -> bool {
        match self {
            AtmaObject::Follower => f.m_f,
            AtmaObject::FollowerSign => f.m_fs,
            AtmaObject::Lead => f.m_l,
            AtmaObject::LeadSign => f.m_ls,
        }
    }
}

/// Bin for a follower distance: 0 covers (0, 100] ft, 5 covers (500, 600] ft.
pub fn proportion_bin(p_f: f64) -> Option<usize> {
    if p_f <= 0.0 || p_f > 100.0 * PROPORTION_BINS as f64 {
        return None;
    }
    Some((p_f / 100.0).ceil() as usize - 1)
}

/// One session's proportions, `None` where a bin held no fixation samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinProportions {
    /// `values[bin][object]` in the order of [`AtmaObject::ALL`].
    pub values: [[Option<f64>; 4]; PROPORTION_BINS],
    pub fixation_samples: [usize; PROPORTION_BINS],
}

/// Per-frame inputs are aligned: label, object flags and follower distance.
pub fn session_proportions(labels: &[SampleLabel], objects: &[ObjectFlags], p_f: &[f64]) -> BinProportions {
    assert!(labels.len() == objects.len() && labels.len() == p_f.len());
    let mut hits = [[0usize; 4]; PROPORTION_BINS];
    let mut total = [0usize; PROPORTION_BINS];
    for ((l, o), &d) in labels.iter().zip(objects).zip(p_f) {
        if *l != SampleLabel::Fixation {
            continue;
        }
        let Some(b) = proportion_bin(d) else { continue };
        total[b] += 1;
        for (k, obj) in AtmaObject::ALL.iter().enumerate() {
            if obj.hit(o) {
                hits[b][k] += 1;
            }
        }
    }
    let mut values = [[None; 4]; PROPORTION_BINS];
    for b in 0..PROPORTION_BINS {
        if total[b] > 0 {
            for k in 0..4 {
                values[b][k] = Some(hits[b][k] as f64 / total[b] as f64);
            }
        }
    }
    BinProportions { values, fixation_samples: total }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    /// Bin index; the bin covers follower distances (100 bin, 100 (bin + 1)] ft.
    pub bin: usize,
    pub object: AtmaObject,
    pub sessions: usize,
    pub mean: Option<f64>,
    /// Standard error of the mean; 0 with a single session.
    pub se: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// Mean and 95% normal interval across sessions for every bin and object.
pub fn fixation_proportions_by_distance(sessions: &[BinProportions]) -> Vec<IntervalEstimate> {
    let mut out = Vec::with_capacity(PROPORTION_BINS * 4);
    for bin in 0..PROPORTION_BINS {
        for (k, &object) in AtmaObject::ALL.iter().enumerate() {
            let xs: Vec<f64> = sessions.iter().filter_map(|s| s.values[bin][k]).collect();
            let m = mean(&xs);
            let se = m.map(|_| sample_variance(&xs).map_or(0.0, |v| (v / xs.len() as f64).sqrt()));
            let (lo, hi) = match (m, se) {
                (Some(m), Some(se)) => (Some(m - 1.96 * se), Some(m + 1.96 * se)),
                _ => (None, None),
            };
            out.push(IntervalEstimate { bin, object, sessions: xs.len(), mean: m, se, lo, hi });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins() {
        assert_eq!(proportion_bin(0.0), None);
        assert_eq!(proportion_bin(0.1), Some(0));
        assert_eq!(proportion_bin(100.0), Some(0));
        assert_eq!(proportion_bin(600.0), Some(5));
        assert_eq!(proportion_bin(600.1), None);
    }

    #[test]
    fn all_on_follower_gives_degenerate_interval() {
        let on = ObjectFlags { m_f: true, ..Default::default() };
        let s = session_proportions(&[SampleLabel::Fixation; 3], &[on; 3], &[50.0, 60.0, 70.0]);
        let est = fixation_proportions_by_distance(&[s.clone(), s]);
        let e = est.iter().find(|e| e.bin == 0 && e.object == AtmaObject::Follower).unwrap();
        assert_eq!(e.mean, Some(1.0));
        assert_eq!(e.lo, e.hi);
        let empty = est.iter().find(|e| e.bin == 3).unwrap();
        assert_eq!((empty.sessions, empty.mean), (0, None));
    }

    #[test]
    fn saccades_do_not_count() {
        let on = ObjectFlags { m_l: true, ..Default::default() };
        let s = session_proportions(
            &[SampleLabel::Fixation, SampleLabel::Saccade],
            &[ObjectFlags::default(), on],
            &[150.0, 150.0],
        );
        assert_eq!(s.values[1][2], Some(0.0));
        assert_eq!(s.fixation_samples[1], 1);
    }
}
