//! Distances to the follower at brake starts and at the passing lane change.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::quantile;
use crate::scenario::TrafficVolume;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrakeSample {
    pub p_f: f64,
    pub harsh: bool,
    pub volume: TrafficVolume,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrakeHistogramBin {
    pub low: u32,
    pub low_harsh: u32,
    pub high: u32,
    pub high_harsh: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BrakeHistogram {
    pub bin_ft: f64,
    /// Keyed by bin lower edge in multiples of `bin_ft`; bin k covers [k bin, (k+1) bin).
    pub bins: BTreeMap<i64, BrakeHistogramBin>,
}

impl BrakeHistogram {
    pub fn total(&self) -> u32 {
        self.bins.values().map(|b| b.low + b.high).sum()
    }
}

pub fn brake_distance_histogram(brakes: &[BrakeSample], bin_ft: f64) -> BrakeHistogram {
    let mut bins: BTreeMap<i64, BrakeHistogramBin> = BTreeMap::new();
    for b in brakes {
        let k = (b.p_f / bin_ft).floor() as i64;
        let e = bins.entry(k).or_default();
        match b.volume {
            TrafficVolume::Low => {
                e.low += 1;
                e.low_harsh += b.harsh as u32;
            }
            TrafficVolume::High => {
                e.high += 1;
                e.high_harsh += b.harsh as u32;
            }
        }
    }
    BrakeHistogram { bin_ft, bins }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub volume: TrafficVolume,
    pub distances: Vec<f64>,
    /// Sessions without a complete pass.
    pub excluded: usize,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
}

/// Per-volume summary of passing lane-change start distances. `None`
/// entries are sessions without a complete pass.
pub fn lane_change_distance_stats(sessions: &[(TrafficVolume, Option<f64>)]) -> Vec<DistanceStats> {
    [TrafficVolume::Low, TrafficVolume::High]
        .into_iter()
        .map(|volume| {
            let mine: Vec<_> = sessions.iter().filter(|(v, _)| *v == volume).collect();
            let distances: Vec<f64> = mine.iter().filter_map(|(_, d)| *d).collect();
            DistanceStats {
                volume,
                excluded: mine.len() - distances.len(),
                median: quantile(&distances, 0.5),
                q1: quantile(&distances, 0.25),
                q3: quantile(&distances, 0.75),
                distances,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brake_bins() {
        let h = brake_distance_histogram(
            &[
                BrakeSample { p_f: 250.0, harsh: false, volume: TrafficVolume::Low },
                BrakeSample { p_f: -20.0, harsh: true, volume: TrafficVolume::High },
            ],
            100.0,
        );
        assert_eq!(h.bins[&2], BrakeHistogramBin { low: 1, ..Default::default() });
        assert_eq!(h.bins[&-1], BrakeHistogramBin { high: 1, high_harsh: 1, ..Default::default() });
        assert_eq!(brake_distance_histogram(&[], 100.0).total(), 0);
    }

    #[test]
    fn medians() {
        let s = lane_change_distance_stats(&[
            (TrafficVolume::Low, Some(100.0)),
            (TrafficVolume::Low, Some(300.0)),
            (TrafficVolume::Low, Some(200.0)),
            (TrafficVolume::Low, None),
        ]);
        assert_eq!(s[0].median, Some(200.0));
        assert_eq!(s[0].excluded, 1);
        assert_eq!(s[1].median, None);
    }
}
