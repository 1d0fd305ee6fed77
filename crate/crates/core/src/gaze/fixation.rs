use serde::{Deserialize, Serialize};

use super::ivt::SampleLabel;
use super::sample::GazeSample;
use crate::units::FRAME_MS;

/// A maximal run of fixation-labelled samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    /// Index of the first member sample (a frame index once aligned).
    pub start_frame: usize,
    /// Index of the last member sample, inclusive.
    pub end_frame: usize,
    /// Mean of the member gaze points.
    pub center: [f64; 2],
    pub duration_ms: f64,
}

impl Fixation {
    pub fn len(&self) -> usize {
        self.end_frame - self.start_frame + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mid_frame(&self) -> usize {
        (self.start_frame + self.end_frame) / 2
    }
}

/// Groups runs of fixation points into fixations, dropping runs shorter
/// than `min_duration_ms`.
pub fn group_fixations(labels: &[SampleLabel], stream: &[GazeSample], min_duration_ms: f64) -> Vec<Fixation> {
    assert_eq!(labels.len(), stream.len(), "labels must align with the stream");
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        if labels[i] != SampleLabel::Fixation {
            i += 1;
            continue;
        }
        let start = i;
        while i < labels.len() && labels[i] == SampleLabel::Fixation {
            i += 1;
        }
        let end = i - 1;
        let duration_ms = (end - start + 1) as f64 * FRAME_MS;
        if duration_ms + 1e-9 < min_duration_ms {
            continue;
        }
        let pts: Vec<[f64; 2]> = stream[start..=end].iter().filter_map(|s| s.point).collect();
        if pts.is_empty() {
            continue;
        }
        let n = pts.len() as f64;
        let center = [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n];
        out.push(Fixation { start_frame: start, end_frame: end, center, duration_ms });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use SampleLabel::*;

    fn stream(n: usize) -> Vec<GazeSample> {
        (0..n)
            .map(|i| GazeSample {
                timestamp_ms: i as f64 * FRAME_MS,
                point: Some([0.2 + 0.001 * (i % 3) as f64, 0.7]),
                pupil_left: None,
                pupil_right: None,
            })
            .collect()
    }

    #[test]
    fn thirty_points_make_one_half_second_fixation() {
        let s = stream(30);
        let f = group_fixations(&vec![Fixation; 30], &s, 60.0);
        assert_eq!(f.len(), 1);
        assert!((f[0].duration_ms - 500.0).abs() < 1e-9);
        assert_eq!((f[0].start_frame, f[0].end_frame), (0, 29));
        assert!((f[0].center[0] - 0.201).abs() < 1e-12);
    }

    #[test]
    fn short_run_discarded() {
        let s = stream(10);
        let labels = [Saccade, Fixation, Fixation, Fixation, Saccade, Fixation, Fixation, Fixation, Fixation, Saccade];
        let f = group_fixations(&labels, &s, 60.0);
        // 3 samples = 50 ms dropped, 4 samples = 66.7 ms kept
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].start_frame, f[0].end_frame), (5, 8));
    }

    #[test]
    fn alternating_labels_yield_nothing() {
        let s = stream(20);
        let labels: Vec<_> = (0..20).map(|i| if i % 2 == 0 { Fixation } else { Saccade }).collect();
        assert!(group_fixations(&labels, &s, 60.0).is_empty());
    }
}
