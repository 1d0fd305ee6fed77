//! Trimming a run to its active span and aligning gaze samples to frames.

use serde::Serialize;
use thiserror::Error;

use crate::gaze::{
    gaze_area_flags, group_fixations, ivt_classify, AreaFlags, AreaSet, Fixation, GazeSample, IvtParams, ObjectFlags,
    ObjectHulls, SampleLabel, ScreenGeometry,
};
use crate::record::FrameRecord;
use crate::units::HALF_FRAME_MS;

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("session has no frames")]
    Empty,
    #[error("accelerator never changes, so the run has no start")]
    NoStart,
    #[error("gaze covers {coverage:.3} of the trimmed run, below the required 0.5")]
    Alignment { coverage: f64 },
    #[error("frames are not in increasing time order at frame {0}")]
    Unordered(u64),
}

/// Per-frame view after trimming and alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedFrame<'a> {
    pub record: &'a FrameRecord,
    pub gaze: &'a GazeSample,
    pub label: SampleLabel,
    pub areas: AreaFlags,
    pub objects: ObjectFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionDataset {
    /// Frames from the first accelerator change to the exit frame, inclusive.
    pub frames: Vec<FrameRecord>,
    /// One sample per frame; frames with no matched sample hold an invalid one.
    pub gaze: Vec<GazeSample>,
    pub gaze_present: bool,
    pub gaze_matched: usize,
    /// Samples inside the trimmed span that matched no frame or lost to a closer sample.
    pub gaze_dropped: usize,
    /// Samples outside the trimmed span.
    pub gaze_outside: usize,
    pub labels: Vec<SampleLabel>,
    pub area_flags: Vec<AreaFlags>,
    pub object_flags: Vec<ObjectFlags>,
    /// Fixations with absolute frame numbers.
    pub fixations: Vec<Fixation>,
}

/// Index range `[start, end]` into `frames`: start is the first accelerator
/// change, end the first frame at the minimum exit distance at or after it.
pub fn trim_bounds(frames: &[FrameRecord]) -> Result<(usize, usize), MeasureError> {
    if frames.is_empty() {
        return Err(MeasureError::Empty);
    }
    let start = (1..frames.len()).find(|&i| frames[i].op.accel != frames[i - 1].op.accel).ok_or(MeasureError::NoStart)?;
    let mut end = start;
    for i in start..frames.len() {
        if frames[i].pos.p_e < frames[end].pos.p_e {
            end = i;
        }
    }
    Ok((start, end))
}

/// Trims `frames` and attaches each gaze sample to the nearest frame within
/// half a frame period.
pub fn trim_and_align(frames: &[FrameRecord], gaze: &[GazeSample]) -> Result<SessionDataset, MeasureError> {
    for w in frames.windows(2) {
        if w[1].time_ms <= w[0].time_ms {
            return Err(MeasureError::Unordered(w[1].frame));
        }
    }
    let (start, end) = trim_bounds(frames)?;
    let kept = frames[start..=end].to_vec();
    let t0 = kept[0].time_ms;
    let t1 = kept[kept.len() - 1].time_ms;

    let gaze_present = !gaze.is_empty();
    if gaze_present {
        let g0 = gaze.iter().map(|g| g.timestamp_ms).fold(f64::INFINITY, f64::min);
        let g1 = gaze.iter().map(|g| g.timestamp_ms).fold(f64::NEG_INFINITY, f64::max);
        let span = t1 - t0;
        let overlap = (g1.min(t1) - g0.max(t0)).max(0.0);
        let coverage = if span > 0.0 {
            overlap / span
        } else if g0 <= t0 + HALF_FRAME_MS && g1 >= t0 - HALF_FRAME_MS {
            1.0
        } else {
            0.0
        };
        if coverage < 0.5 {
            return Err(MeasureError::Alignment { coverage });
        }
    }

    let times: Vec<f64> = kept.iter().map(|f| f.time_ms).collect();
    let mut slots: Vec<Option<(f64, &GazeSample)>> = vec![None; kept.len()];
    let (mut dropped, mut outside) = (0, 0);
    for g in gaze {
        let t = g.timestamp_ms;
        if t < t0 - HALF_FRAME_MS || t > t1 + HALF_FRAME_MS {
            outside += 1;
            continue;
        }
        let idx = times.partition_point(|&x| x < t);
        let nearest = [idx.checked_sub(1), (idx < times.len()).then_some(idx)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()));
        let Some(k) = nearest else {
            dropped += 1;
            continue;
        };
        let err = (times[k] - t).abs();
        if err > HALF_FRAME_MS + 1e-9 {
            dropped += 1;
            continue;
        }
        match slots[k] {
            Some((prev, _)) if prev <= err => dropped += 1,
            Some(_) => {
                dropped += 1;
                slots[k] = Some((err, g));
            }
            None => slots[k] = Some((err, g)),
        }
    }
    let matched = slots.iter().filter(|s| s.is_some()).count();
    let aligned: Vec<GazeSample> = slots
        .iter()
        .zip(&kept)
        .map(|(s, f)| match s {
            Some((_, g)) => GazeSample { timestamp_ms: f.time_ms, ..(*g).clone() },
            None => GazeSample::invalid(f.time_ms),
        })
        .collect();

    let n = kept.len();
    Ok(SessionDataset {
        frames: kept,
        gaze: aligned,
        gaze_present,
        gaze_matched: matched,
        gaze_dropped: dropped,
        gaze_outside: outside,
        labels: vec![SampleLabel::Unclassified; n],
        area_flags: vec![AreaFlags::default(); n],
        object_flags: vec![ObjectFlags::default(); n],
        fixations: Vec::new(),
    })
}

impl SessionDataset {
    pub fn first_frame(&self) -> u64 {
        self.frames[0].frame
    }

    pub fn last_frame(&self) -> u64 {
        self.frames[self.frames.len() - 1].frame
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Index into the trimmed arrays for an absolute frame number.
    pub fn index_of(&self, frame: u64) -> Option<usize> {
        self.frames.binary_search_by_key(&frame, |f| f.frame).ok()
    }

    /// Runs the I-VT filter and computes fixations, area flags and object flags.
    pub fn annotate(&mut self, ivt: &IvtParams, screen: &ScreenGeometry, areas: &AreaSet) {
        if !self.gaze_present {
            return;
        }
        self.labels = ivt_classify(&self.gaze, ivt, screen);
        let first = self.first_frame() as usize;
        self.fixations = group_fixations(&self.labels, &self.gaze, ivt.min_fixation_ms)
            .into_iter()
            .map(|f| Fixation { start_frame: f.start_frame + first, end_frame: f.end_frame + first, ..f })
            .collect();
        for (i, (g, f)) in self.gaze.iter().zip(&self.frames).enumerate() {
            self.area_flags[i] = gaze_area_flags(g.point, areas);
            // dashboard and mirrors are drawn over the road scene
            self.object_flags[i] = match &f.quads {
                Some(q) if !self.area_flags[i].any() => ObjectHulls::from_quads(q).flags(g.point),
                _ => ObjectFlags::default(),
            };
        }
    }

    pub fn aligned(&self) -> impl Iterator<Item = AlignedFrame<'_>> {
        (0..self.len()).map(move |i| AlignedFrame {
            record: &self.frames[i],
            gaze: &self.gaze[i],
            label: self.labels[i],
            areas: self.area_flags[i],
            objects: self.object_flags[i],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Operation;
    use crate::scenario::Positions;
    use crate::units::frame_time_ms;

    fn frames(accel: &[f64]) -> Vec<FrameRecord> {
        accel
            .iter()
            .enumerate()
            .map(|(i, &a)| FrameRecord {
                frame: i as u64,
                time_ms: frame_time_ms(i as u64),
                op: Operation { brake: 0.0, accel: a, speed: 0.0 },
                pos: Positions { p_e: 1000.0 - i as f64, p_f: 0.0, p_l: 0.0 },
                lane: 0,
                lateral_offset: 0.0,
                steer: 0.0,
                indicators: [false; 2],
                quads: None,
            })
            .collect()
    }

    #[test]
    fn start_at_first_accelerator_change() {
        let mut a = vec![0.0; 42];
        a.extend(vec![0.2; 20]);
        let d = trim_and_align(&frames(&a), &[]).unwrap();
        assert_eq!(d.first_frame(), 42);
        assert_eq!(d.last_frame(), 61);
        assert!(!d.gaze_present);
    }

    #[test]
    fn end_at_minimum_exit_distance() {
        let mut f = frames(&[0.0, 1.0, 1.0, 1.0, 1.0]);
        f[3].pos.p_e = 0.0;
        f[4].pos.p_e = 0.0;
        assert_eq!(trim_bounds(&f).unwrap(), (1, 3));
    }

    #[test]
    fn no_change_is_an_error() {
        assert_eq!(trim_bounds(&frames(&[0.3; 5])), Err(MeasureError::NoStart));
    }

    #[test]
    fn nearest_frame_within_half_period() {
        let f = frames(&[0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let g: Vec<GazeSample> = [17.0, 22.0, 34.0, 49.0, 58.0, 200.0]
            .iter()
            .map(|&t| GazeSample { timestamp_ms: t, point: Some([0.5, 0.5]), pupil_left: None, pupil_right: None })
            .collect();
        let d = trim_and_align(&f, &g).unwrap();
        // 17 -> frame 1, 22 -> frame 1 (farther, dropped), 34 -> frame 2,
        // 49 -> frame 3, 58 -> frame 3 (farther, dropped), 200 is outside.
        assert_eq!(d.gaze_matched, 3);
        assert_eq!(d.gaze_dropped, 2);
        assert_eq!(d.gaze_outside, 1);
        assert!(d.gaze[0].is_valid());
        assert!(!d.gaze[3].is_valid());
    }

    #[test]
    fn low_coverage_is_an_alignment_error() {
        let f = frames(&vec![0.0, 1.0].into_iter().chain(vec![1.0; 98]).collect::<Vec<_>>());
        let g = vec![GazeSample { timestamp_ms: 20.0, point: Some([0.5, 0.5]), pupil_left: None, pupil_right: None }];
        assert!(matches!(trim_and_align(&f, &g), Err(MeasureError::Alignment { .. })));
    }
}
