//! Velocity-threshold (I-VT) sample classification.
//!
//! Each sample's angular velocity is estimated across a window spanning
//! `window_ms` (rounded to whole sample intervals, at least one). With the
//! default 20 ms window at 60 Hz the window is a single interval ending at
//! the sample. Screen coordinates are converted to visual angle through the
//! physical screen size and viewing distance.

use serde::{Deserialize, Serialize};

use super::sample::GazeSample;
use crate::units::FRAME_MS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleLabel {
    Fixation,
    Saccade,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvtParams {
    /// deg/s
    pub threshold_deg_s: f64,
    pub window_ms: f64,
    pub min_fixation_ms: f64,
}

impl Default for IvtParams {
    fn default() -> Self {
        Self { threshold_deg_s: 30.0, window_ms: 20.0, min_fixation_ms: 60.0 }
    }
}

/// Physical viewing setup used to turn screen fractions into visual angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenGeometry {
    pub width_cm: f64,
    pub height_cm: f64,
    pub distance_cm: f64,
}

impl Default for ScreenGeometry {
    /// A 24-inch 16:9 monitor viewed from 65 cm.
    fn default() -> Self {
        Self { width_cm: 53.1, height_cm: 29.9, distance_cm: 65.0 }
    }
}

impl ScreenGeometry {
    fn direction(&self, p: [f64; 2]) -> [f64; 3] {
        [(p[0] - 0.5) * self.width_cm, (p[1] - 0.5) * self.height_cm, self.distance_cm]
    }

    /// Visual angle between two screen points, degrees.
    pub fn angle_deg(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let (u, v) = (self.direction(a), self.direction(b));
        let c = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let cross = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        cross.atan2(dot).to_degrees()
    }
}

fn window_intervals(params: &IvtParams) -> usize {
    ((params.window_ms / FRAME_MS).round() as usize).max(1)
}

/// Angular velocity per sample (deg/s); `None` where the window holds an
/// invalid sample, runs off the stream, or timestamps do not advance.
pub fn angular_velocities(stream: &[GazeSample], params: &IvtParams, screen: &ScreenGeometry) -> Vec<Option<f64>> {
    let n = stream.len();
    let k = window_intervals(params);
    if n < k + 1 {
        return vec![None; n];
    }
    (0..n)
        .map(|i| {
            let mut start = i as isize - k.div_ceil(2) as isize;
            start = start.clamp(0, (n - 1 - k) as isize);
            let (start, end) = (start as usize, start as usize + k);
            if !stream[i].is_valid() || stream[start..=end].iter().any(|s| !s.is_valid()) {
                return None;
            }
            let dt_s = (stream[end].timestamp_ms - stream[start].timestamp_ms) / 1000.0;
            if !(dt_s > 0.0) {
                return None;
            }
            let (a, b) = (stream[start].point?, stream[end].point?);
            Some(screen.angle_deg(a, b) / dt_s)
        })
        .collect()
}

/// Labels every sample as fixation, saccade or unclassified.
pub fn ivt_classify(stream: &[GazeSample], params: &IvtParams, screen: &ScreenGeometry) -> Vec<SampleLabel> {
    angular_velocities(stream, params, screen)
        .into_iter()
        .map(|v| match v {
            None => SampleLabel::Unclassified,
            Some(v) if v <= params.threshold_deg_s => SampleLabel::Fixation,
            Some(_) => SampleLabel::Saccade,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(i: usize, p: Option<[f64; 2]>) -> GazeSample {
        GazeSample { timestamp_ms: i as f64 * FRAME_MS, point: p, pupil_left: Some(3.0), pupil_right: Some(3.0) }
    }

    #[test]
    fn stationary_is_fixation() {
        let s: Vec<_> = (0..20).map(|i| sample(i, Some([0.4, 0.6]))).collect();
        let labels = ivt_classify(&s, &IvtParams::default(), &ScreenGeometry::default());
        assert!(labels.iter().all(|&l| l == SampleLabel::Fixation));
    }

    #[test]
    fn fast_sweep_is_saccade() {
        // Horizontal sweep through screen centre at 300 deg/s: the visual
        // angle is atan((x-0.5)·W/D), so x(t) = 0.5 + D/W · tan(300·t).
        let g = ScreenGeometry::default();
        let s: Vec<_> = (0..6)
            .map(|i| {
                let t = (i as f64 - 2.5) * FRAME_MS / 1000.0;
                let x = 0.5 + g.distance_cm / g.width_cm * (300f64 * t).to_radians().tan();
                sample(i, Some([x, 0.5]))
            })
            .collect();
        let v = angular_velocities(&s, &IvtParams::default(), &g);
        for vel in v.iter().flatten() {
            assert!((vel - 300.0).abs() < 1e-6, "{vel}");
        }
        let labels = ivt_classify(&s, &IvtParams::default(), &g);
        assert!(labels.iter().all(|&l| l == SampleLabel::Saccade));
    }

    #[test]
    fn invalid_is_unclassified() {
        let mut s: Vec<_> = (0..10).map(|i| sample(i, Some([0.5, 0.5]))).collect();
        s[5] = GazeSample::invalid(s[5].timestamp_ms);
        let labels = ivt_classify(&s, &IvtParams::default(), &ScreenGeometry::default());
        assert_eq!(labels[5], SampleLabel::Unclassified);
        // the next sample's window reaches back into the gap
        assert_eq!(labels[6], SampleLabel::Unclassified);
        assert_eq!(labels[7], SampleLabel::Fixation);
    }

    #[test]
    fn short_stream_unclassified() {
        let s = vec![sample(0, Some([0.5, 0.5]))];
        assert_eq!(ivt_classify(&s, &IvtParams::default(), &ScreenGeometry::default()), vec![SampleLabel::Unclassified]);
        let p = IvtParams { window_ms: 100.0, ..IvtParams::default() };
        let s: Vec<_> = (0..5).map(|i| sample(i, Some([0.5, 0.5]))).collect();
        assert!(ivt_classify(&s, &p, &ScreenGeometry::default()).iter().all(|&l| l == SampleLabel::Unclassified));
    }

    #[test]
    fn centered_window_at_higher_rates() {
        let p = IvtParams { window_ms: 2.0 * FRAME_MS, ..IvtParams::default() };
        let mut s: Vec<_> = (0..10).map(|i| sample(i, Some([0.5, 0.5]))).collect();
        s[5].point = Some([0.9, 0.5]);
        let labels = ivt_classify(&s, &p, &ScreenGeometry::default());
        // 2-interval window centred on i spans i-1..i+1, so the single
        // outlier at 5 is seen only by samples 4 and 6.
        assert_eq!(labels[4], SampleLabel::Saccade);
        assert_eq!(labels[6], SampleLabel::Saccade);
        assert_eq!(labels[5], SampleLabel::Fixation);
    }

    #[test]
    fn angle_of_screen_half_width() {
        let g = ScreenGeometry::default();
        let a = g.angle_deg([0.5, 0.5], [1.0, 0.5]);
        let expected = (g.width_cm / 2.0 / g.distance_cm).atan().to_degrees();
        assert!((a - expected).abs() < 1e-12);
    }
}
