//! Brake events from the pedal trace and their harshness.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrakeParams {
    /// Resting pedal level; estimated from the pre-start trace when `None`.
    pub alpha_b: Option<f64>,
    /// Margin above rest that counts as pressed.
    pub delta: f64,
    /// Harshness threshold, mph/s.
    pub alpha_h: f64,
    /// Deceleration at full pedal, mph/s; scales the pedal-slope verdict.
    pub pedal_scale: f64,
}

impl Default for BrakeParams {
    fn default() -> Self {
        Self { alpha_b: None, delta: 0.02, alpha_h: 10.648, pedal_scale: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrakeEvent {
    /// Absolute frame of the first pressed frame.
    pub start_frame: u64,
    pub duration_frames: u64,
    /// Speed drop across the event, mph/s.
    pub decel_mph_s: f64,
    /// Verdict from the measured speed trace.
    pub harsh: bool,
    /// Pedal slope across the event times `pedal_scale`, mph/s.
    pub pedal_rate: f64,
    /// Verdict from the pedal slope alone.
    pub harsh_pedal: bool,
}

/// Most frequent pedal value in the pre-start trace, on a 0.001 grid.
/// Returns 0 for an empty trace.
pub fn estimate_alpha_b(pre_start: &[f64]) -> f64 {
    use std::collections::HashMap;
    let mut counts: HashMap<i64, usize> = HashMap::new();
    for &b in pre_start {
        *counts.entry((b * 1000.0).round() as i64).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(k, _)| k as f64 / 1000.0)
        .unwrap_or(0.0)
}

/// Maximal runs of frames with the pedal above `alpha_b + delta`.
///
/// `brake` and `speed` are aligned traces starting at absolute frame
/// `first_frame`; `alpha_b` must be resolved by the caller (see
/// [`estimate_alpha_b`]) when `params.alpha_b` is `None`, and is passed in
/// as `alpha_b`.
pub fn detect_brakes(
    brake: &[f64],
    speed: &[f64],
    first_frame: u64,
    fps: f64,
    alpha_b: f64,
    params: &BrakeParams,
) -> Vec<BrakeEvent> {
    assert_eq!(brake.len(), speed.len());
    let alpha_b = params.alpha_b.unwrap_or(alpha_b);
    let level = alpha_b + params.delta;
    let n = brake.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if brake[i] <= level {
            i += 1;
            continue;
        }
        let b = i;
        while i < n && brake[i] > level {
            i += 1;
        }
        let q = i - b;
        let secs = q as f64 / fps;
        let after = (b + q).min(n - 1);
        let decel = (speed[b] - speed[after]) / secs;
        let pedal_rate = (brake[b] - brake[after]) * params.pedal_scale / secs;
        out.push(BrakeEvent {
            start_frame: first_frame + b as u64,
            duration_frames: q as u64,
            decel_mph_s: decel,
            harsh: decel > params.alpha_h,
            pedal_rate,
            harsh_pedal: pedal_rate > params.alpha_h,
        });
    }
    out
}
