use serde::{Deserialize, Serialize};

/// One eye-tracker sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub timestamp_ms: f64,
    /// Normalised screen coordinates; `None` when the tracker lost the gaze.
    pub point: Option<[f64; 2]>,
    /// mm
    pub pupil_left: Option<f64>,
    /// mm
    pub pupil_right: Option<f64>,
}

impl GazeSample {
    pub fn invalid(timestamp_ms: f64) -> Self {
        Self { timestamp_ms, point: None, pupil_left: None, pupil_right: None }
    }

    pub fn is_valid(&self) -> bool {
        self.point.is_some()
    }
}
