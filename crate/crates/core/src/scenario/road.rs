use serde::{Deserialize, Serialize};

/// Straight divided highway with one exit near its end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSpec {
    /// ft; 2.2 mi by default.
    pub length: f64,
    pub lanes_per_direction: usize,
    /// ft
    pub lane_width: f64,
    /// mph
    pub speed_limit: f64,
    /// ft along the road.
    pub exit_position: f64,
}

impl Default for RoadSpec {
    fn default() -> Self {
        Self {
            length: 2.2 * 5280.0,
            lanes_per_direction: 2,
            lane_width: 12.0,
            speed_limit: 65.0,
            exit_position: 2.0 * 5280.0,
        }
    }
}

impl RoadSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.length > 0.0) {
            return Err(format!("road length must be positive, got {}", self.length));
        }
        if self.lanes_per_direction < 2 {
            return Err(format!(
                "need at least 2 lanes per direction, got {}",
                self.lanes_per_direction
            ));
        }
        if !(self.lane_width > 0.0) {
            return Err(format!("lane width must be positive, got {}", self.lane_width));
        }
        if !(self.exit_position > 0.0 && self.exit_position <= self.length) {
            return Err(format!(
                "exit position {} must lie in (0, {}]",
                self.exit_position, self.length
            ));
        }
        Ok(())
    }

    /// Lateral coordinate of a lane centre.
    pub fn lane_center(&self, lane: usize) -> f64 {
        lane as f64 * self.lane_width
    }

    /// Range the ego's lateral position is confined to.
    pub fn lateral_bounds(&self) -> (f64, f64) {
        let half = self.lane_width / 2.0;
        (-half, self.lane_center(self.lanes_per_direction - 1) + half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let r = RoadSpec::default();
        assert!(r.validate().is_ok());
        assert!((r.length - 11616.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_exit() {
        let r = RoadSpec { exit_position: 0.0, ..RoadSpec::default() };
        assert!(r.validate().is_err());
        let r = RoadSpec { exit_position: 20000.0, ..RoadSpec::default() };
        assert!(r.validate().is_err());
        let r = RoadSpec { lanes_per_direction: 1, ..RoadSpec::default() };
        assert!(r.validate().is_err());
    }
}
