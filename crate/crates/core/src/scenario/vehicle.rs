use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleKind {
    Ego,
    FollowerTruck,
    LeadTruck,
    Npv,
}

impl VehicleKind {
    pub fn is_atma(self) -> bool {
        matches!(self, VehicleKind::FollowerTruck | VehicleKind::LeadTruck)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: u32,
    pub kind: VehicleKind,
    /// ft, position of the front bumper along the road.
    pub s: f64,
    /// Lane whose centre is nearest to the vehicle.
    pub lane: usize,
    /// ft from the centre of `lane`, positive to the left.
    pub lateral_offset: f64,
    /// mph
    pub speed: f64,
    /// ft
    pub length: f64,
    /// ft
    pub width: f64,
    pub accel_input: f64,
    pub brake_input: f64,
    /// Lane the vehicle is steering towards.
    pub target_lane: usize,
    /// mph; NPV cruise speed, unused for the ego.
    pub desired_speed: f64,
}

impl VehicleState {
    pub fn rear(&self) -> f64 {
        self.s - self.length
    }

    /// Absolute lateral coordinate (ft from lane 0 centre).
    pub fn lateral(&self, lane_width: f64) -> f64 {
        self.lane as f64 * lane_width + self.lateral_offset
    }

    pub fn set_lateral(&mut self, y: f64, lane_width: f64, lanes: usize) {
        let lane = (y / lane_width).round().clamp(0.0, (lanes - 1) as f64) as usize;
        self.lane = lane;
        self.lateral_offset = y - lane as f64 * lane_width;
    }
}

/// Body dimensions of the ATMA trucks and their rear-mounted arrow boards.
///
/// Sizes are not published for the real system; these are typical values
/// for a single-unit maintenance truck carrying a rear arrow board.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruckGeometry {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub sign_width: f64,
    pub sign_height: f64,
    pub sign_depth: f64,
    /// Height of the sign's lower edge above the road.
    pub sign_bottom: f64,
}

impl Default for TruckGeometry {
    fn default() -> Self {
        Self {
            length: 30.0,
            width: 8.5,
            height: 11.0,
            sign_width: 6.0,
            sign_height: 4.0,
            sign_depth: 0.5,
            sign_bottom: 6.5,
        }
    }
}

impl TruckGeometry {
    /// The sign cuboid must sit inside the truck's bounding cuboid.
    pub fn validate(&self) -> Result<(), String> {
        let ok = self.length > 0.0
            && self.width > 0.0
            && self.height > 0.0
            && self.sign_width > 0.0
            && self.sign_height > 0.0
            && self.sign_depth > 0.0
            && self.sign_width <= self.width
            && self.sign_depth <= self.length
            && self.sign_bottom >= 0.0
            && self.sign_bottom + self.sign_height <= self.height;
        if ok {
            Ok(())
        } else {
            Err("truck sign cuboid must be positive and mounted inside the truck cuboid".into())
        }
    }
}
