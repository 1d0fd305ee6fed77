use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::road::RoadSpec;
use super::vehicle::{TruckGeometry, VehicleKind, VehicleState};
use crate::units::{frame_time_ms, mph_to_ftps, ftps_to_mph, DT_S};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario configuration: {0}")]
    InvalidConfig(String),
    #[error("NPV spacing {spacing:.1} ft cannot fit vehicles without overlap (needs at least {required:.1} ft)")]
    NpvSpacing { spacing: f64, required: f64 },
    #[error("world has no {0} vehicle")]
    MissingVehicle(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficVolume {
    Low,
    High,
}

impl TrafficVolume {
    /// Average space between two NPVs on the same lane, ft.
    pub fn default_npv_spacing(self) -> f64 {
        match self {
            TrafficVolume::Low => 650.0,
            TrafficVolume::High => 160.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrafficVolume::Low => "low",
            TrafficVolume::High => "high",
        }
    }
}

impl std::str::FromStr for TrafficVolume {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(TrafficVolume::Low),
            "high" => Ok(TrafficVolume::High),
            other => Err(format!("unknown traffic volume '{other}' (expected low or high)")),
        }
    }
}

impl std::fmt::Display for TrafficVolume {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub traffic_volume: TrafficVolume,
    /// ft between the follower's front and the lead's rear.
    pub atma_gap: f64,
    /// ft from the ego's front to the follower's rear at frame 0.
    pub ego_start_behind_atma: f64,
    /// ft
    pub npv_mean_spacing: f64,
    /// mph
    pub atma_speed: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(traffic_volume: TrafficVolume, seed: u64) -> Self {
        Self {
            traffic_volume,
            atma_gap: 100.0,
            ego_start_behind_atma: 1800.0,
            npv_mean_spacing: traffic_volume.default_npv_spacing(),
            atma_speed: 15.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.atma_gap > 0.0) {
            return Err(ScenarioError::InvalidConfig(format!("atma_gap must be positive, got {}", self.atma_gap)));
        }
        if !(self.ego_start_behind_atma > self.atma_gap) {
            return Err(ScenarioError::InvalidConfig(format!(
                "ego_start_behind_atma ({}) must exceed atma_gap ({})",
                self.ego_start_behind_atma, self.atma_gap
            )));
        }
        if !(self.atma_speed >= 0.0) || !(self.npv_mean_spacing > 0.0) {
            return Err(ScenarioError::InvalidConfig("atma_speed and npv_mean_spacing must be positive".into()));
        }
        Ok(())
    }
}

/// Tunable vehicle model constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    /// mph/s at full throttle.
    pub ego_max_accel: f64,
    /// mph/s at full brake.
    pub ego_max_brake: f64,
    /// Quadratic drag, mph/s per mph².
    pub drag: f64,
    /// ft/s
    pub lateral_rate: f64,
    /// mph, cap for every non-ATMA vehicle.
    pub speed_cap: f64,
    /// mph, cap for the ATMA trucks.
    pub atma_max_speed: f64,
    /// 1/s, follower speed correction per ft of gap error.
    pub follower_gain: f64,
    /// mph/s
    pub npv_accel: f64,
    /// ft
    pub npv_min_gap: f64,
    /// s
    pub npv_time_headway: f64,
    /// mph
    pub npv_desired_speed: f64,
    /// mph, for the NPV trailing the ego.
    pub trailing_npv_speed: f64,
    /// Fractional uniform jitter on NPV spacing.
    pub npv_spacing_jitter: f64,
    /// ft behind the ego where the NPV column starts.
    pub npv_extent_behind: f64,
    /// ft between the trailing NPV's front and the ego's rear.
    pub trailing_npv_gap: f64,
    pub car_length: f64,
    pub car_width: f64,
}

impl Default for Dynamics {
    fn default() -> Self {
        Self {
            ego_max_accel: 6.0,
            ego_max_brake: 20.0,
            drag: 6.0 / (120.0 * 120.0),
            lateral_rate: 4.0,
            speed_cap: 65.0,
            atma_max_speed: 15.0,
            follower_gain: 0.5,
            npv_accel: 4.0,
            npv_min_gap: 20.0,
            npv_time_headway: 1.0,
            npv_desired_speed: 62.0,
            trailing_npv_speed: 60.0,
            npv_spacing_jitter: 0.2,
            npv_extent_behind: 4000.0,
            trailing_npv_gap: 100.0,
            car_length: 15.0,
            car_width: 6.0,
        }
    }
}

/// Lateral command for the ego.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateralInput {
    /// Keep heading for the current target lane.
    Hold,
    /// Begin or continue a lane change to this lane.
    Lane(usize),
    /// Continuous steering in [-1, 1], positive to the right.
    Steer(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoInputs {
    pub accel: f64,
    pub brake: f64,
    pub lateral: LateralInput,
}

impl Default for EgoInputs {
    fn default() -> Self {
        Self { accel: 0.0, brake: 0.0, lateral: LateralInput::Hold }
    }
}

/// Ego position relative to the exit and the two trucks, ft.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Positions {
    /// Distance left to the exit, never negative.
    pub p_e: f64,
    /// Follower rear minus ego front; positive while the follower is ahead.
    pub p_f: f64,
    /// Lead front minus ego rear; positive while the lead is ahead.
    pub p_l: f64,
}

impl Positions {
    /// Distance to the centre of the ATMA pair used by the speed correlations.
    pub fn atma_center(&self) -> f64 {
        (self.p_f + self.p_l) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub frame: u64,
    pub road: RoadSpec,
    pub vehicles: Vec<VehicleState>,
    pub rng_seed: u64,
    pub config: ScenarioConfig,
    pub dynamics: Dynamics,
    pub truck_geometry: TruckGeometry,
}

const EGO: usize = 0;
const FOLLOWER: usize = 1;
const LEAD: usize = 2;

impl WorldState {
    pub fn time_ms(&self) -> f64 {
        frame_time_ms(self.frame)
    }

    fn by_kind(&self, idx: usize, kind: VehicleKind) -> Option<&VehicleState> {
        self.vehicles.get(idx).filter(|v| v.kind == kind)
    }

    pub fn ego(&self) -> Option<&VehicleState> {
        self.by_kind(EGO, VehicleKind::Ego)
    }

    pub fn follower(&self) -> Option<&VehicleState> {
        self.by_kind(FOLLOWER, VehicleKind::FollowerTruck)
    }

    pub fn lead(&self) -> Option<&VehicleState> {
        self.by_kind(LEAD, VehicleKind::LeadTruck)
    }

    /// ft between the follower's front and the lead's rear.
    pub fn atma_gap(&self) -> Option<f64> {
        Some(self.lead()?.rear() - self.follower()?.s)
    }

    pub fn npvs(&self) -> impl Iterator<Item = &VehicleState> {
        self.vehicles.iter().filter(|v| v.kind == VehicleKind::Npv)
    }

    /// Advances the world by exactly one frame in place.
    pub fn step(&mut self, inputs: &EgoInputs) {
        let dyns = self.dynamics.clone();
        let road = self.road.clone();
        let w = road.lane_width;
        let dt = DT_S;

        let mut new_speed: Vec<f64> = self.vehicles.iter().map(|v| v.speed).collect();

        // Lane occupancy from the current state; vehicles part-way through a
        // lane change occupy both lanes.
        let mut lanes: Vec<Vec<(f64, usize)>> = vec![Vec::new(); road.lanes_per_direction];
        for (idx, v) in self.vehicles.iter().enumerate() {
            let y = v.lateral(w);
            for (lane, list) in lanes.iter_mut().enumerate() {
                if (y - road.lane_center(lane)).abs() < 0.75 * w {
                    list.push((v.s, idx));
                }
            }
        }
        for list in &mut lanes {
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }

        for (idx, v) in self.vehicles.iter().enumerate() {
            new_speed[idx] = match v.kind {
                VehicleKind::Ego => {
                    let a = inputs.accel.clamp(0.0, 1.0);
                    let b = inputs.brake.clamp(0.0, 1.0);
                    let dv = (dyns.ego_max_accel * a - dyns.ego_max_brake * b - dyns.drag * v.speed * v.speed) * dt;
                    (v.speed + dv).clamp(0.0, dyns.speed_cap)
                }
                VehicleKind::LeadTruck => self.config.atma_speed.clamp(0.0, dyns.atma_max_speed),
                VehicleKind::FollowerTruck => {
                    let lead = &self.vehicles[LEAD];
                    let gap = lead.rear() - v.s;
                    let cmd = mph_to_ftps(lead.speed) + dyns.follower_gain * (gap - self.config.atma_gap);
                    ftps_to_mph(cmd).clamp(0.0, dyns.atma_max_speed)
                }
                VehicleKind::Npv => {
                    let list = &lanes[v.lane];
                    let pos = list.partition_point(|&(s, _)| s <= v.s);
                    let mut v_new = (v.speed + dyns.npv_accel * dt).min(v.desired_speed).min(dyns.speed_cap);
                    if let Some(&(_, leader)) = list.get(pos) {
                        let gap = self.vehicles[leader].rear() - v.s;
                        let safe = ftps_to_mph((gap - dyns.npv_min_gap) / dyns.npv_time_headway);
                        v_new = v_new.min(safe);
                    }
                    v_new.max(0.0)
                }
            };
        }

        let (lo, hi) = road.lateral_bounds();
        for (v, speed) in self.vehicles.iter_mut().zip(new_speed) {
            v.speed = speed;
            v.s += mph_to_ftps(speed) * dt;
            if v.kind != VehicleKind::Ego {
                continue;
            }
            v.accel_input = inputs.accel.clamp(0.0, 1.0);
            v.brake_input = inputs.brake.clamp(0.0, 1.0);
            let y = v.lateral(w);
            let step = dyns.lateral_rate * dt;
            let new_y = match inputs.lateral {
                LateralInput::Steer(steer) => {
                    let y = (y - steer.clamp(-1.0, 1.0) * step).clamp(lo, hi);
                    v.target_lane = (y / w).round().clamp(0.0, (road.lanes_per_direction - 1) as f64) as usize;
                    y
                }
                LateralInput::Lane(k) => {
                    v.target_lane = k.min(road.lanes_per_direction - 1);
                    approach(y, road.lane_center(v.target_lane), step)
                }
                LateralInput::Hold => approach(y, road.lane_center(v.target_lane), step),
            };
            v.set_lateral(new_y, w, road.lanes_per_direction);
        }
        self.frame += 1;
    }
}

fn approach(from: f64, to: f64, max_step: f64) -> f64 {
    let d = to - from;
    if d.abs() <= max_step {
        to
    } else {
        from + max_step * d.signum()
    }
}

/// Places the ego, the ATMA pair and the NPVs for frame 0.
pub fn spawn_scenario(config: &ScenarioConfig) -> Result<WorldState, ScenarioError> {
    spawn_scenario_with(config, RoadSpec::default(), Dynamics::default(), TruckGeometry::default())
}

pub fn spawn_scenario_with(
    config: &ScenarioConfig,
    road: RoadSpec,
    dynamics: Dynamics,
    truck_geometry: TruckGeometry,
) -> Result<WorldState, ScenarioError> {
    config.validate()?;
    road.validate().map_err(ScenarioError::InvalidConfig)?;
    truck_geometry.validate().map_err(ScenarioError::InvalidConfig)?;

    let required = dynamics.car_length + dynamics.npv_min_gap;
    let min_spacing = config.npv_mean_spacing * (1.0 - dynamics.npv_spacing_jitter);
    if min_spacing < required {
        return Err(ScenarioError::NpvSpacing { spacing: config.npv_mean_spacing, required });
    }
    let follower_front = config.ego_start_behind_atma + truck_geometry.length;
    let lead_front = follower_front + config.atma_gap + truck_geometry.length;
    if lead_front >= road.exit_position {
        return Err(ScenarioError::InvalidConfig(format!(
            "ATMA (front at {lead_front:.0} ft) must start before the exit at {:.0} ft",
            road.exit_position
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let atma_speed = config.atma_speed.min(dynamics.atma_max_speed);
    let left = 1usize;

    let car = |id: u32, kind: VehicleKind, s: f64, lane: usize, speed: f64, desired: f64| VehicleState {
        id,
        kind,
        s,
        lane,
        lateral_offset: 0.0,
        speed,
        length: dynamics.car_length,
        width: dynamics.car_width,
        accel_input: 0.0,
        brake_input: 0.0,
        target_lane: lane,
        desired_speed: desired,
    };
    let truck = |id: u32, kind: VehicleKind, s: f64| VehicleState {
        length: truck_geometry.length,
        width: truck_geometry.width,
        ..car(id, kind, s, 0, atma_speed, atma_speed)
    };

    let mut vehicles = vec![
        car(0, VehicleKind::Ego, 0.0, 0, 0.0, dynamics.speed_cap),
        truck(1, VehicleKind::FollowerTruck, follower_front),
        truck(2, VehicleKind::LeadTruck, lead_front),
        car(
            3,
            VehicleKind::Npv,
            -(dynamics.car_length + dynamics.trailing_npv_gap),
            0,
            0.0,
            dynamics.trailing_npv_speed,
        ),
    ];

    let j = dynamics.npv_spacing_jitter;
    let mut s = -dynamics.npv_extent_behind;
    let mut id = 4;
    while s <= road.length {
        vehicles.push(car(id, VehicleKind::Npv, s, left, dynamics.npv_desired_speed, dynamics.npv_desired_speed));
        id += 1;
        let jitter: f64 = if j > 0.0 { rng.random_range(-j..=j) } else { 0.0 };
        s += config.npv_mean_spacing * (1.0 + jitter);
    }

    Ok(WorldState {
        frame: 0,
        road,
        vehicles,
        rng_seed: config.seed,
        config: config.clone(),
        dynamics,
        truck_geometry,
    })
}

/// Pure form of [`WorldState::step`].
pub fn step_frame(world: &WorldState, inputs: &EgoInputs) -> WorldState {
    let mut next = world.clone();
    next.step(inputs);
    next
}

pub fn compute_positions(world: &WorldState) -> Result<Positions, ScenarioError> {
    let ego = world.ego().ok_or(ScenarioError::MissingVehicle("ego"))?;
    let follower = world.follower().ok_or(ScenarioError::MissingVehicle("follower truck"))?;
    let lead = world.lead().ok_or(ScenarioError::MissingVehicle("lead truck"))?;
    Ok(Positions {
        p_e: (world.road.exit_position - ego.s).max(0.0),
        p_f: follower.rear() - ego.s,
        p_l: lead.s - ego.rear(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn low() -> WorldState {
        spawn_scenario(&ScenarioConfig::new(TrafficVolume::Low, 1)).unwrap()
    }

    #[test]
    fn spawn_places_ego_behind_atma() {
        let w = low();
        let p = compute_positions(&w).unwrap();
        assert!((p.p_f - 1800.0).abs() <= 50.0);
        assert_eq!(w.atma_gap().unwrap(), 100.0);
        let ego = w.ego().unwrap();
        assert_eq!((ego.s, ego.lane, ego.speed), (0.0, 0, 0.0));
        let trailing: Vec<_> = w.npvs().filter(|v| v.lane == 0).collect();
        assert_eq!(trailing.len(), 1);
        assert!(trailing[0].s < ego.rear());
    }

    #[test]
    fn high_volume_spacing() {
        let w = spawn_scenario(&ScenarioConfig::new(TrafficVolume::High, 1)).unwrap();
        let mut s: Vec<f64> = w.npvs().filter(|v| v.lane == 1).map(|v| v.s).collect();
        s.sort_by(f64::total_cmp);
        let mean = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
        assert!((mean - 160.0).abs() / 160.0 < 0.1, "mean spacing {mean}");
    }

    #[test]
    fn spawn_is_deterministic() {
        assert_eq!(low(), low());
        let other = spawn_scenario(&ScenarioConfig::new(TrafficVolume::Low, 2)).unwrap();
        assert_ne!(low(), other);
    }

    #[test]
    fn spacing_too_small_is_rejected() {
        let mut c = ScenarioConfig::new(TrafficVolume::High, 1);
        c.npv_mean_spacing = 30.0;
        assert!(matches!(spawn_scenario(&c), Err(ScenarioError::NpvSpacing { .. })));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = ScenarioConfig::new(TrafficVolume::Low, 1);
        c.atma_gap = 0.0;
        assert!(spawn_scenario(&c).is_err());
        let mut c = ScenarioConfig::new(TrafficVolume::Low, 1);
        c.ego_start_behind_atma = 50.0;
        assert!(spawn_scenario(&c).is_err());
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let mut w = low();
        for _ in 0..120 {
            w.step(&EgoInputs::default());
        }
        assert_eq!(w.ego().unwrap().speed, 0.0);
        assert_eq!(w.frame, 120);
    }

    #[test]
    fn follower_holds_steady_gap() {
        let mut w = low();
        for _ in 0..600 {
            w.step(&EgoInputs::default());
            assert!((w.follower().unwrap().speed - 15.0).abs() < 1e-9);
            assert!((w.atma_gap().unwrap() - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn follower_recovers_from_gap_error() {
        let mut w = low();
        w.vehicles[FOLLOWER].s += 30.0;
        for _ in 0..(10 * 60) {
            w.step(&EgoInputs::default());
            assert!(w.follower().unwrap().speed <= 15.0);
        }
        assert!((w.atma_gap().unwrap() - 100.0).abs() <= 5.0);
    }

    #[test]
    fn full_throttle_matches_closed_form() {
        let mut w = low();
        let inputs = EgoInputs { accel: 1.0, ..EgoInputs::default() };
        for _ in 0..(5 * 60) {
            w.step(&inputs);
        }
        // dv/dt = a - c v², v(0) = 0  =>  v(t) = sqrt(a/c) tanh(t sqrt(a c))
        let d = Dynamics::default();
        let (a, c) = (d.ego_max_accel, d.drag);
        let expected = (a / c).sqrt() * (5.0 * (a * c).sqrt()).tanh();
        let got = w.ego().unwrap().speed;
        assert!((got - expected).abs() < 0.1, "got {got}, expected {expected}");
    }

    #[test]
    fn lane_change_moves_at_bounded_rate() {
        let mut w = low();
        let inputs = EgoInputs { accel: 0.5, brake: 0.0, lateral: LateralInput::Lane(1) };
        let frames_needed = (12.0 / (4.0 * DT_S)).round() as usize;
        for _ in 0..frames_needed - 1 {
            w.step(&inputs);
        }
        assert!(w.ego().unwrap().lateral(12.0) < 12.0);
        w.step(&inputs);
        let ego = w.ego().unwrap();
        assert_eq!(ego.lane, 1);
        assert!(ego.lateral_offset.abs() < 1e-9);
    }

    #[test]
    fn positions_follow_definitions() {
        let mut w = low();
        w.vehicles[EGO].s = 0.0;
        w.vehicles[FOLLOWER].s = 500.0 + w.truck_geometry.length;
        assert!((compute_positions(&w).unwrap().p_f - 500.0).abs() < 1e-9);

        w.vehicles[EGO].s = 100.0 + w.vehicles[EGO].length;
        w.vehicles[LEAD].s = 50.0;
        assert!((compute_positions(&w).unwrap().p_l + 50.0).abs() < 1e-9);

        w.vehicles[EGO].s = w.road.exit_position;
        assert_eq!(compute_positions(&w).unwrap().p_e, 0.0);
        w.vehicles[EGO].s = w.road.exit_position + 10.0;
        assert_eq!(compute_positions(&w).unwrap().p_e, 0.0);
    }

    #[test]
    fn missing_atma_is_an_error() {
        let mut w = low();
        w.vehicles.truncate(1);
        assert_eq!(compute_positions(&w), Err(ScenarioError::MissingVehicle("follower truck")));
    }
}
