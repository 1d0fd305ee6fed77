//! Deterministic fixed-step world model.
//!
//! Longitudinal coordinates are feet along the road (`s`), vehicles are
//! anchored at their front bumper. Lateral positions are feet measured from
//! the centre of the right-most lane (lane 0), positive to the left.

mod camera;
mod road;
mod vehicle;
mod world;

pub use camera::{eye_position, project_cuboid, project_cuboids, CameraSpec, Cuboid, ScreenPoint, ScreenQuadSet, VERTICES};
pub use road::RoadSpec;
pub use vehicle::{TruckGeometry, VehicleKind, VehicleState};
pub use world::{
    compute_positions, spawn_scenario, spawn_scenario_with, step_frame, Dynamics, EgoInputs, LateralInput, Positions,
    ScenarioConfig, ScenarioError, TrafficVolume, WorldState,
};
