//! Headless scripted runs: scenario, driver script and optional synthetic
//! gaze stepped together into a session plus its ground-truth ledger.

use crate::agents::{DriverScript, GazeProfile, GazeSynth, Ledger, LedgerDwell, LedgerRecorder, Observation, ScriptedDriver};
use crate::config::Config;
use crate::error::Error;
use crate::io::{Session, SessionHeader};
use crate::record::{Channels, FrameRecord, Operation};
use crate::scenario::{
    compute_positions, project_cuboids, spawn_scenario_with, EgoInputs, LateralInput, ScenarioError, VehicleState,
    WorldState,
};

#[derive(Debug, Clone)]
pub struct SimRun {
    pub session: Session,
    pub ledger: Ledger,
}

/// Seed for the gaze generator, kept apart from the traffic seed.
pub fn gaze_seed(scenario_seed: u64) -> u64 {
    scenario_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17) ^ 0x00a7_0a5e
}

pub fn session_header(cfg: &Config, source: &str, gaze: bool) -> SessionHeader {
    let mut h = SessionHeader::new(source);
    h.scenario = Some(cfg.scenario.clone());
    h.road = Some(cfg.road.clone());
    h.camera = Some(cfg.camera.clone());
    h.truck = Some(cfg.truck.clone());
    h.areas = cfg.area.clone();
    h.channels = Channels { gaze, pupil: gaze, ..Channels::ALL };
    h
}

pub fn spawn(cfg: &Config) -> Result<WorldState, Error> {
    cfg.validate()?;
    Ok(spawn_scenario_with(&cfg.scenario, cfg.road.clone(), cfg.dynamics.clone(), cfg.truck.clone())?)
}

/// Left and right indicator: on while the ego is heading for another lane.
pub fn indicators(ego: &VehicleState) -> [bool; 2] {
    let moving = ego.target_lane != ego.lane || ego.lateral_offset != 0.0;
    let left = ego.target_lane > ego.lane || (ego.target_lane == ego.lane && ego.lateral_offset < 0.0);
    [moving && left, moving && !left]
}

/// Telemetry for the current frame given the inputs chosen on it.
pub fn frame_record(world: &WorldState, cfg: &Config, inputs: &EgoInputs) -> Result<FrameRecord, ScenarioError> {
    let pos = compute_positions(world)?;
    let ego = world.ego().ok_or(ScenarioError::MissingVehicle("ego"))?;
    let steer = match inputs.lateral {
        LateralInput::Steer(s) => s.clamp(-1.0, 1.0),
        _ => 0.0,
    };
    Ok(FrameRecord {
        frame: world.frame,
        time_ms: world.time_ms(),
        op: Operation { brake: inputs.brake.clamp(0.0, 1.0), accel: inputs.accel.clamp(0.0, 1.0), speed: ego.speed },
        pos,
        lane: ego.lane,
        lateral_offset: ego.lateral_offset,
        steer,
        indicators: indicators(ego),
        quads: Some(project_cuboids(world, &cfg.camera)),
    })
}

/// Runs `script` until the ego reaches the exit or `cfg.max_frames` frames
/// have been recorded.
pub fn simulate(cfg: &Config, script: &DriverScript, profile: Option<&GazeProfile>) -> Result<SimRun, Error> {
    let mut world = spawn(cfg)?;
    let mut driver = ScriptedDriver::new(script.clone(), &cfg.dynamics);
    let mut synth = profile.map(|p| GazeSynth::new(p.clone(), gaze_seed(cfg.scenario.seed)));
    let mut ledger = LedgerRecorder::new();
    let mut frames = Vec::new();
    let mut gaze = Vec::new();
    loop {
        let pos = compute_positions(&world)?;
        let ego = world.ego().ok_or(ScenarioError::MissingVehicle("ego"))?.clone();
        let inputs = driver.step(&Observation { frame: world.frame, positions: pos, speed: ego.speed });
        let rec = frame_record(&world, cfg, &inputs)?;
        ledger.observe(world.frame, &ego, &pos, rec.op.brake);
        if let Some(s) = synth.as_mut() {
            let passing = ego.lane != 0 || ego.lateral_offset != 0.0;
            let quads = rec.quads.as_ref().expect("simulated frames carry display data");
            let out = s.step(world.frame, rec.time_ms, quads, &cfg.area, passing);
            if out.in_transition {
                ledger.record_saccade_frame(world.frame);
            }
            if let Some((target, start_frame, invalid_frames)) = out.finished_dwell {
                ledger.record_dwell(LedgerDwell { target, start_frame, end_frame: world.frame, invalid_frames });
            }
            gaze.push(out.sample);
        }
        frames.push(rec);
        if pos.p_e <= 0.0 || frames.len() as u64 >= cfg.max_frames {
            break;
        }
        world.step(&inputs);
    }
    let last_speed = frames.last().map_or(0.0, |f| f.op.speed);
    let ledger = ledger.finish(driver.fired().to_vec(), last_speed);
    let session = Session::new(session_header(cfg, "simulate", profile.is_some()), frames, gaze);
    Ok(SimRun { session, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::TrafficVolume;

    #[test]
    fn coasting_run_stops_at_cap() {
        let mut cfg = Config::new(TrafficVolume::Low, 3);
        cfg.max_frames = 120;
        let run = simulate(&cfg, &DriverScript::default(), None).unwrap();
        assert_eq!(run.session.frames.len(), 120);
        assert!(run.session.gaze.is_empty());
        assert!(!run.session.header.channels.gaze);
        assert_eq!(run.session.frames[119].frame, 119);
    }
}
