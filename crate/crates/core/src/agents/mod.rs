//! Scripted drivers and synthetic gaze so every analysis path can be run
//! headlessly against known ground truth.

mod gaze_synth;
mod ledger;
pub mod presets;
mod script;

pub use gaze_synth::{target_point, Dwell, GazeProfile, GazeSynth, GazeTarget, ProfileError, PupilModel, SynthSample};
pub use ledger::{Ledger, LedgerBrake, LedgerDwell, LedgerLaneChange, LedgerRecorder};
pub use script::{Action, Compare, DriverScript, Observation, Rule, ScriptError, ScriptedDriver, Trigger, Variable};
