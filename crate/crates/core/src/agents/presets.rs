//! Ready-made scripts and gaze profiles for demos, tests and cohorts.

use super::gaze_synth::{Dwell, GazeProfile, GazeTarget};
use super::script::{Action, Compare, DriverScript, Trigger, Variable};
use crate::scenario::Dynamics;
use crate::units::{mph_to_ftps, DT_S};

fn when(var: Variable, cmp: Compare, v: f64) -> Trigger {
    Trigger::When(var, cmp, v)
}

/// A full pass: accelerate, cruise, brake on approach, move left behind the
/// follower, accelerate past the lead, return right, then optional extra
/// brake pulses before the exit.
#[derive(Debug, Clone, PartialEq)]
pub struct PassPlan {
    pub start_frame: u64,
    /// mph
    pub cruise: f64,
    /// ft behind the follower where braking starts.
    pub brake_at: f64,
    pub brake_pedal: f64,
    /// ft behind the follower where the brake is released to a slow cruise.
    pub release_at: f64,
    /// mph held while beside the ATMA.
    pub approach_speed: f64,
    /// ft behind the follower where the change to the left lane starts.
    pub change_at: f64,
    /// ft past the lead's front where the driver floors it.
    pub accelerate_at: f64,
    /// ft past the lead's front where the change back starts.
    pub return_at: f64,
    /// `(exit distance ft, pedal, frames)` for brake pulses after the return.
    pub pulses: Vec<(f64, f64, u32)>,
}

impl Default for PassPlan {
    fn default() -> Self {
        Self {
            start_frame: 30,
            cruise: 62.0,
            brake_at: 700.0,
            brake_pedal: 0.08,
            release_at: 60.0,
            approach_speed: 24.0,
            change_at: 300.0,
            accelerate_at: 60.0,
            return_at: 150.0,
            pulses: Vec::new(),
        }
    }
}

impl PassPlan {
    pub fn script(&self) -> DriverScript {
        use Compare::*;
        use Variable::*;
        let mut s = DriverScript::default()
            .rule(when(Frame, Ge, self.start_frame as f64), [Action::Accel(1.0)])
            .rule(when(Speed, Ge, self.cruise - 1.0), [Action::Cruise(self.cruise)])
            .rule(when(PF, Lt, self.brake_at), [Action::Brake(self.brake_pedal)])
            .rule(when(PF, Lt, self.change_at), [Action::Lane(1)])
            .rule(when(PF, Lt, self.release_at), [Action::Cruise(self.approach_speed)])
            .rule(when(PL, Lt, -self.accelerate_at), [Action::Accel(1.0)])
            .rule(when(PL, Lt, -self.return_at), [Action::Lane(0)])
            .rule(when(Speed, Ge, self.cruise - 1.0), [Action::Cruise(self.cruise)]);
        for &(p_e, pedal, frames) in &self.pulses {
            s = s.rule(when(PE, Lt, p_e), [Action::Pulse { pedal, frames }]);
        }
        s
    }

    /// Number of brake events the script produces.
    pub fn brake_count(&self) -> usize {
        1 + self.pulses.len()
    }
}

/// Starts a pass, then gives up: brakes, drops back below the ATMA's speed
/// and returns to the right lane behind the follower.
pub fn incomplete_pass_script() -> DriverScript {
    use Compare::*;
    use Variable::*;
    DriverScript::default()
        .rule(when(Frame, Ge, 30.0), [Action::Accel(1.0)])
        .rule(when(Speed, Ge, 59.0), [Action::Cruise(60.0)])
        .rule(when(PF, Lt, 700.0), [Action::Brake(0.08)])
        .rule(when(PF, Lt, 300.0), [Action::Lane(1)])
        .rule(when(PF, Lt, 120.0), [Action::Pulse { pedal: 0.3, frames: 45 }, Action::Cruise(12.0)])
        .rule(when(PF, Gt, 150.0), [Action::Lane(0)])
}

/// ft the ego closes on a truck moving at `truck_mph` while braking with
/// `pedal` from `from_mph` down to `to_mph`.
pub fn closing_distance(dyn_: &Dynamics, pedal: f64, from_mph: f64, to_mph: f64, truck_mph: f64) -> f64 {
    let mut v = from_mph;
    let mut d = 0.0;
    while v > to_mph {
        let dv = (dyn_.ego_max_brake * pedal + dyn_.drag * v * v) * DT_S;
        v = (v - dv).max(0.0);
        d += mph_to_ftps(v - truck_mph) * DT_S;
        if v <= truck_mph {
            break;
        }
    }
    d
}

/// The `i`-th of a family of varied passing plans; `i` in 0..20 gives
/// distinct brake timings, lane-change distances and 0 to 2 extra pulses.
pub fn suite_plan(i: usize) -> PassPlan {
    let k = i as f64;
    let mut p = PassPlan {
        start_frame: 20 + (i as u64 * 7) % 40,
        cruise: 58.0 + (i % 4) as f64 * 2.0,
        brake_at: 0.0,
        brake_pedal: 0.06 + ((i * 3) % 5) as f64 * 0.01,
        release_at: 50.0 + ((i * 13) % 40) as f64,
        approach_speed: 22.0 + (i % 5) as f64,
        change_at: 220.0 + ((i * 53) % 200) as f64,
        accelerate_at: 40.0 + (k * 7.0) % 40.0,
        return_at: 140.0 + ((i * 29) % 80) as f64,
        pulses: Vec::new(),
    };
    let closing = closing_distance(&Dynamics::default(), p.brake_pedal, p.cruise, p.approach_speed, 15.0);
    p.brake_at = (p.release_at + closing).round();
    for j in 0..(i % 3) {
        p.pulses.push((2000.0 - 800.0 * j as f64 - (i % 5) as f64 * 40.0, 0.15 + 0.05 * j as f64, 20 + 10 * j as u32));
    }
    p
}

/// Scan pattern mixing truck, sign, dashboard and mirror dwells.
pub fn scan_profile() -> GazeProfile {
    let d = |target, ms| Dwell { target, duration_ms: ms, noise_std: None };
    GazeProfile {
        dwells: vec![
            d(GazeTarget::Road, 900.0),
            d(GazeTarget::Follower, 400.0),
            d(GazeTarget::Speedometer, 300.0),
            d(GazeTarget::Lead, 350.0),
            d(GazeTarget::LeftMirror, 300.0),
            d(GazeTarget::FollowerSign, 250.0),
            d(GazeTarget::RearMirror, 250.0),
            d(GazeTarget::LeadSign, 250.0),
            d(GazeTarget::Tachometer, 200.0),
        ],
        ..GazeProfile::default()
    }
}

/// Alternates a follower dwell with a dashboard dwell so the follower holds
/// `fraction` of the dwell time.
pub fn follower_fraction_profile(fraction: f64, cycle_ms: f64) -> GazeProfile {
    let on = cycle_ms * fraction;
    GazeProfile {
        dwells: vec![
            Dwell { target: GazeTarget::Follower, duration_ms: on, noise_std: None },
            Dwell { target: GazeTarget::Speedometer, duration_ms: cycle_ms - on, noise_std: None },
        ],
        ..GazeProfile::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_varied() {
        let plans: Vec<PassPlan> = (0..20).map(suite_plan).collect();
        for (i, a) in plans.iter().enumerate() {
            for b in &plans[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(plans.iter().any(|p| p.brake_count() == 3));
    }

    #[test]
    fn scripts_round_trip_as_text() {
        let s = suite_plan(5).script();
        assert_eq!(s.to_text().parse::<DriverScript>().unwrap(), s);
        let s = incomplete_pass_script();
        assert_eq!(s.to_text().parse::<DriverScript>().unwrap(), s);
    }

    #[test]
    fn fraction_profile_is_valid() {
        let p = follower_fraction_profile(0.1, 5000.0);
        assert!(p.validate().is_ok());
        assert_eq!(p.dwells[0].duration_ms, 500.0);
    }
}
