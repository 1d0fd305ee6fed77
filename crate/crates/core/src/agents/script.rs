//! Declarative driver scripts.
//!
//! A script is an ordered list of rules, one per line:
//!
//! ```text
//! # comment
//! when frame >= 30: accel 1
//! when speed >= 60: cruise 62
//! when p_f < 700: brake 0.12
//! when p_f < 300: lane 1
//! when p_f < 250: pulse 0.5 30
//! ```
//!
//! Rules are armed in order: rule `k` can only fire after rule `k-1` has
//! fired, and each fires at most once. Several rules may fire on the same
//! frame. Inputs set by a rule are held until another rule changes them.
//!
//! Actions: `accel v`, `brake v`, `coast`, `cruise mph` (throttle-only speed
//! hold), `pulse pedal frames` (rectangular brake pulse, then resume),
//! `lane k`.

use std::str::FromStr;

use thiserror::Error;

use crate::scenario::{Dynamics, EgoInputs, LateralInput, Positions};

#[derive(Debug, Error, PartialEq)]
#[error("script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Frame,
    Speed,
    PE,
    PF,
    PL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compare {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trigger {
    Always,
    When(Variable, Compare, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Accel(f64),
    Brake(f64),
    Coast,
    Cruise(f64),
    Pulse { pedal: f64, frames: u32 },
    Lane(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub trigger: Trigger,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DriverScript {
    pub rules: Vec<Rule>,
}

/// What the driver sees each frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub frame: u64,
    pub positions: Positions,
    /// mph
    pub speed: f64,
}

impl Trigger {
    pub fn holds(&self, obs: &Observation) -> bool {
        match *self {
            Trigger::Always => true,
            Trigger::When(var, cmp, v) => {
                let x = match var {
                    Variable::Frame => obs.frame as f64,
                    Variable::Speed => obs.speed,
                    Variable::PE => obs.positions.p_e,
                    Variable::PF => obs.positions.p_f,
                    Variable::PL => obs.positions.p_l,
                };
                match cmp {
                    Compare::Lt => x < v,
                    Compare::Le => x <= v,
                    Compare::Gt => x > v,
                    Compare::Ge => x >= v,
                }
            }
        }
    }
}

impl DriverScript {
    pub fn rule(mut self, trigger: Trigger, actions: impl Into<Vec<Action>>) -> Self {
        self.rules.push(Rule { trigger, actions: actions.into() });
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let trig = match r.trigger {
                Trigger::Always => "always".to_string(),
                Trigger::When(var, cmp, v) => {
                    let var = match var {
                        Variable::Frame => "frame",
                        Variable::Speed => "speed",
                        Variable::PE => "p_e",
                        Variable::PF => "p_f",
                        Variable::PL => "p_l",
                    };
                    let cmp = match cmp {
                        Compare::Lt => "<",
                        Compare::Le => "<=",
                        Compare::Gt => ">",
                        Compare::Ge => ">=",
                    };
                    format!("{var} {cmp} {v}")
                }
            };
            let acts: Vec<String> = r
                .actions
                .iter()
                .map(|a| match *a {
                    Action::Accel(v) => format!("accel {v}"),
                    Action::Brake(v) => format!("brake {v}"),
                    Action::Coast => "coast".into(),
                    Action::Cruise(v) => format!("cruise {v}"),
                    Action::Pulse { pedal, frames } => format!("pulse {pedal} {frames}"),
                    Action::Lane(k) => format!("lane {k}"),
                })
                .collect();
            out.push_str(&format!("when {trig}: {}\n", acts.join(", ")));
        }
        out
    }
}

fn unit(v: f64, line: usize) -> Result<f64, ScriptError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(ScriptError { line, message: format!("pedal value {v} outside [0, 1]") })
    }
}

fn parse_action(text: &str, line: usize) -> Result<Action, ScriptError> {
    let err = |m: String| ScriptError { line, message: m };
    let words: Vec<&str> = text.split_whitespace().collect();
    let num = |i: usize| -> Result<f64, ScriptError> {
        words
            .get(i)
            .ok_or_else(|| err(format!("action '{text}' is missing an argument")))?
            .parse::<f64>()
            .map_err(|e| err(format!("bad number in '{text}': {e}")))
    };
    let action = match words.first().copied() {
        Some("accel") => Action::Accel(unit(num(1)?, line)?),
        Some("brake") => Action::Brake(unit(num(1)?, line)?),
        Some("coast") => Action::Coast,
        Some("cruise") => Action::Cruise(num(1)?),
        Some("pulse") => {
            let frames = num(2)?;
            if frames < 1.0 || frames.fract() != 0.0 {
                return Err(err(format!("pulse length must be a positive whole frame count, got {frames}")));
            }
            Action::Pulse { pedal: unit(num(1)?, line)?, frames: frames as u32 }
        }
        Some("lane") => {
            let k = num(1)?;
            if k < 0.0 || k.fract() != 0.0 {
                return Err(err(format!("lane must be a non-negative integer, got {k}")));
            }
            Action::Lane(k as usize)
        }
        Some(other) => return Err(err(format!("unknown action '{other}'"))),
        None => return Err(err("empty action".into())),
    };
    let expected = match action {
        Action::Coast => 1,
        Action::Pulse { .. } => 3,
        _ => 2,
    };
    if words.len() != expected {
        return Err(err(format!("action '{text}' takes {} argument(s)", expected - 1)));
    }
    Ok(action)
}

fn parse_trigger(text: &str, line: usize) -> Result<Trigger, ScriptError> {
    let err = |m: String| ScriptError { line, message: m };
    let words: Vec<&str> = text.split_whitespace().collect();
    if words == ["always"] {
        return Ok(Trigger::Always);
    }
    let [var, cmp, value] = words[..] else {
        return Err(err(format!("trigger '{text}' must look like '<var> <op> <number>'")));
    };
    let var = match var {
        "frame" => Variable::Frame,
        "speed" => Variable::Speed,
        "p_e" => Variable::PE,
        "p_f" => Variable::PF,
        "p_l" => Variable::PL,
        other => return Err(err(format!("unknown variable '{other}'"))),
    };
    let cmp = match cmp {
        "<" => Compare::Lt,
        "<=" => Compare::Le,
        ">" => Compare::Gt,
        ">=" => Compare::Ge,
        other => return Err(err(format!("unknown comparison '{other}'"))),
    };
    let value = value.parse::<f64>().map_err(|e| err(format!("bad number '{value}': {e}")))?;
    Ok(Trigger::When(var, cmp, value))
}

impl FromStr for DriverScript {
    type Err = ScriptError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let rest = body
                .strip_prefix("when ")
                .ok_or_else(|| ScriptError { line, message: "rules must start with 'when'".into() })?;
            let (trig, acts) = rest
                .split_once(':')
                .ok_or_else(|| ScriptError { line, message: "missing ':' between trigger and actions".into() })?;
            let trigger = parse_trigger(trig, line)?;
            let actions = acts.split(',').map(|a| parse_action(a.trim(), line)).collect::<Result<Vec<_>, _>>()?;
            rules.push(Rule { trigger, actions });
        }
        Ok(DriverScript { rules })
    }
}

/// Runtime state of a script being executed.
#[derive(Debug, Clone)]
pub struct ScriptedDriver {
    script: DriverScript,
    next_rule: usize,
    accel: f64,
    brake: f64,
    cruise: Option<f64>,
    pulse: Option<(f64, u32)>,
    lane: Option<usize>,
    max_accel: f64,
    drag: f64,
    fired: Vec<(usize, u64)>,
}

impl ScriptedDriver {
    pub fn new(script: DriverScript, dynamics: &Dynamics) -> Self {
        Self {
            script,
            next_rule: 0,
            accel: 0.0,
            brake: 0.0,
            cruise: None,
            pulse: None,
            lane: None,
            max_accel: dynamics.ego_max_accel,
            drag: dynamics.drag,
            fired: Vec::new(),
        }
    }

    /// `(rule index, frame)` for every rule fired so far.
    pub fn fired(&self) -> &[(usize, u64)] {
        &self.fired
    }

    pub fn finished(&self) -> bool {
        self.next_rule >= self.script.rules.len()
    }

    fn apply(&mut self, action: Action) {
        match action {
            Action::Accel(v) => {
                self.accel = v;
                self.cruise = None;
            }
            Action::Brake(v) => {
                self.brake = v;
                self.cruise = None;
                if v > 0.0 {
                    self.accel = 0.0;
                }
            }
            Action::Coast => {
                self.accel = 0.0;
                self.brake = 0.0;
                self.cruise = None;
            }
            Action::Cruise(v) => {
                self.cruise = Some(v);
                self.brake = 0.0;
            }
            Action::Pulse { pedal, frames } => self.pulse = Some((pedal, frames)),
            Action::Lane(k) => self.lane = Some(k),
        }
    }

    /// Inputs for this frame. With no rule fired the car coasts in lane.
    pub fn step(&mut self, obs: &Observation) -> EgoInputs {
        while let Some(rule) = self.script.rules.get(self.next_rule) {
            if !rule.trigger.holds(obs) {
                break;
            }
            for a in rule.actions.clone() {
                self.apply(a);
            }
            self.fired.push((self.next_rule, obs.frame));
            self.next_rule += 1;
        }

        let lateral = self.lane.map_or(LateralInput::Hold, LateralInput::Lane);
        if let Some((pedal, left)) = self.pulse {
            self.pulse = (left > 1).then_some((pedal, left - 1));
            return EgoInputs { accel: 0.0, brake: pedal, lateral };
        }
        let accel = match self.cruise {
            Some(target) => {
                let feed_forward = self.drag * target * target / self.max_accel;
                (feed_forward + 0.3 * (target - obs.speed)).clamp(0.0, 1.0)
            }
            None => self.accel,
        };
        EgoInputs { accel, brake: self.brake, lateral }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(frame: u64, p_f: f64, speed: f64) -> Observation {
        Observation { frame, positions: Positions { p_e: 5000.0, p_f, p_l: p_f + 160.0 }, speed }
    }

    #[test]
    fn empty_script_coasts() {
        let mut d = ScriptedDriver::new(DriverScript::default(), &Dynamics::default());
        let i = d.step(&obs(0, 1000.0, 30.0));
        assert_eq!(i, EgoInputs { accel: 0.0, brake: 0.0, lateral: LateralInput::Hold });
    }

    #[test]
    fn lane_change_fires_on_first_qualifying_frame() {
        let script: DriverScript = "when p_f < 300: lane 1".parse().unwrap();
        let mut d = ScriptedDriver::new(script, &Dynamics::default());
        let mut fired_at = None;
        for (frame, p_f) in [(0, 400.0), (1, 350.0), (2, 301.0), (3, 299.0), (4, 250.0)] {
            let i = d.step(&obs(frame, p_f, 30.0));
            if fired_at.is_none() && i.lateral == LateralInput::Lane(1) {
                fired_at = Some(frame);
            }
        }
        assert_eq!(fired_at, Some(3));
        assert_eq!(d.fired(), &[(0, 3)]);
    }

    #[test]
    fn rules_fire_in_order_once() {
        let script: DriverScript = "when frame >= 2: accel 1\nwhen speed > 10: brake 0.5\n".parse().unwrap();
        let mut d = ScriptedDriver::new(script, &Dynamics::default());
        // speed condition holds early but the rule is not armed yet
        assert_eq!(d.step(&obs(0, 1.0, 20.0)).brake, 0.0);
        let i = d.step(&obs(2, 1.0, 20.0));
        assert_eq!((i.accel, i.brake), (0.0, 0.5));
        assert!(d.finished());
    }

    #[test]
    fn pulse_is_rectangular_and_resumes() {
        let script: DriverScript = "when frame >= 0: accel 0.4\nwhen frame >= 10: pulse 0.6 5".parse().unwrap();
        let mut d = ScriptedDriver::new(script, &Dynamics::default());
        let brakes: Vec<f64> = (0..20).map(|f| d.step(&obs(f, 500.0, 30.0)).brake).collect();
        let on: Vec<usize> = brakes.iter().enumerate().filter(|(_, &b)| b > 0.0).map(|(i, _)| i).collect();
        assert_eq!(on, vec![10, 11, 12, 13, 14]);
        assert_eq!(d.step(&obs(20, 500.0, 30.0)).accel, 0.4);
    }

    #[test]
    fn cruise_never_brakes() {
        let script: DriverScript = "when always: cruise 30".parse().unwrap();
        let mut d = ScriptedDriver::new(script, &Dynamics::default());
        let i = d.step(&obs(0, 500.0, 60.0));
        assert_eq!((i.accel, i.brake), (0.0, 0.0));
        let i = d.step(&obs(1, 500.0, 10.0));
        assert!(i.accel > 0.9);
    }

    #[test]
    fn parse_errors_name_line() {
        let e = "when frame >= 1: accel 1\n\nwhen speed ~ 3: coast".parse::<DriverScript>().unwrap_err();
        assert_eq!(e.line, 3);
        assert!("when frame >= 1: accel 2".parse::<DriverScript>().is_err());
        assert!("frame >= 1: accel 1".parse::<DriverScript>().is_err());
        assert!("when frame >= 1: warp 9".parse::<DriverScript>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "when frame >= 30: accel 1\nwhen p_f < 300: lane 1, cruise 30\nwhen p_l <= -60: pulse 0.5 12\nwhen always: coast\n";
        let s: DriverScript = text.parse().unwrap();
        assert_eq!(s.to_text().parse::<DriverScript>().unwrap(), s);
    }
}
