//! Live-drive bridge: one simulated session per WebSocket connection.
//!
//! Client messages (JSON text):
//! `{"type":"input","accel":0..1,"brake":0..1,"steer":-1..1,"indicators":[left,right]}`
//! and `{"type":"gaze","x":..,"y":..}`. The server sends one `hello` and then a
//! `state` message per frame. Inputs are held until replaced and take effect
//! at the next frame boundary. Steering is positive to the right.

use std::io::ErrorKind;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use tungstenite::{Message, WebSocket};

use crate::config::Config;
use crate::error::Error;
use crate::gaze::GazeSample;
use crate::io::encode_quads;
use crate::io::{write_session, Session, FORMAT_VERSION};
use crate::record::FrameRecord;
use crate::scenario::{compute_positions, EgoInputs, LateralInput, Positions, WorldState};
use crate::sim::{frame_record, session_header, spawn};
use crate::units::FRAME_MS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Input {
        #[serde(default)]
        accel: f64,
        #[serde(default)]
        brake: f64,
        #[serde(default)]
        steer: f64,
        #[serde(default)]
        indicators: [bool; 2],
    },
    Gaze {
        x: f64,
        y: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoState {
    pub speed_mph: f64,
    pub lane: usize,
    pub lateral_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hud {
    pub speed: f64,
    pub indicators: [bool; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        version: String,
        fps: u32,
        config: Box<Config>,
    },
    State {
        frame: u64,
        time_ms: f64,
        ego: EgoState,
        /// follower, lead, follower sign, lead sign; 8 vertices each, `null` when hidden.
        quads: Vec<Option<[f64; 2]>>,
        positions: Positions,
        hud: Hud,
    },
}

/// Server-side state of one live drive.
pub struct LiveSession {
    cfg: Config,
    world: WorldState,
    accel: f64,
    brake: f64,
    steer: f64,
    indicators: [bool; 2],
    gaze_point: Option<[f64; 2]>,
    gaze_seen: bool,
    frames: Vec<FrameRecord>,
    gaze: Vec<GazeSample>,
    finished: bool,
}

impl LiveSession {
    pub fn new(cfg: Config) -> Result<Self, Error> {
        let world = spawn(&cfg)?;
        Ok(Self {
            cfg,
            world,
            accel: 0.0,
            brake: 0.0,
            steer: 0.0,
            indicators: [false; 2],
            gaze_point: None,
            gaze_seen: false,
            frames: Vec::new(),
            gaze: Vec::new(),
            finished: false,
        })
    }

    pub fn hello(&self) -> ServerMessage {
        ServerMessage::Hello { version: FORMAT_VERSION.into(), fps: crate::units::FPS, config: Box::new(self.cfg.clone()) }
    }

    /// Queues a client message; it replaces the held input from the next tick on.
    pub fn apply(&mut self, msg: ClientMessage) {
        match msg {
            ClientMessage::Input { accel, brake, steer, indicators } => {
                self.accel = accel.clamp(0.0, 1.0);
                self.brake = brake.clamp(0.0, 1.0);
                self.steer = steer.clamp(-1.0, 1.0);
                self.indicators = indicators;
            }
            ClientMessage::Gaze { x, y } => {
                self.gaze_seen = true;
                self.gaze_point = (x.is_finite() && y.is_finite()).then_some([x, y]);
            }
        }
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    pub fn frame(&self) -> u64 {
        self.world.frame
    }

    /// Records the current frame under the held inputs, advances the world
    /// and returns the state of the recorded frame. `None` once finished.
    pub fn tick(&mut self) -> Result<Option<ServerMessage>, Error> {
        if self.finished {
            return Ok(None);
        }
        let inputs = EgoInputs { accel: self.accel, brake: self.brake, lateral: LateralInput::Steer(self.steer) };
        let mut rec = frame_record(&self.world, &self.cfg, &inputs)?;
        rec.indicators = self.indicators;
        self.gaze.push(GazeSample { timestamp_ms: rec.time_ms, point: self.gaze_point, pupil_left: None, pupil_right: None });
        let msg = ServerMessage::State {
            frame: rec.frame,
            time_ms: rec.time_ms,
            ego: EgoState { speed_mph: rec.op.speed, lane: rec.lane, lateral_offset: rec.lateral_offset },
            quads: rec.quads.as_ref().map(encode_quads).unwrap_or_default(),
            positions: rec.pos,
            hud: Hud { speed: rec.op.speed, indicators: rec.indicators },
        };
        let done = rec.pos.p_e <= 0.0 || self.frames.len() as u64 + 1 >= self.cfg.max_frames;
        self.frames.push(rec);
        if done {
            self.finished = true;
        } else {
            self.world.step(&inputs);
            compute_positions(&self.world)?;
        }
        Ok(Some(msg))
    }

    /// The recorded drive; the gaze channel is present only if the client sent gaze.
    pub fn into_session(self) -> Session {
        let mut h = session_header(&self.cfg, "serve", self.gaze_seen);
        h.channels.pupil = false;
        let gaze = if self.gaze_seen { self.gaze } else { Vec::new() };
        Session::new(h, self.frames, gaze)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortBusy(u16),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn bind(port: u16) -> Result<TcpListener, ServeError> {
    TcpListener::bind(("127.0.0.1", port)).map_err(|e| match e.kind() {
        ErrorKind::AddrInUse => ServeError::PortBusy(port),
        _ => ServeError::Io(e),
    })
}

/// Accepts connections until `max_connections` have been served (forever when
/// `None`). Each connection runs on its own thread; session files go to
/// `out_dir` as `live-<n>.ndjson`. Returns the paths written.
pub fn serve_listener(
    listener: TcpListener,
    cfg: Config,
    out_dir: &Path,
    max_connections: Option<usize>,
) -> Result<Vec<PathBuf>, ServeError> {
    std::fs::create_dir_all(out_dir)?;
    let counter = Arc::new(AtomicUsize::new(0));
    let mut handles = Vec::new();
    for stream in listener.incoming() {
        let stream = stream?;
        let n = counter.fetch_add(1, Ordering::SeqCst);
        let path = out_dir.join(format!("live-{n}.ndjson"));
        let cfg = cfg.clone();
        handles.push(thread::spawn(move || match run_connection(stream, cfg, &path) {
            Ok(()) => Some(path),
            Err(e) => {
                eprintln!("connection {n}: {e}");
                None
            }
        }));
        if max_connections.is_some_and(|m| n + 1 >= m) {
            break;
        }
    }
    Ok(handles.into_iter().filter_map(|h| h.join().ok().flatten()).collect())
}

fn send(ws: &mut WebSocket<TcpStream>, msg: &ServerMessage) -> tungstenite::Result<()> {
    let text = serde_json::to_string(msg).expect("server messages serialise");
    match ws.send(Message::text(text)) {
        Err(tungstenite::Error::Io(e)) if e.kind() == ErrorKind::WouldBlock => Ok(()),
        r => r,
    }
}

/// Drains pending client messages. Returns false once the peer has gone.
fn drain(ws: &mut WebSocket<TcpStream>, live: &mut LiveSession) -> bool {
    loop {
        match ws.read() {
            Ok(Message::Text(t)) => match serde_json::from_str::<ClientMessage>(t.as_str()) {
                Ok(m) => live.apply(m),
                Err(e) => eprintln!("ignoring malformed message: {e}"),
            },
            Ok(Message::Close(_)) => return false,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e)) if e.kind() == ErrorKind::WouldBlock => return true,
            Err(_) => return false,
        }
    }
}

fn run_connection(stream: TcpStream, cfg: Config, path: &Path) -> Result<(), Error> {
    let peer: Option<SocketAddr> = stream.peer_addr().ok();
    let mut ws = tungstenite::accept(stream).map_err(|e| Error::Config(format!("handshake with {peer:?}: {e}")))?;
    let mut live = LiveSession::new(cfg)?;
    let _ = send(&mut ws, &live.hello());
    ws.get_mut().set_nonblocking(true)?;
    let frame = Duration::from_secs_f64(FRAME_MS / 1000.0);
    let t0 = Instant::now();
    while drain(&mut ws, &mut live) {
        let Some(state) = live.tick()? else { break };
        if send(&mut ws, &state).is_err() {
            break;
        }
        // fixed schedule: frame n is due at t0 + n·frame, independent of loop cost
        let due = t0 + frame * live.frame() as u32;
        if let Some(wait) = due.checked_duration_since(Instant::now()) {
            thread::sleep(wait);
        }
    }
    let _ = ws.close(None);
    let _ = ws.flush();
    write_session(path, &live.into_session())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::TrafficVolume;

    #[test]
    fn zero_order_hold() {
        let mut s = LiveSession::new(Config::new(TrafficVolume::Low, 1)).unwrap();
        s.apply(ClientMessage::Input { accel: 0.5, brake: 0.0, steer: 0.0, indicators: [false; 2] });
        for _ in 0..10 {
            s.tick().unwrap();
        }
        let session = s.into_session();
        assert!(session.frames.iter().all(|f| f.op.accel == 0.5));
        assert!(session.gaze.is_empty());
        assert!(!session.header.channels.gaze);
    }

    #[test]
    fn messages_round_trip() {
        let m: ClientMessage = serde_json::from_str(r#"{"type":"input","accel":1,"brake":0,"steer":-0.5,"indicators":[true,false]}"#).unwrap();
        assert_eq!(m, ClientMessage::Input { accel: 1.0, brake: 0.0, steer: -0.5, indicators: [true, false] });
        let m: ClientMessage = serde_json::from_str(r#"{"type":"gaze","x":0.4,"y":0.6}"#).unwrap();
        assert_eq!(m, ClientMessage::Gaze { x: 0.4, y: 0.6 });
        let mut s = LiveSession::new(Config::new(TrafficVolume::High, 2)).unwrap();
        let v = serde_json::to_value(s.tick().unwrap().unwrap()).unwrap();
        assert_eq!(v["type"], "state");
        assert_eq!(v["quads"].as_array().unwrap().len(), 32);
        assert!(v["positions"]["p_f"].is_number());
        assert_eq!(serde_json::to_value(s.hello()).unwrap()["type"], "hello");
    }
}
