//! C interface to the simulator and the analysis engine.
//!
//! Every function returns an [`AtmaStatus`]; on failure the message is
//! available from [`atma_last_error`] on the same thread. Worlds are opaque
//! handles created by [`atma_world_new`] and released with [`atma_world_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use atmasim::analysis::{analyze_cohort, analyze_session, report_bundle, AnalysisParams};
use atmasim::config::Config;
use atmasim::gaze::{convex_hull, point_in_hull};
use atmasim::io::{read_session, write_session};
use atmasim::measures::welch_greater;
use atmasim::serve::{ClientMessage, LiveSession, ServerMessage};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Io = 4,
    Format = 5,
    /// The session could not be analysed, or a statistic is undefined.
    Analysis = 6,
    /// The world reached the exit or its frame cap.
    Finished = 7,
    Panic = 8,
}

/// Simulated world with its recording; opaque to C.
pub struct AtmaWorld {
    live: Option<LiveSession>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AtmaPositions {
    /// ft to the exit
    pub p_e: f64,
    /// follower rear minus ego front, ft
    pub p_f: f64,
    /// lead front minus ego rear, ft
    pub p_l: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AtmaFrameState {
    pub frame: u64,
    pub time_ms: f64,
    pub speed_mph: f64,
    pub lane: u32,
    pub lateral_offset: f64,
    pub positions: AtmaPositions,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AtmaWelch {
    pub t: f64,
    pub df: f64,
    /// One-sided p for mean(a) > mean(b).
    pub p: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("nul bytes removed"));
}

fn fail(status: AtmaStatus, msg: impl Into<String>) -> AtmaStatus {
    set_error(msg);
    status
}

fn status_of(e: &atmasim::Error) -> AtmaStatus {
    match e {
        atmasim::Error::Config(_) | atmasim::Error::Scenario(_) => AtmaStatus::InvalidConfig,
        atmasim::Error::Format { .. } => AtmaStatus::Format,
        atmasim::Error::Io(_) => AtmaStatus::Io,
        atmasim::Error::Measure(_) => AtmaStatus::Analysis,
    }
}

fn guard(f: impl FnOnce() -> AtmaStatus) -> AtmaStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(AtmaStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, AtmaStatus> {
    if p.is_null() {
        return Err(fail(AtmaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AtmaStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], AtmaStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(AtmaStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn atma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a world from configuration text (`key = value` lines; may be
/// empty for defaults). On success `*out` receives the handle.
///
/// # Safety
/// `config_text` must be a valid C string or null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atma_world_new(config_text: *const c_char, out: *mut *mut AtmaWorld) -> AtmaStatus {
    guard(|| {
        if out.is_null() {
            return fail(AtmaStatus::NullPointer, "out is null");
        }
        let text = if config_text.is_null() { "" } else { tri!(str_arg(config_text, "config_text")) };
        let cfg: Config = match text.parse() {
            Ok(c) => c,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        match LiveSession::new(cfg) {
            Ok(live) => {
                *out = Box::into_raw(Box::new(AtmaWorld { live: Some(live) }));
                AtmaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a world. Null is ignored.
///
/// # Safety
/// `world` must come from [`atma_world_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn atma_world_free(world: *mut AtmaWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

unsafe fn live<'a>(world: *mut AtmaWorld) -> Result<&'a mut LiveSession, AtmaStatus> {
    world
        .as_mut()
        .and_then(|w| w.live.as_mut())
        .ok_or_else(|| fail(AtmaStatus::NullPointer, "world is null"))
}

/// Records one frame under the given pedal and steering inputs (steering
/// positive to the right) and advances the world. `state` may be null.
///
/// # Safety
/// `world` must be a live handle; `state` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn atma_world_step(
    world: *mut AtmaWorld,
    accel: f64,
    brake: f64,
    steer: f64,
    state: *mut AtmaFrameState,
) -> AtmaStatus {
    guard(|| {
        let live = tri!(live(world));
        if ![accel, brake, steer].iter().all(|v| v.is_finite()) {
            return fail(AtmaStatus::InvalidArgument, "inputs must be finite");
        }
        live.apply(ClientMessage::Input { accel, brake, steer, indicators: [false; 2] });
        match live.tick() {
            Ok(Some(ServerMessage::State { frame, time_ms, ego, positions, .. })) => {
                if let Some(s) = state.as_mut() {
                    *s = AtmaFrameState {
                        frame,
                        time_ms,
                        speed_mph: ego.speed_mph,
                        lane: ego.lane as u32,
                        lateral_offset: ego.lateral_offset,
                        positions: AtmaPositions { p_e: positions.p_e, p_f: positions.p_f, p_l: positions.p_l },
                    };
                }
                AtmaStatus::Ok
            }
            Ok(_) => fail(AtmaStatus::Finished, "world has finished"),
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Writes the frames recorded so far as a session file and ends the
/// recording. Later steps return `Finished`; the handle must still be freed.
///
/// # Safety
/// `world` must be a live handle; `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn atma_world_write_session(world: *mut AtmaWorld, path: *const c_char) -> AtmaStatus {
    guard(|| {
        let path = tri!(str_arg(path, "path"));
        let Some(w) = world.as_mut() else { return fail(AtmaStatus::NullPointer, "world is null") };
        let Some(live) = w.live.take() else { return fail(AtmaStatus::Finished, "session already written") };
        match write_session(Path::new(path), &live.into_session()) {
            Ok(()) => AtmaStatus::Ok,
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Whether `(px, py)` lies in the convex hull of the `n` points `xs`, `ys`
/// (boundary inclusive).
///
/// # Safety
/// `xs` and `ys` must hold `n` values; `inside` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atma_point_in_hull(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    px: f64,
    py: f64,
    inside: *mut bool,
) -> AtmaStatus {
    guard(|| {
        let xs = tri!(slice_arg(xs, n, "xs"));
        let ys = tri!(slice_arg(ys, n, "ys"));
        let Some(out) = inside.as_mut() else { return fail(AtmaStatus::NullPointer, "inside is null") };
        let pts: Vec<[f64; 2]> = xs.iter().zip(ys).map(|(&x, &y)| [x, y]).collect();
        *out = point_in_hull(&convex_hull(&pts), [px, py]);
        AtmaStatus::Ok
    })
}

/// One-sided Welch test of mean(a) > mean(b).
///
/// # Safety
/// `a` and `b` must hold `na` and `nb` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atma_welch_greater(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    out: *mut AtmaWelch,
) -> AtmaStatus {
    guard(|| {
        let a = tri!(slice_arg(a, na, "a"));
        let b = tri!(slice_arg(b, nb, "b"));
        let Some(out) = out.as_mut() else { return fail(AtmaStatus::NullPointer, "out is null") };
        match welch_greater(a, b) {
            Some(r) => {
                *out = AtmaWelch { t: r.t, df: r.df, p: r.p };
                AtmaStatus::Ok
            }
            None => fail(AtmaStatus::Analysis, "each sample needs at least two values"),
        }
    })
}

/// Analyses one session file with default parameters and writes the report
/// bundle into `out_dir`.
///
/// # Safety
/// Both arguments must be valid C strings.
#[no_mangle]
pub unsafe extern "C" fn atma_analyze_session(session_path: *const c_char, out_dir: *const c_char) -> AtmaStatus {
    guard(|| {
        let path = tri!(str_arg(session_path, "session_path"));
        let dir = tri!(str_arg(out_dir, "out_dir"));
        let run = || -> Result<(), atmasim::Error> {
            let session = read_session(Path::new(path))?;
            let name = Path::new(path).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let params = AnalysisParams::default();
            let cohort = analyze_cohort(vec![analyze_session(&session, &name, &params, None)?]);
            report_bundle(&cohort, &params).write(Path::new(dir))?;
            Ok(())
        };
        match run() {
            Ok(()) => AtmaStatus::Ok,
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}
