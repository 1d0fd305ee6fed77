//! Work-zone driving simulator for studying how passing drivers react to an
//! autonomous truck-mounted attenuator (ATMA), plus the telemetry and gaze
//! analysis engine that turns recorded sessions into measures.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`] deterministic fixed-step world: road, ego car, the ATMA
//!   lead/follower pair, background traffic, camera projection.
//! * [`agents`] scripted drivers and synthetic gaze with ground-truth ledgers.
//! * [`gaze`] I-VT classification, fixation grouping, convex hulls and
//!   area/object attribution.
//! * [`measures`] trimming, event detection, correlations and statistics.
//! * [`io`] session files, external ingestion and report bundles.
//! * [`sim`], [`analysis`], [`serve`] the pipelines behind the CLI.

pub mod agents;
pub mod analysis;
pub mod config;
pub mod error;
pub mod gaze;
pub mod io;
pub mod measures;
pub mod record;
pub mod scenario;
pub mod serve;
pub mod sim;
pub mod units;

pub use error::Error;
