use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use atmasim::agents::{DriverScript, GazeProfile};
use atmasim::analysis::{analyze_cohort, analyze_session, invariant_violations, report_bundle, AnalysisParams, Measure};
use atmasim::config::Config;
use atmasim::io::{ingest_external, read_session, write_session, ColumnMap};
use atmasim::scenario::TrafficVolume;
use atmasim::serve::{bind, serve_listener, ServeError};
use atmasim::sim::simulate;
use atmasim::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_PORT_BUSY: u8 = 4;

#[derive(Parser)]
#[command(name = "atmasim", version, about = "ATMA work-zone simulator and session analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VolumeArg {
    Low,
    High,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scripted drive and write the session file and ground-truth ledger.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        script: PathBuf,
        #[arg(long = "gaze-profile")]
        gaze_profile: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Session file; with `--volume both` the volume is appended to the stem.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's traffic volume.
        #[arg(long, value_enum)]
        volume: Option<VolumeArg>,
    },
    /// Compute measures over one or more sessions and write a report bundle.
    Analyze {
        #[arg(long = "session", num_args = 1..)]
        sessions: Vec<PathBuf>,
        /// External delimited files, read through `--map`.
        #[arg(long = "ingest", num_args = 1.., requires = "map")]
        ingest: Vec<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
        /// Supplies area, I-VT and screen parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Restrict to these measures (repeatable or comma-separated).
        #[arg(long = "measure", value_delimiter = ',')]
        measures: Vec<Measure>,
    },
    /// Print a readable summary of a written report bundle.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Serve live drives over WebSocket, one session per connection.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long = "out-dir", default_value = ".")]
        out_dir: PathBuf,
        /// Exit after this many connections have finished.
        #[arg(long = "max-connections")]
        max_connections: Option<usize>,
    },
}

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Format { .. } => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        };
        Failure(code, e.to_string())
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure(EXIT_CONFIG, msg.into())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn config_text(path: Option<&Path>) -> Result<String, Failure> {
    path.map(read_text).transpose().map(Option::unwrap_or_default)
}

fn with_suffix(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "session".into());
    out.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn run_simulate(
    config: Option<&Path>,
    script: &Path,
    gaze_profile: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
    volume: Option<VolumeArg>,
) -> Result<(), Failure> {
    let base = config_text(config)?;
    let script: DriverScript = read_text(script)?.parse().map_err(|e| config_err(format!("{}: {e}", script.display())))?;
    let profile: Option<GazeProfile> = gaze_profile
        .map(|p| read_text(p)?.parse().map_err(|e| config_err(format!("{}: {e}", p.display()))))
        .transpose()?;
    let volumes: Vec<Option<TrafficVolume>> = match volume {
        None => vec![None],
        Some(VolumeArg::Low) => vec![Some(TrafficVolume::Low)],
        Some(VolumeArg::High) => vec![Some(TrafficVolume::High)],
        Some(VolumeArg::Both) => vec![Some(TrafficVolume::Low), Some(TrafficVolume::High)],
    };
    let batch = volumes.len() > 1;
    for v in volumes {
        // later keys win, and the volume line also resets the default NPV spacing
        let mut text = base.clone();
        if let Some(v) = v {
            text.push_str(&format!("\ntraffic_volume = {v}\n"));
        }
        if let Some(s) = seed {
            text.push_str(&format!("\nseed = {s}\n"));
        }
        let cfg: Config = text.parse()?;
        let run = simulate(&cfg, &script, profile.as_ref())?;
        let suffix = if batch { format!("-{}", cfg.scenario.traffic_volume) } else { String::new() };
        let session_path = if batch { with_suffix(out, &suffix, "ndjson") } else { out.to_path_buf() };
        if let Some(dir) = session_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Failure(EXIT_RUNTIME, e.to_string()))?;
        }
        write_session(&session_path, &run.session)?;
        let ledger_path = with_suffix(out, &format!("{suffix}.ledger"), "json");
        let ledger = serde_json::to_string_pretty(&run.ledger).expect("ledger serialises");
        fs::write(&ledger_path, ledger + "\n").map_err(|e| Failure(EXIT_RUNTIME, e.to_string()))?;
        println!(
            "{}: {} frames, {} gaze samples, ledger {}",
            session_path.display(),
            run.session.frames.len(),
            run.session.gaze.len(),
            ledger_path.display()
        );
    }
    Ok(())
}

fn unreadable(path: &Path, e: Error) -> Failure {
    match e {
        Error::Io(io) => config_err(format!("{}: {io}", path.display())),
        other => config_err(other.to_string()),
    }
}

fn session_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn run_analyze(
    sessions: &[PathBuf],
    ingest: &[PathBuf],
    map: Option<&Path>,
    config: Option<&Path>,
    out_dir: &Path,
    measures: &[Measure],
) -> Result<(), Failure> {
    if sessions.is_empty() && ingest.is_empty() {
        return Err(config_err("nothing to analyze: pass --session or --ingest"));
    }
    let cfg: Config = config_text(config)?.parse()?;
    let mut params = AnalysisParams {
        ivt: cfg.ivt.clone(),
        screen: cfg.screen.clone(),
        areas: cfg.area.clone(),
        ..AnalysisParams::default()
    };
    if !measures.is_empty() {
        params.measures = measures.iter().copied().collect();
    }
    let mut loaded = Vec::new();
    for p in sessions {
        loaded.push((session_name(p), read_session(p).map_err(|e| unreadable(p, e))?));
    }
    if !ingest.is_empty() {
        let map_path = map.expect("clap enforces --map");
        let map: ColumnMap = read_text(map_path)?.parse().map_err(|e| config_err(format!("{}: {e}", map_path.display())))?;
        for p in ingest {
            loaded.push((session_name(p), ingest_external(p, &map).map_err(|e| unreadable(p, e))?));
        }
    }
    let mut analyses = Vec::new();
    for (name, s) in &loaded {
        let a = analyze_session(s, name, &params, None).map_err(|e| Failure(EXIT_RUNTIME, format!("{name}: {e}")))?;
        if a.phase.is_some_and(|p| !p.complete()) {
            eprintln!("{name}: passing phase incomplete");
        }
        analyses.push(a);
    }
    let cohort = analyze_cohort(analyses);
    for v in invariant_violations(&cohort) {
        eprintln!("invariant violated: {v}");
    }
    let bundle = report_bundle(&cohort, &params);
    let written = bundle.write(out_dir)?;
    println!("analyzed {} session(s); wrote {} file(s) to {}", loaded.len(), written.len(), out_dir.display());
    Ok(())
}

fn ft(v: &serde_json::Value) -> String {
    v.as_f64().map_or_else(|| "n/a".into(), |x| format!("{x:.2}"))
}

fn run_report(dir: &Path) -> Result<(), Failure> {
    let text = read_text(&dir.join("report.json"))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| config_err(format!("report.json: {e}")))?;
    println!("sessions: {}", v["session_count"]);
    if let Some(m) = v["measures"].as_array() {
        let names: Vec<&str> = m.iter().filter_map(|x| x.as_str()).collect();
        println!("measures: {}", names.join(", "));
    }
    if let Some(a) = v["gaze_absent_sessions"].as_array().filter(|a| !a.is_empty()) {
        println!("gaze absent: {}", a.iter().filter_map(|x| x.as_str()).collect::<Vec<_>>().join(", "));
    }
    if let Some(a) = v["incomplete_passes"].as_array() {
        println!("incomplete passes: {}", a.len());
    }
    for d in v["lane_change_distances"].as_array().into_iter().flatten() {
        println!(
            "lane change distance ({}): median {} ft, IQR {}..{} ft, {} excluded",
            d["volume"].as_str().unwrap_or("?"),
            ft(&d["median"]),
            ft(&d["q1"]),
            ft(&d["q3"]),
            d["excluded"]
        );
    }
    if let Some(n) = v["sessions_with_shift"].as_u64() {
        println!("sessions with follower/lead gaze shifts: {n}");
    }
    let mut csvs: Vec<_> = fs::read_dir(dir)
        .map_err(|e| config_err(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    csvs.sort();
    for p in csvs {
        // header and units rows precede the data
        let rows = read_text(&p)?.lines().count().saturating_sub(2);
        println!("  {}: {rows} row(s)", p.file_name().unwrap_or_default().to_string_lossy());
    }
    Ok(())
}

fn run_serve(config: Option<&Path>, port: u16, out_dir: &Path, max_connections: Option<usize>) -> Result<(), Failure> {
    let cfg: Config = config_text(config)?.parse()?;
    let listener = bind(port).map_err(|e| match e {
        ServeError::PortBusy(_) => Failure(EXIT_PORT_BUSY, e.to_string()),
        other => Failure(EXIT_RUNTIME, other.to_string()),
    })?;
    eprintln!("listening on ws://{}", listener.local_addr().map(|a| a.to_string()).unwrap_or_default());
    let written = serve_listener(listener, cfg, out_dir, max_connections).map_err(|e| Failure(EXIT_RUNTIME, e.to_string()))?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, script, gaze_profile, seed, out, volume } => {
            run_simulate(config.as_deref(), script, gaze_profile.as_deref(), *seed, out, *volume)
        }
        Command::Analyze { sessions, ingest, map, config, out_dir, measures } => {
            run_analyze(sessions, ingest, map.as_deref(), config.as_deref(), out_dir, measures)
        }
        Command::Report { dir } => run_report(dir),
        Command::Serve { config, port, out_dir, max_connections } => {
            run_serve(config.as_deref(), *port, out_dir, *max_connections)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
