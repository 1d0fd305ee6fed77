use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn atmasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atmasim")).args(args).output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}\nstdout:\n{}\nstderr:\n{}", out.status.code(), stdout(out), stderr(out));
    stdout(out)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, stem: &str, extra: &[&str]) -> Output {
    let out = dir.join(format!("{stem}.ndjson"));
    let script = data("pass.script");
    let conf = data("scenario.conf");
    let mut args = vec!["simulate", "--config", s(&conf), "--script", s(&script), "--out", s(&out)];
    args.extend_from_slice(extra);
    atmasim(&args)
}

#[test]
fn simulate_analyze_report() {
    let dir = tempfile::tempdir().unwrap();
    let profile = data("scan.gaze");
    ok(&simulate(dir.path(), "drive", &["--gaze-profile", s(&profile), "--seed", "11", "--volume", "both"]));
    for vol in ["low", "high"] {
        assert!(dir.path().join(format!("drive-{vol}.ndjson")).exists());
        let ledger = std::fs::read_to_string(dir.path().join(format!("drive-{vol}.ledger.json"))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&ledger).unwrap();
        assert!(!v["brakes"].as_array().unwrap().is_empty());
    }

    let report = dir.path().join("report");
    let low = dir.path().join("drive-low.ndjson");
    let high = dir.path().join("drive-high.ndjson");
    let msg = ok(&atmasim(&["analyze", "--session", s(&low), s(&high), "--out-dir", s(&report)]));
    assert!(msg.contains("analyzed 2 session(s)"), "{msg}");
    for table in ["sessions", "brakes", "lane_changes", "passing", "correlations", "proportions", "pupil_ttest", "heatmap"] {
        assert!(report.join(format!("{table}.csv")).exists(), "{table}.csv missing");
    }

    let summary = ok(&atmasim(&["report", "--dir", s(&report)]));
    assert!(summary.contains("sessions: 2"), "{summary}");
    assert!(summary.contains("brakes.csv"), "{summary}");
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let profile = data("scan.gaze");
    for stem in ["a", "b"] {
        ok(&simulate(dir.path(), stem, &["--gaze-profile", s(&profile), "--seed", "5", "--volume", "high"]));
    }
    let a = std::fs::read(dir.path().join("a.ndjson")).unwrap();
    let b = std::fs::read(dir.path().join("b.ndjson")).unwrap();
    assert!(a == b, "session files differ");
}

#[test]
fn missing_script_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.ndjson");
    let r = atmasim(&["simulate", "--script", s(&dir.path().join("nope.script")), "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(2), "{}", stderr(&r));
    assert!(!out.exists());
}

#[test]
fn unreadable_session_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ndjson");
    std::fs::write(&bad, "not a session\n").unwrap();
    let r = atmasim(&["analyze", "--session", s(&bad), "--out-dir", s(&dir.path().join("r"))]);
    assert_eq!(r.status.code(), Some(2), "{}", stderr(&r));
}

#[test]
fn measure_filter_limits_tables() {
    let dir = tempfile::tempdir().unwrap();
    ok(&simulate(dir.path(), "drive", &["--seed", "3"]));
    let report = dir.path().join("report");
    let session = dir.path().join("drive.ndjson");
    ok(&atmasim(&["analyze", "--session", s(&session), "--measure", "brakes", "--out-dir", s(&report)]));
    let mut csvs: Vec<String> = std::fs::read_dir(&report)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    csvs.sort();
    assert_eq!(csvs, ["brake_histogram.csv", "brakes.csv"]);

    let r = atmasim(&["analyze", "--session", s(&session), "--measure", "speed", "--out-dir", s(&report)]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn gaze_absent_session_reports_absent_measures() {
    let dir = tempfile::tempdir().unwrap();
    ok(&simulate(dir.path(), "nogaze", &["--seed", "8"]));
    let report = dir.path().join("report");
    let session = dir.path().join("nogaze.ndjson");
    ok(&atmasim(&["analyze", "--session", s(&session), "--out-dir", s(&report)]));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["gaze_absent_sessions"], serde_json::json!(["nogaze"]));
    let pupil = std::fs::read_to_string(report.join("pupil_ttest.csv")).unwrap();
    assert!(pupil.contains("absent"), "{pupil}");
    let summary = ok(&atmasim(&["report", "--dir", s(&report)]));
    assert!(summary.contains("gaze absent: nogaze"), "{summary}");
}

#[test]
fn serve_on_busy_port_exits_4() {
    let holder = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = holder.local_addr().unwrap().port().to_string();
    let dir = tempfile::tempdir().unwrap();
    let r = atmasim(&["serve", "--port", &port, "--out-dir", s(dir.path())]);
    assert_eq!(r.status.code(), Some(4), "{}", stderr(&r));
}
