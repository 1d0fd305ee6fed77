use std::path::{Path, PathBuf};

use atmasim::agents::presets::PassPlan;
use atmasim::analysis::{analyze_session, AnalysisParams};
use atmasim::config::Config;
use atmasim::io::{ingest_external, ColumnMap};
use atmasim::measures::trim_and_align;
use atmasim::scenario::TrafficVolume;
use atmasim::sim::simulate;
use atmasim::units::FRAME_MS;
use atmasim::Error;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn tracker_map() -> ColumnMap {
    std::fs::read_to_string(data("tracker.map")).unwrap().parse().unwrap()
}

#[test]
fn tracker_export_loads() {
    let s = ingest_external(&data("tracker.csv"), &tracker_map()).unwrap();
    assert_eq!(s.header.source, "ingest");
    assert!(s.header.channels.gaze && s.header.channels.pupil);
    assert!(!s.header.channels.operation);
    assert_eq!(s.gaze.len(), 600);
    assert!(s.frames.is_empty());
    assert_eq!(s.gaze[0].timestamp_ms, 3.0);
    for (i, g) in s.gaze.iter().enumerate() {
        assert_eq!(g.point.is_none(), (200..=204).contains(&i), "sample {i}");
        assert!(g.pupil_left.is_some());
    }
}

#[test]
fn offset_samples_land_on_their_frames() {
    // tracker samples run 3 ms behind the frame clock; each one belongs to
    // the frame with the same index
    let gaze = ingest_external(&data("tracker.csv"), &tracker_map()).unwrap().gaze;
    let mut cfg = Config::new(TrafficVolume::Low, 4);
    cfg.max_frames = 600;
    let run = simulate(&cfg, &PassPlan::default().script(), None).unwrap();
    let ds = trim_and_align(&run.session.frames, &gaze).unwrap();
    assert!(ds.gaze_present);
    assert_eq!(ds.gaze_matched, ds.len());
    assert_eq!(ds.gaze_dropped, 0);
    assert_eq!(ds.gaze_outside, 600 - ds.len());
    for (k, f) in ds.frames.iter().enumerate() {
        let src = &gaze[f.frame as usize];
        assert!((src.timestamp_ms - f.time_ms - 3.0).abs() <= 1e-3 + 1e-9);
        assert_eq!(ds.gaze[k].point, src.point, "frame {}", f.frame);
        assert_eq!(ds.gaze[k].timestamp_ms, f.time_ms);
    }
}

#[test]
fn shifted_by_more_than_half_a_frame_moves_to_the_next_frame() {
    let mut cfg = Config::new(TrafficVolume::Low, 4);
    cfg.max_frames = 300;
    let run = simulate(&cfg, &PassPlan::default().script(), None).unwrap();
    let mut gaze = ingest_external(&data("tracker.csv"), &tracker_map()).unwrap().gaze;
    gaze.truncate(300);
    for g in &mut gaze {
        g.timestamp_ms += 0.6 * FRAME_MS;
    }
    let ds = trim_and_align(&run.session.frames, &gaze).unwrap();
    for (k, f) in ds.frames.iter().enumerate().skip(1) {
        assert_eq!(ds.gaze[k].point, gaze[f.frame as usize - 1].point);
    }
}

#[test]
fn gaze_only_export_analyzes() {
    let s = ingest_external(&data("tracker.csv"), &tracker_map()).unwrap();
    let a = analyze_session(&s, "tracker", &AnalysisParams::default(), None).unwrap();
    assert!(!a.operation_present);
    assert!(a.gaze_present);
    assert!(a.brakes.is_empty());
    assert!(!a.fixations.is_empty());
    let heat = a.heat_other.expect("heat map over the whole recording");
    assert!((heat.shares_pct().iter().sum::<f64>() - 100.0).abs() < 1e-9);
}

#[test]
fn operation_columns_become_frames() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ops.tsv");
    let mut text = String::from("ms\tB\tA\tV\tPE\tPF\tPL\n");
    for i in 0..120 {
        let accel = if i < 10 { 0.0 } else { 1.0 };
        text += &format!("{}\t0\t{accel}\t{}\t{}\t{}\t{}\n", i as f64 * FRAME_MS, i as f64 * 0.1, 5000 - i, 1800 - i, 1975 - i);
    }
    std::fs::write(&csv, text).unwrap();
    let map: ColumnMap = "delimiter = tab\ntimestamp = ms\nbrake = B\naccel = A\nspeed = V\np_e = PE\np_f = PF\np_l = PL"
        .parse()
        .unwrap();
    let s = ingest_external(&csv, &map).unwrap();
    assert!(s.header.channels.operation && s.header.channels.position);
    assert!(!s.header.channels.gaze && !s.header.channels.lateral);
    assert_eq!(s.frames.len(), 120);
    assert_eq!(s.frames[119].frame, 119);
    assert_eq!(s.frames[50].pos.p_f, 1750.0);
}

#[test]
fn malformed_exports_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let map = tracker_map();

    let missing = dir.path().join("missing.csv");
    std::fs::write(&missing, "RecordingTime,GazeX\n0.1,0.5\n").unwrap();
    assert!(matches!(ingest_external(&missing, &map), Err(Error::Format { .. })));

    let dup = dir.path().join("dup.csv");
    std::fs::write(&dup, "RecordingTime,GazeX,GazeY,Valid,PupilL,PupilR\n0.1,0.5,0.5,1,3,3\n0.1,0.5,0.5,1,3,3\n").unwrap();
    let e = ingest_external(&dup, &map).unwrap_err();
    assert!(e.to_string().contains("duplicate timestamp"), "{e}");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "RecordingTime,GazeX,GazeY,Valid,PupilL,PupilR\nsoon,0.5,0.5,1,3,3\n").unwrap();
    assert!(ingest_external(&bad, &map).is_err());

    assert!(ingest_external(&dir.path().join("absent.csv"), &map).is_err());
    assert!("timestamp = T\nunknown = X".parse::<ColumnMap>().is_err());
}
