//! Per-session and cohort analysis, and the report bundle built from it.

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::gaze::{group_fixations, ivt_classify, AreaSet, Fixation, IvtParams, ScreenGeometry};
use crate::io::{format_distance, format_p, ReportBundle, Session, Table};
use crate::measures::{
    brake_distance_histogram, correlation_grid, detect_brakes, detect_lane_changes, estimate_alpha_b,
    fixation_heatmap, fixation_proportions_by_distance, gaze_shift_patterns, lane_change_distance_stats,
    passing_phase, pupil_ttest, segment_correlations, session_proportions, trim_and_align, trim_bounds, AtmaObject,
    BinProportions, BrakeEvent, BrakeHistogram, BrakeParams, BrakeSample, CorrelationGrid, DistanceStats,
    GazeShiftSummary, Heatmap, IntervalEstimate, LaneAnnotation, LaneDetection, LaneParams, PassingPhase, PupilTest,
    SegmentCorrelation, SessionDataset, ShiftParams, PROPORTION_BINS,
};
use crate::scenario::TrafficVolume;
use crate::units::FPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Brakes,
    Lanes,
    Correlation,
    Proportions,
    Pupil,
    Shifts,
    Heatmap,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Brakes,
        Measure::Lanes,
        Measure::Correlation,
        Measure::Proportions,
        Measure::Pupil,
        Measure::Shifts,
        Measure::Heatmap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Brakes => "brakes",
            Measure::Lanes => "lanes",
            Measure::Correlation => "correlation",
            Measure::Proportions => "proportions",
            Measure::Pupil => "pupil",
            Measure::Shifts => "shifts",
            Measure::Heatmap => "heatmap",
        }
    }

    pub fn needs_gaze(self) -> bool {
        matches!(self, Measure::Proportions | Measure::Pupil | Measure::Shifts | Measure::Heatmap)
    }
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Measure::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Measure::ALL.iter().map(|m| m.name()).collect();
            format!("unknown measure {s:?}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    pub brake: BrakeParams,
    pub lanes: LaneParams,
    pub shifts: ShiftParams,
    pub ivt: IvtParams,
    pub screen: ScreenGeometry,
    /// Area layout used when a session header does not carry one.
    pub areas: AreaSet,
    /// Measures to compute; the session summary table only appears when all are selected.
    pub measures: BTreeSet<Measure>,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            brake: BrakeParams::default(),
            lanes: LaneParams::default(),
            shifts: ShiftParams::default(),
            ivt: IvtParams::default(),
            screen: ScreenGeometry::default(),
            areas: AreaSet::default(),
            measures: Measure::ALL.into_iter().collect(),
        }
    }
}

impl AnalysisParams {
    pub fn wants(&self, m: Measure) -> bool {
        self.measures.contains(&m)
    }

    pub fn all_measures(&self) -> bool {
        self.measures.len() == Measure::ALL.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionAnalysis {
    pub name: String,
    pub volume: Option<TrafficVolume>,
    #[serde(skip)]
    pub dataset: Option<SessionDataset>,
    pub operation_present: bool,
    pub gaze_present: bool,
    pub start_frame: Option<u64>,
    pub end_frame: Option<u64>,
    pub alpha_b: Option<f64>,
    pub brakes: Vec<BrakeEvent>,
    /// Follower distance at each brake start, aligned with `brakes`.
    pub brake_p_f: Vec<f64>,
    pub lanes: Option<LaneDetection>,
    pub phase: Option<PassingPhase>,
    /// Follower distance at the start of the passing lane change.
    pub pass_distance: Option<f64>,
    pub correlations: Option<Vec<SegmentCorrelation>>,
    pub fixations: Vec<Fixation>,
    pub proportions: Option<BinProportions>,
    pub pupil: Option<PupilTest>,
    pub shifts: Option<GazeShiftSummary>,
    pub heat_passing: Option<Heatmap>,
    pub heat_other: Option<Heatmap>,
}

const FULL_SCREEN: [f64; 4] = [0.0, 0.0, 1.0, 1.0];

/// Analyses one session. `annotations` replace automatic lane-change
/// detection when given.
pub fn analyze_session(
    session: &Session,
    name: &str,
    params: &AnalysisParams,
    annotations: Option<&[LaneAnnotation]>,
) -> Result<SessionAnalysis, Error> {
    let ch = session.header.channels;
    let areas = if session.header.source == "ingest" { params.areas.clone() } else { session.header.areas.clone() };
    let mut out = SessionAnalysis {
        name: name.to_string(),
        volume: session.header.scenario.as_ref().map(|s| s.traffic_volume),
        dataset: None,
        operation_present: ch.operation && !session.frames.is_empty(),
        gaze_present: ch.gaze && !session.gaze.is_empty(),
        start_frame: None,
        end_frame: None,
        alpha_b: None,
        brakes: Vec::new(),
        brake_p_f: Vec::new(),
        lanes: None,
        phase: None,
        pass_distance: None,
        correlations: None,
        fixations: Vec::new(),
        proportions: None,
        pupil: None,
        shifts: None,
        heat_passing: None,
        heat_other: None,
    };

    if !out.operation_present {
        // Gaze only: no trimming, no phase; fixations over the whole stream.
        if out.gaze_present && params.wants(Measure::Heatmap) {
            let labels = ivt_classify(&session.gaze, &params.ivt, &params.screen);
            out.fixations = group_fixations(&labels, &session.gaze, params.ivt.min_fixation_ms);
            out.heat_other = Some(fixation_heatmap(&out.fixations, 3, 3, FULL_SCREEN));
        }
        return Ok(out);
    }

    let (start, _) = trim_bounds(&session.frames)?;
    let mut ds = trim_and_align(&session.frames, if out.gaze_present { &session.gaze } else { &[] })?;
    ds.annotate(&params.ivt, &params.screen, &areas);
    let first = ds.first_frame();
    out.start_frame = Some(first);
    out.end_frame = Some(ds.last_frame());
    let fps = FPS as f64;

    if params.wants(Measure::Brakes) {
        let pre: Vec<f64> = session.frames[..start].iter().map(|f| f.op.brake).collect();
        let alpha_b = params.brake.alpha_b.unwrap_or_else(|| estimate_alpha_b(&pre));
        let brake: Vec<f64> = ds.frames.iter().map(|f| f.op.brake).collect();
        let speed: Vec<f64> = ds.frames.iter().map(|f| f.op.speed).collect();
        out.alpha_b = Some(alpha_b);
        out.brakes = detect_brakes(&brake, &speed, first, fps, alpha_b, &params.brake);
        out.brake_p_f = out.brakes.iter().map(|b| ds.frames[(b.start_frame - first) as usize].pos.p_f).collect();
    }

    let positions: Vec<_> = ds.frames.iter().map(|f| f.pos).collect();
    if ch.lateral && ch.position {
        let lateral: Vec<f64> = ds.frames.iter().map(|f| f.lateral(params.lanes.lane_width)).collect();
        let lanes = match annotations {
            Some(a) => LaneDetection::from_annotations(a, &lateral, first, &params.lanes),
            None => detect_lane_changes(&lateral, first, fps, &params.lanes),
        };
        let phase = passing_phase(&lanes.changes, &positions, first);
        if phase.complete() {
            out.pass_distance = phase.t_s.map(|s| positions[(s - first) as usize].p_f);
        }
        out.lanes = Some(lanes);
        out.phase = Some(phase);
    }

    if params.wants(Measure::Correlation) && ch.position {
        let speeds: Vec<f64> = ds.frames.iter().map(|f| f.op.speed).collect();
        out.correlations = Some(segment_correlations(&speeds, &positions));
    }

    if out.gaze_present {
        out.fixations = ds.fixations.clone();
        if params.wants(Measure::Proportions) && ch.display {
            let p_f: Vec<f64> = positions.iter().map(|p| p.p_f).collect();
            out.proportions = Some(session_proportions(&ds.labels, &ds.object_flags, &p_f));
        }
        if params.wants(Measure::Shifts) && ch.display {
            out.shifts = Some(gaze_shift_patterns(&ds.object_flags, &params.shifts));
        }
        if params.wants(Measure::Pupil) && ch.pupil {
            if let Some(phase) = &out.phase {
                out.pupil = Some(pupil_ttest(&ds.gaze, first, phase));
            }
        }
        if params.wants(Measure::Heatmap) {
            let phase = out.phase.unwrap_or(PassingPhase { t_s: None, t_e: None });
            let in_pass = |f: &&Fixation| phase.contains(f.mid_frame() as u64);
            out.heat_passing = Some(fixation_heatmap(ds.fixations.iter().filter(in_pass), 3, 3, FULL_SCREEN));
            out.heat_other =
                Some(fixation_heatmap(ds.fixations.iter().filter(|f| !in_pass(f)), 3, 3, FULL_SCREEN));
        }
    }
    out.dataset = Some(ds);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortAnalysis {
    pub sessions: Vec<SessionAnalysis>,
    pub correlation_grid: CorrelationGrid,
    pub proportions: Vec<IntervalEstimate>,
    pub brake_histogram: BrakeHistogram,
    pub lane_change_distances: Vec<DistanceStats>,
    pub heat_passing: Heatmap,
    pub heat_other: Heatmap,
    pub sessions_with_shift: usize,
    pub sessions_with_gaze: usize,
}

fn pooled(maps: impl Iterator<Item = Heatmap>) -> Heatmap {
    let mut out = fixation_heatmap(&[], 3, 3, FULL_SCREEN);
    for m in maps {
        for (a, b) in out.duration_ms.iter_mut().zip(&m.duration_ms) {
            *a += b;
        }
    }
    out
}

pub fn analyze_cohort(sessions: Vec<SessionAnalysis>) -> CohortAnalysis {
    let corr: Vec<Vec<SegmentCorrelation>> = sessions.iter().filter_map(|s| s.correlations.clone()).collect();
    let props: Vec<BinProportions> = sessions.iter().filter_map(|s| s.proportions.clone()).collect();
    let mut brake_samples = Vec::new();
    for s in &sessions {
        let volume = s.volume.unwrap_or(TrafficVolume::Low);
        for (b, &p_f) in s.brakes.iter().zip(&s.brake_p_f) {
            brake_samples.push(BrakeSample { p_f, harsh: b.harsh, volume });
        }
    }
    let distances: Vec<(TrafficVolume, Option<f64>)> = sessions
        .iter()
        .filter(|s| s.phase.is_some())
        .map(|s| (s.volume.unwrap_or(TrafficVolume::Low), s.pass_distance))
        .collect();
    CohortAnalysis {
        correlation_grid: correlation_grid(&corr),
        proportions: fixation_proportions_by_distance(&props),
        brake_histogram: brake_distance_histogram(&brake_samples, 100.0),
        lane_change_distances: lane_change_distance_stats(&distances),
        heat_passing: pooled(sessions.iter().filter_map(|s| s.heat_passing.clone())),
        heat_other: pooled(sessions.iter().filter_map(|s| s.heat_other.clone())),
        sessions_with_shift: sessions.iter().filter(|s| s.shifts.as_ref().is_some_and(|x| x.has_shift())).count(),
        sessions_with_gaze: sessions.iter().filter(|s| s.gaze_present).count(),
        sessions,
    }
}

/// Internal consistency checks over the computed measures; empty when all hold.
pub fn invariant_violations(c: &CohortAnalysis) -> Vec<String> {
    let mut v = Vec::new();
    for s in &c.sessions {
        let n = &s.name;
        for w in s.brakes.windows(2) {
            if w[0].start_frame + w[0].duration_frames > w[1].start_frame {
                v.push(format!("{n}: brake events overlap at frame {}", w[1].start_frame));
            }
        }
        if let (Some(phase), Some(ds)) = (&s.phase, &s.dataset) {
            if phase.complete() {
                let at = |f: u64| ds.index_of(f).map(|i| ds.frames[i].pos);
                if !at(phase.t_s.unwrap()).is_some_and(|p| p.p_f > 0.0) {
                    v.push(format!("{n}: follower not ahead at t_s"));
                }
                if !at(phase.t_e.unwrap()).is_some_and(|p| p.p_l < 0.0) {
                    v.push(format!("{n}: lead not behind at t_e"));
                }
            }
        }
        for r in s.correlations.iter().flatten().filter_map(|c| c.r) {
            if !(-1.0..=1.0).contains(&r) {
                v.push(format!("{n}: correlation {r} out of range"));
            }
        }
        for h in [&s.heat_passing, &s.heat_other].into_iter().flatten() {
            if h.total_ms() > 0.0 && (h.shares_pct().iter().sum::<f64>() - 100.0).abs() > 1e-9 {
                v.push(format!("{n}: heat map shares do not sum to 100%"));
            }
        }
        if let Some(p) = &s.pupil {
            for r in [&p.left.result, &p.right.result].into_iter().flatten() {
                if !(0.0..=1.0).contains(&r.p) {
                    v.push(format!("{n}: p-value {} out of range", r.p));
                }
            }
        }
    }
    for e in &c.proportions {
        if e.mean.is_some_and(|m| !(0.0..=1.0).contains(&m)) {
            v.push(format!("proportion mean out of range in bin {}", e.bin));
        }
    }
    v
}

fn opt(x: Option<f64>, f: impl Fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

/// Why a gaze measure is missing for `s`.
fn gaze_status(s: &SessionAnalysis) -> &'static str {
    if s.gaze_present {
        "unavailable"
    } else {
        "absent"
    }
}

fn volume_name(v: Option<TrafficVolume>) -> String {
    v.map(|v| v.as_str().to_string()).unwrap_or_default()
}

/// Tables and JSON summary for `cohort`, limited to the selected measures.
pub fn report_bundle(cohort: &CohortAnalysis, params: &AnalysisParams) -> ReportBundle {
    let mut tables = Vec::new();
    let ss = &cohort.sessions;

    if params.all_measures() {
        let mut t = Table::new(
            "sessions",
            &[
                ("session", "-"),
                ("volume", "-"),
                ("start_frame", "frame"),
                ("end_frame", "frame"),
                ("gaze", "-"),
                ("brakes", "count"),
                ("harsh_brakes", "count"),
                ("lane_changes", "count"),
                ("passing_complete", "-"),
                ("t_s", "frame"),
                ("t_e", "frame"),
                ("fixations", "count"),
            ],
        );
        for s in ss {
            let phase = s.phase.unwrap_or(PassingPhase { t_s: None, t_e: None });
            let complete = s.phase.map(|p| p.complete().to_string()).unwrap_or_default();
            t.push(vec![
                s.name.clone(),
                volume_name(s.volume),
                s.start_frame.map(|f| f.to_string()).unwrap_or_default(),
                s.end_frame.map(|f| f.to_string()).unwrap_or_default(),
                if s.gaze_present { "present" } else { "absent" }.into(),
                s.brakes.len().to_string(),
                s.brakes.iter().filter(|b| b.harsh).count().to_string(),
                s.lanes.as_ref().map_or(0, |l| l.changes.len()).to_string(),
                complete,
                phase.t_s.map(|f| f.to_string()).unwrap_or_default(),
                phase.t_e.map(|f| f.to_string()).unwrap_or_default(),
                s.fixations.len().to_string(),
            ]);
        }
        tables.push(t);
    }

    if params.wants(Measure::Brakes) {
        let mut t = Table::new(
            "brakes",
            &[
                ("session", "-"),
                ("volume", "-"),
                ("start_frame", "frame"),
                ("duration", "frames"),
                ("p_f_start", "ft"),
                ("speed_drop_rate", "mph/s"),
                ("harsh", "-"),
                ("pedal_rate", "mph/s"),
                ("harsh_pedal", "-"),
            ],
        );
        for s in ss {
            for (b, p_f) in s.brakes.iter().zip(&s.brake_p_f) {
                t.push(vec![
                    s.name.clone(),
                    volume_name(s.volume),
                    b.start_frame.to_string(),
                    b.duration_frames.to_string(),
                    format_distance(*p_f),
                    format!("{:.3}", b.decel_mph_s),
                    b.harsh.to_string(),
                    format!("{:.3}", b.pedal_rate),
                    b.harsh_pedal.to_string(),
                ]);
            }
        }
        tables.push(t);
        let mut h = Table::new(
            "brake_histogram",
            &[
                ("bin_start", "ft"),
                ("bin_end", "ft"),
                ("low", "count"),
                ("low_harsh", "count"),
                ("high", "count"),
                ("high_harsh", "count"),
            ],
        );
        let bw = cohort.brake_histogram.bin_ft;
        for (k, b) in &cohort.brake_histogram.bins {
            h.push(vec![
                format_distance(*k as f64 * bw),
                format_distance((*k + 1) as f64 * bw),
                b.low.to_string(),
                b.low_harsh.to_string(),
                b.high.to_string(),
                b.high_harsh.to_string(),
            ]);
        }
        tables.push(h);
    }

    if params.wants(Measure::Lanes) {
        let mut t = Table::new(
            "lane_changes",
            &[
                ("session", "-"),
                ("volume", "-"),
                ("kind", "-"),
                ("start_frame", "frame"),
                ("end_frame", "frame"),
                ("from_lane", "-"),
                ("to_lane", "-"),
                ("unfinished", "-"),
            ],
        );
        for s in ss {
            let Some(l) = &s.lanes else { continue };
            for c in &l.changes {
                t.push(vec![
                    s.name.clone(),
                    volume_name(s.volume),
                    "change".into(),
                    c.start_frame.to_string(),
                    c.end_frame.to_string(),
                    c.from_lane.to_string(),
                    c.to_lane.to_string(),
                    c.unfinished.to_string(),
                ]);
            }
            for a in &l.aborts {
                t.push(vec![
                    s.name.clone(),
                    volume_name(s.volume),
                    "abort".into(),
                    a.start_frame.to_string(),
                    a.end_frame.to_string(),
                    a.lane.to_string(),
                    a.lane.to_string(),
                    "false".into(),
                ]);
            }
        }
        tables.push(t);
        let mut p = Table::new(
            "passing",
            &[("session", "-"), ("volume", "-"), ("complete", "-"), ("t_s", "frame"), ("t_e", "frame"), ("p_f_at_t_s", "ft")],
        );
        for s in ss {
            let Some(ph) = &s.phase else { continue };
            p.push(vec![
                s.name.clone(),
                volume_name(s.volume),
                ph.complete().to_string(),
                ph.t_s.map(|f| f.to_string()).unwrap_or_default(),
                ph.t_e.map(|f| f.to_string()).unwrap_or_default(),
                opt(s.pass_distance, format_distance),
            ]);
        }
        tables.push(p);
        let mut d = Table::new(
            "lane_change_distance",
            &[("volume", "-"), ("sessions", "count"), ("excluded", "count"), ("median", "ft"), ("q1", "ft"), ("q3", "ft")],
        );
        for st in &cohort.lane_change_distances {
            d.push(vec![
                st.volume.as_str().into(),
                st.distances.len().to_string(),
                st.excluded.to_string(),
                opt(st.median, format_distance),
                opt(st.q1, format_distance),
                opt(st.q3, format_distance),
            ]);
        }
        tables.push(d);
    }

    if params.wants(Measure::Correlation) {
        let mut t = Table::new(
            "correlations",
            &[("session", "-"), ("segment", "-"), ("samples", "count"), ("r", "-")],
        );
        for s in ss {
            for c in s.correlations.iter().flatten() {
                t.push(vec![s.name.clone(), c.segment.to_string(), c.samples.to_string(), opt(c.r, |r| format!("{r:.6}"))]);
            }
        }
        tables.push(t);
        let mut g = Table::new(
            "correlation_grid",
            &[("segment", "-"), ("r_lo", "-"), ("r_hi", "-"), ("sessions", "count")],
        );
        for (k, row) in cohort.correlation_grid.counts.iter().enumerate() {
            for (b, n) in row.iter().enumerate() {
                let lo = -1.0 + b as f64 * 0.1;
                g.push(vec![(k as i32 - 10).to_string(), format!("{lo:.1}"), format!("{:.1}", lo + 0.1), n.to_string()]);
            }
            g.push(vec![(k as i32 - 10).to_string(), "undefined".into(), "undefined".into(), cohort.correlation_grid.undefined[k].to_string()]);
        }
        tables.push(g);
    }

    if params.wants(Measure::Proportions) {
        let mut t = Table::new(
            "proportions",
            &[
                ("bin_start", "ft"),
                ("bin_end", "ft"),
                ("object", "-"),
                ("sessions", "count"),
                ("mean", "fraction"),
                ("se", "fraction"),
                ("ci_lo", "fraction"),
                ("ci_hi", "fraction"),
            ],
        );
        for e in &cohort.proportions {
            t.push(vec![
                format_distance(e.bin as f64 * 100.0),
                format_distance((e.bin + 1) as f64 * 100.0),
                e.object.name().into(),
                e.sessions.to_string(),
                opt(e.mean, |x| format!("{x:.6}")),
                opt(e.se, |x| format!("{x:.6}")),
                opt(e.lo, |x| format!("{x:.6}")),
                opt(e.hi, |x| format!("{x:.6}")),
            ]);
        }
        if cohort.sessions_with_gaze == 0 {
            t.rows.clear();
        }
        tables.push(t);
    }

    if params.wants(Measure::Pupil) {
        let mut t = Table::new(
            "pupil_ttest",
            &[
                ("session", "-"),
                ("eye", "-"),
                ("status", "-"),
                ("n_passing", "count"),
                ("n_other", "count"),
                ("mean_passing", "mm"),
                ("mean_other", "mm"),
                ("t", "-"),
                ("df", "-"),
                ("p", "-"),
            ],
        );
        for s in ss {
            for (eye, test) in s.pupil.iter().flat_map(|p| [("left", &p.left), ("right", &p.right)]) {
                match &test.result {
                    Some(r) => t.push(vec![
                        s.name.clone(),
                        eye.into(),
                        "ok".into(),
                        r.n_a.to_string(),
                        r.n_b.to_string(),
                        format!("{:.4}", r.mean_a),
                        format!("{:.4}", r.mean_b),
                        format!("{:.4}", r.t),
                        format!("{:.2}", r.df),
                        format_p(r.p),
                    ]),
                    None => {
                        let mut row = vec![s.name.clone(), eye.into(), "unavailable".into()];
                        row.extend(std::iter::repeat_n(String::new(), 7));
                        t.push(row);
                    }
                }
            }
            if !s.gaze_present {
                let mut row = vec![s.name.clone(), "both".into(), "absent".into()];
                row.extend(std::iter::repeat_n(String::new(), 7));
                t.push(row);
            }
        }
        tables.push(t);
    }

    if params.wants(Measure::Shifts) {
        let mut t = Table::new(
            "gaze_shifts",
            &[("session", "-"), ("volume", "-"), ("status", "-"), ("shifts", "count"), ("has_shift", "-"), ("pattern", "-")],
        );
        for s in ss {
            match &s.shifts {
                Some(x) => t.push(vec![
                    s.name.clone(),
                    volume_name(s.volume),
                    "ok".into(),
                    x.shift_count().to_string(),
                    x.has_shift().to_string(),
                    x.pattern(),
                ]),
                None => t.push(vec![s.name.clone(), volume_name(s.volume), gaze_status(s).into(), String::new(), String::new(), String::new()]),
            }
        }
        tables.push(t);
    }

    if params.wants(Measure::Heatmap) {
        let mut t = Table::new(
            "heatmap",
            &[("phase", "-"), ("row", "-"), ("col", "-"), ("duration", "ms"), ("share", "%")],
        );
        for (phase, h) in [("passing", &cohort.heat_passing), ("other", &cohort.heat_other)] {
            let shares = h.shares_pct();
            for r in 0..h.rows {
                for c in 0..h.cols {
                    let k = r * h.cols + c;
                    t.push(vec![phase.into(), r.to_string(), c.to_string(), format!("{:.2}", h.duration_ms[k]), format!("{:.4}", shares[k])]);
                }
            }
        }
        tables.push(t);
    }

    let measures: Vec<&str> = params.measures.iter().map(|m| m.name()).collect();
    let absent: Vec<&str> = ss.iter().filter(|s| !s.gaze_present).map(|s| s.name.as_str()).collect();
    let mut summary = json!({
        "measures": measures,
        "session_count": ss.len(),
        "gaze_absent_sessions": absent,
    });
    let obj = summary.as_object_mut().expect("object");
    if params.wants(Measure::Brakes) {
        obj.insert("brake_histogram".into(), serde_json::to_value(&cohort.brake_histogram).expect("serialises"));
    }
    if params.wants(Measure::Lanes) {
        obj.insert("lane_change_distances".into(), serde_json::to_value(&cohort.lane_change_distances).expect("serialises"));
        obj.insert(
            "incomplete_passes".into(),
            json!(ss.iter().filter(|s| s.phase.is_some_and(|p| !p.complete())).map(|s| s.name.as_str()).collect::<Vec<_>>()),
        );
    }
    if params.wants(Measure::Shifts) {
        obj.insert("sessions_with_shift".into(), json!(cohort.sessions_with_shift));
    }
    if params.wants(Measure::Heatmap) {
        obj.insert(
            "heatmap_share_pct".into(),
            json!({"passing": cohort.heat_passing.shares_pct(), "other": cohort.heat_other.shares_pct()}),
        );
    }
    if params.wants(Measure::Proportions) {
        obj.insert("proportion_bins".into(), json!(PROPORTION_BINS));
        obj.insert("proportion_objects".into(), json!(AtmaObject::ALL.map(|o| o.name())));
    }
    ReportBundle { tables, summary }
}
