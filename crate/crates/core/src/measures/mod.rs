//! Driving and gaze measures computed over recorded sessions.

mod brakes;
mod correlation;
mod dataset;
mod distances;
mod heatmap;
mod lanes;
mod passing;
mod proportions;
mod shifts;
mod stats;
mod ttest;

pub use brakes::{detect_brakes, estimate_alpha_b, BrakeEvent, BrakeParams};
pub use correlation::{
    correlation_grid, segment_correlations, segment_index, CorrelationGrid, SegmentCorrelation, SEGMENTS,
};
pub use dataset::{trim_and_align, trim_bounds, AlignedFrame, MeasureError, SessionDataset};
pub use distances::{
    brake_distance_histogram, lane_change_distance_stats, BrakeHistogram, BrakeHistogramBin, BrakeSample,
    DistanceStats,
};
pub use heatmap::{fixation_heatmap, Heatmap};
pub use lanes::{detect_lane_changes, LaneAnnotation, LaneChange, LaneDetection, LaneParams};
pub use passing::{passing_phase, PassingPhase};
pub use proportions::{
    fixation_proportions_by_distance, proportion_bin, session_proportions, AtmaObject, BinProportions,
    IntervalEstimate, PROPORTION_BINS,
};
pub use shifts::{gaze_shift_patterns, GazeShiftSummary, ShiftParams, Truck, TruckRun};
pub use stats::{mean, pearson, quantile, sample_variance};
pub use ttest::{pupil_ttest, student_t_sf, welch_greater, EyeTest, PupilTest, WelchResult};
