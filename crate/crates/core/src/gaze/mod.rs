//! Gaze-stream classification and geometric attribution.

mod fixation;
mod flags;
mod hull;
mod ivt;
mod sample;

pub use fixation::{group_fixations, Fixation};
pub use flags::{gaze_area_flags, gaze_object_flags, AreaFlags, AreaRect, AreaSet, ObjectFlags, ObjectHulls};
pub use hull::{convex_hull, point_in_hull, visible_hull, Point};
pub use ivt::{angular_velocities, ivt_classify, IvtParams, SampleLabel, ScreenGeometry};
pub use sample::GazeSample;
