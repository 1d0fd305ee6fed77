//! Fixed-area (dashboard, mirrors) and moving-object (trucks, signs) gaze flags.

use serde::{Deserialize, Serialize};

use super::hull::{point_in_hull, visible_hull, Point};
use crate::scenario::ScreenQuadSet;

/// Axis-aligned rectangle in normalised screen coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaRect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl AreaRect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x0..=self.x1).contains(&p[0]) && (self.y0..=self.y1).contains(&p[1])
    }

    pub fn center(&self) -> Point {
        [(self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0]
    }

    pub fn validate(&self) -> Result<(), String> {
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        if self.x0 < self.x1 && self.y0 < self.y1 && [self.x0, self.y0, self.x1, self.y1].into_iter().all(inside) {
            Ok(())
        } else {
            Err(format!("area {self:?} must be a non-empty rectangle inside [0,1]²"))
        }
    }

    fn overlaps(&self, o: &AreaRect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }
}

/// The five fixed areas of the driver's view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaSet {
    pub speedometer: AreaRect,
    /// Tachometer together with the turn-signal lamps.
    pub tachometer: AreaRect,
    pub left_mirror: AreaRect,
    pub right_mirror: AreaRect,
    pub rear_mirror: AreaRect,
}

impl Default for AreaSet {
    fn default() -> Self {
        Self {
            speedometer: AreaRect::new(0.36, 0.80, 0.48, 0.98),
            tachometer: AreaRect::new(0.52, 0.80, 0.64, 0.98),
            left_mirror: AreaRect::new(0.00, 0.42, 0.12, 0.60),
            right_mirror: AreaRect::new(0.88, 0.42, 1.00, 0.60),
            rear_mirror: AreaRect::new(0.40, 0.02, 0.60, 0.12),
        }
    }
}

impl AreaSet {
    pub fn named(&self) -> [(&'static str, AreaRect); 5] {
        [
            ("speedometer", self.speedometer),
            ("tachometer", self.tachometer),
            ("left_mirror", self.left_mirror),
            ("right_mirror", self.right_mirror),
            ("rear_mirror", self.rear_mirror),
        ]
    }

    pub fn validate(&self) -> Result<(), String> {
        let named = self.named();
        for (name, r) in &named {
            r.validate().map_err(|e| format!("{name}: {e}"))?;
        }
        for i in 0..named.len() {
            for j in i + 1..named.len() {
                if named[i].1.overlaps(&named[j].1) {
                    return Err(format!("areas {} and {} overlap", named[i].0, named[j].0));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AreaFlags {
    pub a_ms: bool,
    pub a_mt: bool,
    pub a_ml: bool,
    pub a_mr: bool,
    pub a_mb: bool,
}

impl AreaFlags {
    pub fn any(&self) -> bool {
        self.a_ms || self.a_mt || self.a_ml || self.a_mr || self.a_mb
    }

    pub fn as_array(&self) -> [bool; 5] {
        [self.a_ms, self.a_mt, self.a_ml, self.a_mr, self.a_mb]
    }
}

pub fn gaze_area_flags(gaze: Option<Point>, areas: &AreaSet) -> AreaFlags {
    let Some(g) = gaze else {
        return AreaFlags::default();
    };
    AreaFlags {
        a_ms: areas.speedometer.contains(g),
        a_mt: areas.tachometer.contains(g),
        a_ml: areas.left_mirror.contains(g),
        a_mr: areas.right_mirror.contains(g),
        a_mb: areas.rear_mirror.contains(g),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObjectFlags {
    pub m_f: bool,
    pub m_l: bool,
    pub m_fs: bool,
    pub m_ls: bool,
}

impl ObjectFlags {
    /// Gaze is on the follower truck or its sign.
    pub fn on_follower(&self) -> bool {
        self.m_f || self.m_fs
    }

    pub fn on_lead(&self) -> bool {
        self.m_l || self.m_ls
    }

    pub fn any(&self) -> bool {
        self.on_follower() || self.on_lead()
    }
}

/// Convex hulls of the four projected objects for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectHulls {
    pub follower: Vec<Point>,
    pub lead: Vec<Point>,
    pub follower_sign: Vec<Point>,
    pub lead_sign: Vec<Point>,
}

impl ObjectHulls {
    pub fn from_quads(quads: &ScreenQuadSet) -> Self {
        Self {
            follower: visible_hull(&quads.follower),
            lead: visible_hull(&quads.lead),
            follower_sign: visible_hull(&quads.follower_sign),
            lead_sign: visible_hull(&quads.lead_sign),
        }
    }

    pub fn flags(&self, gaze: Option<Point>) -> ObjectFlags {
        let Some(g) = gaze else {
            return ObjectFlags::default();
        };
        ObjectFlags {
            m_f: point_in_hull(&self.follower, g),
            m_l: point_in_hull(&self.lead, g),
            m_fs: point_in_hull(&self.follower_sign, g),
            m_ls: point_in_hull(&self.lead_sign, g),
        }
    }
}

pub fn gaze_object_flags(gaze: Option<Point>, quads: &ScreenQuadSet) -> ObjectFlags {
    ObjectHulls::from_quads(quads).flags(gaze)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ScreenPoint, VERTICES};

    #[test]
    fn speedometer_center_only() {
        let a = AreaSet::default();
        let f = gaze_area_flags(Some(a.speedometer.center()), &a);
        assert_eq!(f, AreaFlags { a_ms: true, ..AreaFlags::default() });
    }

    #[test]
    fn edge_is_inclusive() {
        let a = AreaSet::default();
        let r = a.left_mirror;
        assert!(gaze_area_flags(Some([r.x1, (r.y0 + r.y1) / 2.0]), &a).a_ml);
        assert!(gaze_area_flags(Some([r.x0, r.y0]), &a).a_ml);
    }

    #[test]
    fn road_area_has_no_flags() {
        let a = AreaSet::default();
        assert!(!gaze_area_flags(Some([0.5, 0.45]), &a).any());
        assert!(!gaze_area_flags(None, &a).any());
    }

    #[test]
    fn defaults_are_disjoint() {
        assert!(AreaSet::default().validate().is_ok());
        let mut a = AreaSet::default();
        a.tachometer = a.speedometer;
        assert!(a.validate().is_err());
    }

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> [ScreenPoint; VERTICES] {
        let c = [[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
        let mut out = [ScreenPoint::HIDDEN; VERTICES];
        for i in 0..VERTICES {
            out[i] = ScreenPoint { x: c[i % 4][0], y: c[i % 4][1], visible: true };
        }
        out
    }

    #[test]
    fn object_flags() {
        let mut q = ScreenQuadSet::hidden();
        q.follower = square(0.4, 0.4, 0.6, 0.6);
        q.follower_sign = square(0.45, 0.45, 0.55, 0.5);
        let f = gaze_object_flags(Some([0.5, 0.47]), &q);
        assert!(f.m_f && f.m_fs && !f.m_l && !f.m_ls);
        let f = gaze_object_flags(Some([0.5, 0.58]), &q);
        assert!(f.m_f && !f.m_fs);
        assert!(!gaze_object_flags(Some([0.9, 0.9]), &q).any());
        assert!(!gaze_object_flags(None, &q).any());
    }
}
