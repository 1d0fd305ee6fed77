//! Pinhole projection of truck and sign cuboids into normalised screen space.
//!
//! Screen coordinates are normalised to `[0,1]²` with the origin at the top
//! left, the same frame the gaze stream uses. Coordinates of points in front
//! of the camera are stored unclamped: a vertex may land outside the
//! viewport while its hull still covers on-screen pixels.

use serde::{Deserialize, Serialize};

use super::vehicle::{TruckGeometry, VehicleState};

/// Number of vertices of a cuboid.
pub const VERTICES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    /// ft behind the ego's front bumper.
    pub eye_back: f64,
    /// ft above the road.
    pub eye_up: f64,
    /// degrees
    pub horizontal_fov: f64,
    /// Viewport width / height.
    pub aspect: f64,
    /// ft; vertices closer than this along the view axis are invisible.
    pub near: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self {
            eye_back: 1.5,
            eye_up: 4.0,
            horizontal_fov: 60.0,
            aspect: 16.0 / 9.0,
            near: 0.5,
        }
    }
}

impl CameraSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.horizontal_fov > 0.0 && self.horizontal_fov < 180.0) {
            return Err(format!("horizontal_fov must lie in (0, 180), got {}", self.horizontal_fov));
        }
        if !(self.aspect > 0.0) || !(self.near > 0.0) {
            return Err("camera aspect and near plane must be positive".into());
        }
        Ok(())
    }

    fn tan_half_h(&self) -> f64 {
        (self.horizontal_fov.to_radians() / 2.0).tan()
    }

    fn tan_half_v(&self) -> f64 {
        self.tan_half_h() / self.aspect
    }

    /// Projects a point given in camera axes (forward, right, up), feet.
    pub fn project_camera_point(&self, forward: f64, right: f64, up: f64) -> ScreenPoint {
        if forward < self.near {
            return ScreenPoint::HIDDEN;
        }
        let x = 0.5 + right / (forward * 2.0 * self.tan_half_h());
        let y = 0.5 - up / (forward * 2.0 * self.tan_half_v());
        ScreenPoint { x, y, visible: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenPoint {
    pub x: f64,
    pub y: f64,
    /// False when the vertex is behind the near plane.
    pub visible: bool,
}

impl ScreenPoint {
    pub const HIDDEN: ScreenPoint = ScreenPoint { x: 0.0, y: 0.0, visible: false };

    pub fn on_screen(&self) -> bool {
        self.visible && (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

/// Axis-aligned box in world coordinates: `s` along the road, `y` lateral
/// (positive left), `h` height. Stored as (min, max) per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cuboid {
    pub s: (f64, f64),
    pub y: (f64, f64),
    pub h: (f64, f64),
}

impl Cuboid {
    /// Vertex order: rear face then front face; within a face
    /// (right,bottom), (left,bottom), (left,top), (right,top).
    pub fn vertices(&self) -> [[f64; 3]; VERTICES] {
        let mut out = [[0.0; 3]; VERTICES];
        let face = [(self.y.0, self.h.0), (self.y.1, self.h.0), (self.y.1, self.h.1), (self.y.0, self.h.1)];
        for (k, s) in [self.s.0, self.s.1].into_iter().enumerate() {
            for (j, &(y, h)) in face.iter().enumerate() {
                out[k * 4 + j] = [s, y, h];
            }
        }
        out
    }

    pub fn contains(&self, other: &Cuboid) -> bool {
        let within = |a: (f64, f64), b: (f64, f64)| a.0 <= b.0 && b.1 <= a.1;
        within(self.s, other.s) && within(self.y, other.y) && within(self.h, other.h)
    }

    pub fn truck_body(truck: &VehicleState, lateral: f64, geom: &TruckGeometry) -> Cuboid {
        Cuboid {
            s: (truck.s - geom.length, truck.s),
            y: (lateral - geom.width / 2.0, lateral + geom.width / 2.0),
            h: (0.0, geom.height),
        }
    }

    pub fn truck_sign(truck: &VehicleState, lateral: f64, geom: &TruckGeometry) -> Cuboid {
        let rear = truck.s - geom.length;
        Cuboid {
            s: (rear, rear + geom.sign_depth),
            y: (lateral - geom.sign_width / 2.0, lateral + geom.sign_width / 2.0),
            h: (geom.sign_bottom, geom.sign_bottom + geom.sign_height),
        }
    }
}

/// Projected vertices of the four ATMA objects in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenQuadSet {
    pub follower: [ScreenPoint; VERTICES],
    pub lead: [ScreenPoint; VERTICES],
    pub follower_sign: [ScreenPoint; VERTICES],
    pub lead_sign: [ScreenPoint; VERTICES],
}

impl ScreenQuadSet {
    pub fn hidden() -> Self {
        let h = [ScreenPoint::HIDDEN; VERTICES];
        Self { follower: h, lead: h, follower_sign: h, lead_sign: h }
    }
}

/// Eye position in world coordinates `(s, y, h)`.
pub fn eye_position(ego: &VehicleState, ego_lateral: f64, camera: &CameraSpec) -> [f64; 3] {
    [ego.s - camera.eye_back, ego_lateral, camera.eye_up]
}

/// Projects every vertex of `cuboid` for a camera at `eye` looking down +s.
pub fn project_cuboid(cuboid: &Cuboid, eye: [f64; 3], camera: &CameraSpec) -> [ScreenPoint; VERTICES] {
    let mut out = [ScreenPoint::HIDDEN; VERTICES];
    for (p, v) in out.iter_mut().zip(cuboid.vertices()) {
        let forward = v[0] - eye[0];
        let right = -(v[1] - eye[1]);
        let up = v[2] - eye[2];
        *p = camera.project_camera_point(forward, right, up);
    }
    out
}

/// Projects the follower, lead and both signs as seen from the ego's eye.
pub fn project_cuboids(world: &super::WorldState, camera: &CameraSpec) -> ScreenQuadSet {
    let (Some(ego), Some(follower), Some(lead)) = (world.ego(), world.follower(), world.lead()) else {
        return ScreenQuadSet::hidden();
    };
    let w = world.road.lane_width;
    let geom = &world.truck_geometry;
    let eye = eye_position(ego, ego.lateral(w), camera);
    let fy = follower.lateral(w);
    let ly = lead.lateral(w);
    ScreenQuadSet {
        follower: project_cuboid(&Cuboid::truck_body(follower, fy, geom), eye, camera),
        lead: project_cuboid(&Cuboid::truck_body(lead, ly, geom), eye, camera),
        follower_sign: project_cuboid(&Cuboid::truck_sign(follower, fy, geom), eye, camera),
        lead_sign: project_cuboid(&Cuboid::truck_sign(lead, ly, geom), eye, camera),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centered_box(dist: f64, half: f64) -> Cuboid {
        Cuboid { s: (dist, dist + 2.0 * half), y: (-half, half), h: (4.0 - half, 4.0 + half) }
    }

    #[test]
    fn symmetric_about_center() {
        let cam = CameraSpec::default();
        let pts = project_cuboid(&centered_box(100.0, 2.0), [0.0, 0.0, 4.0], &cam);
        // Vertices 0/1 and 3/2 are left-right mirror pairs on each face.
        for face in [0, 4] {
            for (a, b) in [(face, face + 1), (face + 3, face + 2)] {
                assert!((pts[a].x - 0.5 + (pts[b].x - 0.5)).abs() < 1e-9);
                assert!((pts[a].y - pts[b].y).abs() < 1e-9);
            }
            assert!((pts[face].y - 0.5 + (pts[face + 3].y - 0.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_doubling_halves_height() {
        let cam = CameraSpec::default();
        let eye = [0.0, 0.0, 4.0];
        let height = |d: f64| {
            let c = Cuboid { s: (d, d + 0.01), y: (-1.0, 1.0), h: (3.0, 5.0) };
            let p = project_cuboid(&c, eye, &cam);
            (p[0].y - p[3].y).abs()
        };
        let ratio = height(200.0) / height(400.0);
        assert!((ratio - 2.0).abs() / 2.0 < 0.01, "ratio {ratio}");
    }

    #[test]
    fn behind_camera_is_hidden() {
        let cam = CameraSpec::default();
        let c = Cuboid { s: (-10.0, 5.0), y: (-1.0, 1.0), h: (0.0, 2.0) };
        let p = project_cuboid(&c, [0.0, 0.0, 4.0], &cam);
        assert!(p[..4].iter().all(|v| !v.visible));
        assert!(p[4..].iter().all(|v| v.visible));
    }

    #[test]
    fn fov_edge_maps_to_screen_edge() {
        let cam = CameraSpec::default();
        let t = (30f64).to_radians().tan();
        let p = cam.project_camera_point(10.0, 10.0 * t, 0.0);
        assert!((p.x - 1.0).abs() < 1e-12);
        let p = cam.project_camera_point(10.0, 0.0, 10.0 * t / cam.aspect);
        assert!(p.y.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_fov() {
        for fov in [0.0, 180.0, -5.0] {
            let c = CameraSpec { horizontal_fov: fov, ..CameraSpec::default() };
            assert!(c.validate().is_err());
        }
    }
}
