//! Monotone-chain convex hull and boundary-inclusive containment.

use crate::scenario::ScreenPoint;

pub type Point = [f64; 2];

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Minimal convex polygon around `points`, counterclockwise in (x, y) axes,
/// starting from the lexicographically smallest vertex. Collinear boundary
/// points are dropped; a degenerate set yields one or two vertices.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }

    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Hull of the visible projected vertices; empty when none are visible.
pub fn visible_hull(points: &[ScreenPoint]) -> Vec<Point> {
    let pts: Vec<Point> = points.iter().filter(|p| p.visible).map(|p| [p.x, p.y]).collect();
    convex_hull(&pts)
}

/// Boundary-inclusive test of `p` against a hull from [`convex_hull`].
pub fn point_in_hull(hull: &[Point], p: Point) -> bool {
    let scale = hull
        .iter()
        .flat_map(|q| [q[0].abs(), q[1].abs()])
        .fold(p[0].abs().max(p[1].abs()), f64::max)
        .max(1.0);
    let eps = 1e-12 * scale * scale;
    match hull.len() {
        0 => false,
        1 => (hull[0][0] - p[0]).abs() <= eps.sqrt() && (hull[0][1] - p[1]).abs() <= eps.sqrt(),
        2 => {
            let (a, b) = (hull[0], hull[1]);
            if cross(a, b, p).abs() > eps * 1e3 {
                return false;
            }
            let dot = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
            let len2 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
            dot >= -eps && dot <= len2 + eps
        }
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= -eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_centroid() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn collinear_gives_endpoints() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(h, vec![[0.0, 0.0], [2.0, 2.0]]);
        assert!(point_in_hull(&h, [1.5, 1.5]));
        assert!(!point_in_hull(&h, [1.5, 1.6]));
        assert!(!point_in_hull(&h, [2.5, 2.5]));
    }

    #[test]
    fn collinear_edge_points_removed() {
        let h = convex_hull(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn empty_and_single() {
        assert!(convex_hull(&[]).is_empty());
        assert!(!point_in_hull(&[], [0.0, 0.0]));
        let h = convex_hull(&[[0.3, 0.3], [0.3, 0.3]]);
        assert_eq!(h, vec![[0.3, 0.3]]);
        assert!(point_in_hull(&h, [0.3, 0.3]));
    }

    #[test]
    fn boundary_counts_as_inside() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!(point_in_hull(&h, [0.5, 0.0]));
        assert!(point_in_hull(&h, [1.0, 1.0]));
        assert!(!point_in_hull(&h, [1.0 + 1e-6, 0.5]));
    }

    #[test]
    fn counterclockwise_orientation() {
        let h = convex_hull(&[[0.0, 0.0], [2.0, 0.0], [1.0, 2.0], [1.0, 0.5]]);
        let n = h.len();
        let area2: f64 = (0..n).map(|i| h[i][0] * h[(i + 1) % n][1] - h[(i + 1) % n][0] * h[i][1]).sum();
        assert!(area2 > 0.0);
    }

    #[test]
    fn invisible_points_excluded() {
        let pts = [
            ScreenPoint { x: 0.1, y: 0.1, visible: true },
            ScreenPoint { x: 0.9, y: 0.1, visible: true },
            ScreenPoint { x: 0.5, y: 0.9, visible: true },
            ScreenPoint { x: 5.0, y: 5.0, visible: false },
        ];
        assert_eq!(visible_hull(&pts).len(), 3);
        let hidden = [ScreenPoint::HIDDEN; 8];
        assert!(visible_hull(&hidden).is_empty());
    }
}
