//! Analytic primitives and the small amount of planar geometry they need.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

/// Closed analytic shape hosted by a [`super::CompactSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disk { center: Point, radius: f64 },
    Polyline { points: Vec<Point> },
}

impl Shape {
    pub fn disk(center: Point, radius: f64) -> Shape {
        Shape::Disk { center, radius }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Shape::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Polyline { points } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for p in points {
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Euclidean distance from `p` to the shape (zero inside a disk).
    pub fn distance(&self, p: Point) -> f64 {
        match self {
            Shape::Disk { center, radius } => (dist(p, *center) - radius).max(0.0),
            Shape::Polyline { points } => segments(points)
                .map(|(a, b)| point_segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Distance from the closed box `[lo, hi]` to the shape.
    pub fn distance_to_box(&self, lo: Point, hi: Point) -> f64 {
        match self {
            Shape::Disk { center, radius } => (point_box_distance(*center, lo, hi) - radius).max(0.0),
            Shape::Polyline { points } => segments(points)
                .map(|(a, b)| segment_box_distance(a, b, lo, hi))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Point of the shape closest to `p`.
    pub fn nearest_point(&self, p: Point) -> Point {
        match self {
            Shape::Disk { center, radius } => {
                let d = dist(p, *center);
                if d <= *radius {
                    p
                } else {
                    let t = radius / d;
                    [center[0] + t * (p[0] - center[0]), center[1] + t * (p[1] - center[1])]
                }
            }
            Shape::Polyline { points } => {
                let mut best = (f64::INFINITY, points[0]);
                for (a, b) in segments(points) {
                    let q = project_on_segment(p, a, b);
                    let d = dist(p, q);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                best.1
            }
        }
    }

    /// Rasterization membership of a grid node with spacing `h`.
    ///
    /// Disks use the closed-shape rule on the node itself. Curves have no
    /// area, so a node belongs to a polyline when its closed dual cell
    /// `[x - h/2, x + h/2]^2` meets the curve; the result is 4-connected.
    pub fn covers_node(&self, x: Point, h: f64) -> bool {
        match self {
            Shape::Disk { center, radius } => dist(x, *center) <= radius * (1.0 + 1e-14),
            Shape::Polyline { points } => {
                let lo = [x[0] - 0.5 * h, x[1] - 0.5 * h];
                let hi = [x[0] + 0.5 * h, x[1] + 0.5 * h];
                segments(points).any(|(a, b)| segment_hits_box(a, b, lo, hi))
            }
        }
    }

    /// Perimeter of a disk or length of a polyline.
    pub fn length(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => 2.0 * std::f64::consts::PI * radius,
            Shape::Polyline { points } => segments(points).map(|(a, b)| dist(a, b)).sum(),
        }
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn segments(points: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    points.windows(2).map(|w| (w[0], w[1]))
}

pub fn project_on_segment(p: Point, a: Point, b: Point) -> Point {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * d[0], a[1] + t * d[1]]
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    dist(p, project_on_segment(p, a, b))
}

pub fn point_box_distance(p: Point, lo: Point, hi: Point) -> f64 {
    let dx = (lo[0] - p[0]).max(0.0).max(p[0] - hi[0]);
    let dy = (lo[1] - p[1]).max(0.0).max(p[1] - hi[1]);
    dx.hypot(dy)
}

/// Distance between two closed axis-aligned boxes.
pub fn box_box_distance(lo1: Point, hi1: Point, lo2: Point, hi2: Point) -> f64 {
    let dx = (lo2[0] - hi1[0]).max(lo1[0] - hi2[0]).max(0.0);
    let dy = (lo2[1] - hi1[1]).max(lo1[1] - hi2[1]).max(0.0);
    dx.hypot(dy)
}

/// Liang-Barsky clipping test of a segment against a closed box.
pub fn segment_hits_box(a: Point, b: Point, lo: Point, hi: Point) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for ax in 0..2 {
        if d[ax] == 0.0 {
            if a[ax] < lo[ax] || a[ax] > hi[ax] {
                return false;
            }
            continue;
        }
        let mut ta = (lo[ax] - a[ax]) / d[ax];
        let mut tb = (hi[ax] - a[ax]) / d[ax];
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

pub fn segment_box_distance(a: Point, b: Point, lo: Point, hi: Point) -> f64 {
    if segment_hits_box(a, b, lo, hi) {
        return 0.0;
    }
    let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
    let from_corners = corners
        .iter()
        .map(|&c| point_segment_distance(c, a, b))
        .fold(f64::INFINITY, f64::min);
    from_corners
        .min(point_box_distance(a, lo, hi))
        .min(point_box_distance(b, lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_distances() {
        let d = Shape::disk([0.0, 0.0], 0.3);
        assert_relative_eq!(d.distance([1.0, 0.0]), 0.7, epsilon = 1e-15);
        assert_eq!(d.distance([0.1, 0.1]), 0.0);
        assert_relative_eq!(d.distance_to_box([0.5, -0.1], [0.6, 0.1]), 0.2, epsilon = 1e-15);
        assert_relative_eq!(d.nearest_point([2.0, 0.0])[0], 0.3);
    }

    #[test]
    fn segment_box_geometry() {
        let (a, b) = ([0.0, 0.0], [1.0, 0.0]);
        assert!(segment_hits_box(a, b, [0.5, -0.1], [0.6, 0.1]));
        assert!(!segment_hits_box(a, b, [0.5, 0.1], [0.6, 0.2]));
        assert_relative_eq!(segment_box_distance(a, b, [0.5, 0.1], [0.6, 0.2]), 0.1, epsilon = 1e-15);
        assert_relative_eq!(segment_box_distance(a, b, [2.0, 1.0], [3.0, 2.0]), 2f64.sqrt());
        assert_relative_eq!(box_box_distance([0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]), 2f64.sqrt());
    }

    #[test]
    fn polyline_node_cover_uses_dual_cells() {
        let line = Shape::Polyline { points: vec![[0.0, 0.0], [1.0, 0.0]] };
        assert!(line.covers_node([0.5, 0.04], 0.1));
        assert!(line.covers_node([0.5, 0.05], 0.1));
        assert!(!line.covers_node([0.5, 0.06], 0.1));
    }
}
