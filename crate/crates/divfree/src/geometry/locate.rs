//! Bucketed point locator for nearest-point, nearest-to-box and radius queries.

use super::shapes::{dist, point_box_distance, Point};

#[derive(Debug, Clone)]
pub struct PointLocator {
    points: Vec<Point>,
    lo: Point,
    cell: f64,
    nb: [usize; 2],
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl PointLocator {
    /// Builds buckets of side `cell`; `cell <= 0` picks roughly 4 points per bucket.
    pub fn new(points: Vec<Point>, cell: f64) -> PointLocator {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let cell = if cell > 0.0 {
            cell
        } else {
            extent / ((points.len() as f64 / 4.0).sqrt().max(1.0))
        };
        let nb = [
            ((hi[0] - lo[0]) / cell).floor() as usize + 1,
            ((hi[1] - lo[1]) / cell).floor() as usize + 1,
        ];
        let mut counts = vec![0usize; nb[0] * nb[1] + 1];
        let bucket_of = |p: &Point| -> usize {
            let bx = (((p[0] - lo[0]) / cell).floor() as usize).min(nb[0] - 1);
            let by = (((p[1] - lo[1]) / cell).floor() as usize).min(nb[1] - 1);
            by * nb[0] + bx
        };
        for p in &points {
            counts[bucket_of(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut order = vec![0usize; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let b = bucket_of(p);
            order[fill[b]] = idx;
            fill[b] += 1;
        }
        PointLocator { points, lo, cell, nb, starts, order }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn bucket(&self, bx: usize, by: usize) -> &[usize] {
        let b = by * self.nb[0] + bx;
        &self.order[self.starts[b]..self.starts[b + 1]]
    }

    fn bucket_box(&self, bx: usize, by: usize) -> (Point, Point) {
        let lo = [self.lo[0] + bx as f64 * self.cell, self.lo[1] + by as f64 * self.cell];
        (lo, [lo[0] + self.cell, lo[1] + self.cell])
    }

    fn clamp_bucket(&self, x: f64, axis: usize) -> usize {
        let f = ((x - self.lo[axis]) / self.cell).floor();
        f.clamp(0.0, (self.nb[axis] - 1) as f64) as usize
    }

    /// Index and distance of the point nearest to `p`.
    pub fn nearest(&self, p: Point) -> Option<(usize, f64)> {
        self.nearest_to_box(p, p)
    }

    /// Index and distance of the point nearest to the closed box `[lo, hi]`.
    pub fn nearest_to_box(&self, lo: Point, hi: Point) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let a0 = [self.clamp_bucket(lo[0], 0), self.clamp_bucket(lo[1], 1)];
        let a1 = [self.clamp_bucket(hi[0], 0), self.clamp_bucket(hi[1], 1)];
        let mut best: Option<(usize, f64)> = None;
        let max_ring = self.nb[0].max(self.nb[1]);
        for ring in 0..=max_ring {
            let mut ring_min = f64::INFINITY;
            let x0 = a0[0] as isize - ring as isize;
            let x1 = a1[0] as isize + ring as isize;
            let y0 = a0[1] as isize - ring as isize;
            let y1 = a1[1] as isize + ring as isize;
            let mut any = false;
            for by in y0.max(0)..=y1.min(self.nb[1] as isize - 1) {
                for bx in x0.max(0)..=x1.min(self.nb[0] as isize - 1) {
                    let on_ring = ring == 0 || bx == x0 || bx == x1 || by == y0 || by == y1;
                    if !on_ring {
                        continue;
                    }
                    any = true;
                    let (blo, bhi) = self.bucket_box(bx as usize, by as usize);
                    let bd = super::shapes::box_box_distance(lo, hi, blo, bhi);
                    ring_min = ring_min.min(bd);
                    if let Some((_, d)) = best {
                        if bd >= d {
                            continue;
                        }
                    }
                    for &idx in self.bucket(bx as usize, by as usize) {
                        let d = point_box_distance(self.points[idx], lo, hi);
                        if best.is_none_or(|(bi, bd)| d < bd || (d == bd && idx < bi)) {
                            best = Some((idx, d));
                        }
                    }
                }
            }
            if !any {
                break;
            }
            if let Some((_, d)) = best {
                if ring_min >= d {
                    break;
                }
            }
        }
        best
    }

    /// Indices of points with `|q - p| < r`, in ascending index order.
    pub fn within(&self, p: Point, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(p, r, |idx, _| out.push(idx));
        out.sort_unstable();
        out
    }

    /// Calls `f(index, distance)` for every point with `|q - p| < r`.
    pub fn for_each_within(&self, p: Point, r: f64, mut f: impl FnMut(usize, f64)) {
        if self.points.is_empty() {
            return;
        }
        let x0 = self.clamp_bucket(p[0] - r, 0);
        let x1 = self.clamp_bucket(p[0] + r, 0);
        let y0 = self.clamp_bucket(p[1] - r, 1);
        let y1 = self.clamp_bucket(p[1] + r, 1);
        for by in y0..=y1 {
            for bx in x0..=x1 {
                for &idx in self.bucket(bx, by) {
                    let d = dist(self.points[idx], p);
                    if d < r {
                        f(idx, d);
                    }
                }
            }
        }
    }
}
