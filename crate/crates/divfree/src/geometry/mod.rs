//! Compact sets on grids: rasterization, components, distances, neighborhoods,
//! the Koch-type curve and separated preimage covers.

pub mod cover;
pub mod edt;
pub mod koch;
pub mod locate;
pub mod shapes;

use std::collections::VecDeque;

use thiserror::Error;

use crate::grid::{Grid, ScalarField};
pub use cover::{separated_preimage_cover, PreimageCover};
pub use koch::{koch_curve, KochCurve};
pub use locate::PointLocator;
pub use shapes::{Point, Shape};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("primitive #{index} ({shape}) is not inside the grid interior")]
    PrimitiveOutsideGrid { index: usize, shape: String },
    #[error("distance to empty set undefined")]
    EmptySet,
    #[error("segment ratio a = {0} outside [1/4, 1/2)")]
    KochRatio(f64),
    #[error("neighborhood radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("intervals overlap or touch: ({0}, {1}) and ({2}, {3})")]
    OverlappingIntervals(f64, f64, f64, f64),
    #[error("potential value {value} at K sample ({x}, {y}) lies in no interval")]
    UncoveredValue { value: f64, x: f64, y: f64 },
    #[error("K samples of different covers are closer than the required gap {gap}")]
    CoversTooClose { gap: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// A compact set `K` sampled on a grid, with optional analytic primitives.
#[derive(Debug, Clone)]
pub struct CompactSet {
    pub grid: Grid,
    pub mask: Vec<bool>,
    pub primitives: Vec<Shape>,
    /// Component label per node: 0 outside `K`, `1..=n_components` inside.
    pub labels: Vec<u32>,
    pub n_components: u32,
    pub diam: f64,
    pub empty: bool,
}

impl CompactSet {
    /// Builds a set from an explicit mask; components and diameter are derived.
    pub fn from_mask(grid: Grid, mask: Vec<bool>) -> CompactSet {
        let (labels, n_components) = label_components(&grid, &mask);
        let diam = mask_diameter(&grid, &mask);
        let empty = !mask.iter().any(|&m| m);
        CompactSet { grid, mask, primitives: Vec::new(), labels, n_components, diam, empty }
    }

    /// Node indices of the samples of `K`, ascending.
    pub fn samples(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&k| self.mask[k]).collect()
    }

    pub fn sample_points(&self) -> Vec<Point> {
        self.samples().into_iter().map(|k| self.grid.point(k)).collect()
    }

    pub fn n_samples(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Analytic distance to `K` when primitives are present.
    pub fn analytic_distance(&self, p: Point) -> Option<f64> {
        if self.primitives.is_empty() {
            return None;
        }
        Some(self.primitives.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min))
    }

    /// Analytic distance from a closed box to `K` when primitives are present.
    pub fn analytic_box_distance(&self, lo: Point, hi: Point) -> Option<f64> {
        if self.primitives.is_empty() {
            return None;
        }
        Some(
            self.primitives
                .iter()
                .map(|s| s.distance_to_box(lo, hi))
                .fold(f64::INFINITY, f64::min),
        )
    }

    /// Mask of one component.
    pub fn component_mask(&self, label: u32) -> Vec<bool> {
        self.labels.iter().map(|&l| l == label).collect()
    }

    /// Sub-set made of the listed components; primitives are kept when each
    /// one rasterizes inside the selection.
    pub fn select_components(&self, labels: &[u32]) -> CompactSet {
        let mask: Vec<bool> = self.labels.iter().map(|l| labels.contains(l)).collect();
        let mut out = CompactSet::from_mask(self.grid, mask);
        out.primitives = self
            .primitives
            .iter()
            .filter(|s| {
                let c = s.nearest_point(s.bounding_box().0);
                let (i, j) = self.grid.nearest_node(c);
                let l = self.labels[self.grid.index(i, j)];
                labels.contains(&l)
            })
            .cloned()
            .collect();
        out
    }

    /// Union of two sets on the same grid.
    pub fn union(&self, other: &CompactSet) -> Result<CompactSet, GeometryError> {
        if self.grid != other.grid {
            return Err(GeometryError::GridMismatch);
        }
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| a || b).collect();
        let mut out = CompactSet::from_mask(self.grid, mask);
        out.primitives = self.primitives.iter().chain(&other.primitives).cloned().collect();
        Ok(out)
    }
}

/// Rasterizes `primitives` on `grid` and labels components (4-connectivity).
pub fn make_compact_set(primitives: &[Shape], grid: Grid) -> Result<CompactSet, GeometryError> {
    let up = grid.upper();
    for (index, s) in primitives.iter().enumerate() {
        let (lo, hi) = s.bounding_box();
        let inside = lo[0] > grid.origin[0]
            && lo[1] > grid.origin[1]
            && hi[0] < up[0]
            && hi[1] < up[1];
        if !inside {
            return Err(GeometryError::PrimitiveOutsideGrid { index, shape: format!("{s:?}") });
        }
    }
    let h = grid.h();
    let mut mask = vec![false; grid.n_nodes()];
    for s in primitives {
        let (lo, hi) = s.bounding_box();
        let pad = h;
        if let Some((a, b)) = grid.node_range([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad]) {
            for j in a[1]..=b[1] {
                for i in a[0]..=b[0] {
                    let idx = grid.index(i, j);
                    if !mask[idx] && s.covers_node(grid.node(i, j), h) {
                        mask[idx] = true;
                    }
                }
            }
        }
    }
    let mut set = CompactSet::from_mask(grid, mask);
    set.primitives = primitives.to_vec();
    Ok(set)
}

/// Distance from every node to the nearest sample of `K` (exact for the mask).
pub fn distance_field(k: &CompactSet) -> Result<ScalarField, GeometryError> {
    if k.empty {
        return Err(GeometryError::EmptySet);
    }
    Ok(mask_distance(&k.grid, &k.mask))
}

pub(crate) fn mask_distance(grid: &Grid, mask: &[bool]) -> ScalarField {
    let sq = edt::squared_distance_transform(mask, grid.nx(), grid.ny());
    let h = grid.h();
    ScalarField { grid: *grid, values: sq.into_iter().map(|d| d.sqrt() * h).collect() }
}

/// Open `delta`-neighborhood `{x : dist(x, K) < delta}` joined with `K`.
pub fn neighborhood(k: &CompactSet, delta: f64) -> Result<CompactSet, GeometryError> {
    if delta < 0.0 {
        return Err(GeometryError::NegativeRadius(delta));
    }
    let d = distance_field(k)?;
    let mask = d.values.iter().zip(&k.mask).map(|(&v, &m)| m || v < delta).collect();
    Ok(CompactSet::from_mask(k.grid, mask))
}

/// 4-connected component labels, numbered in order of first node index.
pub fn label_components(grid: &Grid, mask: &[bool]) -> (Vec<u32>, u32) {
    let mut labels = vec![0u32; mask.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            for nb in grid.neighbors4(idx) {
                if mask[nb] && labels[nb] == 0 {
                    labels[nb] = next;
                    queue.push_back(nb);
                }
            }
        }
    }
    (labels, next)
}

/// Largest distance between two masked nodes (convex hull of row extremes).
pub fn mask_diameter(grid: &Grid, mask: &[bool]) -> f64 {
    let nx = grid.nx();
    let mut candidates = Vec::new();
    for j in 0..grid.ny() {
        let row = &mask[j * nx..(j + 1) * nx];
        if let Some(first) = row.iter().position(|&m| m) {
            let last = row.iter().rposition(|&m| m).unwrap_or(first);
            candidates.push(grid.node(first, j));
            if last != first {
                candidates.push(grid.node(last, j));
            }
        }
    }
    let hull = convex_hull(candidates);
    let mut best = 0.0f64;
    for a in 0..hull.len() {
        for b in a + 1..hull.len() {
            best = best.max(shapes::dist(hull[a], hull[b]));
        }
    }
    best
}

fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
