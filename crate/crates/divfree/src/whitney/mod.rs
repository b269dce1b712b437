//! Whitney decomposition of the complement of a compact set into dyadic
//! squares, with nearest points, neighbor lists and a smooth partition of
//! unity.
//!
//! Cube coordinates are integers `(level, ix, iy)` relative to a root
//! square, so adjacency is decided exactly.

pub mod local;
pub mod partition;

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CompactSet, Point, PointLocator};
use crate::grid::Grid;
pub use local::{plateau, smooth_step, Local2};
pub use partition::PartitionConstants;

/// Lower acceptance bound `dist(Q, K) >= sqrt(2) side`.
pub const LOWER_RATIO: f64 = std::f64::consts::SQRT_2;
/// Upper acceptance bound `dist(Q, K) <= 4 sqrt(2) side`.
pub const UPPER_RATIO: f64 = 4.0 * std::f64::consts::SQRT_2;
/// Bound on the number of touching squares in the plane.
pub const MAX_NEIGHBORS: usize = 144;

#[derive(Debug, Error, PartialEq)]
pub enum WhitneyError {
    #[error("cannot decompose the complement of an empty set")]
    EmptySet,
    #[error("box [{box_lo:?}, {box_hi:?}] too small: must contain [{required_lo:?}, {required_hi:?}]")]
    BoxTooSmall { box_lo: Point, box_hi: Point, required_lo: Point, required_hi: Point },
    #[error("cube index {0} out of range ({1} cubes)")]
    InvalidIndex(usize, usize),
    #[error("decomposition was built on a different grid")]
    GridMismatch,
}

/// One dyadic square of the decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cube {
    pub level: u32,
    pub ix: u64,
    pub iy: u64,
    pub center: Point,
    pub side: f64,
    /// Distance from the closed square to `K`.
    pub dist: f64,
    /// Index into [`WhitneyDecomposition::sample_points`] of a nearest sample.
    pub nearest: usize,
    /// Reached the depth cap without satisfying the acceptance band.
    pub unresolved: bool,
}

impl Cube {
    pub fn lo(&self) -> Point {
        [self.center[0] - 0.5 * self.side, self.center[1] - 0.5 * self.side]
    }

    pub fn hi(&self) -> Point {
        [self.center[0] + 0.5 * self.side, self.center[1] + 0.5 * self.side]
    }

    pub fn contains(&self, p: Point) -> bool {
        let (lo, hi) = (self.lo(), self.hi());
        p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitneyParams {
    pub box_lo: Point,
    pub box_hi: Point,
    /// Deepest level; squares there that still violate the band are flagged.
    pub depth_cap: u32,
}

impl WhitneyParams {
    /// Box containing the grid and the unit neighborhood of `K`; depth cap
    /// at the first level with side `<= h / 2`.
    pub fn for_set(k: &CompactSet) -> WhitneyParams {
        let (lo, hi) = sample_bbox(k);
        let up = k.grid.upper();
        let box_lo = [(lo[0] - 1.0).min(k.grid.origin[0]), (lo[1] - 1.0).min(k.grid.origin[1])];
        let box_hi = [(hi[0] + 1.0).max(up[0]), (hi[1] + 1.0).max(up[1])];
        let side = root_side(box_lo, box_hi);
        WhitneyParams { box_lo, box_hi, depth_cap: depth_for(side, 0.5 * k.grid.h()) }
    }

    /// Box equal to the grid's bounding box.
    pub fn grid_box(k: &CompactSet) -> WhitneyParams {
        let side = root_side(k.grid.origin, k.grid.upper());
        WhitneyParams { box_lo: k.grid.origin, box_hi: k.grid.upper(), depth_cap: depth_for(side, 0.5 * k.grid.h()) }
    }
}

fn root_side(lo: Point, hi: Point) -> f64 {
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    2f64.powi(extent.log2().ceil() as i32)
}

/// Smallest level whose side is at most `target`.
fn depth_for(root: f64, target: f64) -> u32 {
    let mut level = 0;
    while root / 2f64.powi(level as i32) > target * (1.0 + 1e-12) {
        level += 1;
    }
    level
}

fn sample_bbox(k: &CompactSet) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in k.sample_points() {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    for s in &k.primitives {
        let (a, b) = s.bounding_box();
        for ax in 0..2 {
            lo[ax] = lo[ax].min(a[ax]);
            hi[ax] = hi[ax].max(b[ax]);
        }
    }
    (lo, hi)
}

/// Whitney decomposition of `root \ K`.
#[derive(Debug, Clone)]
pub struct WhitneyDecomposition {
    pub grid: Grid,
    pub root_lo: Point,
    pub root_side: f64,
    pub depth_cap: u32,
    /// Squares in Morton order.
    pub cubes: Vec<Cube>,
    pub neighbors: Vec<Vec<usize>>,
    /// Grid node indices of the samples of `K`.
    pub samples: Vec<usize>,
    pub sample_points: Vec<Point>,
    index: HashMap<(u32, u64, u64), usize>,
}

struct DistanceOracle<'a> {
    k: &'a CompactSet,
    locator: PointLocator,
}

impl DistanceOracle<'_> {
    fn box_distance(&self, lo: Point, hi: Point) -> f64 {
        match self.k.analytic_box_distance(lo, hi) {
            Some(d) => d,
            None => self.locator.nearest_to_box(lo, hi).map_or(f64::INFINITY, |(_, d)| d),
        }
    }

    /// Square lies inside `K` (so it is not part of the complement).
    fn inside(&self, lo: Point, hi: Point) -> bool {
        if !self.k.primitives.is_empty() {
            let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
            return self.k.primitives.iter().any(|s| match s {
                crate::geometry::Shape::Disk { .. } => corners.iter().all(|&c| s.distance(c) == 0.0),
                crate::geometry::Shape::Polyline { .. } => false,
            });
        }
        // Mask-only sets: every node of the square grown by one spacing is in K.
        let g = &self.k.grid;
        let h = g.h();
        let (glo, gup) = (g.origin, g.upper());
        if lo[0] < glo[0] || lo[1] < glo[1] || hi[0] > gup[0] || hi[1] > gup[1] {
            return false;
        }
        match g.node_range([lo[0] - h, lo[1] - h], [hi[0] + h, hi[1] + h]) {
            None => false,
            Some((a, b)) => (a[1]..=b[1]).all(|j| (a[0]..=b[0]).all(|i| self.k.mask[g.index(i, j)])),
        }
    }
}

/// Builds the decomposition by top-down splitting of the root square.
///
/// A square is accepted when `sqrt(2) side <= dist <= 4 sqrt(2) side`,
/// split when closer, and flagged unresolved at the depth cap. Squares
/// inside `K` are dropped.
pub fn whitney_decompose(k: &CompactSet, params: &WhitneyParams) -> Result<WhitneyDecomposition, WhitneyError> {
    if k.empty {
        return Err(WhitneyError::EmptySet);
    }
    let (need_lo, need_hi) = sample_bbox(k);
    let tol = 1e-12;
    if params.box_lo[0] > need_lo[0] + tol
        || params.box_lo[1] > need_lo[1] + tol
        || params.box_hi[0] < need_hi[0] - tol
        || params.box_hi[1] < need_hi[1] - tol
    {
        return Err(WhitneyError::BoxTooSmall {
            box_lo: params.box_lo,
            box_hi: params.box_hi,
            required_lo: need_lo,
            required_hi: need_hi,
        });
    }
    let side = root_side(params.box_lo, params.box_hi);
    let center = [0.5 * (params.box_lo[0] + params.box_hi[0]), 0.5 * (params.box_lo[1] + params.box_hi[1])];
    let root_lo = [center[0] - 0.5 * side, center[1] - 0.5 * side];

    let samples = k.samples();
    let sample_points: Vec<Point> = samples.iter().map(|&s| k.grid.point(s)).collect();
    let locator = PointLocator::new(sample_points.clone(), 2.0 * k.grid.h());
    let oracle = DistanceOracle { k, locator };

    let mut cubes = Vec::new();
    // Depth-first in Z order, so output is in Morton order.
    let mut stack = vec![(0u32, 0u64, 0u64)];
    while let Some((level, ix, iy)) = stack.pop() {
        let s = side / 2f64.powi(level as i32);
        let lo = [root_lo[0] + ix as f64 * s, root_lo[1] + iy as f64 * s];
        let hi = [lo[0] + s, lo[1] + s];
        let dist = oracle.box_distance(lo, hi);
        let accept = (LOWER_RATIO * s..=UPPER_RATIO * s).contains(&dist);
        if !accept && level < params.depth_cap {
            for (dx, dy) in [(1, 1), (0, 1), (1, 0), (0, 0)] {
                stack.push((level + 1, 2 * ix + dx, 2 * iy + dy));
            }
            continue;
        }
        if !accept && oracle.inside(lo, hi) {
            continue;
        }
        let nearest = oracle.locator.nearest_to_box(lo, hi).map_or(0, |(i, _)| i);
        cubes.push(Cube {
            level,
            ix,
            iy,
            center: [lo[0] + 0.5 * s, lo[1] + 0.5 * s],
            side: s,
            dist,
            nearest,
            unresolved: !accept,
        });
    }
    let index: HashMap<(u32, u64, u64), usize> =
        cubes.iter().enumerate().map(|(n, c)| ((c.level, c.ix, c.iy), n)).collect();
    let mut dec = WhitneyDecomposition {
        grid: k.grid,
        root_lo,
        root_side: side,
        depth_cap: params.depth_cap,
        cubes,
        neighbors: Vec::new(),
        samples,
        sample_points,
        index,
    };
    dec.neighbors = (0..dec.cubes.len()).map(|n| dec.touching(n)).collect();
    Ok(dec)
}

/// Closed squares `[a0, a1]` and `[b0, b1]` at a common level touch.
fn intervals_meet(a0: u64, a1: u64, b0: u64, b1: u64) -> bool {
    a0 <= b1 && b0 <= a1
}

impl WhitneyDecomposition {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn n_unresolved(&self) -> usize {
        self.cubes.iter().filter(|c| c.unresolved).count()
    }

    /// `N(k)`: indices of squares whose closed boundary meets square `k`.
    pub fn neighbors(&self, k: usize) -> Result<&[usize], WhitneyError> {
        self.neighbors.get(k).map(Vec::as_slice).ok_or(WhitneyError::InvalidIndex(k, self.cubes.len()))
    }

    pub fn cube_at(&self, level: u32, ix: u64, iy: u64) -> Option<usize> {
        self.index.get(&(level, ix, iy)).copied()
    }

    /// Enumerates candidate touchers up to four levels coarser or finer.
    /// Touching squares differ by at most a factor 4 in side, so this is
    /// exhaustive for decompositions built by [`whitney_decompose`].
    fn touching(&self, n: usize) -> Vec<usize> {
        let c = &self.cubes[n];
        let mut out = Vec::new();
        let lmin = c.level.saturating_sub(4);
        let lmax = (c.level + 4).min(self.depth_cap);
        for level in lmin..=lmax {
            if level >= c.level {
                let f = 1u64 << (level - c.level);
                // Ring of level-`level` squares around c, in c's refined coordinates.
                let (x0, y0) = (c.ix * f, c.iy * f);
                let xs = x0.saturating_sub(1)..=x0 + f;
                for x in xs {
                    for y in y0.saturating_sub(1)..=y0 + f {
                        let inside = x >= x0 && x < x0 + f && y >= y0 && y < y0 + f;
                        if inside {
                            continue;
                        }
                        if let Some(&m) = self.index.get(&(level, x, y)) {
                            if m != n {
                                out.push(m);
                            }
                        }
                    }
                }
            } else {
                let f = 1u64 << (c.level - level);
                // Coarser squares containing points of the closed ring of c.
                let (cx, cy) = (c.ix / f, c.iy / f);
                for x in cx.saturating_sub(1)..=cx + 1 {
                    for y in cy.saturating_sub(1)..=cy + 1 {
                        if let Some(&m) = self.index.get(&(level, x, y)) {
                            // Exact closed-square touch test at c's level.
                            let (a0, a1) = (x * f, (x + 1) * f);
                            let (b0, b1) = (y * f, (y + 1) * f);
                            if intervals_meet(a0, a1, c.ix, c.ix + 1) && intervals_meet(b0, b1, c.iy, c.iy + 1) {
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Leaf square containing `p` (closed squares; lowest level wins).
    pub fn locate(&self, p: Point) -> Option<usize> {
        let tx = (p[0] - self.root_lo[0]) / self.root_side;
        let ty = (p[1] - self.root_lo[1]) / self.root_side;
        if !(0.0..=1.0).contains(&tx) || !(0.0..=1.0).contains(&ty) {
            return None;
        }
        for level in 0..=self.depth_cap {
            let n = (1u64 << level) as f64;
            let ix = ((tx * n).floor() as u64).min((1u64 << level) - 1);
            let iy = ((ty * n).floor() as u64).min((1u64 << level) - 1);
            if let Some(&k) = self.index.get(&(level, ix, iy)) {
                return Some(k);
            }
        }
        None
    }

    /// Writes `k,center_x,center_y,side,level,y_k_x,y_k_y,n_neighbors` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "center_x", "center_y", "side", "level", "y_k_x", "y_k_y", "n_neighbors"])?;
        for (n, c) in self.cubes.iter().enumerate() {
            let y = self.sample_points[c.nearest];
            w.write_record([
                n.to_string(),
                c.center[0].to_string(),
                c.center[1].to_string(),
                c.side.to_string(),
                c.level.to_string(),
                y[0].to_string(),
                y[1].to_string(),
                self.neighbors[n].len().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of checking the Whitney properties on one decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhitneyCheck {
    pub n_cubes: usize,
    pub n_unresolved: usize,
    /// Resolved squares outside `sqrt(2) <= dist / side <= 4 sqrt(2)`.
    pub band_violations: usize,
    pub min_dist_ratio: f64,
    pub max_dist_ratio: f64,
    /// Touching pairs with side ratio outside `[1/4, 4]`.
    pub ratio_violations: usize,
    pub max_neighbors: usize,
    /// Squares whose interiors overlap another square (must be 0).
    pub overlaps: usize,
    /// `|dist(Q, y_k) - dist(Q, K)|` maximum.
    pub nearest_error: f64,
}

impl WhitneyCheck {
    pub fn passes(&self) -> bool {
        self.band_violations == 0 && self.ratio_violations == 0 && self.max_neighbors <= MAX_NEIGHBORS && self.overlaps == 0
    }
}

/// Verifies the acceptance band, touching ratios, neighbor counts and
/// disjointness of interiors.
pub fn check_decomposition(dec: &WhitneyDecomposition) -> WhitneyCheck {
    let mut out = WhitneyCheck {
        n_cubes: dec.len(),
        n_unresolved: dec.n_unresolved(),
        band_violations: 0,
        min_dist_ratio: f64::INFINITY,
        max_dist_ratio: 0.0,
        ratio_violations: 0,
        max_neighbors: 0,
        overlaps: 0,
        nearest_error: 0.0,
    };
    for (n, c) in dec.cubes.iter().enumerate() {
        let y = dec.sample_points[c.nearest];
        let dy = crate::geometry::shapes::point_box_distance(y, c.lo(), c.hi());
        out.nearest_error = out.nearest_error.max((dy - c.dist).abs());
        if !c.unresolved {
            let r = c.dist / c.side;
            out.min_dist_ratio = out.min_dist_ratio.min(r);
            out.max_dist_ratio = out.max_dist_ratio.max(r);
            if !(LOWER_RATIO * c.side..=UPPER_RATIO * c.side).contains(&c.dist) {
                out.band_violations += 1;
            }
        }
        out.max_neighbors = out.max_neighbors.max(dec.neighbors[n].len());
        for &m in &dec.neighbors[n] {
            let r = c.side / dec.cubes[m].side;
            if !(0.25..=4.0).contains(&r) {
                out.ratio_violations += 1;
            }
        }
        // A strictly coarser ancestor present in the index means overlap.
        for level in 0..c.level {
            let f = 1u64 << (c.level - level);
            if dec.index.contains_key(&(level, c.ix / f, c.iy / f)) {
                out.overlaps += 1;
            }
        }
    }
    out
}
