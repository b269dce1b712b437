//! Sup-type pair sweeps: exact below a size threshold, stratified above.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{shapes::dist, PointLocator, Point};

/// Point count above which sweeps switch to the stratified mode.
pub const EXACT_SWEEP_LIMIT: usize = 20_000;

/// Anchors swept against every partner in stratified mode.
pub const STRATIFIED_ANCHORS: usize = 1_500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SweepMode {
    Exact,
    /// Random anchors against all partners, plus every pair closer than
    /// `near_radius` (the smallest distance decades) for every point.
    Stratified { anchors: usize, near_radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepResult {
    pub value: f64,
    pub mode: SweepMode,
    pub pairs: u64,
}

/// `max f(i, j)` over unordered pairs `i < j` of `points`.
///
/// `f` should be symmetric or fold both orders itself. NaN results are skipped.
pub fn pair_sup<F>(points: &[Point], f: F, seed: u64) -> SweepResult
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = points.len();
    if n <= EXACT_SWEEP_LIMIT {
        pair_sup_exact(n, &f)
    } else {
        pair_sup_stratified(points, &f, seed, STRATIFIED_ANCHORS)
    }
}

pub fn pair_sup_exact<F>(n: usize, f: &F) -> SweepResult
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let value = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in i + 1..n {
                let v = f(i, j);
                if v > best {
                    best = v;
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
    SweepResult { value, mode: SweepMode::Exact, pairs }
}

pub fn pair_sup_stratified<F>(points: &[Point], f: &F, seed: u64, anchors: usize) -> SweepResult
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = points.len();
    let anchors = anchors.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, n, anchors).into_vec();
    chosen.sort_unstable();
    let locator = PointLocator::new(points.to_vec(), 0.0);
    let near_radius = 3.0 * typical_spacing(points, &locator);

    let far = chosen
        .par_iter()
        .map(|&i| {
            let mut best = 0.0f64;
            for j in 0..n {
                if j != i {
                    let v = if i < j { f(i, j) } else { f(j, i) };
                    if v > best {
                        best = v;
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    let (near, near_pairs) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            let mut count = 0u64;
            locator.for_each_within(points[i], near_radius, |j, _| {
                if j > i {
                    count += 1;
                    let v = f(i, j);
                    if v > best {
                        best = v;
                    }
                }
            });
            (best, count)
        })
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    SweepResult {
        value: far.max(near),
        mode: SweepMode::Stratified { anchors, near_radius },
        pairs: anchors as u64 * (n as u64 - 1) + near_pairs,
    }
}

/// Mean nearest-neighbor distance over a deterministic subset of points.
fn typical_spacing(points: &[Point], locator: &PointLocator) -> f64 {
    let stride = (points.len() / 64).max(1);
    let mut total = 0.0;
    let mut count = 0;
    for i in (0..points.len()).step_by(stride) {
        let p = points[i];
        let mut best = f64::INFINITY;
        let mut r = 1e-9f64.max(1e-6 * (p[0].abs() + p[1].abs()));
        while best == f64::INFINITY && r < 1e6 {
            locator.for_each_within(p, r, |j, d| {
                if j != i && d < best {
                    best = d;
                }
            });
            r *= 2.0;
        }
        if best.is_finite() {
            total += best;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Minimum and maximum pairwise distance (exact sweep), for diagnostics.
pub fn distance_range(points: &[Point]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist(points[i], points[j]);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    (lo, hi)
}
