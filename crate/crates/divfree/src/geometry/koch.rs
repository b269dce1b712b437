//! Koch-type curves with four equal segments of length `a` per iteration.
//!
//! Each segment is replaced by four copies of relative length `a` whose
//! directions are rotated by `0, beta, -beta, 0`, so the polyline turns by
//! `beta, -2 beta, beta`. The turn angle is fixed by requiring the four
//! copies to span the parent segment: `a (2 + 2 cos beta) = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::shapes::{dist, project_on_segment, Point, Shape};
use super::GeometryError;

#[derive(Debug, Clone, Serialize)]
pub struct KochCurve {
    pub a: f64,
    pub order: u32,
    /// Turn angle between the first and second child segment, in radians.
    pub turn_angle: f64,
    /// Hölder exponent of the constant-speed parametrization, `-ln a / ln 4`.
    pub theta: f64,
    pub vertices: Vec<Point>,
}

/// Bi-Hölder ratio band of a sampled parametrization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderBand {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Smallest `C` with `C^-1 <= ratio <= C` over the sampled pairs.
    pub constant: f64,
    pub pairs: usize,
}

/// Solves `a (2 + 2 cos beta) = 1` for `beta` in `[0, pi/2)` by bisection.
pub fn solve_turn_angle(a: f64) -> Result<f64, GeometryError> {
    if !(0.25..0.5).contains(&a) {
        return Err(GeometryError::KochRatio(a));
    }
    let residual = |beta: f64| a * (2.0 + 2.0 * beta.cos()) - 1.0;
    if residual(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Order-`order` polyline from `(0, 0)` to `(1, 0)` with `4^order` segments.
pub fn koch_curve(a: f64, order: u32) -> Result<KochCurve, GeometryError> {
    let beta = solve_turn_angle(a)?;
    let turns = [0.0, beta, -beta, 0.0];
    // Track directions as angles so the segment length stays a^order exactly
    // up to the rounding of cos/sin.
    let mut angles = vec![0.0f64];
    for _ in 0..order {
        angles = angles.iter().flat_map(|&phi| turns.iter().map(move |t| phi + t)).collect();
    }
    let step = a.powi(order as i32);
    let mut vertices = Vec::with_capacity(angles.len() + 1);
    let mut p = [0.0, 0.0];
    vertices.push(p);
    for phi in &angles {
        p = [p[0] + step * phi.cos(), p[1] + step * phi.sin()];
        vertices.push(p);
    }
    // Snap the endpoint; the accumulated drift is round-off.
    if let Some(last) = vertices.last_mut() {
        *last = [1.0, 0.0];
    }
    Ok(KochCurve { a, order, turn_angle: beta, theta: -a.ln() / 4f64.ln(), vertices })
}

impl KochCurve {
    pub fn n_segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn shape(&self) -> Shape {
        Shape::Polyline { points: self.vertices.clone() }
    }

    /// Affine image `offset + scale * R(rotation) * x` of the curve.
    pub fn transformed(&self, offset: Point, scale: f64, rotation: f64) -> KochCurve {
        let (s, c) = rotation.sin_cos();
        let vertices = self
            .vertices
            .iter()
            .map(|p| [offset[0] + scale * (c * p[0] - s * p[1]), offset[1] + scale * (s * p[0] + c * p[1])])
            .collect();
        KochCurve { vertices, ..self.clone() }
    }

    /// Constant-speed parametrization `g(t)`, `t` in `[0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        let n = self.n_segments();
        let x = t.clamp(0.0, 1.0) * n as f64;
        let k = (x.floor() as usize).min(n - 1);
        let frac = x - k as f64;
        let (p, q) = (self.vertices[k], self.vertices[k + 1]);
        [p[0] + frac * (q[0] - p[0]), p[1] + frac * (q[1] - p[1])]
    }

    /// Parameter of the curve point nearest to `p` (inverse of [`Self::point_at`] on the curve).
    pub fn parameter_of(&self, p: Point) -> f64 {
        let n = self.n_segments();
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..n {
            let (a, b) = (self.vertices[k], self.vertices[k + 1]);
            let q = project_on_segment(p, a, b);
            let d = dist(p, q);
            if d < best.0 {
                let len = dist(a, b);
                let frac = if len > 0.0 { dist(a, q) / len } else { 0.0 };
                best = (d, (k as f64 + frac) / n as f64);
            }
        }
        best.1
    }

    /// Samples `|g(s) - g(t)| / |s - t|^theta` over random pairs with
    /// `|s - t| >= 4^-order` (below that scale the polyline is straight).
    pub fn holder_band(&self, n_pairs: usize, seed: u64) -> HolderBand {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let floor = 4f64.powi(-(self.order as i32));
        let mut min_ratio = f64::INFINITY;
        let mut max_ratio = 0.0f64;
        let mut pairs = 0;
        while pairs < n_pairs {
            let s: f64 = rng.random();
            let t: f64 = rng.random();
            let gap = (s - t).abs();
            if gap < floor {
                continue;
            }
            let r = dist(self.point_at(s), self.point_at(t)) / gap.powf(self.theta);
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
            pairs += 1;
        }
        HolderBand { min_ratio, max_ratio, constant: max_ratio.max(1.0 / min_ratio), pairs }
    }

    /// `sup_t |g_self(t) - g_other(t)|` over a uniform parameter sample.
    pub fn sup_distance(&self, other: &KochCurve, samples: usize) -> f64 {
        (0..=samples)
            .map(|k| {
                let t = k as f64 / samples as f64;
                dist(self.point_at(t), other.point_at(t))
            })
            .fold(0.0, f64::max)
    }
}
