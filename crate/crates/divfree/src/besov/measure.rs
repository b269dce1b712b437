//! Discrete `d`-regular measures `mu ≈ H^d|_K`.

use std::io::Write;

use serde::Serialize;

use super::BesovError;
use crate::geometry::shapes::{dist, segments};
use crate::geometry::{CompactSet, Point, PointLocator, Shape};

/// Ratio `C / c` above which a measure is flagged as not numerically regular.
pub const REGULARITY_WARNING_RATIO: f64 = 1e3;

const MAX_PROBE_CENTERS: usize = 64;
const PROBE_RADII: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityProbe {
    pub centers: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
}

/// Weighted atoms on `K` with the measured regularity band
/// `c r^d <= mu(B_r(x)) <= C r^d`.
#[derive(Debug, Clone, Serialize)]
pub struct RegularMeasure {
    pub d: f64,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
    pub lower: f64,
    pub upper: f64,
    pub probe: RegularityProbe,
    pub warning: Option<String>,
    #[serde(skip)]
    locator: PointLocator,
}

impl RegularMeasure {
    fn new(d: f64, points: Vec<Point>, weights: Vec<f64>, grid_h: f64) -> RegularMeasure {
        let total_mass = weights.iter().sum();
        let locator = PointLocator::new(points.clone(), 0.0);
        let mut m = RegularMeasure {
            d,
            points,
            weights,
            total_mass,
            lower: 1.0,
            upper: 1.0,
            probe: RegularityProbe { centers: 0, r_min: 0.0, r_max: 0.0, radii: 0 },
            warning: None,
            locator,
        };
        m.probe_regularity(grid_h);
        m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `mu(B(x, r))` for the open ball.
    pub fn ball_mass(&self, x: Point, r: f64) -> f64 {
        let mut m = 0.0;
        self.locator.for_each_within(x, r, |idx, _| m += self.weights[idx]);
        m
    }

    /// `max_y mu(B(y, r))` over the atoms.
    pub fn max_ball_mass(&self, r: f64) -> f64 {
        self.points.iter().map(|&p| self.ball_mass(p, r)).fold(0.0, f64::max)
    }

    pub(crate) fn locator(&self) -> &PointLocator {
        &self.locator
    }

    /// `||v||_{L^p(mu)}`.
    pub fn lp_norm(&self, values: impl Iterator<Item = f64>, p: f64) -> f64 {
        values.zip(&self.weights).map(|(v, w)| v.abs().powf(p) * w).sum::<f64>().powf(1.0 / p)
    }

    fn diameter(&self) -> f64 {
        // Diameter of the bounding box; within a factor sqrt 2 of the true one.
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        dist(lo, hi)
    }

    fn probe_regularity(&mut self, grid_h: f64) {
        let (r_min, r_max) = (4.0 * grid_h, self.diameter());
        if self.d == 0.0 || r_max <= r_min {
            self.lower = self.weights.iter().copied().fold(f64::INFINITY, f64::min);
            self.upper = self.total_mass;
            self.probe = RegularityProbe { centers: self.len(), r_min, r_max, radii: 0 };
            return;
        }
        let stride = self.len().div_ceil(MAX_PROBE_CENTERS).max(1);
        let centers: Vec<Point> = self.points.iter().step_by(stride).copied().collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for s in 0..PROBE_RADII {
            let r = r_min * (r_max / r_min).powf(s as f64 / (PROBE_RADII - 1) as f64);
            for &c in &centers {
                let ratio = self.ball_mass(c, r) / r.powf(self.d);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        self.lower = lo;
        self.upper = hi;
        self.probe = RegularityProbe { centers: centers.len(), r_min, r_max, radii: PROBE_RADII };
        if !(hi / lo <= REGULARITY_WARNING_RATIO) {
            self.warning = Some(format!("not numerically d-regular: C/c = {:.3e}", hi / lo));
        }
    }

    /// Writes `x,y,weight` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "weight"])?;
        for (p, m) in self.points.iter().zip(&self.weights) {
            w.write_record([p[0].to_string(), p[1].to_string(), m.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Points of one primitive and their masses.
fn sample_shape(shape: &Shape, d: f64, n: usize) -> Result<(Vec<Point>, Vec<f64>), BesovError> {
    match shape {
        Shape::Disk { center, radius } => {
            if d != 1.0 {
                return Err(BesovError::Unsupported(format!("disks carry the boundary measure (d = 1), got d = {d}")));
            }
            let n = n.max(8);
            let w = 2.0 * std::f64::consts::PI * radius / n as f64;
            let pts = (0..n)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect();
            Ok((pts, vec![w; n]))
        }
        Shape::Polyline { points } => {
            let segs: Vec<(Point, Point)> = segments(points).collect();
            let masses: Vec<f64> = segs.iter().map(|&(a, b)| dist(a, b).powf(d)).collect();
            let total: f64 = masses.iter().sum();
            let (mut pts, mut ws) = (Vec::new(), Vec::new());
            for (&(a, b), &m) in segs.iter().zip(&masses) {
                if m == 0.0 {
                    continue;
                }
                let c = ((n as f64 * m / total).round() as usize).max(1);
                for i in 0..c {
                    let t = (i as f64 + 0.5) / c as f64;
                    pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    ws.push(m / c as f64);
                }
            }
            Ok((pts, ws))
        }
    }
}

/// Samples `mu` on `K` with about `n_points` atoms.
///
/// `d = 0` puts one unit atom on each component. Otherwise `K` needs
/// analytic primitives: polylines get mass `len^d` per segment (the
/// pushforward of the parameter measure for self-similar curves), disks
/// their boundary length.
pub fn sample_measure(k: &CompactSet, d: f64, n_points: usize) -> Result<RegularMeasure, BesovError> {
    if !(0.0..2.0).contains(&d) {
        return Err(BesovError::DimensionOutOfRange(d));
    }
    if k.empty {
        return Err(BesovError::EmptySet);
    }
    let h = k.grid.h();
    if d == 0.0 {
        let mut first = vec![None; k.n_components as usize + 1];
        for idx in k.samples() {
            let l = k.labels[idx] as usize;
            first[l].get_or_insert(idx);
        }
        let pts: Vec<Point> = first.into_iter().flatten().map(|idx| k.grid.point(idx)).collect();
        let n = pts.len();
        return Ok(RegularMeasure::new(0.0, pts, vec![1.0; n], h));
    }
    if k.primitives.is_empty() {
        return Err(BesovError::Unsupported("sets without primitives only carry d = 0".into()));
    }
    let lengths: Vec<f64> = k
        .primitives
        .iter()
        .map(|s| match s {
            Shape::Polyline { points } => segments(points).map(|(a, b)| dist(a, b).powf(d)).sum(),
            Shape::Disk { radius, .. } => 2.0 * std::f64::consts::PI * radius,
        })
        .collect();
    let total: f64 = lengths.iter().sum();
    let (mut pts, mut ws) = (Vec::new(), Vec::new());
    for (s, len) in k.primitives.iter().zip(&lengths) {
        let n = ((n_points as f64 * len / total).round() as usize).max(1);
        let (p, w) = sample_shape(s, d, n)?;
        pts.extend(p);
        ws.extend(w);
    }
    Ok(RegularMeasure::new(d, pts, ws, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{koch_curve, make_compact_set};
    use crate::grid::Grid;
    use approx::assert_relative_eq;

    fn grid() -> Grid {
        Grid::square(-0.5, 2.0, 128).unwrap()
    }

    #[test]
    fn unit_segment() {
        let k = make_compact_set(&[Shape::Polyline { points: vec![[0.0, 0.0], [1.0, 0.0]] }], grid()).unwrap();
        let mu = sample_measure(&k, 1.0, 1000).unwrap();
        assert_relative_eq!(mu.total_mass, 1.0, epsilon = 1e-12);
        for x in [0.3, 0.5, 0.7] {
            for r in [0.05, 0.1, 0.2] {
                let ratio = mu.ball_mass([x, 0.0], r) / r;
                assert!((1.0..=2.0 + 1e-9).contains(&ratio), "{x} {r} {ratio}");
            }
        }
        assert!(mu.warning.is_none());
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,y,weight\n"));
    }

    #[test]
    fn single_point_is_one_atom() {
        let g = grid();
        let mut mask = vec![false; g.n_nodes()];
        mask[g.index(40, 40)] = true;
        let mu = sample_measure(&CompactSet::from_mask(g, mask), 0.0, 10).unwrap();
        assert_eq!(mu.weights, vec![1.0]);
    }

    #[test]
    fn koch_band_is_reported() {
        let curve = koch_curve(0.3, 4).unwrap();
        let d = 1.0 / curve.theta;
        let k = make_compact_set(&[curve.shape()], grid()).unwrap();
        let mu = sample_measure(&k, d, 2000).unwrap();
        assert_relative_eq!(mu.total_mass, 1.0, epsilon = 1e-9);
        assert!(mu.lower > 0.0 && mu.upper / mu.lower < REGULARITY_WARNING_RATIO);
        // Every probe respects the band.
        for &c in mu.points.iter().step_by(97) {
            let r = 0.2;
            let ratio = mu.ball_mass(c, r) / r.powf(d);
            assert!(ratio >= mu.lower * 0.5 && ratio <= mu.upper * 2.0);
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        let k = make_compact_set(&[Shape::disk([0.5, 0.5], 0.2)], grid()).unwrap();
        assert!(matches!(sample_measure(&k, 2.0, 10), Err(BesovError::DimensionOutOfRange(_))));
        assert!(matches!(sample_measure(&k, 0.5, 10), Err(BesovError::Unsupported(_))));
        let circle = sample_measure(&k, 1.0, 200).unwrap();
        assert_relative_eq!(circle.total_mass, 2.0 * std::f64::consts::PI * 0.2, epsilon = 1e-12);
    }
}
