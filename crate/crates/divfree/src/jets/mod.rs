//! Jets on sampled compact sets: Taylor polynomials, remainders, jet norms,
//! Whitney extensions, the Shvartsman maximal function and restriction.

pub mod extension;
pub mod maximal;
pub mod restrict;

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::Point;
use crate::multi_index::{count_up_to, MultiIndex};
use crate::norms::{pair_sup, SweepMode};
use crate::whitney::Local2;
pub use extension::{extension_c2_norm, extension_local, whitney_extend, whitney_extend_sobolev, ExtensionNorms};
pub use maximal::{maximal_field, maximal_lp, shvartsman_maximal, EvalLattice};
pub use restrict::restrict;

#[derive(Debug, Error, PartialEq)]
pub enum JetError {
    #[error("requested order {requested} exceeds jet order {available}")]
    OrderTooHigh { requested: u32, available: u32 },
    #[error("multi-index {0} is not part of the jet")]
    InvalidMultiIndex(MultiIndex),
    #[error("sample index {0} out of range ({1} samples)")]
    InvalidSample(usize, usize),
    #[error("jet needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("jet value table has {got} columns of length {len}, expected {expected} columns of length {points}")]
    Shape { expected: usize, got: usize, len: usize, points: usize },
    #[error("entries of order >= 1 must vanish, found |f^{jdx}| = {value} at sample {sample}")]
    NonzeroHigherEntries { jdx: MultiIndex, value: f64, sample: usize },
    #[error("jet samples differ from the decomposition's samples of K")]
    SampleMismatch,
    #[error("order-{order} stencil at node ({x}, {y}) leaves the grid")]
    StencilLeavesGrid { order: u32, x: f64, y: f64 },
    #[error("Hölder exponent must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),
    #[error("local expansions only carry order <= 2, requested {0}")]
    LocalOrder(u32),
}

/// Order-`m` jet: `values[j.position()][s]` is `f^(j)` at sample `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub order: u32,
    pub points: Vec<Point>,
    pub values: Vec<Vec<f64>>,
}

impl Jet {
    pub fn new(order: u32, points: Vec<Point>, values: Vec<Vec<f64>>) -> Result<Jet, JetError> {
        let expected = count_up_to(order);
        if values.len() != expected || values.iter().any(|c| c.len() != points.len()) {
            return Err(JetError::Shape {
                expected,
                got: values.len(),
                len: values.first().map_or(0, Vec::len),
                points: points.len(),
            });
        }
        Ok(Jet { order, points, values })
    }

    pub fn zeros(order: u32, points: Vec<Point>) -> Jet {
        let n = points.len();
        Jet { order, points, values: vec![vec![0.0; n]; count_up_to(order)] }
    }

    /// Jet whose `f^(0)` is given and higher entries vanish.
    pub fn from_values(order: u32, points: Vec<Point>, f0: Vec<f64>) -> Result<Jet, JetError> {
        let mut jet = Jet::zeros(order, points);
        if f0.len() != jet.points.len() {
            return Err(JetError::Shape { expected: 1, got: 1, len: f0.len(), points: jet.points.len() });
        }
        jet.values[0] = f0;
        Ok(jet)
    }

    /// Jet from a closure returning all derivatives in canonical order.
    pub fn from_fn(order: u32, points: Vec<Point>, f: impl Fn(Point) -> Vec<f64>) -> Jet {
        let mut jet = Jet::zeros(order, points);
        for s in 0..jet.points.len() {
            let d = f(jet.points[s]);
            for (col, v) in jet.values.iter_mut().zip(d) {
                col[s] = v;
            }
        }
        jet
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn value(&self, jdx: MultiIndex, s: usize) -> f64 {
        self.values[jdx.position()][s]
    }

    pub fn column(&self, jdx: MultiIndex) -> &[f64] {
        &self.values[jdx.position()]
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            order: self.order,
            points: self.points.clone(),
            values: self.values.iter().map(|col| col.iter().map(|v| c * v).collect()).collect(),
        }
    }

    /// Lower-order jet sharing the samples.
    pub fn truncate(&self, order: u32) -> Result<Jet, JetError> {
        if order > self.order {
            return Err(JetError::OrderTooHigh { requested: order, available: self.order });
        }
        Ok(Jet { order, points: self.points.clone(), values: self.values[..count_up_to(order)].to_vec() })
    }

    /// Largest `|f^(j)|` over `|j| >= 1`.
    pub fn higher_sup(&self) -> f64 {
        self.values[1..].iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Errors unless every entry of order `>= 1` is exactly zero.
    pub fn require_zero_higher(&self) -> Result<(), JetError> {
        for (pos, col) in self.values.iter().enumerate().skip(1) {
            if let Some((s, &v)) = col.iter().enumerate().find(|(_, v)| **v != 0.0) {
                return Err(JetError::NonzeroHigherEntries { jdx: MultiIndex::up_to(self.order)[pos], value: v, sample: s });
            }
        }
        Ok(())
    }

    /// `sup |f^(j)|` over all entries.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes `x,y,j1,j2,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "j1", "j2", "value"])?;
        let idx = MultiIndex::up_to(self.order);
        for (s, p) in self.points.iter().enumerate() {
            for (pos, jdx) in idx.iter().enumerate() {
                w.write_record([
                    p[0].to_string(),
                    p[1].to_string(),
                    jdx.0.to_string(),
                    jdx.1.to_string(),
                    self.values[pos][s].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    fn check_sample(&self, s: usize) -> Result<(), JetError> {
        if s >= self.len() {
            Err(JetError::InvalidSample(s, self.len()))
        } else {
            Ok(())
        }
    }
}

/// `P^(m)_y f(x) = sum_{|j| <= m} f^(j)(y) (x - y)^j / j!`.
pub fn taylor_poly(jet: &Jet, y: usize, m: u32, x: Point) -> Result<f64, JetError> {
    if m > jet.order {
        return Err(JetError::OrderTooHigh { requested: m, available: jet.order });
    }
    jet.check_sample(y)?;
    let yp = jet.points[y];
    let (dx, dy) = (x[0] - yp[0], x[1] - yp[1]);
    Ok(MultiIndex::up_to(m)
        .into_iter()
        .map(|j| jet.values[j.position()][y] * j.monomial(dx, dy) / j.factorial())
        .sum())
}

/// `P^(m)_y f` at `x` with its first and second derivatives.
pub fn taylor_local(jet: &Jet, y: usize, m: u32, x: Point) -> Local2 {
    if m == 0 || jet.values[1..count_up_to(m)].iter().all(|col| col[y] == 0.0) {
        return Local2::constant(jet.values[0][y]);
    }
    let yp = jet.points[y];
    let (dx, dy) = (x[0] - yp[0], x[1] - yp[1]);
    let mut out = [0.0f64; 6];
    // D^e P(x) = sum_{j >= e} f^(j)(y) (x - y)^(j - e) / (j - e)!.
    for (slot, e) in MultiIndex::up_to(2).into_iter().enumerate() {
        if e.order() > m {
            break;
        }
        let mut acc = 0.0;
        for j in MultiIndex::up_to(m) {
            if let Some(l) = e.complement_in(j) {
                let c = jet.values[j.position()][y];
                if c != 0.0 {
                    acc += c * l.monomial(dx, dy) / l.factorial();
                }
            }
        }
        out[slot] = acc;
    }
    Local2 { value: out[0], grad: [out[1], out[2]], hess: [out[3], out[4], out[5]] }
}

/// `R_j f(x, y) = f^(j)(x) - sum_{|j + l| <= m} f^(j + l)(y) (x - y)^l / l!`.
pub fn remainder(jet: &Jet, jdx: MultiIndex, x: usize, y: usize) -> Result<f64, JetError> {
    if jdx.order() > jet.order {
        return Err(JetError::InvalidMultiIndex(jdx));
    }
    jet.check_sample(x)?;
    jet.check_sample(y)?;
    Ok(remainder_unchecked(jet, jet.order, jdx, x, y))
}

fn remainder_unchecked(jet: &Jet, m: u32, jdx: MultiIndex, x: usize, y: usize) -> f64 {
    let (xp, yp) = (jet.points[x], jet.points[y]);
    let (dx, dy) = (xp[0] - yp[0], xp[1] - yp[1]);
    let mut acc = jet.values[jdx.position()][x];
    for l in MultiIndex::up_to(m - jdx.order()) {
        let c = jet.values[jdx.checked_add(l).position()][y];
        if c != 0.0 {
            acc -= c * l.monomial(dx, dy) / l.factorial();
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JetNormReport {
    pub sup_norm: f64,
    pub remainder_ratio: f64,
    pub jet_norm: f64,
    pub sweep: SweepMode,
    pub pairs: u64,
}

/// `max(sup |f^(j)|, sup |R_j f(x, y)| / |x - y|^(m + gamma - |j|))` over
/// all ordered sample pairs and `|j| <= m`.
pub fn jet_norm(jet: &Jet, m: u32, gamma: f64, seed: u64) -> Result<JetNormReport, JetError> {
    if m > jet.order {
        return Err(JetError::OrderTooHigh { requested: m, available: jet.order });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(JetError::GammaOutOfRange(gamma));
    }
    if jet.is_empty() {
        return Err(JetError::TooFewSamples { needed: 1, got: 0 });
    }
    let jet = jet.truncate(m)?;
    let sup_norm = jet.sup_norm();
    if jet.len() < 2 {
        return Ok(JetNormReport { sup_norm, remainder_ratio: 0.0, jet_norm: sup_norm, sweep: SweepMode::Exact, pairs: 0 });
    }
    let all = MultiIndex::up_to(m);
    let nonzero: Vec<bool> = jet.values.iter().map(|c| c.iter().any(|&v| v != 0.0)).collect();
    // R_j vanishes identically when no f^(j + l) is ever nonzero.
    let plans: Vec<RemainderPlan> = all
        .iter()
        .copied()
        .filter(|j| all.iter().any(|e| j.complement_in(*e).is_some() && nonzero[e.position()]))
        .map(|j| RemainderPlan::new(j, m, &nonzero))
        .collect();
    let zero_higher = nonzero.iter().skip(1).all(|&z| !z);
    let f0 = &jet.values[0];
    let points = &jet.points;
    let exponent0 = 0.5 * (m as f64 + gamma);
    let sweep = if zero_higher {
        // Only R_0 = f(x) - f(y) survives.
        pair_sup(
            points,
            |i, k| {
                let diff = (f0[i] - f0[k]).abs();
                if diff == 0.0 {
                    return 0.0;
                }
                let d2 = sq_dist(points[i], points[k]);
                diff / d2.powf(exponent0)
            },
            seed,
        )
    } else if m as usize > MAX_PLAN_ORDER {
        let active: Vec<(MultiIndex, f64)> =
            plans.iter().map(|p| (p.jdx, 0.5 * (m as f64 + gamma - p.order as f64))).collect();
        pair_sup(
            points,
            |i, k| {
                let d2 = sq_dist(points[i], points[k]);
                let mut best = 0.0f64;
                for &(j, half_exp) in &active {
                    let r = remainder_unchecked(&jet, m, j, i, k)
                        .abs()
                        .max(remainder_unchecked(&jet, m, j, k, i).abs());
                    best = best.max(r / d2.powf(half_exp));
                }
                best
            },
            seed,
        )
    } else {
        let m_us = m as usize;
        pair_sup(
            points,
            |i, k| {
                let (dx, dy) = (points[i][0] - points[k][0], points[i][1] - points[k][1]);
                let d2 = dx * dx + dy * dy;
                let d = d2.sqrt();
                // |x - y|^(m + gamma - t) = full / d^t.
                let full = d2.powf(exponent0);
                let mut px = [1.0f64; MAX_PLAN_ORDER + 1];
                let mut py = [1.0f64; MAX_PLAN_ORDER + 1];
                for a in 1..=m_us {
                    px[a] = px[a - 1] * dx;
                    py[a] = py[a - 1] * dy;
                }
                let mut best = 0.0f64;
                for plan in &plans {
                    let (rxy, ryx) = plan.eval(&jet.values, i, k, &px, &py);
                    best = best.max(rxy.abs().max(ryx.abs()) * d.powi(plan.order as i32) / full);
                }
                best
            },
            seed,
        )
    };
    Ok(JetNormReport {
        sup_norm,
        remainder_ratio: sweep.value,
        jet_norm: sup_norm.max(sweep.value),
        sweep: sweep.mode,
        pairs: sweep.pairs,
    })
}

/// Orders up to which [`RemainderPlan`] keeps its powers on the stack.
const MAX_PLAN_ORDER: usize = 8;

/// `R_j` with the Taylor terms `(position of j + l, l, 1 / l!)` resolved
/// once, skipping entries that vanish on every sample.
struct RemainderPlan {
    jdx: MultiIndex,
    order: u32,
    position: usize,
    terms: Vec<(usize, usize, usize, f64, f64)>,
}

impl RemainderPlan {
    fn new(jdx: MultiIndex, m: u32, nonzero: &[bool]) -> RemainderPlan {
        let terms = MultiIndex::up_to(m - jdx.order())
            .into_iter()
            .map(|l| (jdx.checked_add(l).position(), l))
            .filter(|&(pos, _)| nonzero[pos])
            .map(|(pos, l)| {
                let sign = if l.order() % 2 == 0 { 1.0 } else { -1.0 };
                (pos, l.0 as usize, l.1 as usize, 1.0 / l.factorial(), sign)
            })
            .collect();
        RemainderPlan { jdx, order: jdx.order(), position: jdx.position(), terms }
    }

    /// `(R_j(x, y), R_j(y, x))` given the powers of `x - y`.
    fn eval(&self, values: &[Vec<f64>], x: usize, y: usize, px: &[f64], py: &[f64]) -> (f64, f64) {
        let (mut rxy, mut ryx) = (values[self.position][x], values[self.position][y]);
        for &(pos, a, b, inv, sign) in &self.terms {
            let mono = px[a] * py[b] * inv;
            rxy -= values[pos][y] * mono;
            ryx -= values[pos][x] * mono * sign;
        }
        (rxy, ryx)
    }
}

fn sq_dist(a: Point, b: Point) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid_points(n: usize) -> Vec<Point> {
        (0..n * n).map(|k| [(k % n) as f64 * 0.1, (k / n) as f64 * 0.1]).collect()
    }

    /// All derivatives up to order 3 of `x1^3 + 2 x1 x2 - x2^2`.
    fn cubic(p: Point) -> Vec<f64> {
        let [x, y] = p;
        vec![x.powi(3) + 2.0 * x * y - y * y, 3.0 * x * x + 2.0 * y, 2.0 * x - 2.0 * y, 6.0 * x, 2.0, -2.0, 6.0, 0.0, 0.0, 0.0]
    }

    #[test]
    fn taylor_of_constant_and_square() {
        let pts = grid_points(3);
        let c = Jet::from_values(2, pts.clone(), vec![4.0; 9]).unwrap();
        assert_eq!(taylor_poly(&c, 3, 2, [7.0, -2.0]).unwrap(), 4.0);
        let sq = Jet::from_fn(2, vec![[0.0, 0.0]], |p| vec![p[0] * p[0], 2.0 * p[0], 0.0, 2.0, 0.0, 0.0]);
        assert_relative_eq!(taylor_poly(&sq, 0, 2, [1.5, 3.0]).unwrap(), 2.25);
        assert_eq!(taylor_poly(&sq, 0, 3, [0.0, 0.0]), Err(JetError::OrderTooHigh { requested: 3, available: 2 }));
        let j = Jet::from_fn(2, pts, cubic_order2);
        assert_eq!(taylor_poly(&j, 4, 0, [9.0, 9.0]).unwrap(), j.value(MultiIndex::ZERO, 4));
    }

    fn cubic_order2(p: Point) -> Vec<f64> {
        cubic(p)[..6].to_vec()
    }

    #[test]
    fn remainders_of_polynomials() {
        let pts = grid_points(4);
        let quad = Jet::from_fn(2, pts.clone(), |p| vec![p[0] * p[1] + p[0], p[1] + 1.0, p[0], 0.0, 1.0, 0.0]);
        for x in 0..pts.len() {
            for y in 0..pts.len() {
                for j in MultiIndex::up_to(2) {
                    assert!(remainder(&quad, j, x, y).unwrap().abs() < 1e-12);
                }
            }
        }
        let cube = Jet::from_fn(2, pts.clone(), |p| vec![p[0].powi(3), 3.0 * p[0] * p[0], 0.0, 6.0 * p[0], 0.0, 0.0]);
        let (x, y) = (7, 2);
        let expect = (pts[x][0] - pts[y][0]).powi(3);
        assert_relative_eq!(remainder(&cube, MultiIndex::ZERO, x, y).unwrap(), expect, epsilon = 1e-12);
        assert_eq!(remainder(&cube, MultiIndex::ZERO, 3, 3).unwrap(), 0.0);
    }

    #[test]
    fn two_point_jet_norm() {
        let jet = Jet::from_values(1, vec![[0.0, 0.0], [1.0, 0.0]], vec![0.0, 1.0]).unwrap();
        let r = jet_norm(&jet, 1, 1.0, 0).unwrap();
        assert_relative_eq!(r.remainder_ratio, 1.0);
        assert_relative_eq!(r.jet_norm, 1.0);
        let z = Jet::zeros(2, grid_points(3));
        assert_eq!(jet_norm(&z, 2, 0.5, 0).unwrap().jet_norm, 0.0);
    }

    #[test]
    fn jet_norm_is_homogeneous() {
        let j = Jet::from_fn(2, grid_points(5), cubic_order2);
        let a = jet_norm(&j, 2, 0.5, 0).unwrap().jet_norm;
        let b = jet_norm(&j.scale(2.0), 2, 0.5, 0).unwrap().jet_norm;
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn jet_norm_matches_a_brute_force_sweep() {
        let pts = grid_points(6);
        let jet = Jet::from_fn(2, pts.clone(), |p| {
            let c = cubic_order2(p);
            // Perturb so no remainder vanishes identically.
            c.iter().enumerate().map(|(i, v)| v + 0.01 * (i as f64 + p[0] * 3.0 - p[1]).sin()).collect()
        });
        for gamma in [0.0, 0.5, 1.0] {
            let mut best = 0.0f64;
            for x in 0..pts.len() {
                for y in 0..pts.len() {
                    if x == y {
                        continue;
                    }
                    let d = crate::geometry::shapes::dist(pts[x], pts[y]);
                    for j in MultiIndex::up_to(2) {
                        let r = remainder(&jet, j, x, y).unwrap().abs();
                        best = best.max(r / d.powf(2.0 + gamma - j.order() as f64));
                    }
                }
            }
            let fast = jet_norm(&jet, 2, gamma, 0).unwrap();
            assert_relative_eq!(fast.remainder_ratio, best, max_relative = 1e-12);
        }
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let j = Jet::from_fn(1, grid_points(2), |p| vec![p[0], 1.0, 0.0]);
        let mut buf = Vec::new();
        j.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 4 * 3);
        assert!(text.starts_with("x,y,j1,j2,value"));
    }
}
