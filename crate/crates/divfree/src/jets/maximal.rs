//! Shvartsman's maximal function
//! `M f(x) = sup_{y != z} |P_y f(x) - P_z f(x)| / (|x - y|^m + |x - z|^m)`
//! with Taylor polynomials of order `m - 1`.

use std::collections::HashMap;

use serde::Serialize;

use super::{taylor_poly, Jet, JetError};
use crate::geometry::{shapes::dist, Point, PointLocator};
use crate::grid::Grid;
use crate::multi_index::count_up_to;

/// Midpoints of an `n` by `n` cell lattice over a box, used as a fixed
/// quadrature for `||M f||_p` that does not move with the grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalLattice {
    pub lo: Point,
    pub hi: Point,
    pub n: usize,
}

impl EvalLattice {
    pub fn over_grid(grid: &Grid, n: usize) -> EvalLattice {
        EvalLattice { lo: grid.origin, hi: grid.upper(), n }
    }

    pub fn points(&self) -> Vec<Point> {
        let (wx, wy) = ((self.hi[0] - self.lo[0]) / self.n as f64, (self.hi[1] - self.lo[1]) / self.n as f64);
        (0..self.n * self.n)
            .map(|k| [self.lo[0] + wx * ((k % self.n) as f64 + 0.5), self.lo[1] + wy * ((k / self.n) as f64 + 0.5)])
            .collect()
    }

    pub fn cell_area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1]) / (self.n * self.n) as f64
    }
}

/// Distinct `f^(0)` values beyond which the grouped evaluator is not used.
const MAX_GROUPS: usize = 64;

enum Evaluator<'a> {
    /// Entries of order `1..m-1` vanish and `f^(0)` takes few values: the
    /// sup over a pair of value classes is attained at the nearest samples.
    Grouped { values: Vec<f64>, locators: Vec<PointLocator> },
    General { jet: &'a Jet },
}

fn evaluator(jet: &Jet, m: u32) -> Evaluator<'_> {
    let poly = m - 1;
    let flat = jet.values[1..count_up_to(poly)].iter().all(|c| c.iter().all(|&v| v == 0.0));
    if flat {
        let mut groups: HashMap<u64, Vec<Point>> = HashMap::new();
        for (s, &v) in jet.values[0].iter().enumerate() {
            groups.entry(v.to_bits()).or_default().push(jet.points[s]);
            if groups.len() > MAX_GROUPS {
                return Evaluator::General { jet };
            }
        }
        let mut keys: Vec<u64> = groups.keys().copied().collect();
        keys.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
        let values = keys.iter().map(|k| f64::from_bits(*k)).collect();
        let locators = keys.iter().map(|k| PointLocator::new(groups[k].clone(), 0.0)).collect();
        return Evaluator::Grouped { values, locators };
    }
    Evaluator::General { jet }
}

impl Evaluator<'_> {
    fn eval(&self, m: u32, x: Point) -> f64 {
        match self {
            Evaluator::Grouped { values, locators } => {
                let r: Vec<f64> = locators
                    .iter()
                    .map(|l| l.nearest(x).map_or(f64::INFINITY, |(_, d)| d).powi(m as i32))
                    .collect();
                let mut best = 0.0f64;
                for a in 0..values.len() {
                    for b in a + 1..values.len() {
                        best = best.max((values[a] - values[b]).abs() / (r[a] + r[b]));
                    }
                }
                best
            }
            Evaluator::General { jet } => dinkelbach(jet, m, x),
        }
    }
}

/// Maximizes `(A_y - A_z) / (r_y + r_z)` over `y != z` by Dinkelbach's
/// iteration; each step is a separable `O(N)` scan.
fn dinkelbach(jet: &Jet, m: u32, x: Point) -> f64 {
    let n = jet.len();
    let a: Vec<f64> = (0..n).map(|y| taylor_poly(jet, y, m - 1, x).unwrap_or(0.0)).collect();
    let r: Vec<f64> = jet.points.iter().map(|&y| dist(x, y).powi(m as i32)).collect();
    let mut lambda = 0.0f64;
    for _ in 0..200 {
        let top2 = |score: &dyn Fn(usize) -> f64| {
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            let mut second = (f64::NEG_INFINITY, usize::MAX);
            for y in 0..n {
                let v = score(y);
                if v > best.0 {
                    second = best;
                    best = (v, y);
                } else if v > second.0 {
                    second = (v, y);
                }
            }
            (best, second)
        };
        let (u1, u2) = top2(&|y| a[y] - lambda * r[y]);
        let (v1, v2) = top2(&|z| -a[z] - lambda * r[z]);
        let (y, z) = if u1.1 != v1.1 {
            (u1.1, v1.1)
        } else if u1.0 + v2.0 >= u2.0 + v1.0 {
            (u1.1, v2.1)
        } else {
            (u2.1, v1.1)
        };
        let gain = (a[y] - a[z]) - lambda * (r[y] + r[z]);
        let next = (a[y] - a[z]) / (r[y] + r[z]);
        if gain <= 1e-15 * (1.0 + lambda.abs() * (r[y] + r[z])) || next <= lambda {
            return lambda.max(next);
        }
        lambda = next;
    }
    lambda
}

fn check(jet: &Jet, m: u32) -> Result<(), JetError> {
    if m == 0 || m - 1 > jet.order {
        return Err(JetError::OrderTooHigh { requested: m, available: jet.order + 1 });
    }
    if jet.len() < 2 {
        return Err(JetError::TooFewSamples { needed: 2, got: jet.len() });
    }
    Ok(())
}

/// `M^(m) f(x)`, exact over all sample pairs.
pub fn shvartsman_maximal(jet: &Jet, m: u32, x: Point) -> Result<f64, JetError> {
    check(jet, m)?;
    Ok(evaluator(jet, m).eval(m, x))
}

/// `M^(m) f` at many points.
pub fn maximal_field(jet: &Jet, m: u32, points: &[Point]) -> Result<Vec<f64>, JetError> {
    check(jet, m)?;
    let ev = evaluator(jet, m);
    Ok(points.iter().map(|&x| ev.eval(m, x)).collect())
}

/// `||M^(m) f||_p` by midpoint quadrature on a lattice.
pub fn maximal_lp(jet: &Jet, m: u32, p: f64, lattice: &EvalLattice) -> Result<f64, JetError> {
    let vals = maximal_field(jet, m, &lattice.points())?;
    let s: f64 = vals.iter().map(|v| v.powf(p)).sum();
    Ok((lattice.cell_area() * s).powf(1.0 / p))
}
