//! Norms and seminorms on grid fields and sample sets: sup, `C^m`, Hölder,
//! `L^p`, discrete `W^{m,p}`, and the staggered divergence.

pub mod pairs;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::grid::{Grid, ScalarField, VectorField2};
use crate::multi_index::MultiIndex;
pub use pairs::{pair_sup, SweepMode, SweepResult, EXACT_SWEEP_LIMIT};

#[derive(Debug, Error, PartialEq)]
pub enum NormError {
    #[error("Hölder exponent must lie in (0, 1], got {0}")]
    GammaOutOfRange(f64),
    #[error("integrability exponent must exceed 1, got {0}")]
    ExponentOutOfRange(f64),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("region too thin for order-{order} stencils: no admissible sample")]
    RegionTooThin { order: u32 },
    #[error("derivative order {0} exceeds the tabulated stencils")]
    OrderTooHigh(u32),
    #[error("values and points differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Largest derivative order of the cell-centered operators behind [`wmp_norm`].
pub const MAX_CELL_ORDER: u32 = 3;

/// Which norm to evaluate, and on which nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    Sup,
    Holder { gamma: f64 },
    Cm { m: u32 },
    CmGamma { m: u32, gamma: f64 },
    Lp { p: f64 },
    Wmp { m: u32, p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    /// Node mask; `None` means the whole grid.
    pub region: Option<Vec<bool>>,
}

impl NormSpec {
    pub fn new(kind: NormKind) -> NormSpec {
        NormSpec { kind, region: None }
    }

    pub fn on(kind: NormKind, region: Vec<bool>) -> NormSpec {
        NormSpec { kind, region: Some(region) }
    }

    pub fn validate(&self) -> Result<(), NormError> {
        match self.kind {
            NormKind::Sup => Ok(()),
            NormKind::Holder { gamma } => check_gamma(gamma),
            NormKind::Cm { m } => check_node_order(m),
            NormKind::CmGamma { m, gamma } => check_node_order(m).and(check_gamma(gamma)),
            NormKind::Lp { p } => check_p(p),
            NormKind::Wmp { m, p } => {
                check_p(p)?;
                if m > MAX_CELL_ORDER {
                    return Err(NormError::OrderTooHigh(m));
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, f: &ScalarField) -> Result<f64, NormError> {
        self.validate()?;
        let region = self.region.as_deref();
        match self.kind {
            NormKind::Sup => Ok(region_values(f, region).fold(0.0, |m, v| m.max(v.abs()))),
            NormKind::Holder { gamma } => Ok(holder_seminorm_field(f, region, gamma, 0)?.value),
            NormKind::Cm { m } => cm_norm(f, m, region),
            NormKind::CmGamma { m, gamma } => {
                let mut best = cm_norm(f, m, region)?;
                for jdx in MultiIndex::of_order(m) {
                    let (d, fits) = derivative_field(f, jdx);
                    let mask: Vec<bool> =
                        fits.iter().enumerate().map(|(k, &ok)| ok && region.is_none_or(|r| r[k])).collect();
                    best = best.max(holder_seminorm_field(&d, Some(&mask), gamma, 0)?.value);
                }
                Ok(best)
            }
            NormKind::Lp { p } => {
                let w = f.grid.h() * f.grid.h();
                Ok(lp_norm(region_values(f, region), w, p))
            }
            NormKind::Wmp { m, p } => wmp_norm(f, m, p, region),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<(), NormError> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(NormError::GammaOutOfRange(gamma))
    }
}

fn check_p(p: f64) -> Result<(), NormError> {
    if p > 1.0 {
        Ok(())
    } else {
        Err(NormError::ExponentOutOfRange(p))
    }
}

fn check_node_order(m: u32) -> Result<(), NormError> {
    if m > crate::grid::MAX_AXIS_ORDER {
        Err(NormError::OrderTooHigh(m))
    } else {
        Ok(())
    }
}

fn region_values<'a>(f: &'a ScalarField, region: Option<&'a [bool]>) -> impl Iterator<Item = f64> + 'a {
    f.values
        .iter()
        .enumerate()
        .filter(move |(idx, _)| region.is_none_or(|r| r[*idx]))
        .map(|(_, &v)| v)
}

/// `D^j f` with a mask of nodes where the central stencil fits.
type MaskedField = (ScalarField, Vec<bool>);

fn derivative_field(f: &ScalarField, jdx: MultiIndex) -> MaskedField {
    let d = f.derivative(jdx);
    let mask = d.iter().map(Option::is_some).collect();
    let values = d.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    (ScalarField { grid: f.grid, values }, mask)
}

/// `(sum w |v|^p)^(1/p)`; `p = inf` gives the sup.
pub fn lp_norm(values: impl Iterator<Item = f64>, weight: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: f64 = values.map(|v| v.abs().powf(p)).sum();
    (weight * s).powf(1.0 / p)
}

/// Hölder seminorm `sup |f(x) - f(y)| / |x - y|^gamma` over sample pairs.
pub fn holder_seminorm(values: &[f64], points: &[Point], gamma: f64, seed: u64) -> Result<SweepResult, NormError> {
    check_gamma(gamma)?;
    if values.len() != points.len() {
        return Err(NormError::LengthMismatch(values.len(), points.len()));
    }
    if points.len() < 2 {
        return Err(NormError::TooFewPoints(points.len()));
    }
    let half = 0.5 * gamma;
    Ok(pair_sup(
        points,
        |i, j| {
            let diff = (values[i] - values[j]).abs();
            if diff == 0.0 {
                return 0.0;
            }
            let (dx, dy) = (points[i][0] - points[j][0], points[i][1] - points[j][1]);
            diff / (dx * dx + dy * dy).powf(half)
        },
        seed,
    ))
}

/// [`holder_seminorm`] over the nodes of a region (all nodes when `None`).
pub fn holder_seminorm_field(
    f: &ScalarField,
    region: Option<&[bool]>,
    gamma: f64,
    seed: u64,
) -> Result<SweepResult, NormError> {
    let idx: Vec<usize> = (0..f.values.len()).filter(|&k| region.is_none_or(|r| r[k])).collect();
    let values: Vec<f64> = idx.iter().map(|&k| f.values[k]).collect();
    let points: Vec<Point> = idx.iter().map(|&k| f.grid.point(k)).collect();
    holder_seminorm(&values, &points, gamma, seed)
}

/// `max_{|j| <= m} sup |D^j f|` over region nodes where central stencils fit.
pub fn cm_norm(f: &ScalarField, m: u32, region: Option<&[bool]>) -> Result<f64, NormError> {
    check_node_order(m)?;
    let mut best = 0.0f64;
    for jdx in MultiIndex::up_to(m) {
        let mut any = false;
        for idx in 0..f.values.len() {
            if region.is_some_and(|r| !r[idx]) {
                continue;
            }
            let (i, j) = f.grid.ij(idx);
            if let Some(v) = f.derivative_at(jdx, i, j) {
                any = true;
                best = best.max(v.abs());
            }
        }
        if !any {
            return Err(NormError::RegionTooThin { order: jdx.order() });
        }
    }
    Ok(best)
}

/// Cell-centered 1D operator: node offsets from the cell's left node and weights.
fn cell_operator(order: u32) -> (isize, &'static [f64]) {
    match order {
        0 => (0, &[0.5, 0.5]),
        1 => (0, &[-1.0, 1.0]),
        2 => (-1, &[0.5, -0.5, -0.5, 0.5]),
        3 => (-1, &[-1.0, 3.0, -3.0, 1.0]),
        _ => unreachable!("cell operators are tabulated up to order 3"),
    }
}

/// `D^j f` at cell centers; `None` where the stencil leaves the grid.
fn cell_derivative(f: &ScalarField, jdx: MultiIndex, ci: usize, cj: usize) -> Option<f64> {
    let g = &f.grid;
    let (ox, wx) = cell_operator(jdx.0);
    let (oy, wy) = cell_operator(jdx.1);
    let x0 = ci as isize + ox;
    let y0 = cj as isize + oy;
    if x0 < 0 || y0 < 0 || x0 as usize + wx.len() > g.nx() || y0 as usize + wy.len() > g.ny() {
        return None;
    }
    let (x0, y0) = (x0 as usize, y0 as usize);
    let mut acc = 0.0;
    for (b, &vy) in wy.iter().enumerate() {
        let row = (y0 + b) * g.nx();
        let mut inner = 0.0;
        for (a, &vx) in wx.iter().enumerate() {
            inner += vx * f.values[row + x0 + a];
        }
        acc += vy * inner;
    }
    Some(acc / g.h().powi(jdx.order() as i32))
}

fn cell_in_region(g: &Grid, region: Option<&[bool]>, ci: usize, cj: usize) -> bool {
    match region {
        None => true,
        Some(r) => {
            let a = g.index(ci, cj);
            r[a] && r[a + 1] && r[a + g.nx()] && r[a + g.nx() + 1]
        }
    }
}

/// `||D^j f||_p^p` summed over cells with midpoint quadrature.
fn cell_power_sum(f: &ScalarField, jdx: MultiIndex, p: f64, region: Option<&[bool]>) -> Option<f64> {
    let g = &f.grid;
    let mut acc = 0.0;
    let mut any = false;
    for cj in 0..g.dims[1] {
        for ci in 0..g.dims[0] {
            if !cell_in_region(g, region, ci, cj) {
                continue;
            }
            if let Some(v) = cell_derivative(f, jdx, ci, cj) {
                any = true;
                acc += v.abs().powf(p);
            }
        }
    }
    any.then_some(acc * g.h() * g.h())
}

/// Discrete `W^{m,p}` norm `(sum_{|j| <= m} ||D^j f||_p^p)^(1/p)`.
///
/// Derivatives are cell-centered differences, integrated with the midpoint
/// rule; cells whose stencil leaves the grid are skipped.
pub fn wmp_norm(f: &ScalarField, m: u32, p: f64, region: Option<&[bool]>) -> Result<f64, NormError> {
    check_p(p)?;
    if m > MAX_CELL_ORDER {
        return Err(NormError::OrderTooHigh(m));
    }
    let mut total = 0.0;
    for jdx in MultiIndex::up_to(m) {
        total += cell_power_sum(f, jdx, p, region).ok_or(NormError::RegionTooThin { order: jdx.order() })?;
    }
    Ok(total.powf(1.0 / p))
}

/// `||nabla^m f||_p = (sum_{|j| = m} ||D^j f||_p^p)^(1/p)`, one term per
/// canonical multi-index.
pub fn gradient_lp(f: &ScalarField, m: u32, p: f64, region: Option<&[bool]>) -> Result<f64, NormError> {
    check_p(p)?;
    if m > MAX_CELL_ORDER {
        return Err(NormError::OrderTooHigh(m));
    }
    let mut total = 0.0;
    for jdx in MultiIndex::of_order(m) {
        total += cell_power_sum(f, jdx, p, region).ok_or(NormError::RegionTooThin { order: m })?;
    }
    Ok(total.powf(1.0 / p))
}

/// Cell-centered grid: node `(i, j)` is the center of cell `(i, j)` of `grid`.
pub fn dual_grid(grid: &Grid) -> Grid {
    let h = grid.h();
    Grid {
        origin: [grid.origin[0] + 0.5 * h, grid.origin[1] + 0.5 * h],
        spacing: h,
        dims: [grid.dims[0] - 1, grid.dims[1] - 1],
    }
}

/// Staggered divergence at cell centers, returned on [`dual_grid`].
pub fn divergence(u: &VectorField2) -> ScalarField {
    let g = &u.grid;
    let h = g.h();
    let mut values = Vec::with_capacity(g.dims[0] * g.dims[1]);
    for j in 0..g.dims[1] {
        for i in 0..g.dims[0] {
            let dx = u.u1_at(i + 1, j) - u.u1_at(i, j);
            let dy = u.u2_at(i, j + 1) - u.u2_at(i, j);
            values.push((dx + dy) / h);
        }
    }
    ScalarField { grid: dual_grid(g), values }
}

pub fn max_divergence(u: &VectorField2) -> f64 {
    divergence(u).sup()
}

/// Repeated forward differences `Delta^(a,b) / h^(a+b)` of a `w` by `ht`
/// row-major lattice.
fn lattice_difference(values: &[f64], w: usize, ht: usize, jdx: MultiIndex, h: f64) -> Vec<f64> {
    let mut cur = values.to_vec();
    let (mut cw, mut ch) = (w, ht);
    for _ in 0..jdx.0 {
        let mut next = Vec::with_capacity((cw - 1) * ch);
        for j in 0..ch {
            for i in 0..cw - 1 {
                next.push((cur[j * cw + i + 1] - cur[j * cw + i]) / h);
            }
        }
        cur = next;
        cw -= 1;
    }
    for _ in 0..jdx.1 {
        let mut next = Vec::with_capacity(cw * (ch - 1));
        for j in 0..ch - 1 {
            for i in 0..cw {
                next.push((cur[(j + 1) * cw + i] - cur[j * cw + i]) / h);
            }
        }
        cur = next;
        ch -= 1;
    }
    cur
}

fn component_lattices(u: &VectorField2) -> [(&[f64], usize, usize); 2] {
    let (nx, ny) = (u.grid.nx(), u.grid.ny());
    [(&u.u1, nx, ny - 1), (&u.u2, nx - 1, ny)]
}

/// `max_{|j| <= m} sup |Delta^j u_c|` over both staggered components.
pub fn vector_cm_norm(u: &VectorField2, m: u32) -> f64 {
    let h = u.grid.h();
    let mut best = 0.0f64;
    for (vals, w, ht) in component_lattices(u) {
        for jdx in MultiIndex::up_to(m) {
            for v in lattice_difference(vals, w, ht, jdx, h) {
                best = best.max(v.abs());
            }
        }
    }
    best
}

/// Discrete `W^{m,p}` norm of a staggered field, `h^2` per lattice sample.
pub fn vector_wmp_norm(u: &VectorField2, m: u32, p: f64) -> Result<f64, NormError> {
    check_p(p)?;
    let h = u.grid.h();
    let mut total = 0.0;
    for (vals, w, ht) in component_lattices(u) {
        for jdx in MultiIndex::up_to(m) {
            total += lattice_difference(vals, w, ht, jdx, h).iter().map(|v| v.abs().powf(p)).sum::<f64>();
        }
    }
    Ok((total * h * h).powf(1.0 / p))
}

/// `gamma`-Hölder seminorm of the order-`m` differences of both staggered
/// components, maximized over `|j| = m`.
pub fn vector_holder_seminorm(u: &VectorField2, m: u32, gamma: f64, seed: u64) -> Result<f64, NormError> {
    let h = u.grid.h();
    let mut best = 0.0f64;
    for (vals, w, ht) in component_lattices(u) {
        for jdx in MultiIndex::of_order(m) {
            let diff = lattice_difference(vals, w, ht, jdx, h);
            let cw = w - jdx.0 as usize;
            let points: Vec<Point> = (0..diff.len()).map(|k| [(k % cw) as f64 * h, (k / cw) as f64 * h]).collect();
            best = best.max(holder_seminorm(&diff, &points, gamma, seed)?.value);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit(cells: usize) -> Grid {
        Grid::square(0.0, 1.0, cells).unwrap()
    }

    #[test]
    fn holder_of_constant_and_linear() {
        let g = unit(16);
        let c = ScalarField::constant(g, 3.0);
        assert_eq!(holder_seminorm_field(&c, None, 0.5, 0).unwrap().value, 0.0);
        let lin = ScalarField::from_fn(g, |p| p[0]);
        let r = holder_seminorm_field(&lin, None, 1.0, 0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(holder_seminorm(&[1.0, 2.0], &[[0.0, 0.0], [1.0, 0.0]], 1.5, 0), Err(NormError::GammaOutOfRange(1.5)));
    }

    #[test]
    fn holder_of_power_through_origin() {
        let g = Grid::square(-1.0, 2.0, 32).unwrap();
        let gamma = 0.5;
        let f = ScalarField::from_fn(g, |p| (p[0].hypot(p[1])).powf(gamma));
        assert!(holder_seminorm_field(&f, None, gamma, 0).unwrap().value >= 1.0 - 1e-12);
    }

    #[test]
    fn sine_h1_norm_matches_closed_form() {
        let g = unit(256);
        let f = ScalarField::from_fn(g, |p| (PI * p[0]).sin());
        let exact = (0.5 + 0.5 * PI * PI).sqrt();
        let got = wmp_norm(&f, 1, 2.0, None).unwrap();
        assert!((got - exact).abs() / exact < 0.01, "{got} vs {exact}");
        assert_eq!(wmp_norm(&ScalarField::zeros(g), 2, 2.0, None).unwrap(), 0.0);
        assert_relative_eq!(wmp_norm(&f.map(|v| 2.0 * v), 1, 3.0, None).unwrap(), 2.0 * wmp_norm(&f, 1, 3.0, None).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn cell_operators_are_exact_on_cubics() {
        let g = unit(8);
        let f = ScalarField::from_fn(g, |p| p[0].powi(3) + p[0] * p[1] * p[1]);
        let c = [g.node(3, 4)[0] + 0.0625, g.node(3, 4)[1] + 0.0625];
        assert_relative_eq!(cell_derivative(&f, MultiIndex(3, 0), 3, 4).unwrap(), 6.0, epsilon = 1e-9);
        assert_relative_eq!(cell_derivative(&f, MultiIndex(2, 0), 3, 4).unwrap(), 6.0 * c[0], epsilon = 1e-9);
        assert_relative_eq!(cell_derivative(&f, MultiIndex(1, 2), 3, 4).unwrap(), 2.0, epsilon = 1e-9);
        assert!(cell_derivative(&f, MultiIndex(2, 0), 0, 4).is_none());
    }

    #[test]
    fn divergence_examples() {
        let g = unit(32);
        let u = VectorField2::from_fn(g, |p| [p[0], 0.0]);
        assert!(divergence(&u).values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let w = VectorField2::from_fn(g, |p| [p[1], p[0]]);
        assert!(max_divergence(&w) < 1e-12);
    }

    #[test]
    fn vector_norms() {
        let g = unit(16);
        let u = VectorField2::from_fn(g, |p| [p[1], -p[0]]);
        assert_relative_eq!(vector_cm_norm(&u, 0), 1.0 - 1.0 / 32.0, epsilon = 1e-12);
        assert_relative_eq!(vector_cm_norm(&u, 1), 1.0, epsilon = 1e-12);
        assert!(vector_wmp_norm(&u, 1, 2.0).unwrap() > 0.0);
    }

    #[test]
    fn norm_spec_dispatch() {
        let g = unit(16);
        let f = ScalarField::from_fn(g, |p| p[0]);
        assert_relative_eq!(NormSpec::new(NormKind::Sup).evaluate(&f).unwrap(), 1.0);
        assert_relative_eq!(NormSpec::new(NormKind::Cm { m: 1 }).evaluate(&f).unwrap(), 1.0, epsilon = 1e-12);
        assert!(NormSpec::new(NormKind::Lp { p: 1.0 }).validate().is_err());
        assert!(NormSpec::new(NormKind::Wmp { m: 4, p: 2.0 }).validate().is_err());
    }
}
