//! Mollified cutoffs `rho_eps` and Hedberg truncation `F (1 - rho_eps)`.

use serde::Serialize;

use super::ApproxError;
use crate::geometry::{mask_distance, CompactSet, Point};
use crate::grid::{Grid, ScalarField};
use crate::jets::restrict;
use crate::multi_index::MultiIndex;
use crate::norms::{cm_norm, holder_seminorm};
use crate::whitney::smooth_step;

/// Relative size (against `max |D^j F|` on the grid) below which restricted
/// jet entries count as vanishing.
pub const VANISH_TOLERANCE: f64 = 0.05;

/// Plateau and support radii of `rho_eps`, in units of `eps`.
const INNER: f64 = 0.4;
const OUTER: f64 = 0.6;

/// Distance to `K` at every node: analytic for primitives, exact to the
/// mask otherwise.
pub fn distance_to_set(k: &CompactSet) -> ScalarField {
    if k.primitives.is_empty() {
        return mask_distance(&k.grid, &k.mask);
    }
    let mut d = ScalarField::from_fn(k.grid, |p| k.analytic_distance(p).unwrap_or(f64::INFINITY));
    for (v, &m) in d.values.iter_mut().zip(&k.mask) {
        if m {
            *v = 0.0;
        }
    }
    d
}

/// `rho_eps` with its measured derivative constants.
#[derive(Debug, Clone)]
pub struct SmoothCutoff {
    pub eps: f64,
    pub field: ScalarField,
    /// `sup |D^k rho| eps^k` for `k = 0..=3`, maximized over `|alpha| = k`.
    pub constants: [f64; 4],
}

/// `rho_eps = S((0.6 eps - d) / (0.2 eps))`: the indicator of `K_{eps/2}`
/// smoothed across a band of width `eps / 5`, so `rho = 1` on `K_{0.4 eps}`
/// and `rho = 0` off `K_{0.6 eps}`.
pub fn smooth_cutoff(k: &CompactSet, eps: f64) -> Result<SmoothCutoff, ApproxError> {
    let d = distance_to_set(k);
    cutoff_from_distance(&d, eps)
}

pub(crate) fn cutoff_from_distance(d: &ScalarField, eps: f64) -> Result<SmoothCutoff, ApproxError> {
    let min = 8.0 * d.grid.h();
    if eps < min * (1.0 - 1e-12) {
        return Err(ApproxError::CutoffTooNarrow { eps, min });
    }
    let width = (OUTER - INNER) * eps;
    let field = d.map(|dv| smooth_step((OUTER * eps - dv) / width)[0]);
    let mut constants = [0.0f64; 4];
    for (order, c) in constants.iter_mut().enumerate() {
        for jdx in MultiIndex::of_order(order as u32) {
            let sup = field.derivative(jdx).into_iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            *c = c.max(sup * eps.powi(order as i32));
        }
    }
    Ok(SmoothCutoff { eps, field, constants })
}

/// `F (1 - rho)`.
pub fn truncate(f: &ScalarField, cutoff: &SmoothCutoff) -> ScalarField {
    ScalarField { grid: f.grid, values: f.values.iter().zip(&cutoff.field.values).map(|(a, r)| a * (1.0 - r)).collect() }
}

/// The four estimates behind `||F rho_eps||_{C^{m,gamma}} -> 0` for one
/// derivative order `t = |theta|` (or `|j - theta|` for the cutoff terms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedbergTerm {
    pub order: u32,
    /// (i) `sup_{K_eps} |D^theta F|`.
    pub f_sup: f64,
    /// (ii) `gamma`-seminorm of `D^theta F` on `K_eps`.
    pub f_holder: f64,
    /// (iii) `sup |D^alpha rho_eps|`.
    pub rho_sup: f64,
    /// (iv) `gamma`-seminorm of `D^alpha rho_eps`.
    pub rho_holder: f64,
    /// (i) over `omega(eps) eps^(m - t + gamma)`.
    pub ratio_f_sup: f64,
    /// (ii) over `omega(2 eps) eps^(m - t)`.
    pub ratio_f_holder: f64,
    /// (iii) times `eps^t`.
    pub ratio_rho_sup: f64,
    /// (iv) times `eps^(t + gamma)`.
    pub ratio_rho_holder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedbergEstimates {
    pub eps: f64,
    pub m: u32,
    pub gamma: f64,
    /// `|nabla^m F|` seminorm on `K_eps`, `K_2eps` and `K_eps/4`.
    pub omega: f64,
    pub omega_double: f64,
    pub omega_quarter: f64,
    pub terms: Vec<HedbergTerm>,
    /// `max_{|j| <= m} omega(2 eps) eps^(m - |j|)`.
    pub product_bound: f64,
    /// `||F rho_eps||_{C^m}` on the grid.
    pub truncated_cm: f64,
    pub cutoff_constants: [f64; 4],
    pub region_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Hedberg {
    /// `F (1 - rho_eps)`.
    pub field: ScalarField,
    pub estimates: HedbergEstimates,
}

/// `sup` for `gamma = 0`, the Hölder seminorm otherwise.
fn seminorm(values: &[f64], points: &[Point], gamma: f64, seed: u64) -> Result<f64, ApproxError> {
    if values.len() < 2 {
        return Ok(0.0);
    }
    if gamma == 0.0 {
        return Ok(values.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    }
    Ok(holder_seminorm(values, points, gamma, seed)?.value)
}

/// Values and points of `D^jdx f` on region nodes where the stencil fits.
fn derivative_on(f: &ScalarField, jdx: MultiIndex, region: &[bool]) -> (Vec<f64>, Vec<Point>) {
    let g: &Grid = &f.grid;
    let mut vals = Vec::new();
    let mut pts = Vec::new();
    for (idx, v) in f.derivative(jdx).into_iter().enumerate() {
        if let (true, Some(v)) = (region[idx], v) {
            vals.push(v);
            pts.push(g.point(idx));
        }
    }
    (vals, pts)
}

/// `F (1 - rho_eps)` for `F` vanishing to order `m` on `K`, with the
/// measured estimates (i)-(iv).
///
/// For `gamma > 0` the `m`-th derivatives must flatten toward `K`: the
/// seminorm on `K_{eps/4}` has to drop below 0.9 times the one on `K_eps`.
pub fn hedberg_truncate(
    f: &ScalarField,
    k: &CompactSet,
    eps: f64,
    m: u32,
    gamma: f64,
    seed: u64,
) -> Result<Hedberg, ApproxError> {
    if f.grid != k.grid {
        return Err(ApproxError::Grid(crate::grid::GridError::GridMismatch));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ApproxError::Norm(crate::norms::NormError::GammaOutOfRange(gamma)));
    }
    let d = distance_to_set(k);
    let cutoff = cutoff_from_distance(&d, eps)?;
    let jet = restrict(f, k, m)?;
    for (pos, jdx) in MultiIndex::up_to(m).into_iter().enumerate() {
        let scale = f.derivative(jdx).into_iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let tolerance = VANISH_TOLERANCE * scale + 1e-12;
        let worst = jet.values[pos].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if worst > tolerance {
            return Err(ApproxError::NotVanishing { order: jdx.order(), value: worst, tolerance });
        }
    }
    let near = |r: f64| -> Vec<bool> { d.values.iter().map(|&v| v < r).collect() };
    let (k_eps, k_double, k_quarter) = (near(eps), near(2.0 * eps), near(0.25 * eps));
    let omega_on = |region: &[bool]| -> Result<f64, ApproxError> {
        let mut w = 0.0f64;
        for jdx in MultiIndex::of_order(m) {
            let (v, p) = derivative_on(f, jdx, region);
            w = w.max(seminorm(&v, &p, gamma, seed)?);
        }
        Ok(w)
    };
    let omega = omega_on(&k_eps)?;
    let omega_double = omega_on(&k_double)?;
    let omega_quarter = omega_on(&k_quarter)?;
    if gamma > 0.0 && omega > 1e-12 && omega_quarter > 0.9 * omega {
        return Err(ApproxError::HolderNotVanishing { outer: omega, inner: omega_quarter });
    }
    let mut terms = Vec::new();
    for t in 0..=m {
        let (mut f_sup, mut f_holder, mut rho_sup, mut rho_holder) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for jdx in MultiIndex::of_order(t) {
            let (v, p) = derivative_on(f, jdx, &k_eps);
            f_sup = f_sup.max(v.iter().fold(0.0f64, |a, x| a.max(x.abs())));
            f_holder = f_holder.max(seminorm(&v, &p, gamma, seed)?);
            let rho_all = cutoff.field.derivative(jdx);
            rho_sup = rho_sup.max(rho_all.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())));
            let (rv, rp) = derivative_on(&cutoff.field, jdx, &k_eps);
            rho_holder = rho_holder.max(seminorm(&rv, &rp, gamma, seed)?);
        }
        let rest = (m - t) as f64;
        let div = |a: f64, b: f64| if b > 0.0 { a / b } else if a == 0.0 { 0.0 } else { f64::INFINITY };
        terms.push(HedbergTerm {
            order: t,
            f_sup,
            f_holder,
            rho_sup,
            rho_holder,
            ratio_f_sup: div(f_sup, omega * eps.powf(rest + gamma)),
            ratio_f_holder: div(f_holder, omega_double * eps.powf(rest)),
            ratio_rho_sup: rho_sup * eps.powi(t as i32),
            ratio_rho_holder: rho_holder * eps.powf(t as f64 + gamma),
        });
    }
    let product_bound = (0..=m).map(|t| omega_double * eps.powi((m - t) as i32)).fold(0.0f64, f64::max);
    let f_rho = ScalarField { grid: f.grid, values: f.values.iter().zip(&cutoff.field.values).map(|(a, r)| a * r).collect() };
    let truncated_cm = cm_norm(&f_rho, m, None)?;
    let field = truncate(f, &cutoff);
    let region_nodes = k_eps.iter().filter(|&&b| b).count();
    Ok(Hedberg {
        field,
        estimates: HedbergEstimates {
            eps,
            m,
            gamma,
            omega,
            omega_double,
            omega_quarter,
            terms,
            product_bound,
            truncated_cm,
            cutoff_constants: cutoff.constants,
            region_nodes,
        },
    })
}
