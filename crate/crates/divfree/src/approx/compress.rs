//! Interval covers of `Psi(K)` and the monotone compression
//! `eta(t) = integral_0^t 1_U(s) ds`.

use serde::Serialize;

use super::ApproxError;
use crate::geometry::CompactSet;
use crate::grid::ScalarField;
use crate::jets::{jet_norm, maximal_lp, EvalLattice, Jet};

/// Share of the remaining budget below which neighboring clusters merge.
pub const BUDGET_FRACTION: f64 = 0.25;

/// Sorted open intervals covering `values`, total length `< eps`, closures
/// pairwise disjoint.
///
/// Values are clustered greedily: gaps are visited from the smallest and
/// merged while shorter than [`BUDGET_FRACTION`] of the budget left after
/// merging. Each cluster is then padded by
/// `min(left / (4 n), smallest gap / 4)`.
pub fn cover_values(values: &[f64], eps: f64) -> Result<Vec<(f64, f64)>, ApproxError> {
    if eps <= 0.0 || eps.is_nan() {
        return Err(ApproxError::NonPositiveBudget(eps));
    }
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Err(ApproxError::NothingToCover);
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut order: Vec<usize> = (0..v.len() - 1).collect();
    order.sort_by(|&a, &b| (v[a + 1] - v[a]).total_cmp(&(v[b + 1] - v[b])).then(a.cmp(&b)));
    let mut merged = vec![false; v.len().saturating_sub(1)];
    let mut span = 0.0;
    for &g in &order {
        let gap = v[g + 1] - v[g];
        if gap < BUDGET_FRACTION * (eps - span) {
            merged[g] = true;
            span += gap;
        } else {
            break;
        }
    }
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    let mut start = v[0];
    for i in 0..v.len() {
        if i + 1 == v.len() || !merged[i] {
            clusters.push((start, v[i]));
            if i + 1 < v.len() {
                start = v[i + 1];
            }
        }
    }
    let min_gap = clusters.windows(2).map(|w| w[1].0 - w[0].1).fold(f64::INFINITY, f64::min);
    let n = clusters.len() as f64;
    let pad = ((eps - span) / (4.0 * n)).min(min_gap / 4.0);
    let scale = 1.0 + v[0].abs().max(v[v.len() - 1].abs());
    if pad <= 1e-12 * scale {
        return Err(ApproxError::BudgetTooSmall { budget: eps, minimal: span, clusters: clusters.len() });
    }
    Ok(clusters.into_iter().map(|(lo, hi)| (lo - pad, hi + pad)).collect())
}

/// [`cover_values`] applied to `Psi` at the samples of `K`.
pub fn image_cover(psi: &ScalarField, k: &CompactSet, eps: f64) -> Result<Vec<(f64, f64)>, ApproxError> {
    let values: Vec<f64> = k.samples().into_iter().map(|s| psi.values[s]).collect();
    cover_values(&values, eps)
}

/// Piecewise-linear `eta` with slope 1 on the intervals and 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionMap {
    pub intervals: Vec<(f64, f64)>,
    /// `eta(t) = t - offsets[i]` on interval `i`.
    pub offsets: Vec<f64>,
    pub total_length: f64,
    /// `integral_{-inf}^0 1_U`.
    base: f64,
}

pub fn compression_map(intervals: &[(f64, f64)]) -> Result<CompressionMap, ApproxError> {
    for w in intervals.windows(2) {
        if w[0].1 >= w[1].0 {
            return Err(ApproxError::OverlappingIntervals(w[0].0, w[0].1, w[1].0, w[1].1));
        }
    }
    if let Some(&(l, r)) = intervals.iter().find(|(l, r)| !(l < r)) {
        return Err(ApproxError::OverlappingIntervals(l, r, l, r));
    }
    let mut map = CompressionMap { intervals: intervals.to_vec(), offsets: Vec::new(), total_length: 0.0, base: 0.0 };
    map.base = map.cumulative(0.0);
    let mut prefix = 0.0;
    for &(l, r) in intervals {
        map.offsets.push(l - prefix + map.base);
        prefix += r - l;
    }
    map.total_length = prefix;
    Ok(map)
}

impl CompressionMap {
    fn cumulative(&self, t: f64) -> f64 {
        self.intervals.iter().map(|&(l, r)| (t - l).clamp(0.0, r - l)).sum()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.cumulative(t) - self.base
    }

    /// Interval containing `t`, if any.
    pub fn interval_of(&self, t: f64) -> Option<usize> {
        self.intervals.iter().position(|&(l, r)| l < t && t < r)
    }

    /// `sup |eta|`, attained at one of the two ends.
    pub fn sup(&self) -> f64 {
        self.base.max(self.total_length - self.base)
    }
}

/// `f^(0) -> eta(f^(0))` with all higher entries zero.
pub fn compress_jet(jet: &Jet, eta: &CompressionMap) -> Result<Jet, ApproxError> {
    jet.require_zero_higher()?;
    let mut out = jet.clone();
    for v in &mut out.values[0] {
        *v = eta.eval(*v);
    }
    Ok(out)
}

/// Smallness diagnostics `delta(eps)` of a compressed jet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompressionDelta {
    pub sup: f64,
    /// `C^{m, gamma}` jet norm.
    pub jet_norm: f64,
    /// `||M^(m) f||_p` on the lattice, when `p` is given.
    pub maximal_lp: Option<f64>,
}

pub fn compression_delta(
    jet: &Jet,
    m: u32,
    gamma: f64,
    p: Option<f64>,
    lattice: &EvalLattice,
    seed: u64,
) -> Result<CompressionDelta, ApproxError> {
    let norm = jet_norm(jet, m, gamma, seed)?;
    let maximal = match p {
        Some(p) if jet.len() >= 2 => Some(maximal_lp(jet, m, p, lattice)?),
        _ => None,
    };
    Ok(CompressionDelta { sup: jet.sup_norm(), jet_norm: norm.jet_norm, maximal_lp: maximal })
}
