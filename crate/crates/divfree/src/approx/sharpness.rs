//! Sharpness harness on a Koch-type curve: a field whose potential runs
//! through `[0, 1]` along the curve cannot be approximated by fields that
//! vanish near the curve, because those have potentials constant on it.

use serde::Serialize;

use super::cutoff::{smooth_cutoff, truncate};
use super::stream::{perp_gradient, raw_potential, stream_potential, support_gap};
use super::ApproxError;
use crate::geometry::{make_compact_set, mask_distance, CompactSet, KochCurve};
use crate::grid::{Grid, ScalarField, VectorField2};
use crate::jets::{jet_norm, whitney_extend, Jet};
use crate::whitney::{whitney_decompose, WhitneyParams};

/// Potential oscillation on the curve below which a candidate counts as
/// having a constant potential there.
const CONSTANT_OSC: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct KochTarget {
    pub curve: KochCurve,
    pub set: CompactSet,
    /// Order-1 jet: the curve parameter with vanishing gradient.
    pub jet: Jet,
    pub potential: ScalarField,
    pub field: VectorField2,
    pub gamma: f64,
    /// `C^{1, gamma}` jet norm of the parameter jet.
    pub holder_constant: f64,
}

pub fn koch_target(curve: &KochCurve, grid: Grid, gamma: f64, seed: u64) -> Result<KochTarget, ApproxError> {
    let set = make_compact_set(&[curve.shape()], grid)?;
    let points = set.sample_points();
    let f0 = points.iter().map(|&p| curve.parameter_of(p)).collect();
    let jet = Jet::from_values(1, points, f0)?;
    let dec = whitney_decompose(&set, &WhitneyParams::for_set(&set))?;
    let potential = whitney_extend(&jet, &dec, 1, grid)?;
    let field = perp_gradient(&potential);
    let holder_constant = jet_norm(&jet, 1, gamma, seed)?.jet_norm;
    Ok(KochTarget { curve: curve.clone(), set, jet, potential, field, gamma, holder_constant })
}

/// The zero field and `grad_perp(F (1 - rho_eps))` per width.
pub fn truncation_candidates(target: &KochTarget, widths: &[f64]) -> Result<Vec<(String, VectorField2)>, ApproxError> {
    let mut out = vec![("zero".to_string(), VectorField2::zeros(target.set.grid))];
    for &w in widths {
        let cutoff = smooth_cutoff(&target.set, w)?;
        out.push((format!("truncation_{w}"), perp_gradient(&truncate(&target.potential, &cutoff))));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateCertificate {
    pub name: String,
    pub support_gap: f64,
    /// Oscillation of the candidate's potential on the curve.
    pub candidate_osc: f64,
    pub constant_on_curve: bool,
    /// Half the oscillation on the curve of the potential difference: no
    /// constant is closer than this to the target potential in sup norm.
    pub potential_gap: f64,
    /// Oscillation over the `l1` distance of the nodes attaining it; a
    /// staircase path of that length joins them.
    pub c0_lower_bound: f64,
    pub actual_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub gamma: f64,
    pub holder_constant: f64,
    pub curve_samples: usize,
    pub segments: usize,
    pub turn_angle: f64,
    pub candidates: Vec<CandidateCertificate>,
}

impl SharpnessReport {
    /// Every candidate is constant on the curve, stays `>= min_gap` away in
    /// potential, and its error respects the lower bound.
    pub fn certifies(&self, min_gap: f64) -> bool {
        self.candidates.iter().all(|c| {
            c.constant_on_curve && c.potential_gap >= min_gap && c.c0_lower_bound > 0.0 && c.actual_error >= c.c0_lower_bound
        })
    }
}

pub fn sharpness_certificate(
    target: &KochTarget,
    candidates: &[(String, VectorField2)],
) -> Result<SharpnessReport, ApproxError> {
    let g = target.set.grid;
    let dist = mask_distance(&g, &target.set.mask);
    let samples = target.set.samples();
    let base = raw_potential(&target.field)?;
    let mut out = Vec::new();
    for (name, cand) in candidates {
        let gap = support_gap(cand, &dist);
        if gap <= 0.0 {
            return Err(ApproxError::CandidateTouchesSet { name: name.clone(), gap });
        }
        let phi = stream_potential(cand)?;
        let (lo, hi) = extent(samples.iter().map(|&s| phi.values[s]));
        // Normalizing the candidate differently only shifts the difference.
        let diff: Vec<(usize, f64)> = samples.iter().map(|&s| (s, base.values[s] - phi.values[s])).collect();
        let (min_at, max_at) = argextent(&diff);
        let osc = max_at.1 - min_at.1;
        let (a, b) = (g.ij(min_at.0), g.ij(max_at.0));
        let l1 = (a.0.abs_diff(b.0) + a.1.abs_diff(b.1)) as f64 * g.h();
        out.push(CandidateCertificate {
            name: name.clone(),
            support_gap: gap,
            candidate_osc: hi - lo,
            constant_on_curve: hi - lo <= CONSTANT_OSC,
            potential_gap: osc / 2.0,
            c0_lower_bound: if l1 > 0.0 { osc / l1 } else { 0.0 },
            actual_error: target.field.sub(cand)?.sup(),
        });
    }
    Ok(SharpnessReport {
        gamma: target.gamma,
        holder_constant: target.holder_constant,
        curve_samples: samples.len(),
        segments: target.curve.n_segments(),
        turn_angle: target.curve.turn_angle,
        candidates: out,
    })
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn argextent(items: &[(usize, f64)]) -> ((usize, f64), (usize, f64)) {
    let mut lo = items[0];
    let mut hi = items[0];
    for &it in items {
        if it.1 < lo.1 {
            lo = it;
        }
        if it.1 > hi.1 {
            hi = it;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::koch_curve;

    #[test]
    fn truncations_cannot_close_the_gap() {
        let curve = koch_curve(0.35, 3).unwrap();
        let grid = Grid::new([-0.5, -0.8], 2.0 / 128.0, [128, 128]).unwrap();
        let target = koch_target(&curve, grid, 0.5, 1).unwrap();
        let cands = truncation_candidates(&target, &[0.25, 0.125]).unwrap();
        let report = sharpness_certificate(&target, &cands).unwrap();
        assert_eq!(report.candidates.len(), 3);
        assert!(report.certifies(0.4), "{report:?}");
        assert!(report.holder_constant > 0.0);
    }

    #[test]
    fn the_target_itself_touches_the_curve() {
        let curve = koch_curve(0.3, 2).unwrap();
        let grid = Grid::new([-0.5, -0.8], 2.0 / 64.0, [64, 64]).unwrap();
        let target = koch_target(&curve, grid, 0.5, 1).unwrap();
        let cands = vec![("target".to_string(), target.field.clone())];
        assert!(matches!(sharpness_certificate(&target, &cands), Err(ApproxError::CandidateTouchesSet { .. })));
    }
}
