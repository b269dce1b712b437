//! The auxiliary function `h`: locally constant near `K`, equal to `c_i`
//! on `K_i = K ∩ U_i`, smooth everywhere.

use serde::Serialize;

use super::ApproxError;
use crate::geometry::cover::min_pairwise_gap;
use crate::geometry::{mask_distance, CompactSet};
use crate::grid::ScalarField;
use crate::multi_index::MultiIndex;
use crate::whitney::smooth_step;

#[derive(Debug, Clone)]
pub struct Auxiliary {
    pub field: ScalarField,
    /// Smallest distance between two non-empty `K_i`; `inf` for one part.
    pub gap: f64,
    /// `h = c_i` on the `radius`-neighborhood of `K_i`.
    pub radius: f64,
    pub constants: Vec<f64>,
    /// Whether the distances came from analytic primitives.
    pub analytic: bool,
    /// `sup |D^k h| radius^k` for `k = 1..=3`.
    pub derivative_bounds: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxiliarySummary {
    pub gap: f64,
    pub radius: f64,
    pub analytic: bool,
    pub derivative_bounds: [f64; 3],
}

impl Auxiliary {
    pub fn summary(&self) -> AuxiliarySummary {
        AuxiliarySummary { gap: self.gap, radius: self.radius, analytic: self.analytic, derivative_bounds: self.derivative_bounds }
    }
}

/// Distances to each part, from the primitives when every primitive meets
/// exactly one part.
fn part_distances(k: &CompactSet, parts: &[Vec<bool>]) -> (Vec<ScalarField>, bool) {
    let g = k.grid;
    let h = g.h();
    let mut owner: Vec<Option<usize>> = Vec::new();
    for s in &k.primitives {
        let mut hit: Option<usize> = None;
        let mut ok = true;
        for idx in k.samples() {
            if !s.covers_node(g.point(idx), h) {
                continue;
            }
            match parts.iter().position(|p| p[idx]) {
                Some(i) if hit.is_none_or(|j| j == i) => hit = Some(i),
                _ => ok = false,
            }
        }
        owner.push(if ok { hit } else { None });
    }
    let analytic = !k.primitives.is_empty()
        && owner.iter().all(Option::is_some)
        && (0..parts.len()).all(|i| !parts[i].iter().any(|&m| m) || owner.contains(&Some(i)));
    let fields = parts
        .iter()
        .enumerate()
        .map(|(i, mask)| {
            if !analytic {
                return mask_distance(&g, mask);
            }
            let mine: Vec<_> = k.primitives.iter().zip(&owner).filter(|(_, o)| **o == Some(i)).map(|(s, _)| s).collect();
            let mut d = ScalarField::from_fn(g, |p| mine.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min));
            for (v, &m) in d.values.iter_mut().zip(mask) {
                if m {
                    *v = 0.0;
                }
            }
            d
        })
        .collect();
    (fields, analytic)
}

/// `h = sum_i c_i S((g/2 - d_i) / (g/4))` with `g` the gap between the
/// parts `K_i = K ∩ covers[i]`. Each bump is 1 on the `g/4` neighborhood of
/// its part and vanishes beyond `g/2`, so the bumps have disjoint supports.
pub fn auxiliary_function(k: &CompactSet, covers: &[CompactSet], constants: &[f64]) -> Result<Auxiliary, ApproxError> {
    if covers.len() != constants.len() {
        return Err(ApproxError::LengthMismatch(covers.len(), constants.len()));
    }
    let g = k.grid;
    if covers.iter().any(|c| c.grid != g) {
        return Err(ApproxError::Grid(crate::grid::GridError::GridMismatch));
    }
    let parts: Vec<Vec<bool>> =
        covers.iter().map(|c| c.mask.iter().zip(&k.mask).map(|(&a, &b)| a && b).collect()).collect();
    let live: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].iter().any(|&m| m)).collect();
    if live.len() <= 1 {
        let c = live.first().map_or(0.0, |&i| constants[i]);
        return Ok(Auxiliary {
            field: ScalarField::constant(g, c),
            gap: f64::INFINITY,
            radius: f64::INFINITY,
            constants: constants.to_vec(),
            analytic: false,
            derivative_bounds: [0.0; 3],
        });
    }
    let live_parts: Vec<Vec<bool>> = live.iter().map(|&i| parts[i].clone()).collect();
    let mut gap = min_pairwise_gap(&g, &live_parts);
    let (dists, analytic) = part_distances(k, &live_parts);
    if analytic {
        // The primitives may sit closer to each other than their nodes.
        for (a, d) in dists.iter().enumerate() {
            for (b, mask) in live_parts.iter().enumerate() {
                if a != b {
                    for (idx, &m) in mask.iter().enumerate() {
                        if m {
                            gap = gap.min(d.values[idx]);
                        }
                    }
                }
            }
        }
    }
    let min = 2.0 * g.h();
    if gap < min * (1.0 - 1e-12) {
        return Err(ApproxError::CoversTouch { gap, min });
    }
    let radius = gap / 4.0;
    let mut values = vec![0.0; g.n_nodes()];
    for (&i, d) in live.iter().zip(&dists) {
        for (v, &dv) in values.iter_mut().zip(&d.values) {
            *v += constants[i] * smooth_step((2.0 * radius - dv) / radius)[0];
        }
    }
    let field = ScalarField { grid: g, values };
    let mut derivative_bounds = [0.0f64; 3];
    for (slot, b) in derivative_bounds.iter_mut().enumerate() {
        let order = slot as u32 + 1;
        for jdx in MultiIndex::of_order(order) {
            let sup = field.derivative(jdx).into_iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            *b = b.max(sup * radius.powi(order as i32));
        }
    }
    Ok(Auxiliary { field, gap, radius, constants: constants.to_vec(), analytic, derivative_bounds })
}
