//! Gluing two approximations through a cutoff:
//! `grad_perp(chi Phi_1 + (1 - chi) Phi_2)`.

use super::stream::{perp_gradient, raw_potential, support_gap};
use super::ApproxError;
use crate::geometry::{mask_distance, CompactSet};
use crate::grid::{GridError, ScalarField, VectorField2};

/// Largest edge slope of `chi`.
fn max_slope(chi: &ScalarField) -> f64 {
    let g = chi.grid;
    let h = g.h();
    let mut s = 0.0f64;
    for idx in 0..g.n_nodes() {
        let (i, j) = g.ij(idx);
        if i + 1 < g.nx() {
            s = s.max((chi.values[idx + 1] - chi.values[idx]).abs() / h);
        }
        if j + 1 < g.ny() {
            s = s.max((chi.values[idx + g.nx()] - chi.values[idx]).abs() / h);
        }
    }
    s
}

/// `C(chi) = 1 + 2 L sup |D chi|` with `L` the longest staircase path from
/// the grid origin. Bounds `sup |glued - u|` by `C(chi)` times the larger
/// of the two input errors in the sup norm: the discrete product rule
/// leaves a cross term `(Phi_1 - Phi_2) D chi`, and the potential difference
/// is at most `L sup |u_1 - u_2|`.
pub fn glue_constant(chi: &ScalarField) -> f64 {
    let g = chi.grid;
    let path = (g.nx() - 1 + g.ny() - 1) as f64 * g.h();
    1.0 + 2.0 * path * max_slope(chi)
}

fn check_cutoff(chi: &ScalarField, k: &CompactSet, target: f64) -> Result<(), ApproxError> {
    let g = chi.grid;
    for idx in k.samples() {
        for node in std::iter::once(idx).chain(g.neighbors4(idx)) {
            let v = chi.values[node];
            if v != target {
                let p = g.point(node);
                return Err(ApproxError::CutoffSupport { x: p[0], y: p[1], value: v });
            }
        }
    }
    Ok(())
}

/// Glues `u1` (vanishing near `k1`) and `u2` (vanishing near `k2`) with a
/// cutoff `chi` that is 1 on `k1` and 0 on `k2`, both including the
/// 4-neighbors. The result vanishes near `k1 ∪ k2`.
pub fn glue_approximations(
    u1: &VectorField2,
    k1: &CompactSet,
    u2: &VectorField2,
    k2: &CompactSet,
    chi: &ScalarField,
) -> Result<VectorField2, ApproxError> {
    let g = chi.grid;
    if [u1.grid, u2.grid, k1.grid, k2.grid].iter().any(|&o| o != g) {
        return Err(ApproxError::Grid(GridError::GridMismatch));
    }
    if let Some(idx) = chi.values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        let p = g.point(idx);
        return Err(ApproxError::CutoffSupport { x: p[0], y: p[1], value: chi.values[idx] });
    }
    check_cutoff(chi, k1, 1.0)?;
    check_cutoff(chi, k2, 0.0)?;
    for (index, (u, k)) in [(u1, k1), (u2, k2)].into_iter().enumerate() {
        if k.empty {
            continue;
        }
        let gap = support_gap(u, &mask_distance(&g, &k.mask));
        if gap <= 0.0 {
            return Err(ApproxError::SupportTouchesSet { index: index + 1, gap });
        }
    }
    let phi1 = raw_potential(u1)?;
    let phi2 = raw_potential(u2)?;
    let values = chi
        .values
        .iter()
        .zip(phi1.values.iter().zip(&phi2.values))
        .map(|(c, (a, b))| c * a + (1.0 - c) * b)
        .collect();
    Ok(perp_gradient(&ScalarField { grid: g, values }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_compact_set, Shape};
    use crate::grid::Grid;
    use crate::norms::max_divergence;
    use crate::whitney::smooth_step;

    fn bump(g: Grid, c: [f64; 2], r: f64) -> ScalarField {
        ScalarField::from_fn(g, |p| {
            let d = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt();
            smooth_step((r - d) / r)[0]
        })
    }

    #[test]
    fn glue_is_local_and_within_the_constant() {
        let g = Grid::square(-1.0, 2.0, 128).unwrap();
        let k1 = make_compact_set(&[Shape::disk([-0.5, 0.0], 0.1)], g).unwrap();
        let k2 = make_compact_set(&[Shape::disk([0.5, 0.0], 0.1)], g).unwrap();
        // A field supported near the origin, away from both disks.
        let target = bump(g, [0.0, 0.0], 0.3).map(|v| 0.3 * v);
        let u = perp_gradient(&target);
        // Two perturbations of u, each still vanishing near its own disk.
        let u1 = perp_gradient(&target.zip_with(&bump(g, [0.0, 0.5], 0.2), |a, b| a + 1e-3 * b).unwrap());
        let u2 = perp_gradient(&target.zip_with(&bump(g, [0.0, -0.5], 0.2), |a, b| a - 2e-3 * b).unwrap());
        let chi = ScalarField::from_fn(g, |p| smooth_step((0.2 - p[0]) / 0.4)[0]);
        let glued = glue_approximations(&u1, &k1, &u2, &k2, &chi).unwrap();
        assert_eq!(max_divergence(&glued), 0.0);
        let e = |v: &VectorField2| v.sub(&u).unwrap().sup();
        assert!(e(&glued) <= glue_constant(&chi) * e(&u1).max(e(&u2)) + 1e-9);
        let both = k1.union(&k2).unwrap();
        assert!(support_gap(&glued, &mask_distance(&g, &both.mask)) > 0.0);
    }

    #[test]
    fn cutoff_must_separate() {
        let g = Grid::square(-1.0, 2.0, 64).unwrap();
        let k1 = make_compact_set(&[Shape::disk([-0.5, 0.0], 0.1)], g).unwrap();
        let k2 = make_compact_set(&[Shape::disk([0.5, 0.0], 0.1)], g).unwrap();
        let z = VectorField2::zeros(g);
        let flat = ScalarField::constant(g, 0.5);
        assert!(matches!(glue_approximations(&z, &k1, &z, &k2, &flat), Err(ApproxError::CutoffSupport { .. })));
        let bad = ScalarField::constant(g, 1.5);
        assert!(glue_approximations(&z, &k1, &z, &k2, &bad).is_err());
        let chi = ScalarField::from_fn(g, |p| if p[0] < 0.0 { 1.0 } else { 0.0 });
        let touching = VectorField2::from_fn(g, |_| [1.0, 0.0]);
        assert!(matches!(
            glue_approximations(&touching, &k1, &z, &k2, &chi),
            Err(ApproxError::SupportTouchesSet { index: 1, .. })
        ));
    }
}
