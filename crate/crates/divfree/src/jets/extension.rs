//! Whitney extension `E f = sum_k phi_k P_{y_k} f` and its analytic norms.

use serde::Serialize;

use super::{taylor_local, Jet, JetError};
use crate::geometry::Point;
use crate::grid::{Grid, ScalarField};
use crate::whitney::{Local2, WhitneyDecomposition};

fn check_samples(jet: &Jet, dec: &WhitneyDecomposition) -> Result<(), JetError> {
    if jet.points != dec.sample_points {
        return Err(JetError::SampleMismatch);
    }
    Ok(())
}

/// `E f` near `x` off `K`, with first and second derivatives, using
/// Taylor polynomials of order `m`.
pub fn extension_local(jet: &Jet, dec: &WhitneyDecomposition, m: u32, x: Point) -> Local2 {
    let mut acc = Local2::ZERO;
    for (k, phi) in dec.partition_at(x) {
        acc = acc + phi * taylor_local(jet, dec.cubes[k].nearest, m, x);
    }
    acc
}

fn extend_on_grid(jet: &Jet, dec: &WhitneyDecomposition, m: u32, grid: Grid) -> Result<ScalarField, JetError> {
    if grid != dec.grid {
        return Err(JetError::SampleMismatch);
    }
    check_samples(jet, dec)?;
    let mut values = vec![0.0; grid.n_nodes()];
    let mut on_k = vec![usize::MAX; grid.n_nodes()];
    for (s, &node) in dec.samples.iter().enumerate() {
        on_k[node] = s;
    }
    for (idx, v) in values.iter_mut().enumerate() {
        *v = if on_k[idx] != usize::MAX {
            jet.values[0][on_k[idx]]
        } else {
            extension_local(jet, dec, m, grid.point(idx)).value
        };
    }
    Ok(ScalarField { grid, values })
}

/// Whitney extension of an order-`m` jet sampled on the grid; equals
/// `f^(0)` at the samples of `K`.
pub fn whitney_extend(jet: &Jet, dec: &WhitneyDecomposition, m: u32, grid: Grid) -> Result<ScalarField, JetError> {
    if m > jet.order {
        return Err(JetError::OrderTooHigh { requested: m, available: jet.order });
    }
    extend_on_grid(jet, dec, m, grid)
}

/// Extension with polynomials of order `m - 1` for jets whose entries of
/// order `>= 1` vanish, so off `K` it is `sum_k phi_k f^(0)(y_k)`.
pub fn whitney_extend_sobolev(jet: &Jet, dec: &WhitneyDecomposition, m: u32, grid: Grid) -> Result<ScalarField, JetError> {
    jet.require_zero_higher()?;
    extend_on_grid(jet, dec, m.saturating_sub(1).min(jet.order), grid)
}

/// Sup and integral norms of `E f` sampled analytically inside each square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionNorms {
    /// `sup |D^l E f|` for `|l| = 0, 1, 2`, including the jet entries on `K`.
    pub sup_by_order: [f64; 3],
    /// `max` of `sup_by_order` up to the requested order.
    pub cm_norm: f64,
    /// `||nabla^2 E f||_p` by midpoint quadrature over the squares, when requested.
    pub hessian_lp: Option<f64>,
    pub samples: usize,
}

/// Samples per side for a square: about four per grid spacing, 2 to 16.
fn samples_per_side(side: f64, h: f64) -> usize {
    ((4.0 * side / h).ceil() as usize).clamp(2, 16)
}

/// Measures `E f` (polynomial order `m_poly`) on midpoint lattices inside
/// every square meeting the grid box. Derivative orders up to `order <= 2`
/// enter `cm_norm`; `p` adds `||nabla^2 E f||_p` (sum over canonical
/// second derivatives of `|.|^p`).
pub fn extension_c2_norm(
    jet: &Jet,
    dec: &WhitneyDecomposition,
    m_poly: u32,
    order: u32,
    p: Option<f64>,
) -> Result<ExtensionNorms, JetError> {
    if order > 2 {
        return Err(JetError::LocalOrder(order));
    }
    if m_poly > jet.order {
        return Err(JetError::OrderTooHigh { requested: m_poly, available: jet.order });
    }
    check_samples(jet, dec)?;
    let g = &dec.grid;
    let (glo, gup) = (g.origin, g.upper());
    let mut sup = [0.0f64; 3];
    for (pos, col) in jet.values.iter().enumerate().take(6) {
        let o = if pos == 0 { 0 } else if pos < 3 { 1 } else { 2 };
        sup[o] = sup[o].max(col.iter().fold(0.0, |a, v| a.max(v.abs())));
    }
    let mut lp_sum = 0.0;
    let mut samples = 0;
    for cube in &dec.cubes {
        let (lo, hi) = (cube.lo(), cube.hi());
        if hi[0] < glo[0] || hi[1] < glo[1] || lo[0] > gup[0] || lo[1] > gup[1] {
            continue;
        }
        let n = samples_per_side(cube.side, g.h());
        let w = (cube.side / n as f64).powi(2);
        for a in 0..n {
            for b in 0..n {
                let x = [lo[0] + (a as f64 + 0.5) * cube.side / n as f64, lo[1] + (b as f64 + 0.5) * cube.side / n as f64];
                if x[0] < glo[0] || x[1] < glo[1] || x[0] > gup[0] || x[1] > gup[1] {
                    continue;
                }
                samples += 1;
                let e = extension_local(jet, dec, m_poly, x);
                for (o, s) in sup.iter_mut().enumerate() {
                    *s = s.max(e.max_of_order(o as u32));
                }
                if let Some(p) = p {
                    lp_sum += w * e.hess.iter().map(|v| v.abs().powf(p)).sum::<f64>();
                }
            }
        }
    }
    let cm_norm = sup[..=order as usize].iter().fold(0.0f64, |a, &v| a.max(v));
    Ok(ExtensionNorms { sup_by_order: sup, cm_norm, hessian_lp: p.map(|p| lp_sum.powf(1.0 / p)), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_compact_set, CompactSet, Shape};
    use crate::whitney::{whitney_decompose, WhitneyParams};

    fn two_disks(cells: usize) -> (CompactSet, WhitneyDecomposition) {
        let g = Grid::square(-1.0, 2.0, cells).unwrap();
        let k = make_compact_set(&[Shape::disk([-0.4, 0.0], 0.15), Shape::disk([0.4, 0.0], 0.15)], g).unwrap();
        let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k)).unwrap();
        (k, dec)
    }

    #[test]
    fn zero_and_constant_jets() {
        let (k, dec) = two_disks(64);
        let z = Jet::zeros(2, dec.sample_points.clone());
        assert!(whitney_extend(&z, &dec, 2, k.grid).unwrap().values.iter().all(|&v| v == 0.0));
        let c = Jet::from_values(2, dec.sample_points.clone(), vec![3.5; dec.samples.len()]).unwrap();
        let f = whitney_extend(&c, &dec, 2, k.grid).unwrap();
        assert!(f.values.iter().all(|&v| (v - 3.5).abs() < 1e-12));
    }

    #[test]
    fn two_valued_sobolev_extension_is_locally_constant() {
        let (k, dec) = two_disks(128);
        let f0: Vec<f64> = dec.sample_points.iter().map(|p| if p[0] < 0.0 { 0.0 } else { 1.0 }).collect();
        let jet = Jet::from_values(2, dec.sample_points.clone(), f0).unwrap();
        let f = whitney_extend_sobolev(&jet, &dec, 2, k.grid).unwrap();
        let g = k.grid;
        let at = |x: f64| f.values[g.index(g.nearest_node([x, 0.0]).0, g.nearest_node([x, 0.0]).1)];
        assert_eq!(at(-0.4), 0.0);
        assert_eq!(at(0.4), 1.0);
        assert!(at(-0.24) < 1e-12, "{}", at(-0.24));
        assert!((at(0.24) - 1.0).abs() < 1e-12);
        let mid = at(0.0);
        assert!(mid > 0.0 && mid < 1.0);
        // Monotone along the connecting segment.
        let mut prev = -1.0;
        for i in 0..=40 {
            let v = at(-0.25 + 0.5 * i as f64 / 40.0);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn nonzero_higher_entries_are_rejected() {
        let (k, dec) = two_disks(32);
        let mut jet = Jet::zeros(2, dec.sample_points.clone());
        jet.values[1][0] = 0.5;
        assert!(matches!(whitney_extend_sobolev(&jet, &dec, 2, k.grid), Err(JetError::NonzeroHigherEntries { .. })));
    }

    #[test]
    fn sample_mismatch_is_rejected() {
        let (k, dec) = two_disks(32);
        let jet = Jet::zeros(2, vec![[0.0, 0.0]]);
        assert_eq!(whitney_extend(&jet, &dec, 2, k.grid), Err(JetError::SampleMismatch));
    }

    #[test]
    fn linear_jet_extends_to_the_linear_function() {
        let (k, dec) = two_disks(64);
        let jet = Jet::from_fn(1, dec.sample_points.clone(), |p| vec![2.0 * p[0] - p[1], 2.0, -1.0]);
        let f = whitney_extend(&jet, &dec, 1, k.grid).unwrap();
        for (idx, v) in f.values.iter().enumerate() {
            let p = k.grid.point(idx);
            assert!((v - (2.0 * p[0] - p[1])).abs() < 1e-12);
        }
        let norms = extension_c2_norm(&jet, &dec, 1, 2, Some(2.0)).unwrap();
        assert!((norms.sup_by_order[1] - 2.0).abs() < 1e-12);
        assert!(norms.sup_by_order[2] < 1e-10);
    }
}
