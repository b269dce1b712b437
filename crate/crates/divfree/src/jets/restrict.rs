//! Restriction of a grid field to a jet on `K` by central differences.

use super::{Jet, JetError};
use crate::geometry::CompactSet;
use crate::grid::ScalarField;
use crate::multi_index::MultiIndex;

/// `f^(j) = D^j_h F` at every sample of `K`, `|j| <= m`, with second-order
/// central stencils. One-sided stencils are never used.
pub fn restrict(f: &ScalarField, k: &CompactSet, m: u32) -> Result<Jet, JetError> {
    let samples = k.samples();
    let points: Vec<_> = samples.iter().map(|&s| k.grid.point(s)).collect();
    let mut jet = Jet::zeros(m, points);
    for (pos, jdx) in MultiIndex::up_to(m).into_iter().enumerate() {
        for (s, &node) in samples.iter().enumerate() {
            let (i, j) = f.grid.ij(node);
            jet.values[pos][s] = f.derivative_at(jdx, i, j).ok_or_else(|| {
                let p = f.grid.point(node);
                JetError::StencilLeavesGrid { order: jdx.order(), x: p[0], y: p[1] }
            })?;
        }
    }
    Ok(jet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_compact_set, Shape};
    use crate::grid::Grid;

    #[test]
    fn constant_and_bilinear_fields() {
        let g = Grid::square(-1.0, 2.0, 64).unwrap();
        let k = make_compact_set(&[Shape::disk([0.1, 0.2], 0.3)], g).unwrap();
        let c = restrict(&ScalarField::constant(g, 2.0), &k, 2).unwrap();
        assert!(c.values[0].iter().all(|&v| v == 2.0));
        assert!(c.higher_sup() == 0.0);
        let f = ScalarField::from_fn(g, |p| p[0] * p[1]);
        let jet = restrict(&f, &k, 2).unwrap();
        assert!(jet.column(MultiIndex(1, 1)).iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn stencil_leaving_the_grid_is_an_error() {
        let g = Grid::square(0.0, 1.0, 16).unwrap();
        let mut mask = vec![false; g.n_nodes()];
        mask[g.index(0, 5)] = true;
        let k = CompactSet::from_mask(g, mask);
        assert!(matches!(restrict(&ScalarField::zeros(g), &k, 1), Err(JetError::StencilLeavesGrid { .. })));
    }
}
