//! Separated preimage covers `U_i` of an interval cover of `Psi(K)`.

use super::{label_components, mask_distance, neighborhood, CompactSet, GeometryError};
use crate::grid::ScalarField;

/// One set per input interval (possibly empty), pairwise separated.
#[derive(Debug, Clone)]
pub struct PreimageCover {
    pub sets: Vec<CompactSet>,
    /// Smallest node distance between two different sets (`inf` for one set).
    pub gap: f64,
    /// Non-`K` nodes removed to enforce the gap.
    pub removed_nodes: usize,
}

pub(crate) fn check_intervals(intervals: &[(f64, f64)]) -> Result<(), GeometryError> {
    for w in intervals.windows(2) {
        let ((l0, r0), (l1, r1)) = (w[0], w[1]);
        if r0 >= l1 {
            return Err(GeometryError::OverlappingIntervals(l0, r0, l1, r1));
        }
    }
    Ok(())
}

/// Components of `{x in K_radius : Psi(x) in I_i}` that contain samples of
/// `K`, thinned so different sets keep node distance at least `2h`.
///
/// Intervals are open, sorted and must have disjoint closures.
pub fn separated_preimage_cover(
    psi: &ScalarField,
    k: &CompactSet,
    intervals: &[(f64, f64)],
    radius: f64,
) -> Result<PreimageCover, GeometryError> {
    if psi.grid != k.grid {
        return Err(GeometryError::GridMismatch);
    }
    check_intervals(intervals)?;
    let grid = k.grid;
    let h = grid.h();
    let which = |v: f64| intervals.iter().position(|&(l, r)| l < v && v < r);
    for idx in k.samples() {
        if which(psi.values[idx]).is_none() {
            let p = grid.point(idx);
            return Err(GeometryError::UncoveredValue { value: psi.values[idx], x: p[0], y: p[1] });
        }
    }
    let near = neighborhood(k, radius.max(0.0))?;
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(intervals.len());
    for i in 0..intervals.len() {
        let region: Vec<bool> = (0..grid.n_nodes())
            .map(|idx| near.mask[idx] && which(psi.values[idx]) == Some(i))
            .collect();
        let (labels, n) = label_components(&grid, &region);
        let mut keep = vec![false; n as usize + 1];
        for idx in k.samples() {
            keep[labels[idx] as usize] = true;
        }
        keep[0] = false;
        masks.push(labels.iter().map(|&l| keep[l as usize]).collect());
    }

    // Distance from each set to the union of the others, before thinning.
    let mut removed_nodes = 0;
    if masks.len() > 1 {
        let mut thinned = masks.clone();
        for i in 0..masks.len() {
            let others: Vec<bool> = (0..grid.n_nodes())
                .map(|idx| masks.iter().enumerate().any(|(j, m)| j != i && m[idx]))
                .collect();
            if !others.iter().any(|&o| o) {
                continue;
            }
            let d = mask_distance(&grid, &others);
            for idx in 0..grid.n_nodes() {
                if masks[i][idx] && d.values[idx] < 2.0 * h * (1.0 - 1e-12) {
                    if k.mask[idx] {
                        // Only legal when the conflicting nodes are all non-K
                        // and get removed on their side.
                        continue;
                    }
                    thinned[i][idx] = false;
                    removed_nodes += 1;
                }
            }
        }
        masks = thinned;
    }
    let gap = min_pairwise_gap(&grid, &masks);
    if gap < 2.0 * h * (1.0 - 1e-12) {
        return Err(GeometryError::CoversTooClose { gap: 2.0 * h });
    }
    let sets = masks.into_iter().map(|m| CompactSet::from_mask(grid, m)).collect();
    Ok(PreimageCover { sets, gap, removed_nodes })
}

/// Smallest distance between nodes of two different masks.
pub(crate) fn min_pairwise_gap(grid: &crate::grid::Grid, masks: &[Vec<bool>]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, mi) in masks.iter().enumerate() {
        if !mi.iter().any(|&m| m) {
            continue;
        }
        let d = mask_distance(grid, mi);
        for mj in masks.iter().skip(i + 1) {
            for (idx, &m) in mj.iter().enumerate() {
                if m {
                    gap = gap.min(d.values[idx]);
                }
            }
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_compact_set, Shape};
    use crate::grid::Grid;

    fn two_disks() -> (CompactSet, ScalarField) {
        let g = Grid::square(-1.0, 2.0, 128).unwrap();
        let k = make_compact_set(&[Shape::disk([-0.5, 0.0], 0.2), Shape::disk([0.5, 0.0], 0.2)], g).unwrap();
        // Smooth ramp in x1 that is 0 on the left disk and 1 on the right one.
        let psi = ScalarField::from_fn(g, |p| ((p[0] + 0.3) / 0.6).clamp(0.0, 1.0));
        (k, psi)
    }

    #[test]
    fn constant_potential_gives_single_cover() {
        let (k, _) = two_disks();
        let psi = ScalarField::constant(k.grid, 0.7);
        let cover = separated_preimage_cover(&psi, &k, &[(0.6, 0.8)], 0.1).unwrap();
        assert_eq!(cover.sets.len(), 1);
        for idx in k.samples() {
            assert!(cover.sets[0].mask[idx]);
        }
    }

    #[test]
    fn two_valued_potential_gives_two_separated_sets() {
        let (k, psi) = two_disks();
        let cover = separated_preimage_cover(&psi, &k, &[(-0.1, 0.1), (0.9, 1.1)], 0.2).unwrap();
        assert_eq!(cover.sets.len(), 2);
        assert!(cover.gap >= 2.0 * k.grid.h());
        let left = k.grid.index(32, 64);
        let right = k.grid.index(96, 64);
        assert!(cover.sets[0].mask[left] && !cover.sets[0].mask[right]);
        assert!(cover.sets[1].mask[right] && !cover.sets[1].mask[left]);
        for idx in 0..k.grid.n_nodes() {
            assert!(!(cover.sets[0].mask[idx] && cover.sets[1].mask[idx]));
        }
    }

    #[test]
    fn overlapping_intervals_are_rejected() {
        let (k, psi) = two_disks();
        let err = separated_preimage_cover(&psi, &k, &[(-0.1, 0.5), (0.5, 1.1)], 0.2).unwrap_err();
        assert!(matches!(err, GeometryError::OverlappingIntervals(..)));
    }

    #[test]
    fn uncovered_value_is_named() {
        let (k, psi) = two_disks();
        match separated_preimage_cover(&psi, &k, &[(-0.1, 0.1)], 0.2) {
            Err(GeometryError::UncoveredValue { value, .. }) => assert_eq!(value, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
