//! Smooth partition of unity subordinate to a Whitney decomposition.
//!
//! Each square carries a tensor-product plateau bump equal to 1 on the
//! square shrunk by 7/8 and vanishing outside the 9/8 dilate; the bumps
//! are normalized by their sum.

use serde::Serialize;

use super::local::{plateau, Local2};
use super::WhitneyDecomposition;
use crate::geometry::{CompactSet, Point};

/// Measured `sup |D^l phi_k| side_k^|l|` per derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionConstants {
    pub order0: f64,
    pub order1: f64,
    pub order2: f64,
    pub samples: usize,
}

impl PartitionConstants {
    pub fn by_order(&self, order: u32) -> f64 {
        match order {
            0 => self.order0,
            1 => self.order1,
            _ => self.order2,
        }
    }
}

impl WhitneyDecomposition {
    /// Unnormalized bump of square `k` at `p`.
    pub fn bump(&self, k: usize, p: Point) -> Local2 {
        let c = &self.cubes[k];
        let inv = 1.0 / c.side;
        let tx = plateau((p[0] - c.center[0]) * inv);
        if tx[0] == 0.0 {
            return Local2::ZERO;
        }
        let ty = plateau((p[1] - c.center[1]) * inv);
        if ty[0] == 0.0 {
            return Local2::ZERO;
        }
        let bx = Local2::along(0, [tx[0], tx[1] * inv, tx[2] * inv * inv]);
        let by = Local2::along(1, [ty[0], ty[1] * inv, ty[2] * inv * inv]);
        bx * by
    }

    /// Nonzero `phi_k` at `p` with their first and second derivatives.
    ///
    /// Only the containing leaf and its touching squares can be nonzero.
    pub fn partition_at(&self, p: Point) -> Vec<(usize, Local2)> {
        let Some(leaf) = self.locate(p) else {
            return Vec::new();
        };
        let mut terms: Vec<(usize, Local2)> = Vec::with_capacity(self.neighbors[leaf].len() + 1);
        for k in std::iter::once(leaf).chain(self.neighbors[leaf].iter().copied()) {
            let b = self.bump(k, p);
            if b.value > 0.0 {
                terms.push((k, b));
            }
        }
        let total = terms.iter().fold(Local2::ZERO, |acc, (_, b)| acc + *b);
        let inv = total.recip();
        terms.iter().map(|&(k, b)| (k, b * inv)).collect()
    }

    /// `max |sum phi_k - 1|` over grid nodes outside `K` lying in resolved squares.
    pub fn partition_sum_error(&self, k: &CompactSet) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for idx in 0..g.n_nodes() {
            if k.mask[idx] {
                continue;
            }
            let p = g.point(idx);
            let Some(leaf) = self.locate(p) else { continue };
            if self.cubes[leaf].unresolved {
                continue;
            }
            let s: f64 = self.partition_at(p).iter().map(|(_, l)| l.value).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Samples every `phi_k` on a tensor lattice that puts `n` offsets in
    /// each transition band `7/16 < |t| < 9/16` plus the center.
    pub fn partition_constants(&self, n: usize) -> PartitionConstants {
        let n = n.max(1);
        let mut offsets = vec![0.0];
        for r in 0..n {
            let t = 7.0 / 16.0 + (r as f64 + 0.5) / n as f64 / 8.0;
            offsets.push(t);
            offsets.push(-t);
        }
        let mut c = [0.0f64; 3];
        let mut samples = 0;
        for (k, cube) in self.cubes.iter().enumerate() {
            for &tx in &offsets {
                for &ty in &offsets {
                    let p = [cube.center[0] + tx * cube.side, cube.center[1] + ty * cube.side];
                    samples += 1;
                    if let Some((_, phi)) = self.partition_at(p).into_iter().find(|(m, _)| *m == k) {
                        c[0] = c[0].max(phi.max_of_order(0));
                        c[1] = c[1].max(phi.max_of_order(1) * cube.side);
                        c[2] = c[2].max(phi.max_of_order(2) * cube.side * cube.side);
                    }
                }
            }
        }
        PartitionConstants { order0: c[0], order1: c[1], order2: c[2], samples }
    }
}
