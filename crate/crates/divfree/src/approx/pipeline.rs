//! The full approximation: given `u` divergence free and vanishing on `K`,
//! produce `u^(eps, k) = grad_perp(g (1 - rho_k) + h)` with
//! `g = Psi - E(eta o Psi) - h`.

use serde::Serialize;

use super::auxiliary::{auxiliary_function, AuxiliarySummary};
use super::compress::{compress_jet, compression_delta, compression_map, cover_values, CompressionDelta};
use super::cutoff::{cutoff_from_distance, distance_to_set, SmoothCutoff};
use super::stream::{perp_gradient, stream_potential, support_gap};
use super::ApproxError;
use crate::geometry::{mask_distance, separated_preimage_cover, CompactSet};
use crate::grid::{ScalarField, VectorField2};
use crate::jets::{restrict, whitney_extend, EvalLattice};
use crate::norms::{max_divergence, vector_cm_norm, vector_holder_seminorm, vector_wmp_norm};
use crate::whitney::{whitney_decompose, PartitionConstants, WhitneyParams};

/// Tolerance on the restricted jet of `Psi` (entries of order `>= 1`) and of
/// `g`, relative to `1 + sup |Psi|`.
const HIGHER_TOLERANCE: f64 = 1e-8;
const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Smoothness of the approximation; the potential is treated as `C^(m+1)`.
    pub m: u32,
    /// Hölder exponent; `0` skips the Hölder error.
    pub gamma: f64,
    /// Integrability exponent of the Sobolev error and the maximal function.
    pub p: f64,
    /// Cover budgets, one compression per entry.
    pub eps: Vec<f64>,
    /// Cutoff widths, one truncation per entry.
    pub cutoffs: Vec<f64>,
    /// Side of the lattice for `||M f||_p`.
    pub lattice: usize,
    pub seed: u64,
    /// Keep the approximations `u^(i, i)`.
    pub keep_fields: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageEntry {
    pub eps: f64,
    /// Budget index.
    pub eps_index: usize,
    /// Cutoff index.
    pub k: usize,
    pub cutoff: f64,
    /// `C^1` norm of the error, whatever `m` is.
    pub err_c1: f64,
    pub err_cm: f64,
    pub err_wmp: f64,
    /// Hölder seminorm of the `m`-th differences of the error, on the
    /// diagonal when `gamma > 0`.
    pub err_holder: Option<f64>,
    pub max_div: f64,
    pub support_gap: f64,
    pub delta_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsDiagnostics {
    pub eps: f64,
    pub intervals: usize,
    pub cover_length: f64,
    pub cover_gap: f64,
    pub removed_nodes: usize,
    pub delta: CompressionDelta,
    pub auxiliary: AuxiliarySummary,
    /// `sup` of the restricted jet of `g` on `K`.
    pub residual_jet: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub m: u32,
    pub gamma: f64,
    pub p: f64,
    pub jet_order: u32,
    pub potential_sup: f64,
    /// Largest entry of order `>= 1` in the restricted jet, before it is zeroed.
    pub restricted_higher: f64,
    pub whitney_cubes: usize,
    pub partition: PartitionConstants,
    pub cutoff_constants: Vec<[f64; 4]>,
    pub eps: Vec<EpsDiagnostics>,
    pub entries: Vec<StageEntry>,
}

impl PipelineReport {
    /// Entries `(i, i)`: the `i`-th budget with the `i`-th cutoff.
    pub fn diagonal(&self) -> Vec<StageEntry> {
        self.entries.iter().filter(|e| e.eps_index == e.k).copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: PipelineReport,
    pub potential: ScalarField,
    /// `u^(i, i)` when `keep_fields` is set.
    pub diagonal: Vec<VectorField2>,
}

pub fn approximate_divfree(u: &VectorField2, k: &CompactSet, cfg: &PipelineConfig) -> Result<PipelineOutput, ApproxError> {
    if cfg.eps.is_empty() || cfg.cutoffs.is_empty() {
        return Err(ApproxError::EmptySchedule);
    }
    if u.grid != k.grid {
        return Err(ApproxError::Grid(crate::grid::GridError::GridMismatch));
    }
    let grid = k.grid;
    let h = grid.h();
    let jm = cfg.m + 1;

    let psi = stream_potential(u).map_err(ApproxError::at("stream"))?;
    let scale = 1.0 + psi.sup();

    let mut jet = restrict(&psi, k, jm).map_err(|e| ApproxError::at("restrict")(e.into()))?;
    let restricted_higher = jet.higher_sup();
    let tolerance = HIGHER_TOLERANCE * scale;
    if restricted_higher > tolerance {
        return Err(ApproxError::at("restrict")(ApproxError::NotVanishing { order: 1, value: restricted_higher, tolerance }));
    }
    for col in jet.values.iter_mut().skip(1) {
        col.iter_mut().for_each(|v| *v = 0.0);
    }

    let dec = whitney_decompose(k, &WhitneyParams::for_set(k)).map_err(|e| ApproxError::at("decompose")(e.into()))?;
    let partition = dec.partition_constants(3);
    let dist = distance_to_set(k);
    let mask_dist = mask_distance(&grid, &k.mask);
    let cutoffs: Vec<SmoothCutoff> = cfg
        .cutoffs
        .iter()
        .map(|&w| cutoff_from_distance(&dist, w))
        .collect::<Result<_, _>>()
        .map_err(ApproxError::at("cutoff"))?;
    let lattice = EvalLattice::over_grid(&grid, cfg.lattice);

    let mut eps_diag = Vec::new();
    let mut entries = Vec::new();
    let mut diagonal = Vec::new();
    for (i, &eps) in cfg.eps.iter().enumerate() {
        let intervals = cover_values(&jet.values[0], eps).map_err(ApproxError::at("cover"))?;
        let cover = separated_preimage_cover(&psi, k, &intervals, 2.0 * h).map_err(|e| ApproxError::at("cover")(e.into()))?;
        let eta = compression_map(&intervals).map_err(ApproxError::at("compress"))?;
        let compressed = compress_jet(&jet, &eta).map_err(ApproxError::at("compress"))?;
        let delta = compression_delta(&compressed, jm, cfg.gamma, Some(cfg.p), &lattice, cfg.seed)
            .map_err(ApproxError::at("delta"))?;
        let phi = whitney_extend(&compressed, &dec, jm, grid).map_err(|e| ApproxError::at("extend")(e.into()))?;
        let aux = auxiliary_function(k, &cover.sets, &eta.offsets).map_err(ApproxError::at("auxiliary"))?;
        let g_values: Vec<f64> =
            psi.values.iter().zip(&phi.values).zip(&aux.field.values).map(|((a, b), c)| a - b - c).collect();
        let g_field = ScalarField { grid, values: g_values };
        let residual_jet = restrict(&g_field, k, jm).map_err(|e| ApproxError::at("auxiliary")(e.into()))?.sup_norm();
        let tolerance = RESIDUAL_TOLERANCE * scale;
        if residual_jet > tolerance {
            return Err(ApproxError::at("auxiliary")(ApproxError::NotVanishing { order: 0, value: residual_jet, tolerance }));
        }
        eps_diag.push(EpsDiagnostics {
            eps,
            intervals: intervals.len(),
            cover_length: eta.total_length,
            cover_gap: cover.gap,
            removed_nodes: cover.removed_nodes,
            delta,
            auxiliary: aux.summary(),
            residual_jet,
        });
        for (kk, cutoff) in cutoffs.iter().enumerate() {
            let potential = ScalarField {
                grid,
                values: g_field
                    .values
                    .iter()
                    .zip(&cutoff.field.values)
                    .zip(&aux.field.values)
                    .map(|((gv, r), a)| gv * (1.0 - r) + a)
                    .collect(),
            };
            let approx = perp_gradient(&potential);
            let err = approx.sub(u)?;
            let err_holder = if cfg.gamma > 0.0 && kk == i {
                Some(vector_holder_seminorm(&err, cfg.m, cfg.gamma, cfg.seed).map_err(|e| ApproxError::at("norms")(e.into()))?)
            } else {
                None
            };
            entries.push(StageEntry {
                eps,
                eps_index: i,
                k: kk,
                cutoff: cutoff.eps,
                err_c1: vector_cm_norm(&err, 1),
                err_cm: vector_cm_norm(&err, cfg.m),
                err_wmp: vector_wmp_norm(&err, cfg.m, cfg.p).map_err(|e| ApproxError::at("norms")(e.into()))?,
                err_holder,
                max_div: max_divergence(&approx),
                support_gap: support_gap(&approx, &mask_dist),
                delta_eps: delta.jet_norm,
            });
            if cfg.keep_fields && kk == i {
                diagonal.push(approx);
            }
        }
    }
    Ok(PipelineOutput {
        report: PipelineReport {
            m: cfg.m,
            gamma: cfg.gamma,
            p: cfg.p,
            jet_order: jm,
            potential_sup: psi.sup(),
            restricted_higher,
            whitney_cubes: dec.len(),
            partition,
            cutoff_constants: cutoffs.iter().map(|c| c.constants).collect(),
            eps: eps_diag,
            entries,
        },
        potential: psi,
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_compact_set, Shape};
    use crate::grid::Grid;

    /// Two disks with potential 0 and 1, flat within `2h` of each disk.
    fn setup(cells: usize) -> (VectorField2, CompactSet) {
        let g = Grid::square(-1.0, 2.0, cells).unwrap();
        let disks = [([-0.45, 0.0], 0.15, 0.0), ([0.45, 0.0], 0.15, 1.0)];
        let shapes: Vec<Shape> = disks.iter().map(|&(c, r, _)| Shape::disk(c, r)).collect();
        let k = make_compact_set(&shapes, g).unwrap();
        let plateau = 2.0 * g.h();
        let psi = ScalarField::from_fn(g, |p| {
            disks
                .iter()
                .map(|&(c, r, v)| {
                    let s = ((Shape::disk(c, r).distance(p) - plateau).max(0.0) / 0.25).min(1.0);
                    v * (1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s))
                })
                .sum()
        });
        (perp_gradient(&psi), k)
    }

    #[test]
    fn two_disk_pipeline_vanishes_near_k() {
        let (u, k) = setup(128);
        let h = k.grid.h();
        let cfg = PipelineConfig {
            m: 1,
            gamma: 0.0,
            p: 3.0,
            eps: vec![0.5, 0.25, 0.125],
            cutoffs: vec![0.5, 0.25, 0.125],
            lattice: 32,
            seed: 1,
            keep_fields: true,
        };
        let out = approximate_divfree(&u, &k, &cfg).unwrap();
        assert_eq!(out.report.entries.len(), 9);
        assert_eq!(out.diagonal.len(), 3);
        for e in out.report.diagonal() {
            assert_eq!(e.max_div, 0.0);
            assert!(e.support_gap >= e.cutoff / 4.0 - h, "{e:?}");
        }
        let d: Vec<f64> = out.report.eps.iter().map(|x| x.delta.jet_norm).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0]), "{d:?}");
    }

    #[test]
    fn stage_errors_are_tagged() {
        let (u, k) = setup(64);
        let cfg = PipelineConfig {
            m: 1,
            gamma: 0.0,
            p: 3.0,
            eps: vec![0.5],
            cutoffs: vec![0.01],
            lattice: 8,
            seed: 1,
            keep_fields: false,
        };
        let err = approximate_divfree(&u, &k, &cfg).unwrap_err();
        assert!(matches!(err, ApproxError::Stage { stage: "cutoff", .. }), "{err}");
        let cfg = PipelineConfig { eps: vec![], ..cfg };
        assert!(matches!(approximate_divfree(&u, &k, &cfg), Err(ApproxError::EmptySchedule)));
    }
}
