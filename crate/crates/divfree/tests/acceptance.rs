//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when
//! any criterion fails.

use std::error::Error;
use std::time::Instant;

use divfree::approx::{
    approximate_divfree, compress_jet, compression_delta, compression_map, cover_values, glue_approximations,
    glue_constant, hedberg_truncate, koch_target, sharpness_certificate, smooth_cutoff, support_gap,
    truncation_candidates, PipelineConfig,
};
use divfree::besov::{
    besov_compress, canonical_sequence, fit_sequence, max_level, sample_measure, zero_derivative_reduce,
};
use divfree::fixtures::{
    disk_fixture, geometric, geometric_jets, koch_grid, random_disks, three_disks, truncation_fixture, two_disks,
    Disk, TrigSum,
};
use divfree::geometry::{distance_field, koch_curve, make_compact_set, CompactSet, Shape};
use divfree::jets::{
    extension_c2_norm, jet_norm, maximal_lp, restrict, whitney_extend, EvalLattice, Jet,
};
use divfree::norms::{gradient_lp, max_divergence};
use divfree::whitney::{check_decomposition, whitney_decompose, WhitneyParams, MAX_NEIGHBORS};
use divfree::{Grid, MultiIndex, VectorField2};

type Outcome = Result<(bool, String), Box<dyn Error>>;

const SEEDS: u64 = 20;
const STABILITY: f64 = 2.0;

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn whitney_invariants() -> Outcome {
    let grid = Grid::square(-1.0, 2.0, 512)?;
    let (mut worst_sum, mut max_nb, mut lo, mut hi) = (0.0f64, 0usize, f64::INFINITY, 0.0f64);
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let disks = random_disks(1000 + seed, 1 + (seed % 5) as usize, -0.8, 0.8, (0.03, 0.2), 0.02)?;
        let shapes: Vec<Shape> = disks.iter().map(Disk::shape).collect();
        let k = make_compact_set(&shapes, grid)?;
        let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k))?;
        let check = check_decomposition(&dec);
        let sum_err = dec.partition_sum_error(&k);
        worst_sum = worst_sum.max(sum_err);
        max_nb = max_nb.max(check.max_neighbors);
        lo = lo.min(check.min_dist_ratio);
        hi = hi.max(check.max_dist_ratio);
        if !check.passes() || sum_err > 1e-10 {
            failures.push(seed);
        }
    }
    let detail = format!(
        "50 sets; dist/side in [{lo:.3}, {hi:.3}], max |N(k)| = {max_nb} (cap {MAX_NEIGHBORS}), max |sum phi - 1| = {worst_sum:.1e}; failing seeds {failures:?}"
    );
    Ok((failures.is_empty(), detail))
}

/// One case of the smooth-function suite at one resolution.
struct ExtensionCase {
    set: CompactSet,
    f: TrigSum,
    grid: Grid,
}

const EXT_CELLS: [usize; 3] = [128, 256, 512];

fn extension_case(seed: u64, cells: usize) -> Result<ExtensionCase, Box<dyn Error>> {
    let grid = Grid::square(-0.5, 1.0, cells)?;
    let disks = random_disks(2000 + seed, 1 + (seed % 3) as usize, -0.35, 0.35, (0.03, 0.07), 0.05)?;
    let shapes: Vec<Shape> = disks.iter().map(Disk::shape).collect();
    let set = make_compact_set(&shapes, grid)?;
    Ok(ExtensionCase { set, f: TrigSum::random(seed, 4, 4.0), grid })
}

/// Largest over seeds at each resolution, and the spread of that constant
/// over the resolutions.
fn suite_constant(per_h: &[Vec<f64>]) -> (f64, f64) {
    let by_h: Vec<f64> = per_h.iter().map(|v| v.iter().copied().fold(0.0, f64::max)).collect();
    (by_h.iter().copied().fold(0.0, f64::max), spread(&by_h))
}

fn extension_round_trip() -> Outcome {
    let mut ratios = vec![Vec::new(); EXT_CELLS.len()];
    let mut worst_rel_tol = 0.0f64;
    let mut exact = true;
    for seed in 0..SEEDS {
        for (r, cells) in EXT_CELLS.into_iter().enumerate() {
            let c = extension_case(seed, cells)?;
            let h = c.grid.h();
            let field = c.f.field(c.grid);
            let jet = restrict(&field, &c.set, 2)?;
            let dec = whitney_decompose(&c.set, &WhitneyParams::for_set(&c.set))?;
            let ext = whitney_extend(&jet, &dec, 2, c.grid)?;
            for (s, &node) in c.set.samples().iter().enumerate() {
                exact &= ext.values[node] == jet.values[0][s] && jet.values[0][s] == field.values[node];
            }
            // Central differences of Ef at nodes off K with a 4-neighbor in K.
            let mut err = 0.0f64;
            for idx in 0..c.grid.n_nodes() {
                if c.set.mask[idx] || !c.grid.neighbors4(idx).any(|n| c.set.mask[n]) {
                    continue;
                }
                let (i, j) = c.grid.ij(idx);
                let x = c.grid.point(idx);
                for jdx in MultiIndex::up_to(2) {
                    if let Some(d) = ext.derivative_at(jdx, i, j) {
                        err = err.max((d - c.f.derivative(jdx, x)).abs());
                    }
                }
            }
            worst_rel_tol = worst_rel_tol.max(err / (10.0 * h));
            let norms = extension_c2_norm(&jet, &dec, 2, 2, None)?;
            ratios[r].push(norms.cm_norm / jet_norm(&jet, 2, 0.0, seed)?.jet_norm);
        }
    }
    let (c, drift) = suite_constant(&ratios);
    let pass = exact && worst_rel_tol <= 1.0 && drift < STABILITY;
    Ok((
        pass,
        format!(
            "f0 reproduced exactly: {exact}; max |D^j_h Ef - D^j F| / (10 h) = {worst_rel_tol:.3}; ||EF||_C2 / ||f|| <= {c:.1}, constant drifts {drift:.3}x over h"
        ),
    ))
}

fn maximal_bounds() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for p in [3.0, 4.0] {
        let mut lower = vec![Vec::new(); EXT_CELLS.len()];
        let mut upper = vec![Vec::new(); EXT_CELLS.len()];
        for seed in 0..SEEDS {
            for (r, cells) in EXT_CELLS.into_iter().enumerate() {
                let c = extension_case(seed, cells)?;
                let lattice = EvalLattice::over_grid(&c.grid, 48);
                // M f against the gradient of the generating F.
                let field = c.f.field(c.grid);
                let jet = restrict(&field, &c.set, 1)?;
                lower[r].push(maximal_lp(&jet, 2, p, &lattice)? / gradient_lp(&field, 2, p, None)?);
                // Zero-higher jets with one value per disk.
                let disks = random_disks(2000 + seed, 1 + (seed % 3) as usize, -0.35, 0.35, (0.03, 0.07), 0.05)?;
                if disks.len() < 2 {
                    continue;
                }
                let flat = Jet::from_fn(1, c.set.sample_points(), |x| {
                    let v = disks.iter().find(|d| d.shape().distance(x) <= c.grid.h()).map_or(0.0, |d| d.value);
                    vec![v, 0.0, 0.0]
                });
                let dec = whitney_decompose(&c.set, &WhitneyParams::for_set(&c.set))?;
                let hess = extension_c2_norm(&flat, &dec, 1, 2, Some(p))?.hessian_lp.unwrap_or(0.0);
                upper[r].push(hess / maximal_lp(&flat, 2, p, &lattice)?);
            }
        }
        let (c_low, d_low) = suite_constant(&lower);
        let (c_up, d_up) = suite_constant(&upper);
        pass &= d_low < STABILITY && d_up < STABILITY;
        lines.push(format!(
            "p={p}: ||M f|| <= {c_low:.3} ||grad^2 F|| (drift {d_low:.2}x), ||grad^2 Ef|| <= {c_up:.3} ||M f|| (drift {d_up:.2}x)"
        ));
    }
    Ok((pass, lines.join("; ")))
}

fn compression_decay() -> Outcome {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let fx = disk_fixture(grid, &two_disks(), 2.0 * grid.h(), 0.25)?;
    let jet = restrict(&fx.potential, &fx.set, 1)?;
    let lattice = EvalLattice::over_grid(&grid, 64);
    let schedule = geometric(0.5, 0.5, 7);
    let (mut jet_d, mut sob_d) = (Vec::new(), Vec::new());
    for &eps in &schedule {
        let eta = compression_map(&cover_values(&jet.values[0], eps)?)?;
        let d = compression_delta(&compress_jet(&jet, &eta)?, 1, 0.0, Some(3.0), &lattice, 1)?;
        jet_d.push(d.jet_norm);
        sob_d.push(d.maximal_lp.unwrap_or(f64::NAN));
    }
    let mu = sample_measure(&fx.set, 1.0, 400)?;
    let f = Jet::from_values(0, mu.points.clone(), mu.points.iter().map(|p| if p[0] > 0.0 { 1.0 } else { 0.0 }).collect())?;
    let seq = canonical_sequence(&f, 0.5, 2.0, 2.0, 1.0, max_level(grid.h()), &mu)?;
    let mut besov = Vec::new();
    let mut valid = true;
    for &eps in &schedule {
        let eta = compression_map(&cover_values(&f.values[0], eps)?)?;
        let out = besov_compress(&f, &seq, &eta, &mu)?;
        valid &= out.report.valid;
        besov.push(out.seq.norm());
    }
    let last = |v: &[f64]| v[v.len() - 1] / v[0];
    let pass = [&jet_d, &sob_d, &besov].iter().all(|v| non_increasing(v) && last(v) <= 0.05) && valid;
    Ok((
        pass,
        format!(
            "final/initial: jet {:.4}, maximal {:.4}, Besov {:.4} (conditions hold: {valid})",
            last(&jet_d),
            last(&sob_d),
            last(&besov)
        ),
    ))
}

fn pipeline_convergence() -> Outcome {
    let grid = Grid::square(-1.0, 2.0, 512)?;
    let h = grid.h();
    let fx = disk_fixture(grid, &two_disks(), 2.0 * h, 0.25)?;
    let schedule = geometric(0.5, 0.5, 5);
    let cfg = PipelineConfig {
        m: 1,
        gamma: 0.0,
        p: 3.0,
        eps: schedule.clone(),
        cutoffs: schedule,
        lattice: 32,
        seed: 1,
        keep_fields: false,
    };
    let out = approximate_divfree(&fx.field, &fx.set, &cfg)?;
    let diag = out.report.diagonal();
    let err: Vec<f64> = diag.iter().map(|e| e.err_c1).collect();
    let decreasing = err.windows(2).all(|w| w[1] < w[0]);
    let div = out.report.entries.iter().map(|e| e.max_div).fold(0.0, f64::max);
    let gaps_ok = out.report.entries.iter().all(|e| e.support_gap >= e.cutoff / 4.0 - h && e.support_gap > 0.0);
    let ratio = err[err.len() - 1] / err[0];
    let pass = diag.len() >= 5 && decreasing && ratio <= 0.1 && div <= 1e-12 && gaps_ok;
    Ok((
        pass,
        format!(
            "{} stages, err_C1 {:?}, final/initial {ratio:.4}, max |div| {div:.1e}, support gaps ok: {gaps_ok}",
            diag.len(),
            err.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()
        ),
    ))
}

fn hedberg_estimates() -> Outcome {
    let schedule = geometric(0.25, 0.5, 6);
    let mut runs = Vec::new();
    for &eps in &schedule {
        let (f, k) = truncation_fixture(eps)?;
        runs.push(hedberg_truncate(&f, &k, eps, 2, 0.5, 7)?.estimates);
    }
    let mut worst = 0.0f64;
    for t in 0..=2usize {
        let series: [Vec<f64>; 4] = [
            runs.iter().map(|r| r.terms[t].ratio_f_sup).collect(),
            runs.iter().map(|r| r.terms[t].ratio_f_holder).collect(),
            runs.iter().map(|r| r.terms[t].ratio_rho_sup).collect(),
            runs.iter().map(|r| r.terms[t].ratio_rho_holder).collect(),
        ];
        for s in &series {
            worst = worst.max(spread(s));
        }
    }
    let products: Vec<f64> = runs.iter().map(|r| r.product_bound).collect();
    let decreasing = products.windows(2).all(|w| w[1] < w[0]);
    Ok((
        worst <= 4.0 && decreasing,
        format!("largest spread of the normalized (i)-(iv) over eps {worst:.3}x; product bound decreasing: {decreasing}"),
    ))
}

fn sharpness() -> Outcome {
    let curve = koch_curve(0.35, 5)?;
    let gamma = 1.0 / curve.theta - 1.0;
    let target = koch_target(&curve, koch_grid(256)?, gamma, 3)?;
    let cands = truncation_candidates(&target, &[0.25, 0.125, 0.0625])?;
    let report = sharpness_certificate(&target, &cands)?;
    let min_gap = report.candidates.iter().map(|c| c.potential_gap).fold(f64::INFINITY, f64::min);
    let min_lower = report.candidates.iter().map(|c| c.c0_lower_bound).fold(f64::INFINITY, f64::min);
    Ok((
        report.certifies(0.4) && report.candidates.len() == 4,
        format!(
            "theta {:.4}, gamma {gamma:.4}, {} candidates, min potential gap {min_gap:.4}, min C0 lower bound {min_lower:.3}",
            curve.theta,
            report.candidates.len()
        ),
    ))
}

fn zero_derivative_reduction() -> Outcome {
    let grid = Grid::square(-1.0, 2.0, 128)?;
    let k = make_compact_set(&two_disks().iter().map(Disk::shape).collect::<Vec<_>>(), grid)?;
    let mu = sample_measure(&k, 1.0, 400)?;
    let f = Jet::from_values(1, mu.points.clone(), mu.points.iter().map(|p| if p[0] > 0.0 { 1.0 } else { 0.0 }).collect())?;
    let (mut ratio, mut c_theory) = (0.0f64, f64::INFINITY);
    let mut valid = true;
    for seed in 0..SEEDS {
        let seq = fit_sequence(&f, geometric_jets(&f, seed, 6), 1.5, 2.0, 2.0, 1.0, &mu)?;
        valid &= divfree::besov::besov_conditions(&f, &seq, &mu)?.valid;
        let red = zero_derivative_reduce(&f, &seq, &mu)?;
        valid &= red.report.valid;
        ratio = ratio.max(red.ratio);
        c_theory = c_theory.min(red.c_theory.unwrap_or(f64::INFINITY));
    }
    Ok((
        valid && ratio <= c_theory,
        format!("20 sequences valid before and after: {valid}; sum a~^p / sum a^p <= {ratio:.3} (bound {c_theory:.3})"),
    ))
}

fn gluing() -> Outcome {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let h = grid.h();
    let disks = three_disks();
    let all = disk_fixture(grid, &disks, 2.0 * h, 0.25)?;
    let pick = |ids: &[usize]| -> Result<CompactSet, Box<dyn Error>> {
        let s: Vec<Shape> = ids.iter().map(|&i| disks[i].shape()).collect();
        Ok(make_compact_set(&s, grid)?)
    };
    let (k_ab, k_bc, k_c) = (pick(&[0, 1])?, pick(&[1, 2])?, pick(&[2])?);
    let schedule = geometric(0.25, 0.5, 3);
    let cfg = PipelineConfig {
        m: 1,
        gamma: 0.0,
        p: 3.0,
        eps: schedule.clone(),
        cutoffs: schedule,
        lattice: 16,
        seed: 2,
        keep_fields: true,
    };
    let last = |k: &CompactSet| -> Result<VectorField2, Box<dyn Error>> {
        Ok(approximate_divfree(&all.field, k, &cfg)?.diagonal.pop().ok_or("no diagonal field")?)
    };
    let (u1, u2) = (last(&k_ab)?, last(&k_bc)?);
    let chi = smooth_cutoff(&k_ab, 0.4)?.field;
    let glued = glue_approximations(&u1, &k_ab, &u2, &k_c, &chi)?;
    let err = |v: &VectorField2| -> Result<f64, Box<dyn Error>> { Ok(v.sub(&all.field)?.sup()) };
    let (e1, e2, e) = (err(&u1)?, err(&u2)?, err(&glued)?);
    let c = glue_constant(&chi);
    let div = max_divergence(&glued);
    let gap = support_gap(&glued, &distance_field(&all.set)?);
    Ok((
        div <= 1e-12 && gap > 0.0 && e <= c * (e1 + e2),
        format!("max |div| {div:.1e}, support gap {gap:.4}, error {e:.3e} <= C(chi) (e1 + e2) = {c:.2} x {:.3e}", e1 + e2),
    ))
}

fn main() {
    // Name, check, wall-clock limit in seconds.
    let criteria: [(&str, fn() -> Outcome, Option<f64>); 9] = [
        ("whitney invariants", whitney_invariants, Some(60.0)),
        ("extension round trip", extension_round_trip, None),
        ("maximal function bounds", maximal_bounds, None),
        ("compression decay", compression_decay, None),
        ("pipeline convergence", pipeline_convergence, Some(300.0)),
        ("truncation estimates", hedberg_estimates, None),
        ("koch sharpness", sharpness, None),
        ("zero-derivative reduction", zero_derivative_reduction, Some(30.0)),
        ("gluing", gluing, None),
    ];
    // ACCEPTANCE_ONLY=<n> runs a single criterion.
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (n, (name, run, limit)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != n + 1) {
            continue;
        }
        let start = Instant::now();
        let (mut pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        let budget = match limit {
            Some(l) => {
                pass &= secs <= *l;
                format!("{secs:.1} s of {l:.0} s")
            }
            None => format!("{secs:.1} s"),
        };
        failed += usize::from(!pass);
        println!("{} [{}] {name}: {detail} ({budget})", if pass { "PASS" } else { "FAIL" }, n + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
