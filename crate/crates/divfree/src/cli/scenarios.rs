//! One driver per scenario. Each returns its checks and a JSON value with
//! the measured quantities and constants; tables and rasters go through
//! [`Artifacts`].

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Config, GridConfig};
use super::io::{num, Artifacts};
use super::{stage, Check, CliError, Scenario};
use crate::approx::{
    approximate_divfree, compress_jet, compression_delta, compression_map, cover_values, glue_approximations,
    glue_constant, hedberg_truncate, koch_target, sharpness_certificate, smooth_cutoff, support_gap,
    truncation_candidates, HedbergEstimates, PipelineConfig, PipelineOutput,
};
use crate::besov::{
    besov_compress, besov_conditions, canonical_sequence, fit_sequence, sample_measure, zero_derivative_reduce,
    RegularMeasure,
};
use crate::fixtures::{disk_fixture, geometric_jets, truncation_fixture, Disk, FieldFixture, TrigSum};
use crate::geometry::{distance_field, make_compact_set, CompactSet, Shape};
use crate::grid::{Grid, ScalarField, VectorField2};
use crate::jets::{extension_c2_norm, jet_norm, maximal_lp, restrict, whitney_extend, EvalLattice, Jet};
use crate::norms::{gradient_lp, max_divergence};
use crate::whitney::{check_decomposition, whitney_decompose, WhitneyParams};

/// Largest divergence an approximant may show.
pub const DIVERGENCE_LIMIT: f64 = 1e-12;
/// Largest `|sum phi_k - 1|` off `K`.
pub const PARTITION_LIMIT: f64 = 1e-10;
/// Allowed spread of a normalized truncation estimate across `eps`.
pub const TRUNCATION_SPREAD: f64 = 4.0;

pub const CONVERGENCE_HEADER: [&str; 7] = ["eps", "k", "err_C1", "err_Wmp", "max_div", "support_gap", "delta_eps"];

type Driven = Result<(Vec<Check>, Value), CliError>;

pub fn drive(scenario: Scenario, c: &Config, out: &mut Artifacts) -> Driven {
    match scenario {
        Scenario::WhitneyDemo => whitney_demo(c, out),
        Scenario::C1Pipeline | Scenario::CmgammaPipeline => pipeline(c, out),
        Scenario::SobolevDiagnostics => sobolev_diagnostics(c, out),
        Scenario::BesovCompression => besov(c, out),
        Scenario::KochSharpness => koch_sharpness(c, out),
        Scenario::GlueDemo => glue_demo(c, out),
    }
}

/// Values resolved by [`Config::resolve`]; a missing one means the caller
/// skipped resolution.
fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(key, "missing after resolution"))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn mask_field(k: &CompactSet) -> ScalarField {
    ScalarField { grid: k.grid, values: k.mask.iter().map(|&b| f64::from(u8::from(b))).collect() }
}

/// `|u|` at the nodes, from the nearest staggered components.
fn speed(u: &VectorField2) -> ScalarField {
    let g = u.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let mut f = ScalarField::zeros(g);
    for j in 0..ny {
        for i in 0..nx {
            f.values[g.index(i, j)] = u.u1_at(i, j.min(ny - 2)).hypot(u.u2_at(i.min(nx - 2), j));
        }
    }
    f
}

fn disk_field(c: &Config) -> Result<(Grid, Vec<Disk>, FieldFixture), CliError> {
    let grid = c.grid.grid()?;
    let disks = c.geometry.all_disks(c.seed)?;
    let fx = disk_fixture(grid, &disks, c.potential.plateau_cells * grid.h(), c.potential.width)
        .map_err(stage("fixture"))?;
    Ok((grid, disks, fx))
}

fn whitney_demo(c: &Config, out: &mut Artifacts) -> Driven {
    let grid = c.grid.grid()?;
    let m = need(c.m, "m")?;
    let shapes = c.geometry.shapes(c.seed)?;
    let k = make_compact_set(&shapes, grid).map_err(stage("geometry"))?;
    let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k)).map_err(stage("decompose"))?;
    let check = check_decomposition(&dec);
    let sum_err = dec.partition_sum_error(&k);
    let constants = dec.partition_constants(3);
    out.with_writer("cubes.csv", |w| dec.write_csv(w))?;

    // A seeded smooth function, restricted to a jet and extended back.
    let f = TrigSum::random(c.seed, 4, 4.0);
    let field = f.field(grid);
    let jet = restrict(&field, &k, m).map_err(stage("restrict"))?;
    let ext = whitney_extend(&jet, &dec, m, grid).map_err(stage("extend"))?;
    let exact = k.samples().iter().enumerate().all(|(s, &node)| ext.values[node] == jet.values[0][s]);
    let norms = extension_c2_norm(&jet, &dec, m, 2, None).map_err(stage("extend"))?;
    let jn = jet_norm(&jet, m, need(c.gamma, "gamma")?, c.seed).map_err(stage("jet norm"))?;

    out.pgm("mask.pgm", &mask_field(&k))?;
    out.pgm("distance.pgm", &distance_field(&k).map_err(stage("geometry"))?)?;
    out.pgm("extension.pgm", &ext)?;

    let checks = vec![
        Check::new(
            "whitney invariants",
            check.passes(),
            format!(
                "{} squares, dist/side in [{:.3}, {:.3}], max |N(k)| {}",
                check.n_cubes, check.min_dist_ratio, check.max_dist_ratio, check.max_neighbors
            ),
        ),
        Check::new("partition of unity", sum_err <= PARTITION_LIMIT, format!("max |sum phi - 1| = {sum_err:e}")),
        Check::new("extension reproduces f0 on K", exact, format!("{} samples", k.n_samples())),
    ];
    let results = json!({
        "samples": k.n_samples(),
        "components": k.n_components,
        "decomposition": check,
        "partition_sum_error": sum_err,
        "partition_constants": constants,
        "extension": {
            "order": m,
            "norms": norms,
            "jet_norm": jn,
            "ratio": norms.cm_norm / jn.jet_norm,
        },
    });
    Ok((checks, results))
}

fn convergence_rows(out: &PipelineOutput) -> Vec<Vec<String>> {
    out.report
        .entries
        .iter()
        .map(|e| {
            vec![
                num(e.eps),
                e.k.to_string(),
                num(e.err_c1),
                num(e.err_wmp),
                num(e.max_div),
                num(e.support_gap),
                num(e.delta_eps),
            ]
        })
        .collect()
}

fn pipeline_config(c: &Config, keep_fields: bool) -> Result<PipelineConfig, CliError> {
    Ok(PipelineConfig {
        m: need(c.m, "m")?,
        gamma: need(c.gamma, "gamma")?,
        p: need(c.p, "p")?,
        eps: need(c.eps, "eps")?.values(),
        cutoffs: need(c.cutoffs, "cutoffs")?.values(),
        lattice: need(c.lattice, "lattice")?,
        seed: c.seed,
        keep_fields,
    })
}

/// Divergence and support checks shared by the pipeline scenarios.
fn field_checks(out: &PipelineOutput, h: f64) -> Vec<Check> {
    let div = out.report.entries.iter().map(|e| e.max_div).fold(0.0, f64::max);
    let worst = out
        .report
        .entries
        .iter()
        .map(|e| (e.support_gap, e.cutoff / 4.0 - h))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 - b.1 < a.0 - a.1 { b } else { a });
    let gaps_ok = out.report.entries.iter().all(|e| e.support_gap >= e.cutoff / 4.0 - h && e.support_gap > 0.0);
    vec![
        Check::new("divergence free", div <= DIVERGENCE_LIMIT, format!("max |div| = {div:e}")),
        Check::new(
            "support gap",
            gaps_ok,
            format!("tightest gap {:.4} against eps/4 - h = {:.4}", worst.0, worst.1),
        ),
    ]
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn series(v: &[f64]) -> String {
    v.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
}

fn pipeline(c: &Config, out: &mut Artifacts) -> Driven {
    let (grid, _, fx) = disk_field(c)?;
    let cfg = pipeline_config(c, out.rasters())?;
    let run = approximate_divfree(&fx.field, &fx.set, &cfg).map_err(stage("pipeline"))?;
    out.csv("convergence.csv", &CONVERGENCE_HEADER, &convergence_rows(&run))?;
    let diag = run.report.diagonal();
    let mut checks = Vec::new();
    let err_c1: Vec<f64> = diag.iter().map(|e| e.err_c1).collect();
    checks.push(Check::new("diagonal err_C1 strictly decreasing", strictly_decreasing(&err_c1), series(&err_c1)));
    if cfg.m > 1 {
        let err_cm: Vec<f64> = diag.iter().map(|e| e.err_cm).collect();
        checks.push(Check::new("diagonal C^m error strictly decreasing", strictly_decreasing(&err_cm), series(&err_cm)));
    }
    if cfg.gamma > 0.0 {
        let holder: Vec<f64> = diag.iter().filter_map(|e| e.err_holder).collect();
        checks.push(Check::new("diagonal Hölder error non-increasing", non_increasing(&holder), series(&holder)));
    }
    checks.extend(field_checks(&run, grid.h()));

    let mut truncation = Vec::new();
    if let Some(s) = c.truncation {
        truncation = truncation_table(&s.values(), cfg.m, cfg.gamma, c.seed, out)?;
        checks.extend(truncation_checks(&truncation));
    }

    out.pgm("mask.pgm", &mask_field(&fx.set))?;
    out.pgm("potential.pgm", &run.potential)?;
    if let Some(last) = run.diagonal.last() {
        out.pgm("approximant.pgm", &speed(last))?;
    }
    let mut results = json!({ "pipeline": run.report });
    if !truncation.is_empty() {
        results["truncation"] = to_value(&truncation);
    }
    Ok((checks, results))
}

fn truncation_table(
    schedule: &[f64],
    m: u32,
    gamma: f64,
    seed: u64,
    out: &mut Artifacts,
) -> Result<Vec<HedbergEstimates>, CliError> {
    let mut runs = Vec::new();
    for &eps in schedule {
        let (f, k) = truncation_fixture(eps).map_err(stage("truncation fixture"))?;
        runs.push(hedberg_truncate(&f, &k, eps, m, gamma, seed).map_err(stage("truncation"))?.estimates);
    }
    let header = [
        "eps", "order", "f_sup", "f_holder", "rho_sup", "rho_holder", "ratio_f_sup", "ratio_f_holder", "ratio_rho_sup",
        "ratio_rho_holder", "product_bound",
    ];
    let rows: Vec<Vec<String>> = runs
        .iter()
        .flat_map(|r| {
            r.terms.iter().map(move |t| {
                vec![
                    num(r.eps),
                    t.order.to_string(),
                    num(t.f_sup),
                    num(t.f_holder),
                    num(t.rho_sup),
                    num(t.rho_holder),
                    num(t.ratio_f_sup),
                    num(t.ratio_f_holder),
                    num(t.ratio_rho_sup),
                    num(t.ratio_rho_holder),
                    num(r.product_bound),
                ]
            })
        })
        .collect();
    out.csv("truncation.csv", &header, &rows)?;
    Ok(runs)
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn truncation_checks(runs: &[HedbergEstimates]) -> Vec<Check> {
    let orders = runs.first().map_or(0, |r| r.terms.len());
    let mut worst = 0.0f64;
    for t in 0..orders {
        let pick: [fn(&crate::approx::HedbergTerm) -> f64; 4] =
            [|x| x.ratio_f_sup, |x| x.ratio_f_holder, |x| x.ratio_rho_sup, |x| x.ratio_rho_holder];
        for f in pick {
            let s: Vec<f64> = runs.iter().map(|r| f(&r.terms[t])).collect();
            worst = worst.max(spread(&s));
        }
    }
    let products: Vec<f64> = runs.iter().map(|r| r.product_bound).collect();
    vec![
        Check::new(
            "truncation estimates follow their eps powers",
            worst <= TRUNCATION_SPREAD,
            format!("largest spread {worst:.3}x (limit {TRUNCATION_SPREAD}x)"),
        ),
        Check::new("truncation product bound decreasing", strictly_decreasing(&products), series(&products)),
    ]
}

#[derive(Debug, Clone, Copy, Serialize)]
struct CompressionRow {
    eps: f64,
    intervals: usize,
    jet_delta: f64,
    maximal_delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct SuiteRow {
    seed: u64,
    cells: usize,
    disks: usize,
    /// `||M f||_p / ||grad^2 F||_p`.
    maximal_over_gradient: f64,
    /// `||grad^2 E f||_p / ||M f||_p` for one constant per disk; absent for a
    /// single disk, where both sides vanish.
    extension_over_maximal: Option<f64>,
}

/// Largest over seeds per resolution, and its spread across resolutions.
fn suite_constant(rows: &[SuiteRow], cells: &[usize], pick: impl Fn(&SuiteRow) -> Option<f64>) -> (f64, f64) {
    let by_h: Vec<f64> = cells
        .iter()
        .filter_map(|&n| {
            let v: Vec<f64> = rows.iter().filter(|r| r.cells == n).filter_map(&pick).collect();
            (!v.is_empty()).then(|| v.iter().copied().fold(0.0, f64::max))
        })
        .collect();
    if by_h.is_empty() {
        return (f64::NAN, 1.0);
    }
    (by_h.iter().copied().fold(0.0, f64::max), spread(&by_h))
}

fn sobolev_diagnostics(c: &Config, out: &mut Artifacts) -> Driven {
    let (grid, _, fx) = disk_field(c)?;
    let m = need(c.m, "m")?;
    let p = need(c.p, "p")?;
    let lattice = EvalLattice::over_grid(&grid, need(c.lattice, "lattice")?);
    let jet = restrict(&fx.potential, &fx.set, m).map_err(stage("restrict"))?;
    let mut rows = Vec::new();
    for eps in need(c.eps, "eps")?.values() {
        let intervals = cover_values(&jet.values[0], eps).map_err(stage("cover"))?;
        let eta = compression_map(&intervals).map_err(stage("compress"))?;
        let compressed = compress_jet(&jet, &eta).map_err(stage("compress"))?;
        let d = compression_delta(&compressed, m, 0.0, Some(p), &lattice, c.seed).map_err(stage("delta"))?;
        rows.push(CompressionRow { eps, intervals: intervals.len(), jet_delta: d.jet_norm, maximal_delta: d.maximal_lp });
    }
    out.csv(
        "compression.csv",
        &["eps", "intervals", "jet_delta", "maximal_delta"],
        &rows
            .iter()
            .map(|r| {
                vec![num(r.eps), r.intervals.to_string(), num(r.jet_delta), r.maximal_delta.map_or(String::new(), num)]
            })
            .collect::<Vec<_>>(),
    )?;
    let jet_d: Vec<f64> = rows.iter().map(|r| r.jet_delta).collect();
    let max_d: Vec<f64> = rows.iter().filter_map(|r| r.maximal_delta).collect();
    let mut checks = vec![
        Check::new("jet-norm delta non-increasing", non_increasing(&jet_d), series(&jet_d)),
        Check::new("maximal-function delta non-increasing", non_increasing(&max_d), series(&max_d)),
    ];
    let mut results = json!({ "compression": rows });

    if let Some(suite) = &c.suite {
        let mut suite_rows = Vec::new();
        for s in 0..suite.seeds {
            let seed = c.seed + s;
            let disks = c.geometry.all_disks(seed)?;
            let shapes: Vec<Shape> = disks.iter().map(Disk::shape).collect();
            let f = TrigSum::random(seed, suite.waves, suite.max_freq);
            for &cells in &suite.resolutions {
                let g = GridConfig::with_cells(&c.grid, cells).grid()?;
                let set = make_compact_set(&shapes, g).map_err(stage("geometry"))?;
                let lat = EvalLattice::over_grid(&g, need(c.lattice, "lattice")?);
                let field = f.field(g);
                let j1 = restrict(&field, &set, 1).map_err(stage("restrict"))?;
                let lower = maximal_lp(&j1, 2, p, &lat).map_err(stage("maximal"))?
                    / gradient_lp(&field, 2, p, None).map_err(stage("norms"))?;
                let upper = if disks.len() >= 2 {
                    let flat = Jet::from_fn(1, set.sample_points(), |x| {
                        let v = disks.iter().find(|d| d.shape().distance(x) <= g.h()).map_or(0.0, |d| d.value);
                        vec![v, 0.0, 0.0]
                    });
                    let dec = whitney_decompose(&set, &WhitneyParams::for_set(&set)).map_err(stage("decompose"))?;
                    let hess = extension_c2_norm(&flat, &dec, 1, 2, Some(p)).map_err(stage("extend"))?.hessian_lp;
                    Some(hess.unwrap_or(0.0) / maximal_lp(&flat, 2, p, &lat).map_err(stage("maximal"))?)
                } else {
                    None
                };
                suite_rows.push(SuiteRow {
                    seed,
                    cells,
                    disks: disks.len(),
                    maximal_over_gradient: lower,
                    extension_over_maximal: upper,
                });
            }
        }
        out.csv(
            "suite.csv",
            &["seed", "cells", "disks", "maximal_over_gradient", "extension_over_maximal"],
            &suite_rows
                .iter()
                .map(|r| {
                    vec![
                        r.seed.to_string(),
                        r.cells.to_string(),
                        r.disks.to_string(),
                        num(r.maximal_over_gradient),
                        r.extension_over_maximal.map_or(String::new(), num),
                    ]
                })
                .collect::<Vec<_>>(),
        )?;
        let (c_low, d_low) = suite_constant(&suite_rows, &suite.resolutions, |r| Some(r.maximal_over_gradient));
        let (c_up, d_up) = suite_constant(&suite_rows, &suite.resolutions, |r| r.extension_over_maximal);
        checks.push(Check::new(
            "maximal function bounded by the Sobolev norm",
            d_low < suite.max_drift,
            format!("constant {c_low:.4}, drift {d_low:.3}x over resolutions"),
        ));
        checks.push(Check::new(
            "extension Sobolev norm bounded by the maximal function",
            d_up < suite.max_drift,
            format!("constant {c_up:.4}, drift {d_up:.3}x over resolutions"),
        ));
        results["suite"] = json!({
            "rows": suite_rows,
            "maximal_over_gradient": { "constant": c_low, "drift": d_low },
            "extension_over_maximal": { "constant": c_up, "drift": d_up },
        });
    }
    Ok((checks, results))
}

/// Size and measured regularity band of a measure, without its atoms.
fn measure_summary(mu: &RegularMeasure) -> Value {
    json!({
        "d": mu.d,
        "atoms": mu.len(),
        "total_mass": mu.total_mass,
        "regularity_lower": mu.lower,
        "regularity_upper": mu.upper,
        "probe": mu.probe,
        "warning": mu.warning,
    })
}

fn besov(c: &Config, out: &mut Artifacts) -> Driven {
    let grid = c.grid.grid()?;
    let b = need(c.besov, "besov")?;
    let (p, d) = (need(c.p, "p")?, need(c.d, "d")?);
    let disks = c.geometry.all_disks(c.seed)?;
    let curve = c.geometry.koch.map(|k| k.curve()).transpose()?;
    let k = make_compact_set(&c.geometry.shapes(c.seed)?, grid).map_err(stage("geometry"))?;
    let mu = sample_measure(&k, d, b.points).map_err(stage("measure"))?;
    // Disk values on disks, the curve parameter on the curve.
    let f0: Vec<f64> = mu
        .points
        .iter()
        .map(|&x| match disks.iter().find(|dk| dk.shape().distance(x) <= grid.h()) {
            Some(dk) => dk.value,
            None => curve.as_ref().map_or(0.0, |cv| cv.parameter_of(x)),
        })
        .collect();
    let f = Jet::from_values(0, mu.points.clone(), f0.clone()).map_err(stage("jet"))?;
    let (s, levels) = (need(b.dyadic_exponent, "besov.dyadic_exponent")?, need(b.levels, "besov.levels")?);
    let seq = canonical_sequence(&f, b.beta, p, b.q, s, levels, &mu).map_err(stage("besov"))?;
    let initial = besov_conditions(&f, &seq, &mu).map_err(stage("besov"))?;
    let mut rows = Vec::new();
    for eps in need(c.eps, "eps")?.values() {
        let eta = compression_map(&cover_values(&f0, eps).map_err(stage("cover"))?).map_err(stage("compress"))?;
        rows.push(besov_compress(&f, &seq, &eta, &mu).map_err(stage("besov compress"))?.summary());
    }
    out.csv(
        "besov.csv",
        &["eps", "c_constant", "norm", "valid", "max_ratio"],
        &rows
            .iter()
            .map(|r| vec![num(r.eps), num(r.c_constant), num(r.norm), r.valid.to_string(), num(r.max_ratio)])
            .collect::<Vec<_>>(),
    )?;
    let norms: Vec<f64> = rows.iter().map(|r| r.norm).collect();
    let mut checks = vec![
        Check::new("canonical sequence satisfies the conditions", initial.valid, format!("max ratio {:.4}", initial.max_ratio)),
        Check::new(
            "compressed sequences satisfy the conditions",
            rows.iter().all(|r| r.valid),
            format!("max ratio {:.4}", rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max)),
        ),
        Check::new("Besov norm non-increasing", non_increasing(&norms), series(&norms)),
    ];
    let mut results = json!({
        "measure": measure_summary(&mu),
        "initial_norm": seq.norm(),
        "initial_conditions": initial,
        "compression": rows,
    });

    if b.reductions > 0 {
        let f1 = Jet::from_values(1, mu.points.clone(), f0).map_err(stage("jet"))?;
        let mut red_rows = Vec::new();
        let (mut valid, mut ratio, mut bound) = (true, 0.0f64, f64::INFINITY);
        for r in 0..b.reductions {
            let seed = c.seed + r;
            let seq = fit_sequence(&f1, geometric_jets(&f1, seed, levels), b.reduction_beta, p, b.q, s, &mu)
                .map_err(stage("besov fit"))?;
            let before = besov_conditions(&f1, &seq, &mu).map_err(stage("besov"))?.valid;
            let red = zero_derivative_reduce(&f1, &seq, &mu).map_err(stage("reduce"))?;
            valid &= before && red.report.valid;
            ratio = ratio.max(red.ratio);
            bound = bound.min(red.c_theory.unwrap_or(f64::INFINITY));
            red_rows.push(json!({ "seed": seed, "valid": before && red.report.valid, "ratio": red.ratio, "c_theory": red.c_theory }));
        }
        checks.push(Check::new("reduced sequences satisfy the conditions", valid, format!("{} sequences", b.reductions)));
        checks.push(Check::new(
            "reduction bounded by one constant",
            ratio <= bound,
            format!("sum a~^q / sum a^q <= {ratio:.4}, bound {bound:.4}"),
        ));
        results["reduction"] = json!({ "rows": red_rows, "max_ratio": ratio, "constant": bound });
    }
    Ok((checks, results))
}

fn koch_sharpness(c: &Config, out: &mut Artifacts) -> Driven {
    let grid = c.grid.grid()?;
    let curve = need(c.geometry.koch, "geometry.koch")?.curve()?;
    let gamma = need(c.gamma, "gamma")?;
    let sharp = c.sharpness.clone().ok_or_else(|| CliError::config("sharpness", "missing after resolution"))?;
    let target = koch_target(&curve, grid, gamma, c.seed).map_err(stage("target"))?;
    let cands = truncation_candidates(&target, &sharp.widths).map_err(stage("candidates"))?;
    let cert = sharpness_certificate(&target, &cands).map_err(stage("certificate"))?;
    out.json("certificate.json", &cert)?;
    out.pgm("mask.pgm", &mask_field(&target.set))?;
    out.pgm("potential.pgm", &target.potential)?;
    let band = curve.holder_band(10_000, c.seed);
    let min_gap = cert.candidates.iter().map(|x| x.potential_gap).fold(f64::INFINITY, f64::min);
    let min_lower = cert.candidates.iter().map(|x| x.c0_lower_bound).fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::new(
            "every candidate keeps a potential gap",
            cert.certifies(sharp.min_gap),
            format!("{} candidates, smallest gap {min_gap:.4} (need {})", cert.candidates.len(), sharp.min_gap),
        ),
        Check::new(
            "positive C0 lower bound for every candidate",
            cert.candidates.iter().all(|x| x.c0_lower_bound > 0.0),
            format!("smallest lower bound {min_lower:.4}"),
        ),
    ];
    let results = json!({
        "theta": curve.theta,
        "dimension": 1.0 / curve.theta,
        "holder_band": band,
        "certificate": cert,
    });
    Ok((checks, results))
}

fn glue_demo(c: &Config, out: &mut Artifacts) -> Driven {
    let (grid, disks, all) = disk_field(c)?;
    let gl = c.glue.clone().ok_or_else(|| CliError::config("glue", "missing after resolution"))?;
    let pick = |ids: &[usize]| -> Result<CompactSet, CliError> {
        let s: Vec<Shape> = ids.iter().map(|&i| disks[i].shape()).collect();
        make_compact_set(&s, grid).map_err(stage("geometry"))
    };
    let only_second: Vec<usize> = gl.second.iter().copied().filter(|i| !gl.first.contains(i)).collect();
    let (k1, k_second, k2) = (pick(&gl.first)?, pick(&gl.second)?, pick(&only_second)?);
    let cfg = pipeline_config(c, true)?;
    let approx = |k: &CompactSet| -> Result<(VectorField2, PipelineOutput), CliError> {
        let mut run = approximate_divfree(&all.field, k, &cfg).map_err(stage("pipeline"))?;
        let last = run.diagonal.pop().ok_or_else(|| CliError::Stage { stage: "pipeline", message: "no diagonal field".into() })?;
        Ok((last, run))
    };
    let (u1, run1) = approx(&k1)?;
    let (u2, run2) = approx(&k_second)?;
    let chi = smooth_cutoff(&k1, gl.chi_width).map_err(stage("cutoff"))?.field;
    let glued = glue_approximations(&u1, &k1, &u2, &k2, &chi).map_err(stage("glue"))?;
    let err = |v: &VectorField2| -> Result<f64, CliError> { Ok(v.sub(&all.field).map_err(stage("glue"))?.sup()) };
    let (e1, e2, e) = (err(&u1)?, err(&u2)?, err(&glued)?);
    let constant = glue_constant(&chi);
    let div = max_divergence(&glued);
    let gap = support_gap(&glued, &distance_field(&all.set).map_err(stage("geometry"))?);
    let mut rows = convergence_rows(&run1);
    rows.extend(convergence_rows(&run2));
    out.csv("convergence.csv", &CONVERGENCE_HEADER, &rows)?;
    out.pgm("cutoff.pgm", &chi)?;
    out.pgm("glued.pgm", &speed(&glued))?;
    let checks = vec![
        Check::new("divergence free", div <= DIVERGENCE_LIMIT, format!("max |div| = {div:e}")),
        Check::new("supported off every component", gap > 0.0, format!("support gap {gap:.4}")),
        Check::new(
            "error bounded by C(chi) times the input errors",
            e <= constant * (e1 + e2),
            format!("{e:.4e} <= {constant:.3} x {:.4e}", e1 + e2),
        ),
    ];
    let results = json!({
        "glue_constant": constant,
        "error": e,
        "first_error": e1,
        "second_error": e2,
        "max_div": div,
        "support_gap": gap,
        "first": run1.report,
        "second": run2.report,
    });
    Ok((checks, results))
}
