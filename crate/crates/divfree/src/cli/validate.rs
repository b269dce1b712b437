//! Dry-run checks of a resolved config against its grid.

use std::fmt;

use serde::Serialize;

use super::config::{Config, Schedule};
use super::Scenario;
use crate::geometry::Shape;
use crate::grid::stencil_half_width;

/// Cutoff widths below `MIN_WIDTH_CELLS * h` are not resolved.
pub const MIN_WIDTH_CELLS: f64 = 8.0;
/// Dyadic level `nu` needs `2^-nu >= LEVEL_CELLS * h`.
pub const LEVEL_CELLS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    /// Config key the problem belongs to.
    pub key: String,
    pub message: String,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub scenario: Scenario,
    pub spacing: f64,
    /// Smallest resolvable cutoff width, `8 h`.
    pub min_width: f64,
    /// Deepest dyadic level with `2^-nu >= 4 h`.
    pub max_level: Option<usize>,
    /// Distance shapes keep from the grid boundary for the derivative stencils.
    pub stencil_margin: f64,
    pub problems: Vec<Problem>,
}

struct Problems(Vec<Problem>);

impl Problems {
    fn flag(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.0.push(Problem { key: key.into(), message: message.into() });
    }

    fn schedule(&mut self, key: &str, s: &Schedule) {
        if s.count == 0 {
            self.flag(key, "schedule is empty");
        }
        if !(s.start > 0.0 && s.start.is_finite()) {
            self.flag(key, format!("start must be positive, got {}", s.start));
        }
        if !(s.factor > 0.0 && s.factor < 1.0) {
            self.flag(key, format!("factor must lie in (0, 1), got {}", s.factor));
        }
    }

    fn widths(&mut self, key: &str, widths: &[f64], h: f64) {
        for (i, &w) in widths.iter().enumerate() {
            if w < MIN_WIDTH_CELLS * h {
                self.flag(format!("{key}[{i}]"), format!("eps = {w} is below 8h = {}", MIN_WIDTH_CELLS * h));
            }
        }
    }
}

/// Checks a resolved config without running it: cutoff widths against
/// `eps >= 8h`, Besov depth against `2^-nu >= 4h`, and room for the
/// derivative stencils between every shape and the grid boundary. A
/// consistent config yields no problems.
pub fn validate(scenario: Scenario, c: &Config) -> ValidationReport {
    use Scenario::*;
    let mut p = Problems(Vec::new());
    let grid = match c.grid.grid() {
        Ok(g) => Some(g),
        Err(e) => {
            p.flag("grid", e.to_string());
            None
        }
    };
    if c.grid.cells < 16 {
        p.flag("grid.cells", format!("need at least 16 cells, got {}", c.grid.cells));
    }
    let h = grid.map_or(f64::NAN, |g| g.h());

    if let Some(g) = c.gamma {
        if !(0.0..=1.0).contains(&g) {
            p.flag("gamma", format!("must lie in [0, 1], got {g}"));
        }
    }
    if let Some(v) = c.p {
        if !(v >= 1.0 && v.is_finite()) {
            p.flag("p", format!("must be at least 1, got {v}"));
        }
    }
    if let Some(m) = c.m {
        if !(1..=2).contains(&m) {
            p.flag("m", format!("orders 1 and 2 are supported, got {m}"));
        }
    }
    if c.lattice.is_some_and(|l| l < 2) {
        p.flag("lattice", "need at least 2 lattice points per side");
    }
    for (key, s) in [("eps", &c.eps), ("cutoffs", &c.cutoffs), ("truncation", &c.truncation)] {
        if let Some(s) = s {
            p.schedule(key, s);
        }
    }

    // Geometry each scenario needs.
    let disks = c.geometry.all_disks(c.seed);
    if let Err(e) = &disks {
        p.flag("geometry.random", e.to_string());
    }
    let n_disks = disks.as_ref().map_or(0, Vec::len);
    match scenario {
        KochSharpness if c.geometry.koch.is_none() => p.flag("geometry.koch", "koch-sharpness needs a Koch curve"),
        C1Pipeline | CmgammaPipeline | GlueDemo if n_disks == 0 => {
            p.flag("geometry.disks", "the pipeline builds its field from disks")
        }
        WhitneyDemo | BesovCompression if c.geometry.is_empty() => p.flag("geometry", "no shapes"),
        SobolevDiagnostics if n_disks == 0 => p.flag("geometry", "needs disks or a random disk suite"),
        _ => {}
    }
    if let Some(k) = &c.geometry.koch {
        if let Err(e) = k.curve() {
            p.flag("geometry.koch", e.to_string());
        }
    }

    // Stencil margins: derivatives up to the jet order are taken near K.
    let order = match scenario {
        C1Pipeline | CmgammaPipeline | GlueDemo => c.m.unwrap_or(1) + 1,
        _ => c.m.unwrap_or(1).max(2),
    };
    let margin = (stencil_half_width(order) as f64 + 1.0) * h;
    if let Some(g) = grid {
        let (lo, hi) = (g.origin, g.upper());
        let fits = |s: &Shape| {
            let (a, b) = s.bounding_box();
            a[0] - margin >= lo[0] && a[1] - margin >= lo[1] && b[0] + margin <= hi[0] && b[1] + margin <= hi[1]
        };
        for (i, d) in c.geometry.disks.iter().enumerate() {
            if !fits(&d.shape()) {
                p.flag(format!("geometry.disks[{i}]"), format!("closer than the stencil margin {margin} to the grid edge"));
            }
        }
        if let Some(r) = &c.geometry.random {
            let inside = r.lo - margin >= lo[0].max(lo[1]) && r.hi + margin <= hi[0].min(hi[1]);
            if !inside {
                p.flag("geometry.random", format!("placement box is closer than the stencil margin {margin} to the grid edge"));
            }
        }
        if let Some(curve) = c.geometry.koch.and_then(|k| k.curve().ok()) {
            if !fits(&curve.shape()) {
                p.flag("geometry.koch", format!("closer than the stencil margin {margin} to the grid edge"));
            }
        }
    }

    // Cutoff widths.
    if matches!(scenario, C1Pipeline | CmgammaPipeline | GlueDemo) {
        if let Some(s) = &c.cutoffs {
            p.widths("cutoffs", &s.values(), h);
        }
    }
    if scenario == KochSharpness {
        if let Some(s) = &c.sharpness {
            p.widths("sharpness.widths", &s.widths, h);
            if !(s.min_gap > 0.0) {
                p.flag("sharpness.min_gap", "must be positive");
            }
        }
    }
    if let (GlueDemo, Some(gl)) = (scenario, &c.glue) {
        p.widths("glue.chi_width", &[gl.chi_width], h);
        for (key, ids) in [("glue.first", &gl.first), ("glue.second", &gl.second)] {
            if ids.is_empty() {
                p.flag(key, "no disks");
            }
            if let Some(&bad) = ids.iter().find(|&&i| i >= n_disks) {
                p.flag(key, format!("disk {bad} does not exist ({n_disks} disks)"));
            }
        }
        if gl.second.iter().all(|i| gl.first.contains(i)) {
            p.flag("glue.second", "needs a disk outside `first`");
        }
    }

    // Dyadic depth.
    let max_level = grid.map(|g| crate::besov::max_level(g.h()));
    if let (BesovCompression, Some(b)) = (scenario, &c.besov) {
        if let Some(levels) = b.levels {
            if levels == 0 {
                p.flag("besov.levels", "need at least one level");
            } else {
                let nu = levels - 1;
                let size = 0.5f64.powi(nu as i32);
                if size < LEVEL_CELLS * h {
                    p.flag("besov.levels", format!("nu_max = {nu}: 2^-nu = {size} < 4h = {}", LEVEL_CELLS * h));
                }
            }
        }
        if !(b.q >= 1.0) {
            p.flag("besov.q", format!("must be at least 1, got {}", b.q));
        }
        if !(b.beta > 0.0) {
            p.flag("besov.beta", format!("must be positive, got {}", b.beta));
        }
        if b.points < 2 {
            p.flag("besov.points", "need at least 2 atoms");
        }
        if let Some(d) = c.d {
            if !(0.0..2.0).contains(&d) {
                p.flag("d", format!("must lie in [0, 2), got {d}"));
            } else if n_disks > 0 && d != 1.0 {
                p.flag("d", format!("disks carry the boundary measure with d = 1, got {d}"));
            }
        }
    }
    if let (SobolevDiagnostics, Some(s)) = (scenario, &c.suite) {
        if s.resolutions.len() < 2 {
            p.flag("suite.resolutions", "need at least two resolutions to measure drift");
        }
        if let Some(&bad) = s.resolutions.iter().find(|&&r| r < 16) {
            p.flag("suite.resolutions", format!("need at least 16 cells, got {bad}"));
        }
        if s.seeds == 0 {
            p.flag("suite.seeds", "need at least one seed");
        }
    }

    ValidationReport { scenario, spacing: h, min_width: MIN_WIDTH_CELLS * h, max_level, stencil_margin: margin, problems: p.0 }
}
