//! Deterministic inputs shared by the scenario runner, the examples and the
//! acceptance suite: disk configurations with locally constant stream
//! potentials, random disk sets, smooth trigonometric test functions,
//! the order-2-vanishing truncation fixture and geometric Besov data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::perp_gradient;
use crate::geometry::{make_compact_set, CompactSet, GeometryError, Point, Shape};
use crate::grid::{Grid, GridError, ScalarField, VectorField2};
use crate::jets::Jet;
use crate::multi_index::MultiIndex;
use crate::whitney::smooth_step;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("could not place {wanted} separated disks after {tries} tries")]
    Placement { wanted: usize, tries: usize },
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A disk of `K` and the constant the stream potential takes on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    #[serde(rename = "c")]
    pub center: Point,
    #[serde(rename = "r")]
    pub radius: f64,
    #[serde(default)]
    pub value: f64,
}

impl Disk {
    pub fn shape(&self) -> Shape {
        Shape::disk(self.center, self.radius)
    }
}

/// Disks at `(-0.45, 0)` and `(0.45, 0)`, radius 0.15, potential 0 and 1.
pub fn two_disks() -> Vec<Disk> {
    vec![
        Disk { center: [-0.45, 0.0], radius: 0.15, value: 0.0 },
        Disk { center: [0.45, 0.0], radius: 0.15, value: 1.0 },
    ]
}

/// Three disks on a line with potentials 0, 1 and 0.5.
pub fn three_disks() -> Vec<Disk> {
    vec![
        Disk { center: [-0.55, 0.0], radius: 0.12, value: 0.0 },
        Disk { center: [0.0, 0.0], radius: 0.12, value: 1.0 },
        Disk { center: [0.55, 0.0], radius: 0.12, value: 0.5 },
    ]
}

/// Stream potential equal to `value` within `plateau` of each disk and
/// fading smoothly to 0 over the next `width`.
pub fn flat_potential(grid: Grid, disks: &[Disk], plateau: f64, width: f64) -> ScalarField {
    ScalarField::from_fn(grid, |p| {
        disks
            .iter()
            .map(|d| {
                let s = (d.shape().distance(p) - plateau) / width;
                d.value * smooth_step(1.0 - s)[0]
            })
            .sum()
    })
}

/// A divergence-free field vanishing near `K` with its stream potential.
#[derive(Debug, Clone)]
pub struct FieldFixture {
    pub set: CompactSet,
    pub potential: ScalarField,
    pub field: VectorField2,
}

/// `K` = union of the disks and `u = grad_perp` of [`flat_potential`].
pub fn disk_fixture(grid: Grid, disks: &[Disk], plateau: f64, width: f64) -> Result<FieldFixture, FixtureError> {
    let shapes: Vec<Shape> = disks.iter().map(Disk::shape).collect();
    let set = make_compact_set(&shapes, grid)?;
    let potential = flat_potential(grid, disks, plateau, width);
    let field = perp_gradient(&potential);
    Ok(FieldFixture { set, potential, field })
}

/// `start, start * factor, ...` with `count` entries.
pub fn geometric(start: f64, factor: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * factor.powi(i as i32)).collect()
}

/// Up to `count` disks with centers in `[lo, hi]^2`, radii in `[r_min, r_max]`,
/// pairwise at least `separation` apart. Potentials are drawn from `[0, 1]`.
pub fn random_disks(
    seed: u64,
    count: usize,
    lo: f64,
    hi: f64,
    radii: (f64, f64),
    separation: f64,
) -> Result<Vec<Disk>, FixtureError> {
    let mut r = rng(seed);
    let mut out: Vec<Disk> = Vec::with_capacity(count);
    let tries = 1000 * count.max(1);
    for _ in 0..tries {
        if out.len() == count {
            break;
        }
        let radius = r.random_range(radii.0..=radii.1);
        let center = [r.random_range(lo + radius..=hi - radius), r.random_range(lo + radius..=hi - radius)];
        let value = r.random_range(0.0..=1.0);
        let apart = out.iter().all(|d| {
            let gap = ((d.center[0] - center[0]).powi(2) + (d.center[1] - center[1]).powi(2)).sqrt() - d.radius - radius;
            gap >= separation
        });
        if apart {
            out.push(Disk { center, radius, value });
        }
    }
    if out.len() < count {
        return Err(FixtureError::Placement { wanted: count, tries });
    }
    Ok(out)
}

/// `sum_i amp_i sin(w_i . x + phase_i)` with exact derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigSum {
    pub terms: Vec<TrigTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigTerm {
    pub freq: [f64; 2],
    pub phase: f64,
    pub amp: f64,
}

impl TrigSum {
    /// `n_terms` random waves with frequencies up to `max_freq`, scaled so
    /// that `sum amp max(1, |w|)^3 = 1`; this bounds every derivative up to
    /// order 3 by 1.
    pub fn random(seed: u64, n_terms: usize, max_freq: f64) -> TrigSum {
        let mut r = rng(seed);
        let mut terms: Vec<TrigTerm> = (0..n_terms)
            .map(|_| TrigTerm {
                freq: [r.random_range(-max_freq..=max_freq), r.random_range(-max_freq..=max_freq)],
                phase: r.random_range(0.0..std::f64::consts::TAU),
                amp: r.random_range(0.2..=1.0),
            })
            .collect();
        let weight: f64 = terms.iter().map(|t| t.amp * norm(t.freq).max(1.0).powi(3)).sum();
        for t in &mut terms {
            t.amp /= weight;
        }
        TrigSum { terms }
    }

    pub fn derivative(&self, jdx: MultiIndex, p: Point) -> f64 {
        let n = jdx.order();
        self.terms
            .iter()
            .map(|t| {
                let arg = t.freq[0] * p[0] + t.freq[1] * p[1] + t.phase;
                // d^n sin = sin(. + n pi / 2).
                let wave = (arg + n as f64 * std::f64::consts::FRAC_PI_2).sin();
                t.amp * t.freq[0].powi(jdx.0 as i32) * t.freq[1].powi(jdx.1 as i32) * wave
            })
            .sum()
    }

    pub fn value(&self, p: Point) -> f64 {
        self.derivative(MultiIndex(0, 0), p)
    }

    pub fn field(&self, grid: Grid) -> ScalarField {
        ScalarField::from_fn(grid, |p| self.value(p))
    }

    /// Exact order-`m` jet at the samples of `k`.
    pub fn jet(&self, k: &CompactSet, m: u32) -> Jet {
        let idx = MultiIndex::up_to(m);
        Jet::from_fn(m, k.sample_points(), |p| idx.iter().map(|&j| self.derivative(j, p)).collect())
    }
}

fn norm(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Radius of the disk in [`truncation_fixture`].
pub const TRUNCATION_RADIUS: f64 = 0.25;

/// `F = d^3 (1 + 0.3 x_1)` with `d` the distance to the disk of radius
/// [`TRUNCATION_RADIUS`] at the origin, on a grid of spacing `eps / 8`
/// wide enough for `K_2eps` and the stencils. `F` vanishes to order 2 on
/// `K` and its second derivatives are `1/2`-Hölder with a modulus that
/// flattens toward `K`.
pub fn truncation_fixture(eps: f64) -> Result<(ScalarField, CompactSet), FixtureError> {
    let h = eps / 8.0;
    let half = ((TRUNCATION_RADIUS + 2.0 * eps + 8.0 * h) / h).ceil() as usize;
    let grid = Grid::new([-(half as f64) * h; 2], h, [2 * half, 2 * half])?;
    let disk = Shape::disk([0.0, 0.0], TRUNCATION_RADIUS);
    let set = make_compact_set(std::slice::from_ref(&disk), grid)?;
    let f = ScalarField::from_fn(grid, |p| disk.distance(p).powi(3) * (1.0 + 0.3 * p[0]));
    Ok((f, set))
}

/// Grid `[-0.5, 1.5] x [-0.8, 1.2]` holding the unit Koch curve.
pub fn koch_grid(cells: usize) -> Result<Grid, FixtureError> {
    Ok(Grid::new([-0.5, -0.8], 2.0 / cells as f64, [cells, cells])?)
}

/// Approximating jets `f_nu = f + amp_nu (x - x_0) . dir` of order 1 with
/// `amp_nu = amp_0 r^nu`; `amp_0`, `r` and the unit `dir` are drawn from the
/// seed.
pub fn geometric_jets(f: &Jet, seed: u64, levels: usize) -> Vec<Jet> {
    let mut r = rng(seed);
    let amp0: f64 = r.random_range(0.05..=0.5);
    let ratio: f64 = r.random_range(0.25..=0.6);
    let angle: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let dir = [angle.cos(), angle.sin()];
    let origin = f.points.first().copied().unwrap_or([0.0, 0.0]);
    (0..levels)
        .map(|nu| {
            let amp = amp0 * ratio.powi(nu as i32);
            let mut jet = Jet::zeros(1, f.points.clone());
            for (s, p) in f.points.iter().enumerate() {
                let base = f.values[0][s];
                jet.values[0][s] = base + amp * ((p[0] - origin[0]) * dir[0] + (p[1] - origin[1]) * dir[1]);
                jet.values[1][s] = amp * dir[0];
                jet.values[2][s] = amp * dir[1];
            }
            jet
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_potential_is_constant_near_each_disk() {
        let g = Grid::square(-1.0, 2.0, 64).unwrap();
        let fx = disk_fixture(g, &two_disks(), 2.0 * g.h(), 0.25).unwrap();
        for s in fx.set.samples() {
            let p = g.point(s);
            let expect = if p[0] > 0.0 { 1.0 } else { 0.0 };
            assert_eq!(fx.potential.values[s], expect);
        }
        // Zero far from both disks.
        assert_eq!(fx.potential.get(0, 0), 0.0);
    }

    #[test]
    fn trig_derivatives_match_differences() {
        let f = TrigSum::random(3, 4, 3.0);
        let (p, e) = ([0.2, -0.1], 1e-5f64);
        let dx = (f.value([p[0] + e, p[1]]) - f.value([p[0] - e, p[1]])) / (2.0 * e);
        assert_relative_eq!(dx, f.derivative(MultiIndex(1, 0), p), epsilon = 1e-8);
        let dxy = (f.derivative(MultiIndex(1, 0), [p[0], p[1] + e]) - f.derivative(MultiIndex(1, 0), [p[0], p[1] - e])) / (2.0 * e);
        assert_relative_eq!(dxy, f.derivative(MultiIndex(1, 1), p), epsilon = 1e-8);
    }

    #[test]
    fn random_disks_are_separated_and_seeded() {
        let a = random_disks(5, 4, -0.8, 0.8, (0.05, 0.15), 0.1).unwrap();
        assert_eq!(a, random_disks(5, 4, -0.8, 0.8, (0.05, 0.15), 0.1).unwrap());
        for (i, d) in a.iter().enumerate() {
            for e in &a[i + 1..] {
                assert!(norm([d.center[0] - e.center[0], d.center[1] - e.center[1]]) - d.radius - e.radius >= 0.1);
            }
        }
        assert!(random_disks(5, 50, -0.2, 0.2, (0.1, 0.1), 0.5).is_err());
    }

    #[test]
    fn truncation_grid_is_dyadic() {
        let (f, k) = truncation_fixture(0.125).unwrap();
        assert_eq!(f.grid.h(), 0.125 / 8.0);
        assert!(k.samples().iter().all(|&s| f.values[s] == 0.0));
    }
}
