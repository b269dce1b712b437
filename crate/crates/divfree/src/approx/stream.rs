//! Stream potentials and the staggered perpendicular gradient.
//!
//! `perp_gradient` puts `d2 psi` on vertical edges and `-d1 psi` on
//! horizontal edges, so the cell divergence of its output is the mixed
//! second difference taken in two orders. Potentials are rounded to a
//! dyadic lattice first; with a power-of-two spacing every difference is
//! then exact and the divergence is identically zero.

use super::ApproxError;
use crate::grid::{ScalarField, VectorField2};
use crate::norms::max_divergence;

/// Largest `max |div u|` (relative to `1 + sup |u|`) accepted as divergence free.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-9;

/// Bits kept below the leading binary digit of `sup |psi|`.
const QUANTUM_BITS: i32 = 42;

fn quantize(psi: &ScalarField) -> Vec<f64> {
    let top = psi.sup();
    if top == 0.0 || !top.is_finite() {
        return psi.values.clone();
    }
    let q = 2f64.powi(top.log2().ceil() as i32 + 1 - QUANTUM_BITS);
    psi.values.iter().map(|v| (v / q).round() * q).collect()
}

/// `u = (d2 psi, -d1 psi)` on the staggered edges.
pub fn perp_gradient(psi: &ScalarField) -> VectorField2 {
    let g = psi.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let h = g.h();
    let v = quantize(psi);
    let mut u1 = Vec::with_capacity(nx * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx {
            u1.push((v[(j + 1) * nx + i] - v[j * nx + i]) / h);
        }
    }
    let mut u2 = Vec::with_capacity((nx - 1) * ny);
    for j in 0..ny {
        for i in 0..nx - 1 {
            u2.push(-(v[j * nx + i + 1] - v[j * nx + i]) / h);
        }
    }
    VectorField2 { grid: g, u1, u2 }
}

/// `Psi*` with `Psi*(origin) = 0`: along the bottom row, then up each column.
pub fn raw_potential(u: &VectorField2) -> Result<ScalarField, ApproxError> {
    let max_div = max_divergence(u);
    if max_div > DIVERGENCE_TOLERANCE * (1.0 + u.sup()) {
        return Err(ApproxError::NonzeroDivergence { max_div });
    }
    let g = u.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let h = g.h();
    let mut values = vec![0.0; g.n_nodes()];
    for i in 1..nx {
        values[i] = values[i - 1] - u.u2_at(i - 1, 0) * h;
    }
    for j in 1..ny {
        for i in 0..nx {
            values[j * nx + i] = values[(j - 1) * nx + i] + u.u1_at(i, j - 1) * h;
        }
    }
    Ok(ScalarField { grid: g, values })
}

/// Stream potential normalized to vanish at the grid corner farthest from
/// the support of `u`.
pub fn stream_potential(u: &VectorField2) -> Result<ScalarField, ApproxError> {
    let mut psi = raw_potential(u)?;
    let g = u.grid;
    let support: Vec<usize> = u.edges().filter(|e| e.2 != 0.0).flat_map(|(a, b, _)| [a, b]).collect();
    if support.is_empty() {
        return Ok(psi);
    }
    let corners = [g.index(0, 0), g.index(g.dims[0], 0), g.index(0, g.dims[1]), g.index(g.dims[0], g.dims[1])];
    let far = corners
        .iter()
        .copied()
        .map(|c| {
            let pc = g.point(c);
            let d = support.iter().map(|&s| crate::geometry::shapes::dist(pc, g.point(s))).fold(f64::INFINITY, f64::min);
            (c, d)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
        .unwrap_or(0);
    let c0 = psi.values[far];
    for v in &mut psi.values {
        *v -= c0;
    }
    Ok(psi)
}

/// Smallest node distance to `K` over the endpoints of edges where `u != 0`;
/// `inf` for the zero field. `dist` is a distance field on `u`'s grid.
pub fn support_gap(u: &VectorField2, dist: &ScalarField) -> f64 {
    u.edges()
        .filter(|e| e.2 != 0.0)
        .map(|(a, b, _)| dist.values[a].min(dist.values[b]))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
fn column_first_potential(u: &VectorField2) -> ScalarField {
    let g = u.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let h = g.h();
    let mut values = vec![0.0; g.n_nodes()];
    for j in 1..ny {
        values[j * nx] = values[(j - 1) * nx] + u.u1_at(0, j - 1) * h;
    }
    for j in 0..ny {
        for i in 1..nx {
            values[j * nx + i] = values[j * nx + i - 1] - u.u2_at(i - 1, j) * h;
        }
    }
    ScalarField { grid: g, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::norms::max_divergence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::square(-1.0, 2.0, 64).unwrap()
    }

    #[test]
    fn constant_and_linear_potentials() {
        let g = grid();
        assert_eq!(perp_gradient(&ScalarField::constant(g, 3.0)).sup(), 0.0);
        let u = perp_gradient(&ScalarField::from_fn(g, |p| p[0]));
        assert!(u.u1.iter().all(|&v| v == 0.0));
        assert!(u.u2.iter().all(|&v| (v + 1.0).abs() < 1e-10));
    }

    #[test]
    fn random_potentials_are_exactly_divergence_free() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let psi = ScalarField::new(g, (0..g.n_nodes()).map(|_| rng.random_range(-10.0..10.0)).collect()).unwrap();
            assert_eq!(max_divergence(&perp_gradient(&psi)), 0.0);
        }
    }

    #[test]
    fn round_trip_recovers_a_bump() {
        let g = grid();
        let bump = ScalarField::from_fn(g, |p| (-(p[0] * p[0] + p[1] * p[1]) * 8.0).exp());
        let u = perp_gradient(&bump);
        let psi = stream_potential(&u).unwrap();
        let shift = psi.values[0] - bump.values[0];
        let err = psi.values.iter().zip(&bump.values).map(|(a, b)| (a - b - shift).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        // The farthest corner carries the zero of the potential.
        assert!(psi.values.iter().any(|&v| v == 0.0));
        let other = column_first_potential(&u);
        let spread = psi
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        assert!(spread.1 - spread.0 < 1e-10);
    }

    #[test]
    fn zero_field_and_divergent_field() {
        let g = grid();
        assert_eq!(stream_potential(&VectorField2::zeros(g)).unwrap().sup(), 0.0);
        let u = VectorField2::from_fn(g, |p| [p[0], 0.0]);
        assert!(matches!(stream_potential(&u), Err(ApproxError::NonzeroDivergence { .. })));
    }

    #[test]
    fn support_gap_of_a_compact_bump() {
        let g = grid();
        let psi = ScalarField::from_fn(g, |p| if p[0] > 0.5 { (p[0] - 0.5).powi(3) } else { 0.0 });
        let u = perp_gradient(&psi);
        let dist = ScalarField::from_fn(g, |p| (-p[0]).max(0.0));
        let gap = support_gap(&u, &dist);
        assert_eq!(gap, 0.0);
        let far = ScalarField::from_fn(g, |p| (0.5 - p[0]).abs());
        assert!(support_gap(&u, &far) <= g.h() + 1e-12);
        assert_eq!(support_gap(&VectorField2::zeros(g), &far), f64::INFINITY);
    }
}
