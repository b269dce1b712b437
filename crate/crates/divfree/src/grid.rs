//! Uniform node grids and the fields sampled on them.
//!
//! A [`Grid`] has `dims[a]` cells and `dims[a] + 1` nodes along axis `a`.
//! Scalar fields live on nodes. Vector fields are staggered: the first
//! component sits on vertical edges `(i, j + 1/2)`, the second on horizontal
//! edges `(i + 1/2, j)`, which makes the discrete divergence of a discrete
//! perpendicular gradient vanish identically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multi_index::MultiIndex;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("grid needs at least 2 cells per axis, got {0:?}")]
    TooFewCells([usize; 2]),
    #[error("field length {got} does not match grid with {expected} samples")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Uniform grid: node `(i, j)` sits at `origin + h * (i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: [f64; 2],
    pub spacing: f64,
    /// Cell counts per axis.
    pub dims: [usize; 2],
}

impl Grid {
    pub fn new(origin: [f64; 2], spacing: f64, dims: [usize; 2]) -> Result<Grid, GridError> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GridError::BadSpacing(spacing));
        }
        if dims[0] < 2 || dims[1] < 2 {
            return Err(GridError::TooFewCells(dims));
        }
        Ok(Grid { origin, spacing, dims })
    }

    /// Square grid over `[lo, lo + cells * h]^2` with `h = side / cells`.
    pub fn square(lo: f64, side: f64, cells: usize) -> Result<Grid, GridError> {
        Grid::new([lo, lo], side / cells as f64, [cells, cells])
    }

    pub fn h(&self) -> f64 {
        self.spacing
    }

    pub fn nx(&self) -> usize {
        self.dims[0] + 1
    }

    pub fn ny(&self) -> usize {
        self.dims[1] + 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx(), idx / self.nx())
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + self.spacing * i as f64,
            self.origin[1] + self.spacing * j as f64,
        ]
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.ij(idx);
        self.node(i, j)
    }

    pub fn upper(&self) -> [f64; 2] {
        self.node(self.dims[0], self.dims[1])
    }

    pub fn center(&self) -> [f64; 2] {
        let up = self.upper();
        [0.5 * (self.origin[0] + up[0]), 0.5 * (self.origin[1] + up[1])]
    }

    pub fn diameter(&self) -> f64 {
        let up = self.upper();
        (up[0] - self.origin[0]).hypot(up[1] - self.origin[1])
    }

    /// Closed bounding box test with a small tolerance.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let up = self.upper();
        let tol = 1e-12 * self.spacing;
        p[0] >= self.origin[0] - tol
            && p[1] >= self.origin[1] - tol
            && p[0] <= up[0] + tol
            && p[1] <= up[1] + tol
    }

    /// Node nearest to `p`, clamped to the grid.
    pub fn nearest_node(&self, p: [f64; 2]) -> (usize, usize) {
        let fi = ((p[0] - self.origin[0]) / self.spacing).round();
        let fj = ((p[1] - self.origin[1]) / self.spacing).round();
        let i = fi.clamp(0.0, self.dims[0] as f64) as usize;
        let j = fj.clamp(0.0, self.dims[1] as f64) as usize;
        (i, j)
    }

    /// Node index ranges covering the closed box `[lo, hi]`, clamped to the grid.
    pub fn node_range(&self, lo: [f64; 2], hi: [f64; 2]) -> Option<([usize; 2], [usize; 2])> {
        let mut a = [0usize; 2];
        let mut b = [0usize; 2];
        for ax in 0..2 {
            let first = ((lo[ax] - self.origin[ax]) / self.spacing).ceil().max(0.0);
            let last = ((hi[ax] - self.origin[ax]) / self.spacing)
                .floor()
                .min(self.dims[ax] as f64);
            if first > last {
                return None;
            }
            a[ax] = first as usize;
            b[ax] = last as usize;
        }
        Some((a, b))
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.n_nodes()).map(move |idx| self.point(idx))
    }

    /// 4-neighbors of a node inside the grid.
    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> {
        let (i, j) = self.ij(idx);
        let nx = self.nx();
        let ny = self.ny();
        let mut out = [usize::MAX; 4];
        if i > 0 {
            out[0] = idx - 1;
        }
        if i + 1 < nx {
            out[1] = idx + 1;
        }
        if j > 0 {
            out[2] = idx - nx;
        }
        if j + 1 < ny {
            out[3] = idx + nx;
        }
        out.into_iter().filter(|&k| k != usize::MAX)
    }
}

/// Node-sampled scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<ScalarField, GridError> {
        if values.len() != grid.n_nodes() {
            return Err(GridError::LengthMismatch { expected: grid.n_nodes(), got: values.len() });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid) -> ScalarField {
        ScalarField { grid, values: vec![0.0; grid.n_nodes()] }
    }

    pub fn constant(grid: Grid, c: f64) -> ScalarField {
        ScalarField { grid, values: vec![c; grid.n_nodes()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> ScalarField {
        let values = (0..grid.n_nodes()).map(|idx| f(grid.point(idx))).collect();
        ScalarField { grid, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(
        &self,
        other: &ScalarField,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<ScalarField, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(ScalarField { grid: self.grid, values })
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Central finite difference `D^j f` at node `(i, j)`, second order
    /// accurate. `None` when the stencil leaves the grid.
    pub fn derivative_at(&self, jdx: MultiIndex, i: usize, j: usize) -> Option<f64> {
        central_difference(&self.values, &self.grid, jdx, i, j)
    }

    /// `D^j f` at every node where the stencil fits; `None` elsewhere.
    pub fn derivative(&self, jdx: MultiIndex) -> Vec<Option<f64>> {
        (0..self.grid.n_nodes())
            .map(|idx| {
                let (i, j) = self.grid.ij(idx);
                self.derivative_at(jdx, i, j)
            })
            .collect()
    }
}

/// Half-width of the 1D central stencil of a given derivative order.
pub fn stencil_half_width(order: u32) -> usize {
    (order as usize).div_ceil(2)
}

fn central_weights(order: u32) -> &'static [f64] {
    match order {
        0 => &[1.0],
        1 => &[-0.5, 0.0, 0.5],
        2 => &[1.0, -2.0, 1.0],
        3 => &[-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => &[1.0, -4.0, 6.0, -4.0, 1.0],
        _ => panic!("central differences are tabulated up to order 4"),
    }
}

/// Largest per-axis derivative order with a tabulated stencil.
pub const MAX_AXIS_ORDER: u32 = 4;

pub(crate) fn central_difference(
    values: &[f64],
    grid: &Grid,
    jdx: MultiIndex,
    i: usize,
    j: usize,
) -> Option<f64> {
    if jdx.0 > MAX_AXIS_ORDER || jdx.1 > MAX_AXIS_ORDER {
        return None;
    }
    let wx = stencil_half_width(jdx.0);
    let wy = stencil_half_width(jdx.1);
    if i < wx || j < wy || i + wx > grid.dims[0] || j + wy > grid.dims[1] {
        return None;
    }
    let cx = central_weights(jdx.0);
    let cy = central_weights(jdx.1);
    let mut acc = 0.0;
    for (b, &wyv) in cy.iter().enumerate() {
        if wyv == 0.0 {
            continue;
        }
        let jj = j + b - wy;
        let row = jj * grid.nx();
        let mut inner = 0.0;
        for (a, &wxv) in cx.iter().enumerate() {
            if wxv != 0.0 {
                inner += wxv * values[row + i + a - wx];
            }
        }
        acc += wyv * inner;
    }
    Some(acc / grid.spacing.powi(jdx.order() as i32))
}

/// Staggered vector field: `u1` on vertical edges, `u2` on horizontal edges.
///
/// `u1[j * nx + i]` is the value at `(i, j + 1/2)` for `j < ny - 1`;
/// `u2[j * (nx - 1) + i]` is the value at `(i + 1/2, j)` for `i < nx - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub grid: Grid,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl VectorField2 {
    pub fn zeros(grid: Grid) -> VectorField2 {
        VectorField2 {
            grid,
            u1: vec![0.0; grid.nx() * (grid.ny() - 1)],
            u2: vec![0.0; (grid.nx() - 1) * grid.ny()],
        }
    }

    /// Samples an analytic field at the staggered locations.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> VectorField2 {
        let h = grid.spacing;
        let (nx, ny) = (grid.nx(), grid.ny());
        let mut u1 = Vec::with_capacity(nx * (ny - 1));
        for j in 0..ny - 1 {
            for i in 0..nx {
                let p = grid.node(i, j);
                u1.push(f([p[0], p[1] + 0.5 * h])[0]);
            }
        }
        let mut u2 = Vec::with_capacity((nx - 1) * ny);
        for j in 0..ny {
            for i in 0..nx - 1 {
                let p = grid.node(i, j);
                u2.push(f([p[0] + 0.5 * h, p[1]])[1]);
            }
        }
        VectorField2 { grid, u1, u2 }
    }

    pub fn u1_at(&self, i: usize, j: usize) -> f64 {
        self.u1[j * self.grid.nx() + i]
    }

    pub fn u2_at(&self, i: usize, j: usize) -> f64 {
        self.u2[j * (self.grid.nx() - 1) + i]
    }

    pub fn sup(&self) -> f64 {
        self.u1.iter().chain(&self.u2).fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &VectorField2) -> Result<VectorField2, GridError> {
        self.combine(other, |a, b| a - b)
    }

    pub fn add(&self, other: &VectorField2) -> Result<VectorField2, GridError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> VectorField2 {
        VectorField2 {
            grid: self.grid,
            u1: self.u1.iter().map(|v| v * s).collect(),
            u2: self.u2.iter().map(|v| v * s).collect(),
        }
    }

    fn combine(
        &self,
        other: &VectorField2,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<VectorField2, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(VectorField2 {
            grid: self.grid,
            u1: self.u1.iter().zip(&other.u1).map(|(&a, &b)| f(a, b)).collect(),
            u2: self.u2.iter().zip(&other.u2).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Edge midpoints with their endpoint node indices, for support queries.
    /// Yields `(node_a, node_b, value)` for every edge value.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let nx = self.grid.nx();
        let ny = self.grid.ny();
        let vertical = (0..ny - 1).flat_map(move |j| {
            (0..nx).map(move |i| (j * nx + i, (j + 1) * nx + i, self.u1[j * nx + i]))
        });
        let horizontal = (0..ny).flat_map(move |j| {
            (0..nx - 1).map(move |i| (j * nx + i, j * nx + i + 1, self.u2[j * (nx - 1) + i]))
        });
        vertical.chain(horizontal)
    }
}
