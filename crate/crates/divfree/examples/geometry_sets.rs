//! Rasterized compact sets: disks and a Koch curve on one grid, their
//! components, distance field, a neighborhood and the curve's Hölder band.
//!
//! Writes `koch_mask.pgm` into the current directory.

use std::error::Error;

use divfree::cli::io::pgm_bytes;
use divfree::geometry::{distance_field, koch_curve, make_compact_set, neighborhood, Shape};
use divfree::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let curve = koch_curve(0.3, 4)?.transformed([-0.5, 0.3], 1.0, 0.0);
    let shapes = [Shape::disk([-0.5, -0.4], 0.2), Shape::disk([0.4, -0.4], 0.15), curve.shape()];
    let k = make_compact_set(&shapes, grid)?;
    println!("{} nodes in K, {} components, diameter {:.3}", k.n_samples(), k.n_components, k.diam);

    let dist = distance_field(&k)?;
    let probe = grid.index(128, 230);
    println!("distance at {:?}: grid {:.4}, analytic {:.4}", grid.point(probe), dist.values[probe], k.analytic_distance(grid.point(probe)).unwrap_or(f64::NAN));

    let near = neighborhood(&k, 0.1)?;
    println!("K_0.1 has {} nodes", near.n_samples());

    let band = curve.holder_band(10_000, 1);
    println!(
        "koch a = 0.3: turn angle {:.4} rad, theta {:.4}, |g(s) - g(t)| / |s - t|^theta in [{:.3}, {:.3}]",
        curve.turn_angle, curve.theta, band.min_ratio, band.max_ratio
    );

    let mask = ScalarField { grid, values: k.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect() };
    std::fs::write("koch_mask.pgm", pgm_bytes(&mask))?;
    Ok(())
}
