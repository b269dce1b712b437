//! Besov data on the boundary circles of two disks: the measure, a
//! canonical approximating sequence, and its shrinking under compression.

use std::error::Error;

use divfree::approx::{compression_map, cover_values};
use divfree::besov::{besov_compress, canonical_sequence, max_level, sample_measure};
use divfree::fixtures::{geometric, two_disks};
use divfree::geometry::{make_compact_set, Shape};
use divfree::jets::Jet;
use divfree::Grid;

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let shapes: Vec<Shape> = two_disks().iter().map(|d| d.shape()).collect();
    let k = make_compact_set(&shapes, grid)?;
    let mu = sample_measure(&k, 1.0, 400)?;
    println!(
        "{} atoms, mass {:.4}, c r <= mu(B_r) <= C r with c = {:.3}, C = {:.3}",
        mu.len(),
        mu.total_mass,
        mu.lower,
        mu.upper
    );

    let f0: Vec<f64> = mu.points.iter().map(|p| if p[0] > 0.0 { 1.0 } else { 0.0 }).collect();
    let f = Jet::from_values(0, mu.points.clone(), f0.clone())?;
    let levels = max_level(grid.h());
    let seq = canonical_sequence(&f, 0.5, 2.0, 2.0, 1.0, levels, &mu)?;
    println!("{levels} levels, norm {:.4}", seq.norm());

    for eps in geometric(0.5, 0.5, 6) {
        let eta = compression_map(&cover_values(&f0, eps)?)?;
        let s = besov_compress(&f, &seq, &eta, &mu)?.summary();
        println!("eps {:<9} norm {:.5}  conditions hold: {} (max ratio {:.3})", eps, s.norm, s.valid, s.max_ratio);
    }
    Ok(())
}
