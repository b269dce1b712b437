//! Whitney squares around three disks, their invariants, and the smooth
//! partition of unity built on them.

use std::error::Error;

use divfree::fixtures::three_disks;
use divfree::geometry::{make_compact_set, Shape};
use divfree::whitney::{check_decomposition, whitney_decompose, WhitneyParams};
use divfree::Grid;

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::square(-1.0, 2.0, 512)?;
    let shapes: Vec<Shape> = three_disks().iter().map(|d| d.shape()).collect();
    let k = make_compact_set(&shapes, grid)?;
    let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k))?;

    let check = check_decomposition(&dec);
    println!("{} squares ({} at the depth cap)", check.n_cubes, check.n_unresolved);
    println!("dist(Q, K) / side in [{:.3}, {:.3}]", check.min_dist_ratio, check.max_dist_ratio);
    println!("at most {} touching neighbors, invariants hold: {}", check.max_neighbors, check.passes());

    println!("max |sum phi_k - 1| off K: {:.2e}", dec.partition_sum_error(&k));
    let c = dec.partition_constants(3);
    for order in 0..=2 {
        println!("|D^l phi_k| <= C side^-|l| with C({order}) = {:.1}", c.by_order(order));
    }

    // The bumps that are nonzero at one point.
    let x = [0.3, 0.4];
    let active = dec.partition_at(x);
    let sum: f64 = active.iter().map(|(_, v)| v.value).sum();
    println!("{} bumps active at {x:?}, summing to {sum:.15}", active.len());

    let mut cubes = Vec::new();
    dec.write_csv(&mut cubes)?;
    println!("first rows of the square table:");
    for line in String::from_utf8(cubes)?.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
