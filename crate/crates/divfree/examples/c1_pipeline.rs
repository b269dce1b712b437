//! The full approximation on two disks: `u` vanishes near `K` with a stream
//! potential equal to 0 on one disk and 1 on the other. Prints the
//! `(eps, cutoff)` table and the diagonal.

use std::error::Error;

use divfree::approx::{approximate_divfree, PipelineConfig};
use divfree::fixtures::{disk_fixture, geometric, two_disks};
use divfree::Grid;

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let fx = disk_fixture(grid, &two_disks(), 2.0 * grid.h(), 0.25)?;
    let schedule = geometric(0.25, 0.5, 3);
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
    let r = &out.report;
    println!("{} Whitney squares, partition constants C(1) = {:.1}, C(2) = {:.1}", r.whitney_cubes, r.partition.order1, r.partition.order2);
    for d in &r.eps {
        println!(
            "eps {:<7} {} intervals, covers {:.4} apart, delta(eps) = {:.4}",
            d.eps, d.intervals, d.cover_gap, d.delta.jet_norm
        );
    }
    println!("{:>8} {:>3} {:>12} {:>12} {:>9} {:>8}", "eps", "k", "err_C1", "err_W1p", "max_div", "gap");
    for e in &r.entries {
        println!(
            "{:>8} {:>3} {:>12.4e} {:>12.4e} {:>9.1e} {:>8.4}",
            e.eps, e.k, e.err_c1, e.err_wmp, e.max_div, e.support_gap
        );
    }
    let diag: Vec<String> = r.diagonal().iter().map(|e| format!("{:.4e}", e.err_c1)).collect();
    println!("diagonal err_C1: {}", diag.join(", "));
    Ok(())
}
