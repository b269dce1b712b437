//! Restrict a smooth function to a jet on `K`, measure the jet's norms, and
//! extend it back with Whitney's operator.

use std::error::Error;

use divfree::fixtures::{two_disks, TrigSum};
use divfree::geometry::{make_compact_set, Shape};
use divfree::jets::{extension_c2_norm, jet_norm, maximal_lp, restrict, whitney_extend, EvalLattice};
use divfree::whitney::{whitney_decompose, WhitneyParams};
use divfree::Grid;

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let shapes: Vec<Shape> = two_disks().iter().map(|d| d.shape()).collect();
    let k = make_compact_set(&shapes, grid)?;
    let f = TrigSum::random(5, 4, 4.0);
    let field = f.field(grid);

    let jet = restrict(&field, &k, 2)?;
    println!("jet of order {} at {} points", jet.order, jet.len());
    for gamma in [0.0, 0.5, 1.0] {
        let n = jet_norm(&jet, 2, gamma, 1)?;
        println!("C^(2, {gamma}) jet norm {:.4} ({:?} pair sweep)", n.jet_norm, n.sweep);
    }
    let lattice = EvalLattice::over_grid(&grid, 32);
    let j1 = restrict(&field, &k, 1)?;
    println!("||M^(2) f||_3 on a 32^2 lattice: {:.4}", maximal_lp(&j1, 2, 3.0, &lattice)?);

    let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k))?;
    let ext = whitney_extend(&jet, &dec, 2, grid)?;
    let exact = k.samples().iter().enumerate().all(|(s, &n)| ext.values[n] == jet.values[0][s]);
    println!("E f equals f on K: {exact}");
    let norms = extension_c2_norm(&jet, &dec, 2, 2, None)?;
    println!(
        "sup |D^l E f| by order: {:.3?}, ratio to the jet norm {:.1}",
        norms.sup_by_order,
        norms.cm_norm / jet_norm(&jet, 2, 0.0, 1)?.jet_norm
    );
    Ok(())
}
