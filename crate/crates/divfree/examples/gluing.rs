//! Two approximations, each vanishing near part of `K`, glued with a smooth
//! cutoff into one that vanishes near all of it.

use std::error::Error;

use divfree::approx::{approximate_divfree, glue_approximations, glue_constant, smooth_cutoff, support_gap, PipelineConfig};
use divfree::fixtures::{disk_fixture, geometric, three_disks};
use divfree::geometry::{distance_field, make_compact_set, CompactSet, Shape};
use divfree::norms::max_divergence;
use divfree::{Grid, VectorField2};

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::square(-1.0, 2.0, 256)?;
    let disks = three_disks();
    let all = disk_fixture(grid, &disks, 2.0 * grid.h(), 0.25)?;
    let pick = |ids: &[usize]| -> Result<CompactSet, Box<dyn Error>> {
        let s: Vec<Shape> = ids.iter().map(|&i| disks[i].shape()).collect();
        Ok(make_compact_set(&s, grid)?)
    };
    let (left, right, far) = (pick(&[0, 1])?, pick(&[1, 2])?, pick(&[2])?);

    let schedule = geometric(0.25, 0.5, 3);
    let cfg = PipelineConfig {
        m: 1,
        gamma: 0.0,
        p: 3.0,
        eps: schedule.clone(),
        cutoffs: schedule,
        lattice: 16,
        seed: 2,
        keep_fields: true,
    };
    let finest = |k: &CompactSet| -> Result<VectorField2, Box<dyn Error>> {
        Ok(approximate_divfree(&all.field, k, &cfg)?.diagonal.pop().ok_or("empty diagonal")?)
    };
    let (u1, u2) = (finest(&left)?, finest(&right)?);
    let chi = smooth_cutoff(&left, 0.4)?.field;
    let glued = glue_approximations(&u1, &left, &u2, &far, &chi)?;

    let err = |v: &VectorField2| -> Result<f64, Box<dyn Error>> { Ok(v.sub(&all.field)?.sup()) };
    println!("errors: first {:.4}, second {:.4}, glued {:.4}", err(&u1)?, err(&u2)?, err(&glued)?);
    println!("C(chi) = {:.2}", glue_constant(&chi));
    println!("max |div| {:.1e}, support gap {:.4}", max_divergence(&glued), support_gap(&glued, &distance_field(&all.set)?));
    Ok(())
}
