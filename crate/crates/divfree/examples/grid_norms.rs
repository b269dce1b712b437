//! Discrete norms of a smooth field: sup, C^m, Hölder and Sobolev, and the
//! exact vs stratified pair sweep behind the Hölder seminorm.

use std::error::Error;

use divfree::norms::{holder_seminorm_field, NormKind, NormSpec};
use divfree::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn Error>> {
    let f = |g: Grid| ScalarField::from_fn(g, |p| (3.0 * p[0]).sin() * (2.0 * p[1]).cos());
    for cells in [32, 64, 128] {
        let field = f(Grid::square(-1.0, 2.0, cells)?);
        let kinds = [
            NormKind::Sup,
            NormKind::Cm { m: 2 },
            NormKind::Holder { gamma: 0.5 },
            NormKind::Wmp { m: 1, p: 2.0 },
        ];
        let values: Vec<String> = kinds
            .iter()
            .map(|k| NormSpec::new(k.clone()).evaluate(&field).map(|v| format!("{v:.5}")))
            .collect::<Result<_, _>>()?;
        println!("{cells:>4} cells: sup, C^2, 1/2-Hölder, W^(1,2) = {}", values.join(", "));
    }
    // Above the exact-sweep limit the seminorm samples anchors and keeps
    // every near pair.
    let big = f(Grid::square(-1.0, 2.0, 200)?);
    let sweep = holder_seminorm_field(&big, None, 0.5, 3)?;
    println!("{} nodes: {:?} sweep over {} pairs gives {:.5}", big.values.len(), sweep.mode, sweep.pairs, sweep.value);
    Ok(())
}
