//! Truncating a function that vanishes to order 2 on a disk with the
//! mollified cutoff, and the four estimates that make `F rho_eps` small.

use std::error::Error;

use divfree::approx::hedberg_truncate;
use divfree::fixtures::{geometric, truncation_fixture};

fn main() -> Result<(), Box<dyn Error>> {
    println!("{:>8} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "eps", "|j|", "(i)", "(ii)", "(iii)", "(iv)", "product");
    for eps in geometric(0.25, 0.5, 4) {
        let (f, k) = truncation_fixture(eps)?;
        let e = hedberg_truncate(&f, &k, eps, 2, 0.5, 7)?.estimates;
        // Each column is normalized by its eps power, so it should stay put.
        for t in &e.terms {
            println!(
                "{:>8} {:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
                eps, t.order, t.ratio_f_sup, t.ratio_f_holder, t.ratio_rho_sup, t.ratio_rho_holder, e.product_bound
            );
        }
        println!("         ||F rho||_C2 = {:.4e}, cutoff constants {:.2?}", e.truncated_cm, e.cutoff_constants);
    }
    Ok(())
}
