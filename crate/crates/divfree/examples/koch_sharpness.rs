//! No field vanishing near a Koch curve approximates one whose potential
//! runs through `[0, 1]` along it: each candidate's potential is constant
//! on the curve, so it misses by at least 1/2.

use std::error::Error;

use divfree::approx::{koch_target, sharpness_certificate, truncation_candidates};
use divfree::fixtures::koch_grid;
use divfree::geometry::koch_curve;

fn main() -> Result<(), Box<dyn Error>> {
    let curve = koch_curve(0.35, 5)?;
    let gamma = 1.0 / curve.theta - 1.0;
    println!("a = 0.35: theta {:.4}, gamma {:.4}, {} segments", curve.theta, gamma, curve.n_segments());

    let target = koch_target(&curve, koch_grid(256)?, gamma, 3)?;
    println!("C^(1, gamma) norm of the parameter jet: {:.3}", target.holder_constant);
    let candidates = truncation_candidates(&target, &[0.25, 0.125, 0.0625])?;
    let cert = sharpness_certificate(&target, &candidates)?;
    for c in &cert.candidates {
        println!(
            "{:<18} constant on curve: {:<5} potential gap {:.4}  sup error {:.3} >= {:.3}",
            c.name, c.constant_on_curve, c.potential_gap, c.actual_error, c.c0_lower_bound
        );
    }
    println!("certified with gap 0.4: {}", cert.certifies(0.4));
    Ok(())
}
