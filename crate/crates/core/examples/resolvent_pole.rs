//! Resolvent growth near a two-sided positive eigenvalue against a neutral
//! Jordan block, where the pole has order two.
//!
//! Run with `cargo run --example resolvent_pole`.

use std::sync::Arc;

use krein_spectra::numerics::from_rows;
use krein_spectra::projections::resolvent_probe;
use krein_spectra::{c64, KreinOperator, KreinSpace, Result, ToleranceConfig};

fn main() -> Result<()> {
    let cfg = ToleranceConfig::default();
    let z = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    // Gram diag(1, 0 1 / 1 0): a positive line plus a swap block.
    let gram = from_rows(&[vec![one, z, z], vec![z, z, one], vec![z, one, z]]);
    let matrix = from_rows(&[
        vec![c64(-1.0, 0.0), z, z],
        vec![z, c64(2.0, 0.0), one],
        vec![z, z, c64(2.0, 0.0)],
    ]);
    let op = KreinOperator::new(matrix, Arc::new(KreinSpace::new(gram)?), &cfg)?;

    let radii = [0.5, 0.1, 0.01, 0.001];
    for lambda in [c64(-1.0, 0.0), c64(2.0, 0.0)] {
        let probe = resolvent_probe(&op, lambda, &radii, 16, &cfg)?;
        println!("λ = {lambda} ({})", probe.tag);
        for s in &probe.per_radius {
            println!(
                "  r = {:<6} sup r·‖(N - λ)⁻¹‖ = {:.4e}",
                s.radius, s.c_estimate
            );
        }
        println!(
            "  growth {:.3e}, pole order {}",
            probe.growth(),
            probe.pole_order.map_or("?".to_string(), |k| k.to_string())
        );
    }
    Ok(())
}
