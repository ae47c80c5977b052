//! Riesz projection of a generated operator computed twice: by contour
//! quadrature of the resolvent and from an ordered Schur decomposition.
//!
//! Run with `cargo run --example riesz_projection`.

use krein_spectra::generators::{build_normal_with_types, GeneratorSpec};
use krein_spectra::numerics::norm2;
use krein_spectra::projections::{
    riesz_projection_contour, riesz_projection_oracle, verify_spectral_set_theorem,
    BorelSetDescriptor,
};
use krein_spectra::spectral::{classify, SpectralType};
use krein_spectra::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let cfg = ToleranceConfig::default();
    let gen = build_normal_with_types(&GeneratorSpec::random(6, 1e3, 2024)?)?;
    let op = &gen.operator;
    let points = classify(op, &cfg)?;

    for p in &points {
        let radius = 0.5 * gen.separation().min(2.0);
        let delta = BorelSetDescriptor::disk(p.value, radius)?;
        let contour = riesz_projection_contour(op, &delta, 64, &cfg)?;
        let oracle = riesz_projection_oracle(op, &delta, &cfg)?;
        println!(
            "{:.3} {:<16} rank {}  ‖Q‖ = {:9.3e}  ‖Q_contour - Q_oracle‖ = {:.2e}  nodes {}",
            p.value,
            p.type_tag.expect("classified").name(),
            oracle.rank(),
            oracle.q_norm,
            norm2(&(&contour.q - &oracle.q)),
            contour.nodes_used.unwrap_or(64),
        );
        if p.type_tag == Some(SpectralType::TwoSidedPositive) {
            for c in verify_spectral_set_theorem(op, &delta, &cfg)?.checks {
                println!("    {:<34} {:?}  {:.2e}", c.name, c.status, c.residual);
            }
        }
    }
    Ok(())
}
