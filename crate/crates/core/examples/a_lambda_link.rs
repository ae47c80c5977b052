//! For each eigenvalue λ, the selfadjoint operator
//! `A(λ) = (N⁺ - λ̄)(N - λ)` has 0 in its positive spectrum exactly when λ is
//! of two-sided positive type.
//!
//! Run with `cargo run --example a_lambda_link`.

use krein_spectra::generators::{build_normal_with_types, GeneratorSpec};
use krein_spectra::spectral::{classify, verify_selfadjoint_link};
use krein_spectra::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let cfg = ToleranceConfig::default();
    for seed in 0..4 {
        let gen = build_normal_with_types(&GeneratorSpec::random(6, 1e3, seed)?)?;
        let op = &gen.operator;
        println!("seed {seed}");
        for p in classify(op, &cfg)? {
            let link = verify_selfadjoint_link(op, &p, &cfg)?;
            println!(
                "  {:>18}  {:<16}  0 ∈ σ₊(A(λ)): {:<5}  consistent: {:?}  ‖A⁺ - A‖ = {:.1e}",
                format!("{:.3}", p.value),
                p.type_tag.expect("classified").name(),
                link.zero_positive,
                link.consistent,
                link.selfadjoint_residual
            );
        }
    }
    Ok(())
}
