//! Generates operators with a known classification and runs every check on
//! them, first one by one and then as a seeded batch.
//!
//! Run with `cargo run --example generate_and_verify`.

use krein_spectra::checks::CheckStatus;
use krein_spectra::generators::{build_normal_with_types, derive_seed, GeneratorSpec};
use krein_spectra::harness::{run_suite, trial_checks, OperatorDocument, SuiteConfig};
use krein_spectra::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let cfg = ToleranceConfig::default();
    let spec = GeneratorSpec::random(5, 1e3, 17)?;
    let gen = build_normal_with_types(&spec)?;
    println!("conjugator condition {:.1}", gen.conjugator_condition());
    for t in &gen.ground_truth {
        println!(
            "  expect {:.3} {} (m_a {}, m_g {})",
            t.value.0, t.expected, t.alg_mult, t.geo_mult
        );
    }

    let checks = trial_checks(&gen, &cfg, derive_seed(17, 0))?;
    let count = |s| checks.iter().filter(|c| c.status == s).count();
    println!(
        "{} checks: {} pass, {} fail, {} inapplicable",
        checks.len(),
        count(CheckStatus::Pass),
        count(CheckStatus::Fail),
        count(CheckStatus::Inapplicable)
    );

    let doc = OperatorDocument::from_operator(&gen.operator);
    println!(
        "operator document: {} bytes of JSON",
        doc.to_canonical_json().len()
    );

    let report = run_suite(&SuiteConfig {
        trials: 40,
        seed: 1,
        ..Default::default()
    });
    let sum = report.summary;
    println!(
        "suite of 40 trials: {} pass, {} fail, {} inapplicable, {} warning",
        sum.pass, sum.fail, sum.inapplicable, sum.warning
    );
    Ok(())
}
