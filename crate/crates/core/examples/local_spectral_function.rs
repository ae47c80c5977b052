//! Builds a local spectral function on a carrier of two-sided positive type
//! and checks its axioms and maximality.
//!
//! Run with `cargo run --example local_spectral_function`.

use krein_spectra::generators::{build_normal_with_types, GeneratorSpec};
use krein_spectra::numerics::identity;
use krein_spectra::projections::{
    local_spectral_function, verify_lsf_axioms, verify_maximality, BorelSetDescriptor,
};
use krein_spectra::spectral::{classify, SpectralType};
use krein_spectra::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let cfg = ToleranceConfig::default();
    let (gen, tsp) = (0..)
        .find_map(|seed| {
            let gen = build_normal_with_types(&GeneratorSpec::random(8, 1e3, seed).ok()?).ok()?;
            let tsp: Vec<_> = classify(&gen.operator, &cfg)
                .ok()?
                .into_iter()
                .filter(|p| p.type_tag == Some(SpectralType::TwoSidedPositive))
                .collect();
            (tsp.len() >= 2).then_some((gen, tsp))
        })
        .expect("some seed has two positive points");
    let op = &gen.operator;
    let radius = 0.4 * gen.separation();

    let disks: Vec<_> = tsp
        .iter()
        .map(|p| BorelSetDescriptor::disk(p.value, radius))
        .collect::<Result<_>>()?;
    let carrier = BorelSetDescriptor::from_pieces(disks.clone());
    let e = local_spectral_function(op, &carrier, &cfg)?;
    for z in e.carrier_eigenvalues() {
        println!("carrier eigenvalue {z:.3}");
    }

    let whole = e.evaluate(&BorelSetDescriptor::Plane)?;
    println!(
        "E(C) has rank {} and Gram margin {:.3e}",
        whole.rank(),
        whole.gram_margin.margin
    );

    let mut deltas = disks.clone();
    deltas.push(disks[0].clone().union(disks[1].clone()));
    deltas.push(BorelSetDescriptor::rect(-10.0, -10.0, 0.0, 10.0)?);
    deltas.push(BorelSetDescriptor::Empty);
    let n = op.matrix();
    let commutants = [identity(op.dim()), n.clone(), op.adjoint().clone()];
    let report = verify_lsf_axioms(&e, &deltas, &commutants)?;
    let mut checks = report.checks;
    checks.push(verify_maximality(&e, &disks[0], 20, 7)?);
    for c in &checks {
        println!(
            "  {:<18} {:?}  {:.2e}  {}",
            c.name, c.status, c.residual, c.clause
        );
    }
    println!("{} distinct projections evaluated", report.evaluations);
    Ok(())
}
