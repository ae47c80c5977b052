//! Classifies the eigenvalues of three small J-normal operators.
//!
//! Run with `cargo run --example classify_types`.

use std::sync::Arc;

use krein_spectra::numerics::{from_real_diagonal, from_rows};
use krein_spectra::spectral::classify;
use krein_spectra::{c64, CMatrix, KreinOperator, KreinSpace, Result, ToleranceConfig};

fn show(title: &str, gram: CMatrix, matrix: CMatrix) -> Result<()> {
    let cfg = ToleranceConfig::default();
    let space = Arc::new(KreinSpace::new(gram)?);
    let op = KreinOperator::new(matrix, space, &cfg)?;
    println!("{title}  (signature {:?})", op.space().signature());
    for p in classify(&op, &cfg)? {
        println!(
            "  {:>18}  m_a = {}  m_g = {}  {}",
            format!("{:.3}", p.value),
            p.alg_mult,
            p.geo_mult,
            p.type_tag.expect("classified")
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    show(
        "diag(1, 2) against diag(1, -1)",
        from_real_diagonal(&[1.0, -1.0]),
        from_real_diagonal(&[1.0, 2.0]),
    )?;

    let swap = from_rows(&[
        vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        vec![c64(1.0, 0.0), c64(0.0, 0.0)],
    ]);
    show(
        "diag(1 + i, 3) against the swap Gram",
        swap.clone(),
        from_rows(&[
            vec![c64(1.0, 1.0), c64(0.0, 0.0)],
            vec![c64(0.0, 0.0), c64(3.0, 0.0)],
        ]),
    )?;

    // A Jordan block is J-normal for the swap Gram; its eigenvector is neutral.
    show(
        "Jordan block [[2, 1], [0, 2]] against the swap Gram",
        swap,
        from_rows(&[
            vec![c64(2.0, 0.0), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(2.0, 0.0)],
        ]),
    )
}
