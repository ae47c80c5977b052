//! Solves `SX - XT = Z` by Bartels–Stewart and compares with the dense
//! vectorized solve.
//!
//! Run with `cargo run --example sylvester`.

use krein_spectra::generators::random_sylvester_instance;
use krein_spectra::numerics::{norm2, solve_sylvester, solve_sylvester_dense};
use krein_spectra::Result;

fn main() -> Result<()> {
    for (m, n) in [(1, 1), (3, 2), (5, 5), (8, 6), (40, 30)] {
        let (s, t, z) = random_sylvester_instance(m, n, 99);
        let sol = solve_sylvester(&s, &t, &z)?;
        let dense = if m.max(n) <= 8 {
            let x = solve_sylvester_dense(&s, &t, &z)?;
            format!("{:.2e}", norm2(&(&sol.x - x)) / norm2(&sol.x))
        } else {
            "-".to_string()
        };
        println!(
            "{m:>2} x {n:<2}  residual {:.2e}  within bound {}  gap {:.3}  vs dense {dense}",
            sol.residual,
            sol.within_bound(&s, &t, &z),
            sol.min_gap
        );
    }
    Ok(())
}
