//! Sylvester equations `S X - X T = Z`.
//!
//! [`solve_sylvester`] triangularizes both coefficients and back-substitutes
//! column by column. [`solve_sylvester_dense`] solves the Kronecker-vectorized
//! system directly and is kept as an independent check for small sizes.

use super::{c64, ensure_square, norm2, schur_form, CMatrix, Complex64};
use crate::error::{KreinError, Result};

#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub x: CMatrix,
    /// `min |s - t|` over eigenvalue pairs of the two coefficients.
    pub min_gap: f64,
    /// `‖S X - X T - Z‖_F`.
    pub residual: f64,
}

impl SylvesterSolution {
    /// Residual bound `1e-8 (‖S‖ + ‖T‖) ‖X‖ + 1e-8 ‖Z‖` in spectral norms.
    pub fn within_bound(&self, s: &CMatrix, t: &CMatrix, z: &CMatrix) -> bool {
        self.residual <= 1e-8 * (norm2(s) + norm2(t)) * norm2(&self.x) + 1e-8 * norm2(z) + 1e-300
    }
}

fn check_shapes(s: &CMatrix, t: &CMatrix, z: &CMatrix) -> Result<()> {
    let m = ensure_square(s)?;
    let n = ensure_square(t)?;
    if z.nrows() != m {
        return Err(KreinError::DimensionMismatch {
            expected: m,
            found: z.nrows(),
        });
    }
    if z.ncols() != n {
        return Err(KreinError::DimensionMismatch {
            expected: n,
            found: z.ncols(),
        });
    }
    Ok(())
}

fn overlap_threshold(s: &CMatrix, t: &CMatrix) -> f64 {
    64.0 * f64::EPSILON * (s.norm() + t.norm()).max(1.0)
}

/// Solves `R_s Y - Y R_t = F` for upper triangular `R_s`, `R_t`.
pub(crate) fn solve_triangular(rs: &CMatrix, rt: &CMatrix, f: &CMatrix) -> CMatrix {
    let m = rs.nrows();
    let n = rt.nrows();
    let mut y = CMatrix::zeros(m, n);
    let mut rhs = vec![c64(0.0, 0.0); m];
    for j in 0..n {
        for i in 0..m {
            let mut acc = f[(i, j)];
            for k in 0..j {
                acc += y[(i, k)] * rt[(k, j)];
            }
            rhs[i] = acc;
        }
        let shift = rt[(j, j)];
        // back substitution with (R_s - shift I)
        for i in (0..m).rev() {
            let mut acc = rhs[i];
            for k in (i + 1)..m {
                acc -= rs[(i, k)] * y[(k, j)];
            }
            y[(i, j)] = acc / (rs[(i, i)] - shift);
        }
    }
    y
}

fn min_gap(es: &[Complex64], et: &[Complex64]) -> (f64, Option<(Complex64, Complex64)>) {
    let mut best = (f64::INFINITY, None);
    for &a in es {
        for &b in et {
            let d = (a - b).norm();
            if d < best.0 {
                best = (d, Some((a, b)));
            }
        }
    }
    best
}

/// Bartels–Stewart solution of `S X - X T = Z`.
///
/// Rejects coefficients whose spectra overlap, reporting the closest pair.
pub fn solve_sylvester(s: &CMatrix, t: &CMatrix, z: &CMatrix) -> Result<SylvesterSolution> {
    check_shapes(s, t, z)?;
    let (m, n) = (s.nrows(), t.nrows());
    if m == 0 || n == 0 {
        return Ok(SylvesterSolution {
            x: CMatrix::zeros(m, n),
            min_gap: f64::INFINITY,
            residual: 0.0,
        });
    }
    let (us, rs) = schur_form(s)?;
    let (ut, rt) = schur_form(t)?;
    let es: Vec<Complex64> = (0..m).map(|i| rs[(i, i)]).collect();
    let et: Vec<Complex64> = (0..n).map(|i| rt[(i, i)]).collect();
    let (gap, pair) = min_gap(&es, &et);
    if gap <= overlap_threshold(s, t) {
        let (a, b) = pair.expect("nonempty spectra");
        return Err(KreinError::SpectralOverlap { s: a, t: b, gap });
    }
    let f = us.adjoint() * z * &ut;
    let y = solve_triangular(&rs, &rt, &f);
    let x = &us * y * ut.adjoint();
    let residual = (s * &x - &x * t - z).norm();
    Ok(SylvesterSolution {
        x,
        min_gap: gap,
        residual,
    })
}

/// Solves `S X - X T = Z` through `(I ⊗ S - Tᵀ ⊗ I) vec X = vec Z`.
///
/// Cost is `O((mn)³)`; intended for dimensions up to about 8.
pub fn solve_sylvester_dense(s: &CMatrix, t: &CMatrix, z: &CMatrix) -> Result<CMatrix> {
    check_shapes(s, t, z)?;
    let (m, n) = (s.nrows(), t.nrows());
    let mn = m * n;
    if mn == 0 {
        return Ok(CMatrix::zeros(m, n));
    }
    // column-major vec: index (i, j) -> i + j m
    let mut k = CMatrix::zeros(mn, mn);
    for j in 0..n {
        for i in 0..m {
            let row = i + j * m;
            for l in 0..m {
                k[(row, l + j * m)] += s[(i, l)];
            }
            for l in 0..n {
                k[(row, i + l * m)] -= t[(l, j)];
            }
        }
    }
    let rhs = CMatrix::from_column_slice(mn, 1, z.as_slice());
    let sol = k.lu().solve(&rhs).ok_or(KreinError::Singular)?;
    Ok(CMatrix::from_column_slice(m, n, sol.as_slice()))
}
