//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on `DMatrix<Complex64>` in double precision. Rank
//! decisions are made by singular-value thresholding, Hermitian spectra by the
//! symmetric eigensolver, and invariant subspaces by a reordered complex Schur
//! form (see [`schur`]).

pub mod contour;
pub mod schur;
pub mod sylvester;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{KreinError, Result};

pub use contour::{
    adaptive_circle_nodes, circle_quadrature, contour_integral_resolvent, gauss_legendre,
    rectangle_quadrature, Circle,
};
pub use schur::{
    departure_from_normality, ordered_spectral_decomposition, schur_form, OrderedDecomposition,
};
pub(crate) use sylvester::solve_triangular;
pub use sylvester::{solve_sylvester, solve_sylvester_dense, SylvesterSolution};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real_diagonal(d: &[f64]) -> CMatrix {
    let v: Vec<Complex64> = d.iter().map(|&x| c64(x, 0.0)).collect();
    CMatrix::from_diagonal(&CVector::from_vec(v))
}

pub fn from_diagonal(d: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(d))
}

/// Builds a matrix from row-major rows of complex entries.
pub fn from_rows(rows: &[Vec<Complex64>]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(KreinError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Singular values in descending order; NaN when the SVD does not converge.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    match to_faer(a).singular_values() {
        Ok(mut sv) => {
            sv.sort_by(|x, y| y.total_cmp(x));
            sv
        }
        Err(_) => vec![f64::NAN; a.nrows().min(a.ncols())],
    }
}

/// Spectral norm; zero for empty matrices.
pub fn norm2(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn min_singular_value(a: &CMatrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(f64::INFINITY)
}

fn to_faer(a: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full singular value decomposition `a = U diag(σ) V*`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x rows` unitary.
    pub u: CMatrix,
    /// Descending; `min(rows, cols)` entries.
    pub sigma: Vec<f64>,
    /// `cols x cols` unitary.
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Result<Svd> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: identity(rows),
            sigma: Vec::new(),
            v: identity(cols),
        });
    }
    let f = to_faer(a).svd().map_err(|_| KreinError::NoConvergence)?;
    let s = f.S().column_vector();
    Ok(Svd {
        u: from_faer(f.U()),
        sigma: (0..rows.min(cols)).map(|k| s[k].re).collect(),
        v: from_faer(f.V()),
    })
}

/// Ascending eigenvalues of the Hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let h = (a + a.adjoint()) * c64(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn gather_columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])])
}

/// Orthonormal basis of the right null space: right singular vectors whose
/// singular value is at most `tol`, together with those beyond the row count.
pub fn null_space(a: &CMatrix, tol: f64) -> CMatrix {
    let cols = a.ncols();
    let Ok(f) = svd(a) else {
        return CMatrix::zeros(cols, 0);
    };
    let idx: Vec<usize> = (0..cols)
        .filter(|&k| f.sigma.get(k).is_none_or(|&s| s <= tol))
        .collect();
    gather_columns(&f.v, &idx)
}

/// Orthonormal basis of the column space using singular values above `tol`.
pub fn range_basis(a: &CMatrix, tol: f64) -> CMatrix {
    let Ok(f) = svd(a) else {
        return CMatrix::zeros(a.nrows(), 0);
    };
    let idx: Vec<usize> = (0..f.sigma.len()).filter(|&k| f.sigma[k] > tol).collect();
    gather_columns(&f.u, &idx)
}

/// Orthonormalizes the columns of `a`, dropping directions whose singular
/// value relative to the largest falls below `rel_tol`.
pub fn orthonormalize(a: &CMatrix, rel_tol: f64) -> CMatrix {
    let Ok(f) = svd(a) else {
        return CMatrix::zeros(a.nrows(), 0);
    };
    let smax = f.sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let idx: Vec<usize> = (0..f.sigma.len())
        .filter(|&k| f.sigma[k] > rel_tol * smax)
        .collect();
    gather_columns(&f.u, &idx)
}

/// Orthogonal complement of the span of the orthonormal columns of `a`.
pub fn complement(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    if a.ncols() == 0 {
        return identity(n);
    }
    null_space(&a.adjoint(), 0.5)
}

/// Sine of the largest principal angle by which span(`a`) leaves span(`b`).
///
/// Both arguments must have orthonormal columns. Zero iff span(a) ⊆ span(b).
pub fn containment_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    if b.ncols() == 0 {
        return 1.0;
    }
    let resid = a - b * (b.adjoint() * a);
    norm2(&resid).min(1.0)
}

/// Sine of the largest principal angle between two subspaces; 1 when their
/// dimensions differ.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    containment_gap(a, b).max(containment_gap(b, a))
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.clone().lu().solve(b).ok_or(KreinError::Singular)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    a.clone().try_inverse().ok_or(KreinError::Singular)
}

/// Relative residual helper: `diff / max(1, scale)`.
#[inline]
pub fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// Euclidean orthogonal projector onto the span of orthonormal columns.
pub fn orthogonal_projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

/// Matrix exponential.
pub fn expm(a: &CMatrix) -> CMatrix {
    a.clone().exp()
}

/// Eigenvalues of a square matrix from its Schur form.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur_form(a)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Spectral condition number `‖A‖‖A⁻¹‖`.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = singular_values(a);
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(f64::INFINITY);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
