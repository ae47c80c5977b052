//! Complex Schur form and its reordering.
//!
//! The reordering moves selected eigenvalues to the leading block by a
//! sequence of adjacent swaps, each a 2x2 unitary rotation built from the
//! eigenvector of the trailing diagonal entry.

use nalgebra::Schur;

use super::{c64, norm2, CMatrix, Complex64};
use crate::error::{KreinError, Result};

/// `A = U T U*` with the selected eigenvalues in the leading `split` block.
#[derive(Debug, Clone)]
pub struct OrderedDecomposition {
    pub unitary: CMatrix,
    pub triangular: CMatrix,
    pub split: usize,
    pub backward_error: f64,
}

impl OrderedDecomposition {
    pub fn dim(&self) -> usize {
        self.triangular.nrows()
    }

    /// Diagonal of the triangular factor.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.triangular[(i, i)]).collect()
    }

    /// Orthonormal basis of the invariant subspace of the selected eigenvalues.
    pub fn leading_basis(&self) -> CMatrix {
        self.unitary.columns(0, self.split).into_owned()
    }

    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        (self.unitary.adjoint() * &self.unitary - CMatrix::identity(n, n)).norm()
    }
}

/// Complex Schur form `(U, T)` with `T` exactly upper triangular.
pub fn schur_form(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = super::ensure_square(a)?;
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or(KreinError::NoConvergence)?;
    let (u, mut t) = schur.unpack();
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = c64(0.0, 0.0);
        }
    }
    Ok((u, t))
}

/// Swaps the diagonal entries `k` and `k + 1` of the upper triangular `t`,
/// updating `u` so that `u t u*` is unchanged.
fn swap_adjacent(u: &mut CMatrix, t: &mut CMatrix, k: usize) {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let c = t[(k, k + 1)];
    // eigenvector of [[a, c], [0, b]] for eigenvalue b
    let (mut v1, mut v2) = (c, b - a);
    let len = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
    if len == 0.0 {
        return;
    }
    v1 /= len;
    v2 /= len;
    // G = [[v1, -conj(v2)], [v2, conj(v1)]]
    let g = [[v1, -v2.conj()], [v2, v1.conj()]];

    // rows k, k+1 <- G* rows
    for j in k..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = g[0][0].conj() * x + g[1][0].conj() * y;
        t[(k + 1, j)] = g[0][1].conj() * x + g[1][1].conj() * y;
    }
    // columns k, k+1 <- columns G
    for i in 0..=(k + 1) {
        let x = t[(i, k)];
        let y = t[(i, k + 1)];
        t[(i, k)] = x * g[0][0] + y * g[1][0];
        t[(i, k + 1)] = x * g[0][1] + y * g[1][1];
    }
    for i in 0..n {
        let x = u[(i, k)];
        let y = u[(i, k + 1)];
        u[(i, k)] = x * g[0][0] + y * g[1][0];
        u[(i, k + 1)] = x * g[0][1] + y * g[1][1];
    }
    t[(k + 1, k)] = c64(0.0, 0.0);
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Reorders the Schur form of `a` so that eigenvalues accepted by `selector`
/// occupy the leading block.
///
/// Fails with [`KreinError::SelectorAmbiguity`] when two eigenvalues closer
/// than `cluster_tol` receive different verdicts.
pub fn ordered_spectral_decomposition<F>(
    a: &CMatrix,
    selector: F,
    cluster_tol: f64,
) -> Result<OrderedDecomposition>
where
    F: Fn(Complex64) -> bool,
{
    let (mut u, mut t) = schur_form(a)?;
    let n = t.nrows();
    let selected: Vec<bool> = (0..n).map(|i| selector(t[(i, i)])).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if selected[i] != selected[j] && (t[(i, i)] - t[(j, j)]).norm() <= cluster_tol {
                return Err(KreinError::SelectorAmbiguity(t[(i, i)]));
            }
        }
    }

    let mut flags = selected;
    let mut next = 0;
    for i in 0..n {
        if !flags[i] {
            continue;
        }
        for k in (next..i).rev() {
            swap_adjacent(&mut u, &mut t, k);
            flags.swap(k, k + 1);
        }
        next += 1;
    }

    let scale = a.norm().max(f64::MIN_POSITIVE);
    let backward_error = (a - &u * &t * u.adjoint()).norm() / scale;
    Ok(OrderedDecomposition {
        unitary: u,
        triangular: t,
        split: next,
        backward_error,
    })
}

/// Spectral norm of the strictly upper part of `t`; a departure-from-normality
/// measure for triangular factors.
pub fn departure_from_normality(t: &CMatrix) -> f64 {
    let mut s = t.clone();
    for i in 0..s.nrows() {
        s[(i, i)] = c64(0.0, 0.0);
    }
    norm2(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_real_diagonal, from_rows};

    #[test]
    fn diagonal_reordering_is_a_permutation() {
        let a = from_real_diagonal(&[-1.0, 2.0, -3.0, 4.0]);
        let d = ordered_spectral_decomposition(&a, |z| z.re > 0.0, 1e-10).unwrap();
        assert_eq!(d.split, 2);
        let ev = d.eigenvalues();
        assert!(ev[0].re > 0.0 && ev[1].re > 0.0);
        assert!(ev[2].re < 0.0 && ev[3].re < 0.0);
        assert!(d.backward_error < 1e-14);
        assert!(d.unitarity_error() < 1e-14);
    }

    #[test]
    fn leading_eigenvector_of_upper_triangular() {
        let a = from_rows(&[
            vec![c64(1.0, 0.0), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(2.0, 0.0)],
        ]);
        let d = ordered_spectral_decomposition(&a, |z| (z - c64(2.0, 0.0)).norm() < 0.1, 1e-10)
            .unwrap();
        assert_eq!(d.split, 1);
        assert!((d.eigenvalues()[0] - c64(2.0, 0.0)).norm() < 1e-14);
        let v = d.leading_basis();
        // span((1,1)/sqrt 2)
        let expected = nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)])
            * c64(1.0 / 2f64.sqrt(), 0.0);
        let overlap = (v.column(0).adjoint() * &expected)[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn accept_all_gives_full_split() {
        let a = from_real_diagonal(&[1.0, 2.0, 3.0]);
        let d = ordered_spectral_decomposition(&a, |_| true, 1e-10).unwrap();
        assert_eq!(d.split, 3);
    }

    #[test]
    fn split_cluster_is_ambiguous() {
        let a = from_real_diagonal(&[1.0, 1.0 + 1e-12]);
        let err = ordered_spectral_decomposition(&a, |z| z.re > 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, KreinError::SelectorAmbiguity(_)));
    }
}
