//! Krein spaces realized by an invertible Hermitian Gram matrix `G`, with the
//! indefinite inner product `[x, y] = ⟨Gx, y⟩ = y* G x`.
//!
//! The Krein adjoint of `T` is `T⁺ = G⁻¹ T* G`; an operator is J-normal when it
//! commutes with its Krein adjoint. Norms are Euclidean throughout and `G` is
//! never rescaled: definiteness only depends on signs, which positive scaling
//! of `G` leaves alone.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::numerics::{
    self, c64, complement, ensure_square, hermitian_eigenvalues, identity, inverse, norm2,
    orthonormalize, singular_values, CMatrix, CVector, Complex64,
};
use crate::tolerance::ToleranceConfig;

const HERMITIAN_TOL: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KreinSpace {
    gram: CMatrix,
    gram_inv: CMatrix,
    signature: (usize, usize),
    gram_norm: f64,
}

impl KreinSpace {
    pub fn new(gram: CMatrix) -> Result<Self> {
        Self::with_tolerances(gram, &ToleranceConfig::default())
    }

    pub fn with_tolerances(gram: CMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        let n = ensure_square(&gram)?;
        if n == 0 {
            return Err(KreinError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let scale = gram.norm();
        let residual = (&gram - gram.adjoint()).norm();
        if residual > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(KreinError::GramNotHermitian { residual });
        }
        let sv = singular_values(&gram);
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if !(smin > cfg.rank_tol * smax) {
            return Err(KreinError::GramSingular { sigma_min: smin });
        }
        let ev = hermitian_eigenvalues(&gram);
        let p = ev.iter().filter(|&&x| x > 0.0).count();
        let gram_inv = inverse(&gram)?;
        Ok(KreinSpace {
            gram,
            gram_inv,
            signature: (p, n - p),
            gram_norm: smax,
        })
    }

    /// The fundamental symmetry `diag(I_p, -I_q)`.
    pub fn canonical(p: usize, q: usize) -> Self {
        let d: Vec<f64> = (0..p + q).map(|i| if i < p { 1.0 } else { -1.0 }).collect();
        let g = numerics::from_real_diagonal(&d);
        KreinSpace {
            gram_inv: g.clone(),
            gram: g,
            signature: (p, q),
            gram_norm: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &CMatrix {
        &self.gram_inv
    }

    /// Counts `(p, q)` of positive and negative eigenvalues of the Gram matrix.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn gram_norm(&self) -> f64 {
        self.gram_norm
    }

    pub fn is_hilbert(&self) -> bool {
        self.signature.1 == 0
    }

    /// `[x, y]`.
    pub fn inner(&self, x: &CVector, y: &CVector) -> Result<Complex64> {
        indefinite_inner(x, y, self)
    }

    /// `T⁺ = G⁻¹ T* G`.
    pub fn adjoint(&self, t: &CMatrix) -> Result<CMatrix> {
        krein_adjoint(t, self)
    }

    /// Gram matrix compressed to the span of `basis`: `B* G B`.
    pub fn compress(&self, basis: &CMatrix) -> CMatrix {
        basis.adjoint() * &self.gram * basis
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// `[x, y] = ⟨Gx, y⟩`, conjugate-linear in `y`.
pub fn indefinite_inner(x: &CVector, y: &CVector, space: &KreinSpace) -> Result<Complex64> {
    space.check_dim(x.len())?;
    space.check_dim(y.len())?;
    Ok((y.adjoint() * (space.gram() * x))[(0, 0)])
}

pub fn krein_adjoint(t: &CMatrix, space: &KreinSpace) -> Result<CMatrix> {
    let n = ensure_square(t)?;
    space.check_dim(n)?;
    Ok(space.gram_inverse() * t.adjoint() * space.gram())
}

/// Normalized commutator `‖TT⁺ - T⁺T‖_F / max(1, ‖T‖_F²)`.
pub fn normality_residual(t: &CMatrix, space: &KreinSpace) -> Result<f64> {
    let ta = krein_adjoint(t, space)?;
    let comm = t * &ta - &ta * t;
    Ok(comm.norm() / t.norm_squared().max(1.0))
}

/// Whether `T` is J-normal within `tol`, together with the residual.
pub fn is_normal(t: &CMatrix, space: &KreinSpace, tol: f64) -> Result<(bool, f64)> {
    let r = normality_residual(t, space)?;
    Ok((r <= tol, r))
}

/// A matrix bound to a Krein space and certified J-normal.
#[derive(Debug, Clone)]
pub struct KreinOperator {
    matrix: CMatrix,
    adjoint: CMatrix,
    space: Arc<KreinSpace>,
    normality_residual: f64,
    norm: f64,
}

impl KreinOperator {
    /// Certifies `matrix` as J-normal at `cfg.normality_tol`.
    pub fn new(matrix: CMatrix, space: Arc<KreinSpace>, cfg: &ToleranceConfig) -> Result<Self> {
        let op = Self::uncertified(matrix, space)?;
        if op.normality_residual > cfg.normality_tol {
            return Err(KreinError::NotNormal {
                residual: op.normality_residual,
                tolerance: cfg.normality_tol,
            });
        }
        Ok(op)
    }

    /// Binds `matrix` to `space` without the normality check; the residual is
    /// still computed and available.
    pub fn uncertified(matrix: CMatrix, space: Arc<KreinSpace>) -> Result<Self> {
        let adjoint = krein_adjoint(&matrix, &space)?;
        let comm = &matrix * &adjoint - &adjoint * &matrix;
        let normality_residual = comm.norm() / matrix.norm_squared().max(1.0);
        let norm = norm2(&matrix);
        Ok(KreinOperator {
            matrix,
            adjoint,
            space,
            normality_residual,
            norm,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `N⁺`.
    pub fn adjoint(&self) -> &CMatrix {
        &self.adjoint
    }

    pub fn space(&self) -> &Arc<KreinSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn normality_residual(&self) -> f64 {
        self.normality_residual
    }

    /// Spectral norm `‖N‖₂`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Reference magnitude for relative tolerances: `‖N‖₂`, or 1 for `N = 0`.
    pub fn scale(&self) -> f64 {
        if self.norm > 0.0 {
            self.norm
        } else {
            1.0
        }
    }

    /// `N⁺` as an operator on the same space; J-normal whenever `N` is.
    pub fn adjoint_operator(&self) -> KreinOperator {
        KreinOperator {
            matrix: self.adjoint.clone(),
            adjoint: self.matrix.clone(),
            space: Arc::clone(&self.space),
            normality_residual: self.normality_residual,
            norm: norm2(&self.adjoint),
        }
    }
}

/// Euclidean-orthonormal basis of a subspace of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    columns: CMatrix,
}

impl SubspaceBasis {
    pub fn from_orthonormal(columns: CMatrix) -> Result<Self> {
        let k = columns.ncols();
        let residual = (columns.adjoint() * &columns - identity(k)).norm();
        if residual > ORTHONORMAL_TOL {
            return Err(KreinError::NotOrthonormal { residual });
        }
        Ok(SubspaceBasis { columns })
    }

    /// Orthonormal basis of the column span of `m`, dropping directions whose
    /// singular value is below `rel_tol` times the largest.
    pub fn span(m: &CMatrix, rel_tol: f64) -> Self {
        SubspaceBasis {
            columns: orthonormalize(m, rel_tol),
        }
    }

    pub(crate) fn from_columns_unchecked(columns: CMatrix) -> Self {
        SubspaceBasis { columns }
    }

    pub fn zero(n: usize) -> Self {
        SubspaceBasis {
            columns: CMatrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        SubspaceBasis {
            columns: identity(n),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let columns = CMatrix::from_fn(n, indices.len(), |i, j| {
            if i == indices[j] {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        SubspaceBasis { columns }
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    /// Euclidean orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.columns * self.columns.adjoint()
    }

    /// Sine of the largest principal angle by which `self` leaves `other`.
    pub fn containment_gap(&self, other: &SubspaceBasis) -> f64 {
        numerics::containment_gap(&self.columns, &other.columns)
    }

    /// Sine of the largest principal angle; 1 when dimensions differ.
    pub fn distance(&self, other: &SubspaceBasis) -> f64 {
        numerics::subspace_distance(&self.columns, &other.columns)
    }

    /// Sum of subspaces.
    pub fn join(&self, other: &SubspaceBasis, rel_tol: f64) -> SubspaceBasis {
        let n = self.ambient_dim();
        let mut m = CMatrix::zeros(n, self.dim() + other.dim());
        m.columns_mut(0, self.dim()).copy_from(&self.columns);
        m.columns_mut(self.dim(), other.dim())
            .copy_from(&other.columns);
        SubspaceBasis::span(&m, rel_tol)
    }

    /// Euclidean orthogonal complement.
    pub fn complement(&self) -> SubspaceBasis {
        SubspaceBasis {
            columns: complement(&self.columns),
        }
    }

    /// `‖(I - P) A P‖₂` for the orthogonal projector `P`: zero iff invariant.
    pub fn invariance_residual(&self, a: &CMatrix) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let image = a * &self.columns;
        let outside = &image - &self.columns * (self.columns.adjoint() * &image);
        norm2(&outside)
    }

    /// Matrix of `A` restricted to the subspace (assumed invariant):
    /// `B* A B`.
    pub fn restrict(&self, a: &CMatrix) -> CMatrix {
        self.columns.adjoint() * a * &self.columns
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefinitenessKind {
    UniformlyPositive,
    UniformlyNegative,
    Neutral,
    Indefinite,
    Zero,
}

/// Sign character of the Gram matrix compressed to a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DefinitenessVerdict {
    pub kind: DefinitenessKind,
    /// Smallest compressed-Gram eigenvalue, or the largest one for uniformly
    /// negative subspaces. Zero for the zero subspace.
    pub margin: f64,
    /// Ascending eigenvalues of the compressed Gram matrix.
    pub gram_spectrum: Vec<f64>,
    /// Absolute tolerance used for the decision.
    pub tolerance: f64,
}

impl DefinitenessVerdict {
    fn from_spectrum(ev: Vec<f64>, tol: f64) -> Self {
        if ev.is_empty() {
            return DefinitenessVerdict {
                kind: DefinitenessKind::Zero,
                margin: 0.0,
                gram_spectrum: ev,
                tolerance: tol,
            };
        }
        let min = ev[0];
        let max = ev[ev.len() - 1];
        let (kind, margin) = if min >= tol {
            (DefinitenessKind::UniformlyPositive, min)
        } else if max <= -tol {
            (DefinitenessKind::UniformlyNegative, max)
        } else if min.abs() < tol && max.abs() < tol {
            (DefinitenessKind::Neutral, min)
        } else {
            (DefinitenessKind::Indefinite, min)
        };
        DefinitenessVerdict {
            kind,
            margin,
            gram_spectrum: ev,
            tolerance: tol,
        }
    }

    pub fn is_uniformly_positive(&self) -> bool {
        self.kind == DefinitenessKind::UniformlyPositive
    }

    pub fn is_uniformly_negative(&self) -> bool {
        self.kind == DefinitenessKind::UniformlyNegative
    }

    /// Semidefinite with eigenvalues inside the tolerance band: neither
    /// definite, neutral, nor clearly of mixed sign.
    pub fn is_borderline(&self) -> bool {
        if self.kind != DefinitenessKind::Indefinite {
            return false;
        }
        let min = self.gram_spectrum[0];
        let max = self.gram_spectrum[self.gram_spectrum.len() - 1];
        min > -self.tolerance || max < self.tolerance
    }
}

/// Definiteness of the subspace spanned by `basis` with respect to `[·,·]`.
pub fn definiteness(
    basis: &SubspaceBasis,
    space: &KreinSpace,
    cfg: &ToleranceConfig,
) -> Result<DefinitenessVerdict> {
    space.check_dim(basis.ambient_dim())?;
    let k = basis.dim();
    let residual = (basis.columns().adjoint() * basis.columns() - identity(k)).norm();
    if residual > ORTHONORMAL_TOL {
        return Err(KreinError::NotOrthonormal { residual });
    }
    let m = space.compress(basis.columns());
    let tol = cfg.definiteness_tol * space.gram_norm();
    Ok(DefinitenessVerdict::from_spectrum(
        hermitian_eigenvalues(&m),
        tol,
    ))
}

/// `L^[⊥] = {x : [x, ℓ] = 0 for all ℓ ∈ L}`, the Euclidean complement of `G L`.
pub fn orthogonal_companion(basis: &SubspaceBasis, space: &KreinSpace) -> Result<SubspaceBasis> {
    space.check_dim(basis.ambient_dim())?;
    if basis.is_zero() {
        return Ok(SubspaceBasis::full(space.dim()));
    }
    let image = orthonormalize(&(space.gram() * basis.columns()), 1e-12);
    Ok(SubspaceBasis::from_columns_unchecked(complement(&image)))
}

/// `(Re N, Im N) = ((N + N⁺)/2, (N - N⁺)/2i)`.
pub fn part_decomposition(op: &KreinOperator) -> (CMatrix, CMatrix) {
    let n = op.matrix();
    let na = op.adjoint();
    let re = (n + na) * c64(0.5, 0.0);
    let im = (n - na) * c64(0.0, -0.5);
    (re, im)
}
