//! Numerical toolkit for normal operators in finite-dimensional Krein spaces.
//!
//! A Krein space is `C^n` with an indefinite inner product `[x, y] = y* G x`
//! given by an invertible Hermitian Gram matrix `G`. The crate classifies the
//! eigenvalues of J-normal operators by the sign of `[·,·]` on their
//! eigenspaces, builds Riesz projections and local spectral functions, and
//! checks the structural properties these objects are expected to have.

pub mod checks;
pub mod error;
pub mod generators;
pub mod harness;
pub mod json;
pub mod krein;
pub mod numerics;
pub mod projections;
pub mod spectral;
pub mod tolerance;

pub use error::{KreinError, Result};
pub use krein::{
    definiteness, indefinite_inner, is_normal, krein_adjoint, orthogonal_companion,
    part_decomposition, DefinitenessKind, DefinitenessVerdict, KreinOperator, KreinSpace,
    SubspaceBasis,
};
pub use numerics::{c64, CMatrix, CVector, Complex64};
pub use tolerance::ToleranceConfig;
