//! Uniformly positive invariant subspaces assembled from eigenspaces, and
//! their joins through `[·,·]`-orthogonal projections.

use crate::checks::Check;
use crate::error::{KreinError, Result};
use crate::krein::{
    definiteness, DefinitenessKind, DefinitenessVerdict, KreinOperator, KreinSpace, SubspaceBasis,
};
use crate::numerics::{identity, norm2, range_basis, solve, CMatrix, Complex64};
use crate::spectral::{classify, cluster_eigenvalues, cluster_radius, SpectralPoint, SpectralType};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct DiskSubspace {
    pub basis: SubspaceBasis,
    /// Eigenvalues of `N` in the closed disk.
    pub eigenvalues: Vec<Complex64>,
    pub checks: Vec<Check>,
}

/// Largest distance, relative to `scale`, from the eigenvalue clusters of
/// `restricted` to the nearest allowed value.
pub(crate) fn spectrum_excess(
    restricted: &CMatrix,
    allowed: &[Complex64],
    radius: f64,
    scale: f64,
) -> Result<f64> {
    if restricted.nrows() == 0 {
        return Ok(0.0);
    }
    let eigs = crate::numerics::eigenvalues(restricted)?;
    let worst = cluster_eigenvalues(&eigs, radius)
        .iter()
        .map(|c| {
            let m = c.iter().sum::<Complex64>() / c.len() as f64;
            allowed
                .iter()
                .map(|&a| (a - m).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

pub(crate) fn kernels_span(points: &[&SpectralPoint], n: usize) -> SubspaceBasis {
    let cols: usize = points.iter().map(|p| p.kernel.dim()).sum();
    if cols == 0 {
        return SubspaceBasis::zero(n);
    }
    let mut m = CMatrix::zeros(n, cols);
    let mut at = 0;
    for p in points {
        let k = p.kernel.dim();
        m.columns_mut(at, k).copy_from(p.kernel.columns());
        at += k;
    }
    SubspaceBasis::span(&m, 1e-10)
}

/// Sum of the eigenspaces `ker(N - μ)` over eigenvalues `μ` in the closed disk
/// `|μ - λ| ≤ ε`, each required to be of two-sided positive type.
///
/// The returned checks cover invariance under `N` and `N⁺`, uniform
/// positivity, containment of the restricted spectrum in the disk, and the
/// link between nonemptiness and eigenvalues in the open disk.
pub fn disk_subspace(
    op: &KreinOperator,
    lambda: Complex64,
    eps: f64,
    cfg: &ToleranceConfig,
) -> Result<DiskSubspace> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(KreinError::InvalidTolerance(format!(
            "disk radius must be positive, got {eps}"
        )));
    }
    let points = classify(op, cfg)?;
    let inside: Vec<&SpectralPoint> = points
        .iter()
        .filter(|p| (p.value - lambda).norm() <= eps)
        .collect();
    let offending: Vec<Complex64> = inside
        .iter()
        .filter(|p| p.type_tag != Some(SpectralType::TwoSidedPositive))
        .map(|p| p.value)
        .collect();
    if !offending.is_empty() {
        return Err(KreinError::precondition(
            "disk contains eigenvalues not of two-sided positive type",
            offending,
        ));
    }
    let basis = kernels_span(&inside, op.dim());
    let scale = op.scale();
    let verdict = definiteness(&basis, op.space(), cfg)?;
    let eigenvalues: Vec<Complex64> = inside.iter().map(|p| p.value).collect();
    let open_hit = points.iter().any(|p| (p.value - lambda).norm() < eps);
    let nonempty = !basis.is_zero();
    let checks = vec![
        Check::bound(
            "disk.invariant_n",
            "N L ⊂ L",
            basis.invariance_residual(op.matrix()) / scale,
            1e-9,
        ),
        Check::bound(
            "disk.invariant_adjoint",
            "N⁺ L ⊂ L",
            basis.invariance_residual(op.adjoint()) / scale,
            1e-9,
        ),
        Check::flag(
            "disk.uniformly_positive",
            "L uniformly positive",
            matches!(
                verdict.kind,
                DefinitenessKind::UniformlyPositive | DefinitenessKind::Zero
            ),
        ),
        Check::bound(
            "disk.spectrum",
            "σ(N|L) ⊂ σ(N) ∩ B̄ε(λ)",
            spectrum_excess(
                &basis.restrict(op.matrix()),
                &eigenvalues,
                cluster_radius(op, cfg),
                scale,
            )?,
            1e-8,
        ),
        Check::flag(
            "disk.nonempty",
            "L ≠ {0} ⟺ σ(N) ∩ Bε(λ) ≠ ∅",
            (!nonempty || !eigenvalues.is_empty()) && (!open_hit || nonempty),
        ),
    ];
    Ok(DiskSubspace {
        basis,
        eigenvalues,
        checks,
    })
}

/// `[·,·]`-orthogonal projection onto a uniformly positive subspace:
/// `E = L (L*GL)⁻¹ L* G`.
pub fn krein_orthogonal_projection(
    basis: &SubspaceBasis,
    space: &KreinSpace,
    cfg: &ToleranceConfig,
) -> Result<CMatrix> {
    let n = space.dim();
    if basis.is_zero() {
        return Ok(CMatrix::zeros(n, n));
    }
    let v = definiteness(basis, space, cfg)?;
    if !v.is_uniformly_positive() {
        return Err(KreinError::NotUniformlyPositive { margin: v.margin });
    }
    let l = basis.columns();
    let m = space.compress(l);
    let rhs = l.adjoint() * space.gram();
    Ok(l * solve(&m, &rhs)?)
}

#[derive(Debug, Clone)]
pub struct JoinedSubspace {
    pub basis: SubspaceBasis,
    /// `E₀ = E₁ + (I - E₁)E₂`.
    pub e0: CMatrix,
    pub idem_residual: f64,
    pub selfadj_residual: f64,
    pub commutator: f64,
    pub verdict: DefinitenessVerdict,
}

/// `L₁ + L₂` for uniformly positive subspaces whose `[·,·]`-orthogonal
/// projections commute, via `E₀ = E₁ + (I - E₁)E₂`.
pub fn join_subspaces(
    l1: &SubspaceBasis,
    l2: &SubspaceBasis,
    space: &KreinSpace,
    cfg: &ToleranceConfig,
) -> Result<JoinedSubspace> {
    let e1 = krein_orthogonal_projection(l1, space, cfg)?;
    let e2 = krein_orthogonal_projection(l2, space, cfg)?;
    let commutator = norm2(&(&e1 * &e2 - &e2 * &e1));
    let scale = (norm2(&e1) * norm2(&e2)).max(1.0);
    if commutator > 1e-8 * scale {
        return Err(KreinError::NonCommutingProjections { norm: commutator });
    }
    let n = space.dim();
    let e0 = &e1 + (identity(n) - &e1) * &e2;
    let idem_residual = norm2(&(&e0 * &e0 - &e0));
    let selfadj_residual = norm2(&(space.adjoint(&e0)? - &e0));
    let basis = SubspaceBasis::from_columns_unchecked(range_basis(&e0, 0.5));
    let verdict = definiteness(&basis, space, cfg)?;
    Ok(JoinedSubspace {
        basis,
        e0,
        idem_residual,
        selfadj_residual,
        commutator,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, from_real_diagonal};
    use std::sync::Arc;

    fn op(n: CMatrix, g: CMatrix) -> KreinOperator {
        let space = Arc::new(KreinSpace::new(g).unwrap());
        KreinOperator::new(n, space, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn disk_examples() {
        let cfg = ToleranceConfig::default();
        let n = op(
            from_real_diagonal(&[1.0, 2.0]),
            from_real_diagonal(&[1.0, -1.0]),
        );
        let d = disk_subspace(&n, c64(1.0, 0.0), 0.4, &cfg).unwrap();
        assert!(d.basis.distance(&SubspaceBasis::coordinate(2, &[0])) < 1e-14);
        assert!(d.checks.iter().all(Check::passed), "{:?}", d.checks);

        let d = disk_subspace(&n, c64(5.0, 0.0), 0.4, &cfg).unwrap();
        assert!(d.basis.is_zero());
        assert!(d.checks.iter().all(Check::passed));

        let err = disk_subspace(&n, c64(2.0, 0.0), 0.4, &cfg).unwrap_err();
        assert!(err.is_precondition());
    }

    #[test]
    fn join_examples() {
        let cfg = ToleranceConfig::default();
        let space = KreinSpace::canonical(3, 1);
        let e1 = SubspaceBasis::coordinate(4, &[0]);
        let e12 = SubspaceBasis::coordinate(4, &[0, 1]);
        let j = join_subspaces(&e12, &e1, &space, &cfg).unwrap();
        assert!(j.basis.distance(&e12) < 1e-14);
        let j = join_subspaces(&e1, &e1, &space, &cfg).unwrap();
        assert!(j.basis.distance(&e1) < 1e-14);
        let e3 = SubspaceBasis::coordinate(4, &[2]);
        let j = join_subspaces(&e1, &e3, &space, &cfg).unwrap();
        assert!(j.basis.distance(&SubspaceBasis::coordinate(4, &[0, 2])) < 1e-14);
        assert!(j.verdict.is_uniformly_positive());
        assert!(j.idem_residual < 1e-14 && j.selfadj_residual < 1e-14);
    }

    #[test]
    fn join_rejects_negative_and_non_commuting() {
        let cfg = ToleranceConfig::default();
        let space = KreinSpace::canonical(1, 1);
        let neg = SubspaceBasis::coordinate(2, &[1]);
        let pos = SubspaceBasis::coordinate(2, &[0]);
        assert!(matches!(
            join_subspaces(&pos, &neg, &space, &cfg),
            Err(KreinError::NotUniformlyPositive { .. })
        ));

        let h = KreinSpace::canonical(2, 0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diag = SubspaceBasis::from_orthonormal(CMatrix::from_column_slice(
            2,
            1,
            &[c64(s, 0.0), c64(s, 0.0)],
        ))
        .unwrap();
        assert!(matches!(
            join_subspaces(&pos, &diag, &h, &cfg),
            Err(KreinError::NonCommutingProjections { .. })
        ));
    }
}
