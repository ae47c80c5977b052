//! Eigenstructure of J-normal operators and classification of eigenvalues by
//! the sign of the indefinite inner product on their eigenspaces.
//!
//! In finite dimension every approximate eigensequence of `N - λ` concentrates
//! on `ker(N - λ)`, so `λ` is of positive type exactly when the Gram matrix
//! compressed to that kernel is positive definite. Two-sided positivity asks
//! the same of `ker(N⁺ - λ̄)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::krein::{
    definiteness, DefinitenessKind, DefinitenessVerdict, KreinOperator, SubspaceBasis,
};
use crate::numerics::{
    hermitian_eigenvalues, identity, norm2, ordered_spectral_decomposition, schur_form, svd,
    CMatrix, Complex64,
};
use crate::tolerance::ToleranceConfig;

/// Ratio of the cluster radius below which two distinct clusters are reported
/// as ambiguous.
const AMBIGUITY_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralType {
    PositiveType,
    NegativeType,
    TwoSidedPositive,
    TwoSidedNegative,
    NeutralType,
    IndefiniteType,
}

impl SpectralType {
    /// Positive type, one- or two-sided.
    pub fn is_positive(self) -> bool {
        matches!(
            self,
            SpectralType::PositiveType | SpectralType::TwoSidedPositive
        )
    }

    pub fn is_negative(self) -> bool {
        matches!(
            self,
            SpectralType::NegativeType | SpectralType::TwoSidedNegative
        )
    }

    pub fn is_definite(self) -> bool {
        self.is_positive() || self.is_negative()
    }

    pub fn is_two_sided(self) -> bool {
        matches!(
            self,
            SpectralType::TwoSidedPositive | SpectralType::TwoSidedNegative
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            SpectralType::PositiveType => "PositiveType",
            SpectralType::NegativeType => "NegativeType",
            SpectralType::TwoSidedPositive => "TwoSidedPositive",
            SpectralType::TwoSidedNegative => "TwoSidedNegative",
            SpectralType::NeutralType => "NeutralType",
            SpectralType::IndefiniteType => "IndefiniteType",
        }
    }
}

impl std::fmt::Display for SpectralType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralWarning {
    /// Another cluster lies within a small multiple of the clustering radius.
    ClusterAmbiguity { neighbor: [f64; 2], distance: f64 },
    /// The kernel Gram matrix is semidefinite with eigenvalues inside the
    /// tolerance band; tagged neutral.
    BorderlineMargin { margin: f64 },
    /// No singular value of `N - λ` fell below the rank threshold; the
    /// smallest singular direction was used as the kernel.
    KernelForced { sigma: f64 },
}

#[derive(Debug, Clone)]
pub struct SpectralPoint {
    /// Mean of the clustered computed eigenvalues.
    pub value: Complex64,
    /// Computed eigenvalues merged into this point.
    pub members: Vec<Complex64>,
    pub alg_mult: usize,
    pub geo_mult: usize,
    /// `ker(N - λ)`.
    pub kernel: SubspaceBasis,
    /// `ker(N⁺ - λ̄)`.
    pub adjoint_kernel: SubspaceBasis,
    pub type_tag: Option<SpectralType>,
    /// Extremal eigenvalue of the Gram matrix compressed to the kernel.
    pub gram_margin: Option<f64>,
    pub kernel_verdict: Option<DefinitenessVerdict>,
    pub adjoint_verdict: Option<DefinitenessVerdict>,
    /// Radius used to merge eigenvalues into clusters.
    pub cluster_radius: f64,
    pub warnings: Vec<SpectralWarning>,
}

impl SpectralPoint {
    pub fn is_classified(&self) -> bool {
        self.type_tag.is_some()
    }

    pub(crate) fn contains(&self, z: Complex64) -> bool {
        self.members
            .iter()
            .any(|&m| (m - z).norm() <= self.cluster_radius)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Single-linkage clusters of `eigs` at radius `radius`, sorted by mean.
pub fn cluster_eigenvalues(eigs: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let n = eigs.len();
    let mut uf = UnionFind((0..n).collect());
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = uf.find(i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(eigs[i]);
    }
    groups.sort_by(|a, b| {
        let (ma, mb) = (mean(a), mean(b));
        ma.re.total_cmp(&mb.re).then(ma.im.total_cmp(&mb.im))
    });
    groups
}

fn mean(zs: &[Complex64]) -> Complex64 {
    zs.iter().sum::<Complex64>() / zs.len() as f64
}

/// Merge radius `cluster_tol · ‖N‖₂`.
pub fn cluster_radius(op: &KreinOperator, cfg: &ToleranceConfig) -> f64 {
    cfg.cluster_tol * op.scale()
}

/// Kernel basis of a square matrix: right singular vectors whose singular
/// value is at most `tol`, but at least one and at most `max_dim` of them.
fn kernel_basis(a: &CMatrix, tol: f64, max_dim: usize) -> Result<(SubspaceBasis, Option<f64>)> {
    let f = svd(a)?;
    let n = a.ncols();
    // ascending singular values, padded with zeros for wide inputs
    let sigma = |k: usize| f.sigma.get(n - 1 - k).copied().unwrap_or(0.0);
    let below = (0..n).take_while(|&k| sigma(k) <= tol).count();
    let take = below.clamp(1, max_dim.max(1));
    let forced = (below == 0).then(|| sigma(0));
    let cols = CMatrix::from_fn(n, take, |r, c| f.v[(r, n - 1 - c)]);
    Ok((SubspaceBasis::from_columns_unchecked(cols), forced))
}

/// Rank threshold for `ker(A - λ)`: `rank_tol · max(‖A - λ‖₂, ‖N‖₂)`.
fn kernel_threshold(shifted: &CMatrix, op: &KreinOperator, cfg: &ToleranceConfig) -> f64 {
    cfg.rank_tol * norm2(shifted).max(op.scale())
}

fn shifted(a: &CMatrix, z: Complex64) -> CMatrix {
    a - identity(a.nrows()) * z
}

/// Clusters the eigenvalues of `N` and computes multiplicities and kernels.
/// Type tags are left empty; see [`classify_point`] and [`classify`].
pub fn spectrum(op: &KreinOperator, cfg: &ToleranceConfig) -> Result<Vec<SpectralPoint>> {
    cfg.validate()?;
    let (_, t) = schur_form(op.matrix())?;
    let eigs: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    let radius = cluster_radius(op, cfg);
    let groups = cluster_eigenvalues(&eigs, radius);

    let mut points: Vec<SpectralPoint> = groups
        .into_iter()
        .map(|members| {
            let value = mean(&members);
            let m_a = members.len();
            let a = shifted(op.matrix(), value);
            let (kernel, forced) = kernel_basis(&a, kernel_threshold(&a, op, cfg), m_a)?;
            let b = shifted(op.adjoint(), value.conj());
            let (adjoint_kernel, _) = kernel_basis(&b, kernel_threshold(&b, op, cfg), m_a)?;
            let mut warnings = Vec::new();
            if let Some(sigma) = forced {
                warnings.push(SpectralWarning::KernelForced { sigma });
            }
            Ok(SpectralPoint {
                value,
                members,
                alg_mult: m_a,
                geo_mult: kernel.dim(),
                kernel,
                adjoint_kernel,
                type_tag: None,
                gram_margin: None,
                kernel_verdict: None,
                adjoint_verdict: None,
                cluster_radius: radius,
                warnings,
            })
        })
        .collect::<Result<_>>()?;

    let n = points.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = points[i]
                .members
                .iter()
                .flat_map(|&a| points[j].members.iter().map(move |&b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            if d <= AMBIGUITY_FACTOR * radius {
                let nb = points[j].value;
                points[i].warnings.push(SpectralWarning::ClusterAmbiguity {
                    neighbor: [nb.re, nb.im],
                    distance: d,
                });
            }
        }
    }
    Ok(points)
}

/// Fills in the type tag of `pt` from the definiteness of its kernel and
/// adjoint kernel.
pub fn classify_point(
    op: &KreinOperator,
    pt: &SpectralPoint,
    cfg: &ToleranceConfig,
) -> Result<SpectralPoint> {
    let space = op.space();
    let kv = definiteness(&pt.kernel, space, cfg)?;
    let av = definiteness(&pt.adjoint_kernel, space, cfg)?;
    let mut out = pt.clone();
    let tag = match kv.kind {
        DefinitenessKind::UniformlyPositive => {
            if av.is_uniformly_positive() {
                SpectralType::TwoSidedPositive
            } else {
                SpectralType::PositiveType
            }
        }
        DefinitenessKind::UniformlyNegative => {
            if av.is_uniformly_negative() {
                SpectralType::TwoSidedNegative
            } else {
                SpectralType::NegativeType
            }
        }
        DefinitenessKind::Neutral | DefinitenessKind::Zero => SpectralType::NeutralType,
        DefinitenessKind::Indefinite if kv.is_borderline() => {
            out.warnings
                .push(SpectralWarning::BorderlineMargin { margin: kv.margin });
            SpectralType::NeutralType
        }
        DefinitenessKind::Indefinite => SpectralType::IndefiniteType,
    };
    out.type_tag = Some(tag);
    out.gram_margin = Some(kv.margin);
    out.kernel_verdict = Some(kv);
    out.adjoint_verdict = Some(av);
    Ok(out)
}

/// [`spectrum`] followed by [`classify_point`] at every point.
pub fn classify(op: &KreinOperator, cfg: &ToleranceConfig) -> Result<Vec<SpectralPoint>> {
    spectrum(op, cfg)?
        .par_iter()
        .map(|pt| classify_point(op, pt, cfg))
        .collect()
}

/// `A(λ) = (N⁺ - λ̄)(N - λ)`, which is J-selfadjoint for every `λ`.
pub fn a_lambda(op: &KreinOperator, lambda: Complex64) -> CMatrix {
    shifted(op.adjoint(), lambda.conj()) * shifted(op.matrix(), lambda)
}

/// Outcome of comparing the type of `0` for `A(λ)` with the tag of `λ`.
#[derive(Debug, Clone)]
pub struct SelfadjointLink {
    /// `‖A - A⁺‖_F / max(1, ‖A‖_F)`.
    pub selfadjoint_residual: f64,
    pub kernel: SubspaceBasis,
    /// Definiteness of `ker A(λ)`.
    pub zero_verdict: DefinitenessVerdict,
    /// Whether `0` is of positive type for `A(λ)`.
    pub zero_positive: bool,
    pub two_sided_positive: bool,
    /// `None` when a borderline margin prevents the comparison.
    pub consistent: Option<bool>,
}

/// Checks that `0` is of positive type for `A(λ)` exactly when `λ` is of
/// two-sided positive type.
///
/// `ker A(λ)` is the set of `x` with `(N - λ)x ∈ ker(N⁺ - λ̄)`, computed as the
/// kernel of `(I - Π)(N - λ)` with `Π` the orthogonal projector onto the
/// adjoint kernel; this avoids the squared conditioning of `A(λ)` itself.
pub fn verify_selfadjoint_link(
    op: &KreinOperator,
    pt: &SpectralPoint,
    cfg: &ToleranceConfig,
) -> Result<SelfadjointLink> {
    let tag = match pt.type_tag {
        Some(t) => t,
        None => classify_point(op, pt, cfg)?.type_tag.expect("classified"),
    };
    let a = a_lambda(op, pt.value);
    let a_adj = op.space().adjoint(&a)?;
    let selfadjoint_residual = (&a - a_adj).norm() / a.norm().max(1.0);

    let n = op.dim();
    let shifted_n = shifted(op.matrix(), pt.value);
    let outside = identity(n) - pt.adjoint_kernel.projector();
    let factored = &outside * &shifted_n;
    let tol = kernel_threshold(&shifted_n, op, cfg);
    let (kernel, _) = kernel_basis(&factored, tol, n)?;
    let zero_verdict = definiteness(&kernel, op.space(), cfg)?;
    let zero_positive = zero_verdict.is_uniformly_positive();
    let two_sided_positive = tag == SpectralType::TwoSidedPositive;
    let borderline = zero_verdict.is_borderline()
        || pt
            .warnings
            .iter()
            .any(|w| matches!(w, SpectralWarning::BorderlineMargin { .. }));
    let consistent = (!borderline).then_some(zero_positive == two_sided_positive);
    Ok(SelfadjointLink {
        selfadjoint_residual,
        kernel,
        zero_verdict,
        zero_positive,
        two_sided_positive,
        consistent,
    })
}

/// Basis of the root subspace `ker((N - λ)^{m_a})`, read off an ordered Schur
/// form with the cluster of `pt` in the leading block.
pub fn root_subspace(
    op: &KreinOperator,
    pt: &SpectralPoint,
    cfg: &ToleranceConfig,
) -> Result<SubspaceBasis> {
    let radius = pt.cluster_radius.max(cluster_radius(op, cfg));
    let dec = ordered_spectral_decomposition(op.matrix(), |z| pt.contains(z), radius)?;
    if dec.split != pt.alg_mult {
        return Err(KreinError::NotAnEigenvalue(pt.value));
    }
    Ok(SubspaceBasis::from_columns_unchecked(dec.leading_basis()))
}

/// Largest principal-angle sines among the kernel, adjoint kernel and root
/// subspace of a spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAngles {
    pub kernel_adjoint: f64,
    pub kernel_root: f64,
    pub adjoint_root: f64,
}

impl KernelAngles {
    pub fn max(&self) -> f64 {
        self.kernel_adjoint
            .max(self.kernel_root)
            .max(self.adjoint_root)
    }
}

pub fn kernel_angles(
    op: &KreinOperator,
    pt: &SpectralPoint,
    cfg: &ToleranceConfig,
) -> Result<KernelAngles> {
    let root = root_subspace(op, pt, cfg)?;
    Ok(KernelAngles {
        kernel_adjoint: pt.kernel.distance(&pt.adjoint_kernel),
        kernel_root: pt.kernel.distance(&root),
        adjoint_root: pt.adjoint_kernel.distance(&root),
    })
}

/// Smallest eigenvalue of the Gram matrix compressed to the span of the right
/// singular vectors of `N - λ` with singular value at most `eps`; `+∞` when
/// there are none.
pub fn definiteness_margin(op: &KreinOperator, lambda: Complex64, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(KreinError::InvalidTolerance(format!(
            "margin radius must be positive, got {eps}"
        )));
    }
    let a = shifted(op.matrix(), lambda);
    let n = a.ncols();
    let f = svd(&a)?;
    let v = f.v;
    let idx: Vec<usize> = (0..f.sigma.len()).filter(|&i| f.sigma[i] <= eps).collect();
    if idx.is_empty() {
        return Ok(f64::INFINITY);
    }
    let basis = CMatrix::from_fn(n, idx.len(), |r, c| v[(r, idx[c])]);
    let m = op.space().compress(&basis);
    Ok(hermitian_eigenvalues(&m)[0])
}

/// Distance from `z` to the nearest point value.
pub fn distance_to_spectrum(points: &[SpectralPoint], z: Complex64) -> f64 {
    points
        .iter()
        .flat_map(|p| p.members.iter())
        .map(|&m| (m - z).norm())
        .fold(f64::INFINITY, f64::min)
}
