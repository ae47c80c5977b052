//! Resolvent growth near a spectral point, and fundamental decompositions of
//! operators whose spectrum is definite.

use rayon::prelude::*;
use serde::Serialize;

use super::subspaces::kernels_span;
use crate::checks::Check;
use crate::error::{KreinError, Result};
use crate::krein::{definiteness, DefinitenessKind, KreinOperator, SubspaceBasis};
use crate::numerics::{
    contour_integral_resolvent, eigenvalues, identity, min_singular_value, norm2, Circle, Complex64,
};
use crate::spectral::{
    classify, cluster_radius, distance_to_spectrum, SpectralPoint, SpectralType,
};
use crate::tolerance::ToleranceConfig;

/// Angular offset of the first sample on each circle.
const SAMPLE_PHASE: f64 = 0.37;

#[derive(Debug, Clone, Serialize)]
pub struct RadiusSample {
    pub radius: f64,
    /// Largest `‖(N - λ)⁻¹‖ dist(λ, σ(N))` over the samples kept.
    pub c_estimate: f64,
    pub kept: usize,
}

#[derive(Debug, Clone)]
pub struct ResolventProbe {
    pub point: Complex64,
    pub tag: SpectralType,
    pub c_estimate: f64,
    pub per_radius: Vec<RadiusSample>,
    /// Smallest `k ≥ 1` whose moment vanishes; `None` when the point is not
    /// isolated or no moment up to `m_a + 1` vanished.
    pub pole_order: Option<u32>,
    /// `‖(1/2πi) ∮ (z - λ₀)^k (z - N)⁻¹ dz‖₂` for `k = 0, 1, …`.
    pub moment_norms: Vec<f64>,
    /// Samples dropped for lying within the clustering radius of the spectrum.
    pub discarded: usize,
}

impl ResolventProbe {
    /// Ratio of the estimate at the smallest radius to the one at the largest.
    pub fn growth(&self) -> f64 {
        match (self.per_radius.first(), self.per_radius.last()) {
            (Some(a), Some(b)) if a.c_estimate > 0.0 => b.c_estimate / a.c_estimate,
            _ => f64::NAN,
        }
    }
}

fn locate<'a>(points: &'a [SpectralPoint], z: Complex64, radius: f64) -> Option<&'a SpectralPoint> {
    points
        .iter()
        .filter(|p| {
            p.members.iter().any(|&m| (m - z).norm() <= radius) || (p.value - z).norm() <= radius
        })
        .min_by(|a, b| (a.value - z).norm().total_cmp(&(b.value - z).norm()))
}

/// Samples `‖(N - λ)⁻¹‖ dist(λ, σ(N))` on circles of the given decreasing
/// radii around the eigenvalue `λ₀`, and determines the pole order of the
/// resolvent at `λ₀` from contour moments.
///
/// The moments are taken on the circle of half the distance from `λ₀` to the
/// rest of the spectrum; the `k`-th moment counts as zero below
/// `1e-8 max(1, m₀) ρ^k max(1, 1/ρ)`.
pub fn resolvent_probe(
    op: &KreinOperator,
    lambda0: Complex64,
    radii: &[f64],
    samples_per_radius: usize,
    cfg: &ToleranceConfig,
) -> Result<ResolventProbe> {
    cfg.validate()?;
    if radii.is_empty() || samples_per_radius == 0 {
        return Err(KreinError::InvalidSpec(
            "at least one radius and one sample are required".into(),
        ));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(KreinError::InvalidSpec(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    let points = classify(op, cfg)?;
    let guard = cluster_radius(op, cfg);
    let pt = locate(&points, lambda0, guard.max(1e-12 * op.scale()))
        .ok_or(KreinError::NotAnEigenvalue(lambda0))?;
    let center = pt.value;
    let n = op.matrix();
    let dim = op.dim();

    let per_radius: Vec<(RadiusSample, usize)> = radii
        .par_iter()
        .map(|&r| {
            let mut best: f64 = 0.0;
            let mut kept = 0;
            let mut dropped = 0;
            for j in 0..samples_per_radius {
                let theta =
                    SAMPLE_PHASE + std::f64::consts::TAU * j as f64 / samples_per_radius as f64;
                let z = center + Complex64::from_polar(r, theta);
                let d = distance_to_spectrum(&points, z);
                if d <= guard {
                    dropped += 1;
                    continue;
                }
                let sigma = min_singular_value(&(n - identity(dim) * z));
                best = best.max(d / sigma);
                kept += 1;
            }
            (
                RadiusSample {
                    radius: r,
                    c_estimate: best,
                    kept,
                },
                dropped,
            )
        })
        .collect();
    let discarded = per_radius.iter().map(|(_, d)| d).sum();
    let per_radius: Vec<RadiusSample> = per_radius.into_iter().map(|(s, _)| s).collect();
    let c_estimate = per_radius.iter().map(|s| s.c_estimate).fold(0.0, f64::max);

    let others = points
        .iter()
        .filter(|p| p.value != center)
        .flat_map(|p| p.members.iter())
        .map(|&m| (m - center).norm())
        .fold(f64::INFINITY, f64::min);
    let spread = pt
        .members
        .iter()
        .map(|&m| (m - center).norm())
        .fold(0.0, f64::max);
    let rho = if others.is_finite() {
        0.5 * others
    } else {
        0.5 * op.scale()
    };
    let mut moment_norms = Vec::new();
    let mut pole_order = None;
    if rho > 2.0 * spread.max(guard) {
        let circle = Circle::new(center, rho);
        for k in 0..=(pt.alg_mult as u32 + 1) {
            let m = norm2(&contour_integral_resolvent(
                n,
                circle,
                k,
                cfg.contour_nodes,
                guard,
            )?);
            moment_norms.push(m);
            if k == 0 {
                continue;
            }
            let tol = 1e-8 * moment_norms[0].max(1.0) * rho.powi(k as i32) * (1.0 / rho).max(1.0);
            if m <= tol {
                pole_order = Some(k);
                break;
            }
        }
    }
    Ok(ResolventProbe {
        point: center,
        tag: pt.type_tag.expect("classified"),
        c_estimate,
        per_radius,
        pole_order,
        moment_norms,
        discarded,
    })
}

#[derive(Debug, Clone)]
pub struct FundamentalDecomposition {
    /// Sum of the kernels at positive-type points.
    pub positive: SubspaceBasis,
    /// Sum of the kernels at negative-type points.
    pub negative: SubspaceBasis,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Every spectral point is of positive or negative type.
    pub stable: bool,
    pub decomposition: Option<FundamentalDecomposition>,
    pub checks: Vec<Check>,
    /// Distance between the positive-type and negative-type parts of the
    /// spectrum; `‖N‖₂` when one part is empty, 0 when not stable.
    pub classification_margin: f64,
    pub points: Vec<(Complex64, SpectralType)>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        crate::checks::all_passed(&self.checks)
    }
}

/// Checks whether the spectrum of `N` consists of points of positive and
/// negative type only and, if so, builds `H = H₊ [∔] H₋` from the kernels and
/// certifies it.
pub fn strong_stability_check(
    op: &KreinOperator,
    cfg: &ToleranceConfig,
) -> Result<StabilityReport> {
    let points = classify(op, cfg)?;
    let tagged: Vec<(Complex64, SpectralType)> = points
        .iter()
        .map(|p| (p.value, p.type_tag.expect("classified")))
        .collect();
    let stable = tagged.iter().all(|(_, t)| t.is_definite());
    if !stable {
        let offending: Vec<String> = tagged
            .iter()
            .filter(|(_, t)| !t.is_definite())
            .map(|(z, t)| format!("{z} ({t})"))
            .collect();
        return Ok(StabilityReport {
            stable,
            decomposition: None,
            checks: vec![Check::inapplicable(
                "stability.decomposition",
                "σ(N) = σ₊(N) ∪ σ₋(N)",
                format!("not definite: {}", offending.join(", ")),
            )],
            classification_margin: 0.0,
            points: tagged,
        });
    }

    let pos: Vec<&SpectralPoint> = points
        .iter()
        .filter(|p| p.type_tag.is_some_and(SpectralType::is_positive))
        .collect();
    let neg: Vec<&SpectralPoint> = points
        .iter()
        .filter(|p| p.type_tag.is_some_and(SpectralType::is_negative))
        .collect();
    let dim = op.dim();
    let scale = op.scale();
    let hp = kernels_span(&pos, dim);
    let hm = kernels_span(&neg, dim);
    let space = op.space();
    let vp = definiteness(&hp, space, cfg)?;
    let vm = definiteness(&hm, space, cfg)?;

    let cross = if hp.is_zero() || hm.is_zero() {
        0.0
    } else {
        norm2(&(hp.columns().adjoint() * space.gram() * hm.columns())) / space.gram_norm()
    };
    let joined = hp.join(&hm, 1e-10);
    let restricted_eigs = |b: &SubspaceBasis| -> Result<Vec<Complex64>> {
        if b.is_zero() {
            Ok(Vec::new())
        } else {
            eigenvalues(&b.restrict(op.matrix()))
        }
    };
    let sp = restricted_eigs(&hp)?;
    let sm = restricted_eigs(&hm)?;
    let gap = sp
        .iter()
        .flat_map(|a| sm.iter().map(move |b| (a - b).norm()))
        .fold(f64::INFINITY, f64::min);
    let margin = pos
        .iter()
        .flat_map(|a| neg.iter().map(move |b| (a.value - b.value).norm()))
        .fold(f64::INFINITY, f64::min);
    let classification_margin = if margin.is_finite() { margin } else { scale };
    let radius = cluster_radius(op, cfg);

    let checks = vec![
        Check::flag(
            "stability.positive",
            "H₊ uniformly positive",
            matches!(
                vp.kind,
                DefinitenessKind::UniformlyPositive | DefinitenessKind::Zero
            ),
        )
        .with_detail(format!("margin {:.3e}", vp.margin)),
        Check::flag(
            "stability.negative",
            "H₋ uniformly negative",
            matches!(
                vm.kind,
                DefinitenessKind::UniformlyNegative | DefinitenessKind::Zero
            ),
        )
        .with_detail(format!("margin {:.3e}", vm.margin)),
        Check::bound("stability.orthogonal", "[H₊, H₋] = 0", cross, 1e-8),
        Check::flag(
            "stability.direct_sum",
            "H₊ ∔ H₋ = H",
            hp.dim() + hm.dim() == dim && joined.dim() == dim,
        ),
        Check::bound(
            "stability.invariant",
            "N H₊ ⊂ H₊, N H₋ ⊂ H₋",
            hp.invariance_residual(op.matrix())
                .max(hm.invariance_residual(op.matrix()))
                / scale,
            1e-8,
        ),
        Check::flag("stability.disjoint", "σ(N|H₊) ∩ σ(N|H₋) = ∅", gap > radius)
            .with_detail(format!("gap {gap:.3e}")),
    ];
    Ok(StabilityReport {
        stable,
        decomposition: Some(FundamentalDecomposition {
            positive: hp,
            negative: hm,
        }),
        checks,
        classification_margin,
        points: tagged,
    })
}
