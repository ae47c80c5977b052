//! Riesz projections by two independent routes.
//!
//! The contour route integrates the resolvent around the boundary of each
//! primitive and combines primitives with the projection identities
//! `Q(A ∪ B) = Qa + Qb - QaQb`, `Q(A ∩ B) = QaQb` and `Q(A \ B) = Qa - QaQb`,
//! which are exact for commuting spectral projections. The oracle route reads
//! the projection off an ordered Schur form `[T11 T12; 0 T22]` by solving
//! `T11 X - X T22 = -T12`, so that `Q = U [I -X; 0 0] U*`.

use serde::Serialize;

use super::region::{BorelSetDescriptor, Primitive};
use crate::checks::Check;
use crate::error::{KreinError, Result};
use crate::krein::{definiteness, DefinitenessVerdict, KreinOperator, KreinSpace, SubspaceBasis};
use crate::numerics::{
    adaptive_circle_nodes, c64, circle_quadrature, eigenvalues, identity, norm2,
    ordered_spectral_decomposition, range_basis, rectangle_quadrature, solve_triangular, CMatrix,
    Circle, Complex64, OrderedDecomposition,
};
use crate::spectral::{classify, cluster_radius, SpectralType};
use crate::tolerance::ToleranceConfig;

/// Node-doubling change above which a contour projection is flagged.
pub const DOUBLING_TOL: f64 = 1e-6;
/// Singular-value cut separating the range of a projection from its kernel.
const PROJECTION_RANK_CUT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionRoute {
    Contour,
    Oracle,
    PointSum,
}

#[derive(Debug, Clone)]
pub struct SpectralProjectionResult {
    pub q: CMatrix,
    pub target: BorelSetDescriptor,
    pub route: ProjectionRoute,
    /// `‖Q² - Q‖₂`.
    pub idem_residual: f64,
    /// `‖Q⁺ - Q‖₂`.
    pub selfadj_residual: f64,
    /// `‖QN - NQ‖₂`.
    pub commute_residual: f64,
    /// `‖QN⁺ - N⁺Q‖₂`.
    pub adjoint_commute_residual: f64,
    pub q_norm: f64,
    pub range: SubspaceBasis,
    pub gram_margin: DefinitenessVerdict,
    /// Quadrature nodes of the final evaluation; contour route only.
    pub nodes_used: Option<usize>,
    /// `‖Q(2n) - Q(n)‖₂` under node doubling; contour route only.
    pub doubling_change: Option<f64>,
}

impl SpectralProjectionResult {
    pub fn from_matrix(
        op: &KreinOperator,
        q: CMatrix,
        target: BorelSetDescriptor,
        route: ProjectionRoute,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        let n = op.matrix();
        let na = op.adjoint();
        let space = op.space();
        let idem_residual = norm2(&(&q * &q - &q));
        let selfadj_residual = norm2(&(space.adjoint(&q)? - &q));
        let commute_residual = norm2(&(&q * n - n * &q));
        let adjoint_commute_residual = norm2(&(&q * na - na * &q));
        let q_norm = norm2(&q);
        let range = SubspaceBasis::from_columns_unchecked(range_basis(&q, PROJECTION_RANK_CUT));
        let gram_margin = definiteness(&range, space, cfg)?;
        Ok(SpectralProjectionResult {
            q,
            target,
            route,
            idem_residual,
            selfadj_residual,
            commute_residual,
            adjoint_commute_residual,
            q_norm,
            range,
            gram_margin,
            nodes_used: None,
            doubling_change: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.range.dim()
    }

    /// `‖Q² - Q‖ ≤ 1e-8 (1 + ‖Q‖²)`.
    pub fn is_accepted(&self) -> bool {
        self.idem_residual <= 1e-8 * (1.0 + self.q_norm * self.q_norm)
    }

    /// False when node doubling moved the contour result by more than
    /// [`DOUBLING_TOL`].
    pub fn converged(&self) -> bool {
        self.doubling_change.is_none_or(|c| c <= DOUBLING_TOL)
    }
}

fn check_boundary(eigs: &[Complex64], delta: &BorelSetDescriptor, guard: f64) -> Result<()> {
    let mut gap = f64::INFINITY;
    let mut offending = Vec::new();
    for &e in eigs {
        let d = delta.boundary_distance(e);
        gap = gap.min(d);
        if d <= guard {
            offending.push(e);
        }
    }
    if offending.is_empty() {
        Ok(())
    } else {
        Err(KreinError::BoundaryThroughSpectrum { gap, offending })
    }
}

struct ContourPiece {
    q: CMatrix,
    nodes: usize,
    change: f64,
}

fn primitive_integral(
    n: &CMatrix,
    prim: Primitive,
    eigs: &[Complex64],
    nodes: usize,
) -> Result<ContourPiece> {
    match prim {
        Primitive::Disk { center, radius } => {
            let circle = Circle::new(center, radius);
            let count = adaptive_circle_nodes(eigs, &circle, nodes);
            let coarse = circle_quadrature(n, &circle, 0, count)?;
            let fine = circle_quadrature(n, &circle, 0, 2 * count)?;
            Ok(ContourPiece {
                change: norm2(&(&fine - &coarse)),
                q: fine,
                nodes: 2 * count,
            })
        }
        Primitive::Rect { x0, y0, x1, y1 } => {
            let (coarse, _) = rectangle_quadrature(n, (x0, y0, x1, y1), eigs, nodes)?;
            let (fine, used) = rectangle_quadrature(n, (x0, y0, x1, y1), eigs, 2 * nodes)?;
            Ok(ContourPiece {
                change: norm2(&(&fine - &coarse)),
                q: fine,
                nodes: used,
            })
        }
    }
}

fn combine(
    a: ContourPiece,
    b: ContourPiece,
    f: impl Fn(&CMatrix, &CMatrix) -> CMatrix,
) -> ContourPiece {
    ContourPiece {
        q: f(&a.q, &b.q),
        nodes: a.nodes + b.nodes,
        change: a.change.max(b.change),
    }
}

fn contour_tree(
    n: &CMatrix,
    delta: &BorelSetDescriptor,
    conj: bool,
    eigs: &[Complex64],
    nodes: usize,
    scale: f64,
) -> Result<ContourPiece> {
    let dim = n.nrows();
    match delta {
        BorelSetDescriptor::Empty => Ok(ContourPiece {
            q: CMatrix::zeros(dim, dim),
            nodes: 0,
            change: 0.0,
        }),
        BorelSetDescriptor::Plane => {
            let radius = 2.0 * scale + 1.0;
            primitive_integral(
                n,
                Primitive::Disk {
                    center: c64(0.0, 0.0),
                    radius,
                },
                eigs,
                nodes,
            )
        }
        BorelSetDescriptor::Disk { .. } | BorelSetDescriptor::Rect { .. } => {
            let prim = if conj {
                delta.clone().conjugate().primitives()[0]
            } else {
                delta.primitives()[0]
            };
            primitive_integral(n, prim, eigs, nodes)
        }
        BorelSetDescriptor::Union { pieces } => {
            let mut acc = ContourPiece {
                q: CMatrix::zeros(dim, dim),
                nodes: 0,
                change: 0.0,
            };
            for p in pieces {
                let next = contour_tree(n, p, conj, eigs, nodes, scale)?;
                acc = combine(acc, next, |a, b| a + b - a * b);
            }
            Ok(acc)
        }
        BorelSetDescriptor::Intersection { left, right } => {
            let a = contour_tree(n, left, conj, eigs, nodes, scale)?;
            let b = contour_tree(n, right, conj, eigs, nodes, scale)?;
            Ok(combine(a, b, |a, b| a * b))
        }
        BorelSetDescriptor::Difference { left, right } => {
            let a = contour_tree(n, left, conj, eigs, nodes, scale)?;
            let b = contour_tree(n, right, conj, eigs, nodes, scale)?;
            Ok(combine(a, b, |a, b| a - a * b))
        }
        BorelSetDescriptor::Conjugate { inner } => {
            contour_tree(n, inner, !conj, eigs, nodes, scale)
        }
    }
}

/// Riesz projection `(1/2πi) ∮ (z - N)⁻¹ dz` for the spectral set `σ(N) ∩ Δ`.
///
/// Refuses when an eigenvalue lies within the clustering radius of a
/// primitive boundary. Each primitive is evaluated with at least `nodes`
/// points and again with twice as many; the change is recorded.
pub fn riesz_projection_contour(
    op: &KreinOperator,
    delta: &BorelSetDescriptor,
    nodes: usize,
    cfg: &ToleranceConfig,
) -> Result<SpectralProjectionResult> {
    cfg.validate()?;
    let eigs = eigenvalues(op.matrix())?;
    check_boundary(&eigs, delta, cluster_radius(op, cfg))?;
    let piece = contour_tree(op.matrix(), delta, false, &eigs, nodes.max(16), op.scale())?;
    let mut res = SpectralProjectionResult::from_matrix(
        op,
        piece.q,
        delta.clone(),
        ProjectionRoute::Contour,
        cfg,
    )?;
    res.nodes_used = Some(piece.nodes);
    res.doubling_change = Some(piece.change);
    Ok(res)
}

/// `U [I -X; 0 0] U*` for an ordered decomposition, where `X` solves
/// `T11 X - X T22 = -T12`. With `refine`, one residual-correction step is
/// applied to `X`.
pub fn projector_from_decomposition(dec: &OrderedDecomposition, refine: bool) -> CMatrix {
    let n = dec.dim();
    let k = dec.split;
    if k == 0 {
        return CMatrix::zeros(n, n);
    }
    if k == n {
        return identity(n);
    }
    let t = &dec.triangular;
    let t11 = t.view((0, 0), (k, k)).into_owned();
    let t22 = t.view((k, k), (n - k, n - k)).into_owned();
    let t12 = t.view((0, k), (k, n - k)).into_owned();
    let mut x = solve_triangular(&t11, &t22, &(-&t12));
    if refine {
        let r = &t11 * &x - &x * &t22 + &t12;
        x -= solve_triangular(&t11, &t22, &r);
    }
    let mut block = CMatrix::zeros(n, n);
    block.view_mut((0, 0), (k, k)).fill_with_identity();
    block.view_mut((0, k), (k, n - k)).copy_from(&(-x));
    &dec.unitary * block * dec.unitary.adjoint()
}

/// Riesz projection from the ordered Schur form; independent of the contour
/// route.
pub fn riesz_projection_oracle(
    op: &KreinOperator,
    delta: &BorelSetDescriptor,
    cfg: &ToleranceConfig,
) -> Result<SpectralProjectionResult> {
    cfg.validate()?;
    let radius = cluster_radius(op, cfg);
    let dec = ordered_spectral_decomposition(op.matrix(), |z| delta.contains(z), radius)?;
    check_boundary(&dec.eigenvalues(), delta, radius)?;
    let q = projector_from_decomposition(&dec, cfg.iterative_refinement);
    SpectralProjectionResult::from_matrix(op, q, delta.clone(), ProjectionRoute::Oracle, cfg)
}

/// `‖RR♯ - R♯R‖_F / max(1, ‖R‖_F²)` for `R = B*NB` and `R♯ = M⁻¹R*M`,
/// `M = B*GB`: normality of `N` restricted to the span of `B` as an operator
/// on the Hilbert space `(span B, [·,·])`.
pub fn restriction_normality(op: &KreinOperator, basis: &SubspaceBasis) -> Result<f64> {
    if basis.is_zero() {
        return Ok(0.0);
    }
    let r = basis.restrict(op.matrix());
    let m = op.space().compress(basis.columns());
    let sharp = crate::numerics::solve(&m, &(r.adjoint() * &m))?;
    let comm = &r * &sharp - &sharp * &r;
    Ok(comm.norm() / r.norm_squared().max(1.0))
}

#[derive(Debug, Clone)]
pub struct SpectralSetReport {
    pub applicable: bool,
    pub checks: Vec<Check>,
    pub projection: Option<SpectralProjectionResult>,
    /// Points in Δ with their tags.
    pub points: Vec<(Complex64, SpectralType)>,
}

/// Checks that the Riesz projection of a spectral set of positive type is
/// J-selfadjoint with uniformly positive range, that `N` restricted to the
/// range is normal in the induced Hilbert structure, and that every point of
/// the set is of two-sided positive type.
///
/// Inapplicable when `Δ` contains no eigenvalue or an eigenvalue not of
/// positive type.
pub fn verify_spectral_set_theorem(
    op: &KreinOperator,
    delta: &BorelSetDescriptor,
    cfg: &ToleranceConfig,
) -> Result<SpectralSetReport> {
    let points = classify(op, cfg)?;
    let inside: Vec<(Complex64, SpectralType)> = points
        .iter()
        .filter(|p| delta.contains(p.value))
        .map(|p| (p.value, p.type_tag.expect("classified")))
        .collect();
    let clause = "σ(N) ∩ Δ ⊂ σ₊(N)";
    if inside.is_empty() {
        return Ok(SpectralSetReport {
            applicable: false,
            checks: vec![Check::inapplicable(
                "spectral_set.precondition",
                clause,
                "Δ contains no eigenvalue",
            )],
            projection: None,
            points: inside,
        });
    }
    let offending: Vec<String> = inside
        .iter()
        .filter(|(_, t)| !t.is_positive())
        .map(|(z, t)| format!("{z} ({t})"))
        .collect();
    if !offending.is_empty() {
        return Ok(SpectralSetReport {
            applicable: false,
            checks: vec![Check::inapplicable(
                "spectral_set.precondition",
                clause,
                format!("not of positive type: {}", offending.join(", ")),
            )],
            projection: None,
            points: inside,
        });
    }

    let proj = riesz_projection_contour(op, delta, cfg.contour_nodes, cfg)?;
    let mut checks = vec![
        Check::bound(
            "spectral_set.selfadjoint",
            "Q⁺ = Q",
            proj.selfadj_residual,
            1e-8 * (1.0 + proj.q_norm),
        ),
        Check::flag(
            "spectral_set.uniformly_positive",
            "[x, x] ≥ δ‖x‖² on QH",
            proj.gram_margin.is_uniformly_positive() && proj.gram_margin.margin > 1e-6,
        )
        .with_detail(format!("margin {:.3e}", proj.gram_margin.margin)),
        Check::bound(
            "spectral_set.restriction_normal",
            "N|QH normal in (QH, [·,·])",
            restriction_normality(op, &proj.range)?,
            1e-8,
        ),
        Check::flag(
            "spectral_set.two_sided",
            "σ(N) ∩ Δ ⊂ σ₊₊(N)",
            inside
                .iter()
                .all(|(_, t)| *t == SpectralType::TwoSidedPositive),
        ),
        Check::bound(
            "spectral_set.idempotent",
            "Q² = Q",
            proj.idem_residual,
            1e-8 * (1.0 + proj.q_norm * proj.q_norm),
        ),
    ];
    if !proj.converged() {
        checks.push(
            Check::bound(
                "spectral_set.quadrature",
                "node doubling stable",
                proj.doubling_change.unwrap_or(0.0),
                DOUBLING_TOL,
            )
            .as_warning(),
        );
    }
    Ok(SpectralSetReport {
        applicable: true,
        checks,
        projection: Some(proj),
        points: inside,
    })
}

/// `P = Q - QQ⁺` for an idempotent `Q`, with the neutrality of its range.
#[derive(Debug, Clone)]
pub struct ProjectionDefect {
    pub p: CMatrix,
    pub neutral: bool,
    pub verdict: DefinitenessVerdict,
    /// `‖P⁺P‖₂`.
    pub p_adj_p: f64,
}

pub fn projection_defect(q: &CMatrix, space: &KreinSpace) -> Result<ProjectionDefect> {
    let qn = norm2(q);
    let idem = norm2(&(q * q - q));
    let scale = 1.0 + qn * qn;
    if idem > 1e-8 * scale {
        return Err(KreinError::NotIdempotent { residual: idem });
    }
    let qa = space.adjoint(q)?;
    let p = q - q * &qa;
    let range = SubspaceBasis::from_columns_unchecked(range_basis(&p, 1e-8 * scale));
    let verdict = definiteness(&range, space, &ToleranceConfig::default())?;
    let neutral = matches!(
        verdict.kind,
        crate::krein::DefinitenessKind::Neutral | crate::krein::DefinitenessKind::Zero
    );
    let p_adj_p = norm2(&(space.adjoint(&p)? * &p));
    Ok(ProjectionDefect {
        p,
        neutral,
        verdict,
        p_adj_p,
    })
}
