//! Local spectral functions on carriers of two-sided positive type.
//!
//! In finite dimension `E(Δ)` is the sum of the Riesz projections of the
//! eigenvalues of `N` in `Δ ∩ S`. Each per-eigenvalue projection is computed
//! once from an ordered Schur form; evaluations are cached by the set of
//! eigenvalues they select.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::region::BorelSetDescriptor;
use super::riesz::{projector_from_decomposition, ProjectionRoute, SpectralProjectionResult};
use super::subspaces::spectrum_excess;
use crate::checks::Check;
use crate::error::{KreinError, Result};
use crate::generators::{derive_seed, random_invariant_subspace};
use crate::krein::{DefinitenessKind, KreinOperator, SubspaceBasis};
use crate::numerics::{
    identity, norm2, ordered_spectral_decomposition, range_basis, CMatrix, Complex64,
};
use crate::spectral::{classify, cluster_radius, SpectralPoint, SpectralType};
use crate::tolerance::ToleranceConfig;

/// Tolerance shared by the axiom residuals, all relative.
pub const LSF_TOL: f64 = 1e-8;

pub struct LocalSpectralFunction {
    op: KreinOperator,
    carrier: BorelSetDescriptor,
    cfg: ToleranceConfig,
    /// Every spectral point of `N`, classified.
    points: Vec<SpectralPoint>,
    /// Indices into `points` of the eigenvalues in the carrier.
    carrier_idx: Vec<usize>,
    /// Riesz projection of each carrier point, aligned with `carrier_idx`.
    table: Vec<CMatrix>,
    cache: Mutex<HashMap<Vec<usize>, Arc<SpectralProjectionResult>>>,
}

impl std::fmt::Debug for LocalSpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalSpectralFunction")
            .field("carrier", &self.carrier)
            .field("eigenvalues", &self.carrier_eigenvalues())
            .finish()
    }
}

/// Local spectral function of `N` on `carrier`.
///
/// Fails with a precondition error listing every eigenvalue in the carrier
/// that is not of two-sided positive type.
pub fn local_spectral_function(
    op: &KreinOperator,
    carrier: &BorelSetDescriptor,
    cfg: &ToleranceConfig,
) -> Result<LocalSpectralFunction> {
    LocalSpectralFunction::new(op, carrier, cfg)
}

impl LocalSpectralFunction {
    pub fn new(
        op: &KreinOperator,
        carrier: &BorelSetDescriptor,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let points = classify(op, cfg)?;
        let carrier_idx: Vec<usize> = (0..points.len())
            .filter(|&i| carrier.contains(points[i].value))
            .collect();
        let offending: Vec<Complex64> = carrier_idx
            .iter()
            .map(|&i| &points[i])
            .filter(|p| p.type_tag != Some(SpectralType::TwoSidedPositive))
            .map(|p| p.value)
            .collect();
        if !offending.is_empty() {
            let tags: Vec<String> = carrier_idx
                .iter()
                .map(|&i| &points[i])
                .filter(|p| p.type_tag != Some(SpectralType::TwoSidedPositive))
                .map(|p| format!("{} ({})", p.value, p.type_tag.expect("classified")))
                .collect();
            return Err(KreinError::precondition(
                format!(
                    "carrier not of two-sided positive type: {}",
                    tags.join(", ")
                ),
                offending,
            ));
        }
        let radius = cluster_radius(op, cfg);
        let table = carrier_idx
            .par_iter()
            .map(|&i| {
                let pt = &points[i];
                let dec = ordered_spectral_decomposition(op.matrix(), |z| pt.contains(z), radius)?;
                if dec.split != pt.alg_mult {
                    return Err(KreinError::SelectorAmbiguity(pt.value));
                }
                Ok(projector_from_decomposition(&dec, cfg.iterative_refinement))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalSpectralFunction {
            op: op.clone(),
            carrier: carrier.clone(),
            cfg: *cfg,
            points,
            carrier_idx,
            table,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn operator(&self) -> &KreinOperator {
        &self.op
    }

    pub fn carrier(&self) -> &BorelSetDescriptor {
        &self.carrier
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.cfg
    }

    /// All spectral points of `N`, including those outside the carrier.
    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    pub fn carrier_points(&self) -> impl Iterator<Item = &SpectralPoint> {
        self.carrier_idx.iter().map(|&i| &self.points[i])
    }

    pub fn carrier_eigenvalues(&self) -> Vec<Complex64> {
        self.carrier_points().map(|p| p.value).collect()
    }

    /// Positions in the carrier table of the eigenvalues lying in `delta`.
    fn selection(&self, delta: &BorelSetDescriptor) -> Vec<usize> {
        (0..self.carrier_idx.len())
            .filter(|&k| delta.contains(self.points[self.carrier_idx[k]].value))
            .collect()
    }

    /// `E(Δ ∩ S)`. Results depend only on the selected eigenvalues and are
    /// cached per selection; the first evaluation of a selection fixes the
    /// stored target.
    pub fn evaluate(&self, delta: &BorelSetDescriptor) -> Result<Arc<SpectralProjectionResult>> {
        let key = self.selection(delta);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let n = self.op.dim();
        let q = key
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, &k| acc + &self.table[k]);
        let target = delta.clone().intersect(self.carrier.clone());
        let fresh = Arc::new(SpectralProjectionResult::from_matrix(
            &self.op,
            q,
            target,
            ProjectionRoute::PointSum,
            &self.cfg,
        )?);
        let mut cache = self.cache.lock().expect("cache lock");
        Ok(Arc::clone(cache.entry(key).or_insert(fresh)))
    }

    /// Eigenvalue clusters of the carrier points lying in `delta`.
    fn clusters_in(&self, delta: &BorelSetDescriptor) -> Vec<Vec<Complex64>> {
        self.carrier_points()
            .filter(|p| delta.contains(p.value))
            .map(|p| p.members.clone())
            .collect()
    }
}

/// Axiom checks for a local spectral function, one entry per property with
/// the worst residual over all tested sets.
#[derive(Debug, Clone)]
pub struct LsfReport {
    pub checks: Vec<Check>,
    pub evaluations: usize,
}

impl LsfReport {
    pub fn passed(&self) -> bool {
        crate::checks::all_passed(&self.checks)
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// Checks (S1) through (S6), selfadjointness, commutation with `N` and `N⁺`,
/// and the adjoint law `E₊(Δ*) = E(Δ)` over the family `deltas`.
///
/// Commutants failing `‖BN - NB‖ ≤ 1e-8 max(1, ‖B‖‖N‖)` are reported as
/// inapplicable rather than tested.
pub fn verify_lsf_axioms(
    e: &LocalSpectralFunction,
    deltas: &[BorelSetDescriptor],
    commutants: &[CMatrix],
) -> Result<LsfReport> {
    let op = e.operator();
    let n = op.matrix();
    let dim = op.dim();
    let scale = op.scale();
    let radius = cluster_radius(op, e.tolerances());
    let evals: Vec<Arc<SpectralProjectionResult>> = deltas
        .par_iter()
        .map(|d| e.evaluate(d))
        .collect::<Result<_>>()?;

    let mut s1: f64 = 0.0;
    let mut s2: f64 = 0.0;
    let mut rank_ok = true;
    for (i, di) in deltas.iter().enumerate() {
        let ei = &evals[i].q;
        let ni = evals[i].q_norm;
        for (j, dj) in deltas.iter().enumerate() {
            let ej = &evals[j].q;
            let meet = e.evaluate(&di.clone().intersect(dj.clone()))?;
            s1 = s1.max(rel(norm2(&(&meet.q - ei * ej)), ni * evals[j].q_norm));
            let rest = e.evaluate(&di.clone().minus(dj.clone()))?;
            s2 = s2.max(rel(norm2(&(ei - &rest.q - &meet.q)), ni));
            rank_ok &= evals[i].rank() == rest.rank() + meet.rank();
        }
        let mut parts = CMatrix::zeros(dim, dim);
        let mut ranks = 0;
        for p in e.carrier_points().filter(|p| di.contains(p.value)) {
            let single = e.evaluate(&BorelSetDescriptor::disk(p.value, radius)?)?;
            parts += &single.q;
            ranks += single.rank();
        }
        s2 = s2.max(rel(norm2(&(ei - parts)), ni));
        rank_ok &= evals[i].rank() == ranks;
    }

    let mut checks = vec![
        Check::bound("lsf.s1", "E(Δ₁ ∩ Δ₂) = E(Δ₁)E(Δ₂)", s1, LSF_TOL),
        Check::bound("lsf.s2", "E(⊎ Δₖ) = Σ E(Δₖ)", s2, LSF_TOL),
        Check::flag(
            "lsf.s2_rank",
            "rank E(Δ₁ ⊎ Δ₂) = rank E(Δ₁) + rank E(Δ₂)",
            rank_ok,
        ),
    ];

    for (k, b) in commutants.iter().enumerate() {
        let name = format!("lsf.s3[{k}]");
        let clause = "BN = NB ⟹ E(Δ)B = BE(Δ)";
        let bn = norm2(b);
        if norm2(&(b * n - n * b)) > LSF_TOL * (bn * scale).max(1.0) {
            checks.push(Check::inapplicable(
                name,
                clause,
                "B does not commute with N",
            ));
            continue;
        }
        let worst = evals
            .iter()
            .map(|r| rel(norm2(&(&r.q * b - b * &r.q)), r.q_norm * bn))
            .fold(0.0, f64::max);
        checks.push(Check::bound(name, clause, worst, LSF_TOL));
    }

    let mut s4: f64 = 0.0;
    let mut s5: f64 = 0.0;
    let mut s6 = f64::INFINITY;
    let mut s6_ok = true;
    let mut selfadj: f64 = 0.0;
    let mut commute: f64 = 0.0;
    for (d, r) in deltas.iter().zip(&evals) {
        let inside: Vec<Complex64> = e
            .carrier_points()
            .filter(|p| d.contains(p.value))
            .map(|p| p.value)
            .collect();
        let outside: Vec<Complex64> = e
            .points()
            .iter()
            .map(|p| p.value)
            .filter(|v| !inside.contains(v))
            .collect();
        s4 = s4.max(spectrum_excess(
            &r.range.restrict(n),
            &inside,
            radius,
            scale,
        )?);
        let comp = identity(dim) - &r.q;
        let comp_range = SubspaceBasis::from_columns_unchecked(range_basis(&comp, 0.5));
        s5 = s5.max(spectrum_excess(
            &comp_range.restrict(n),
            &outside,
            radius,
            scale,
        )?);
        s6_ok &= matches!(
            r.gram_margin.kind,
            DefinitenessKind::UniformlyPositive | DefinitenessKind::Zero
        );
        if r.gram_margin.kind == DefinitenessKind::UniformlyPositive {
            s6 = s6.min(r.gram_margin.margin);
        }
        selfadj = selfadj.max(rel(r.selfadj_residual, r.q_norm));
        commute = commute.max(rel(
            r.commute_residual.max(r.adjoint_commute_residual),
            r.q_norm * scale,
        ));
    }
    checks.push(Check::bound(
        "lsf.s4",
        "σ(N|E(Δ)H) ⊂ cl(σ(N) ∩ Δ)",
        s4,
        LSF_TOL,
    ));
    checks.push(Check::bound(
        "lsf.s5",
        "σ(N|(I-E(Δ))H) ⊂ cl(σ(N) \\ Δ)",
        s5,
        LSF_TOL,
    ));
    let s6_check = Check::flag("lsf.s6", "E(Δ)H uniformly positive", s6_ok);
    checks.push(if s6.is_finite() {
        s6_check.with_detail(format!("smallest margin {s6:.3e}"))
    } else {
        s6_check
    });
    checks.push(Check::bound(
        "lsf.selfadjoint",
        "E(Δ)⁺ = E(Δ)",
        selfadj,
        LSF_TOL,
    ));
    checks.push(Check::bound(
        "lsf.commutes",
        "E(Δ)N = NE(Δ), E(Δ)N⁺ = N⁺E(Δ)",
        commute,
        LSF_TOL,
    ));

    let conj_op = op.adjoint_operator();
    let plus =
        LocalSpectralFunction::new(&conj_op, &e.carrier().clone().conjugate(), e.tolerances())?;
    let mut adjoint_law: f64 = 0.0;
    for (d, r) in deltas.iter().zip(&evals) {
        let other = plus.evaluate(&d.clone().conjugate())?;
        adjoint_law = adjoint_law.max(rel(norm2(&(&other.q - &r.q)), r.q_norm));
    }
    checks.push(Check::bound(
        "lsf.adjoint_law",
        "E₊(Δ*) = E(Δ)",
        adjoint_law,
        LSF_TOL,
    ));

    let evaluations = e.cache.lock().expect("cache lock").len();
    Ok(LsfReport {
        checks,
        evaluations,
    })
}

/// Checks that `count` random `N`-invariant subspaces with spectrum in
/// `Δ ∩ S` lie in `E(Δ)H`, up to a principal-angle sine of 1e-8.
///
/// Inapplicable for unbounded `Δ` or when `Δ` selects no carrier eigenvalue.
pub fn verify_maximality(
    e: &LocalSpectralFunction,
    delta: &BorelSetDescriptor,
    count: usize,
    seed: u64,
) -> Result<Check> {
    let clause = "σ(N|M) ⊂ Δ ⟹ M ⊂ E(Δ)H";
    if !delta.is_bounded() {
        return Ok(Check::inapplicable(
            "lsf.maximality",
            clause,
            "Δ is not compact",
        ));
    }
    let clusters = e.clusters_in(delta);
    if clusters.is_empty() {
        return Ok(Check::inapplicable(
            "lsf.maximality",
            clause,
            "Δ selects no carrier eigenvalue",
        ));
    }
    let range = e.evaluate(delta)?.range.clone();
    let radius = cluster_radius(e.operator(), e.tolerances());
    let worst = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let m = random_invariant_subspace(
                e.operator().matrix(),
                &clusters,
                radius,
                derive_seed(seed, k),
            )?;
            Ok(m.containment_gap(&range))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Check::bound("lsf.maximality", clause, worst, LSF_TOL)
        .with_detail(format!("{count} subspaces")))
}
