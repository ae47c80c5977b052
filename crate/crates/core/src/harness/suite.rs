//! Seeded batches of generated operators run through every applicable check.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::report::VerificationReport;
use crate::checks::{Check, CheckStatus};
use crate::error::{KreinError, Result};
use crate::generators::{
    build_normal_with_types, derive_seed, perturb_structured, random_sylvester_instance,
    GeneratedOperator, GeneratorSpec, GENERATOR_NORMALITY_TOL,
};
use crate::krein::KreinOperator;
use crate::numerics::{norm2, solve_sylvester, solve_sylvester_dense, Complex64};
use crate::projections::{
    disk_subspace, join_subspaces, local_spectral_function, resolvent_probe,
    riesz_projection_contour, riesz_projection_oracle, strong_stability_check, verify_lsf_axioms,
    verify_maximality, verify_spectral_set_theorem, BorelSetDescriptor,
};
use crate::spectral::{
    classify, kernel_angles, verify_selfadjoint_link, SpectralPoint, SpectralType,
};
use crate::tolerance::ToleranceConfig;

/// Condition bound up to which every check runs at its nominal tolerance.
pub const NOMINAL_COND_BOUND: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    pub dims: RangeInclusive<usize>,
    pub cond_bound: f64,
    pub tolerances: ToleranceConfig,
    /// Run only this trial index.
    pub only_trial: Option<u64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 500,
            seed: 0,
            dims: 2..=12,
            cond_bound: NOMINAL_COND_BOUND,
            tolerances: ToleranceConfig::default(),
            only_trial: None,
        }
    }
}

impl SuiteConfig {
    pub fn trial_seed(&self, trial: u64) -> u64 {
        derive_seed(self.seed, trial)
    }

    /// Dimensions cycle through `dims` with the trial index.
    pub fn trial_dim(&self, trial: u64) -> usize {
        let (lo, hi) = (*self.dims.start(), *self.dims.end());
        lo + (trial as usize) % (hi - lo + 1)
    }

    pub fn generate(&self, trial: u64) -> Result<GeneratedOperator> {
        let spec = GeneratorSpec::random(
            self.trial_dim(trial),
            self.cond_bound,
            self.trial_seed(trial),
        )?;
        build_normal_with_types(&spec)
    }

    pub fn reproduce(&self, trial: u64) -> String {
        format!(
            "krein-spectra suite --seed {} --dims {}..{} --cond-bound {:e} --trial {trial}",
            self.seed,
            self.dims.start(),
            self.dims.end(),
            self.cond_bound
        )
    }
}

fn rank(s: CheckStatus) -> u8 {
    match s {
        CheckStatus::Inapplicable => 0,
        CheckStatus::Pass => 1,
        CheckStatus::Warning => 2,
        CheckStatus::Fail => 3,
    }
}

/// Keeps one entry per check name: the one with the worst status, ties
/// broken by the larger residual. Order of first appearance is preserved.
pub fn worst_per_name(checks: Vec<Check>) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for c in checks {
        match out.iter_mut().find(|o| o.name == c.name) {
            Some(o) => {
                let worse = (rank(c.status), c.residual.is_nan(), c.residual)
                    .partial_cmp(&(rank(o.status), o.residual.is_nan(), o.residual))
                    .is_some_and(|ord| ord.is_gt());
                if worse {
                    *o = c;
                }
            }
            None => out.push(c),
        }
    }
    out
}

/// Checks that do not depend on the eigenstructure of the generated
/// operator; they keep their nominal tolerances in relaxed runs.
const CONDITIONING_FREE: &[&str] = &["generator.", "sylvester."];

/// Tolerance scale for a conjugation bound. Eigenvalue errors of the
/// generated operators grow like `cond²`.
pub fn relaxation_factor(cond_bound: f64) -> f64 {
    (cond_bound / NOMINAL_COND_BOUND).max(1.0).powi(2)
}

fn relax(c: Check, factor: f64) -> Check {
    if factor <= 1.0 || !c.failed() || CONDITIONING_FREE.iter().any(|p| c.name.starts_with(p)) {
        return c;
    }
    if c.tolerance == 0.0 || c.residual.is_nan() {
        return c.as_warning();
    }
    if Check::bound(
        c.name.clone(),
        c.clause.clone(),
        c.residual,
        c.tolerance * factor,
    )
    .passed()
    {
        c.as_warning()
    } else {
        c
    }
}

fn trial_error(e: &KreinError, factor: f64) -> Check {
    let c = Check::flag("trial.error", "trial completes", false).with_detail(e.to_string());
    if factor > 1.0 && (e.is_numerical_refusal() || e.is_precondition()) {
        c.as_warning()
    } else {
        c
    }
}

/// Half the distance from `p` to the nearest other point, capped at 1.
fn isolation_radius(points: &[SpectralPoint], p: &SpectralPoint) -> f64 {
    points
        .iter()
        .filter(|q| q.value != p.value)
        .map(|q| 0.5 * (q.value - p.value).norm())
        .fold(1.0, f64::min)
}

fn disk(center: Complex64, radius: f64) -> Result<BorelSetDescriptor> {
    BorelSetDescriptor::disk(center, radius)
}

/// Every applicable check on one generated operator.
pub fn trial_checks(
    gen: &GeneratedOperator,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<Vec<Check>> {
    let op = &gen.operator;
    let points = classify(op, cfg)?;
    let mut checks = vec![Check::bound(
        "generator.normal",
        "NN⁺ = N⁺N",
        op.normality_residual(),
        GENERATOR_NORMALITY_TOL,
    )];
    checks.extend(classification_checks(gen, &points));
    checks.extend(kernel_checks(op, &points, cfg)?);
    checks.extend(projection_checks(op, &points, cfg)?);
    checks.extend(lsf_checks(op, &points, cfg, seed)?);
    checks.extend(resolvent_checks(op, &points, cfg)?);
    checks.extend(stability_checks(gen, cfg, seed)?);
    checks.extend(sylvester_checks(op.dim(), seed)?);
    Ok(worst_per_name(checks))
}

fn classification_checks(gen: &GeneratedOperator, points: &[SpectralPoint]) -> Vec<Check> {
    let reach = 0.1 * gen.separation();
    let matches = points.len() == gen.ground_truth.len()
        && gen.ground_truth.iter().all(|t| {
            points.iter().any(|p| {
                (p.value - t.value.0).norm() < reach
                    && p.type_tag == Some(t.expected)
                    && p.alg_mult == t.alg_mult
                    && p.geo_mult == t.geo_mult
            })
        });
    let one_sided = points
        .iter()
        .filter(|p| {
            matches!(
                p.type_tag,
                Some(SpectralType::PositiveType | SpectralType::NegativeType)
            )
        })
        .count();
    vec![
        Check::flag(
            "classify.ground_truth",
            "tags and multiplicities match the generator",
            matches,
        ),
        Check::bound(
            "classify.type_equality",
            "σ₊(N) = σ₊₊(N), σ₋(N) = σ₋₋(N)",
            one_sided as f64,
            0.0,
        )
        .with_detail(format!("{} points", points.len())),
    ]
}

fn kernel_checks(
    op: &KreinOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for p in points {
        let link = verify_selfadjoint_link(op, p, cfg)?;
        checks.push(Check::bound(
            "a_lambda.selfadjoint",
            "A(λ)⁺ = A(λ)",
            link.selfadjoint_residual,
            1e-8,
        ));
        checks.push(match link.consistent {
            Some(ok) => Check::flag("a_lambda.link", "0 ∈ σ₊(A(λ)) ⟺ λ ∈ σ₊₊(N)", ok),
            None => Check::inapplicable(
                "a_lambda.link",
                "0 ∈ σ₊(A(λ)) ⟺ λ ∈ σ₊₊(N)",
                "borderline margin",
            ),
        });
        let tag = p.type_tag.expect("classified");
        if tag.is_definite() {
            let a = kernel_angles(op, p, cfg)?;
            checks.push(Check::bound(
                "kernel.coincidence",
                "ker(N - λ) = ker(N⁺ - λ̄) = root subspace",
                a.max(),
                1e-8,
            ));
        } else if p.geo_mult < p.alg_mult {
            checks.push(Check::flag(
                "kernel.jordan_control",
                "m_a = 2 m_g at neutral Jordan points",
                p.alg_mult == 2 * p.geo_mult,
            ));
        }
    }
    Ok(checks)
}

fn projection_checks(
    op: &KreinOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let tsp: Vec<&SpectralPoint> = points
        .iter()
        .filter(|p| p.type_tag == Some(SpectralType::TwoSidedPositive))
        .collect();
    for p in points
        .iter()
        .filter(|p| p.type_tag.is_some_and(SpectralType::is_positive))
    {
        let delta = disk(p.value, isolation_radius(points, p))?;
        checks.extend(verify_spectral_set_theorem(op, &delta, cfg)?.checks);
    }
    if let Some(p) = points.first() {
        let delta = disk(p.value, isolation_radius(points, p))?;
        let c = riesz_projection_contour(op, &delta, 64, cfg)?;
        let o = riesz_projection_oracle(op, &delta, cfg)?;
        checks.push(Check::bound(
            "riesz.contour_vs_oracle",
            "Q_contour = Q_oracle",
            norm2(&(&c.q - &o.q)),
            1e-6,
        ));
        for q in [&c, &o] {
            let scale = 1.0 + q.q_norm * q.q_norm;
            checks.push(Check::bound(
                "riesz.idempotent",
                "Q² = Q",
                q.idem_residual / scale,
                1e-8,
            ));
            checks.push(Check::bound(
                "riesz.commutes",
                "QN = NQ, QN⁺ = N⁺Q",
                q.commute_residual.max(q.adjoint_commute_residual)
                    / ((1.0 + q.q_norm) * op.scale()),
                1e-8,
            ));
        }
    }
    let mut subspaces = Vec::new();
    for p in &tsp {
        let d = disk_subspace(op, p.value, isolation_radius(points, p), cfg)?;
        checks.extend(d.checks);
        subspaces.push(d.basis);
    }
    if subspaces.len() >= 2 {
        let j = join_subspaces(&subspaces[0], &subspaces[1], op.space(), cfg)?;
        let expected = subspaces[0].join(&subspaces[1], 1e-10);
        let scale = 1.0 + norm2(&j.e0).powi(2);
        checks.push(Check::bound(
            "join.span",
            "E₀H = L₁ + L₂",
            j.basis.distance(&expected),
            1e-8,
        ));
        checks.push(Check::bound(
            "join.projection",
            "E₀² = E₀ = E₀⁺",
            j.idem_residual.max(j.selfadj_residual) / scale,
            1e-8,
        ));
        checks.push(Check::flag(
            "join.uniformly_positive",
            "L₁ + L₂ uniformly positive",
            j.verdict.is_uniformly_positive(),
        ));
    }
    Ok(checks)
}

fn lsf_checks(
    op: &KreinOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<Vec<Check>> {
    let tsp: Vec<&SpectralPoint> = points
        .iter()
        .filter(|p| p.type_tag == Some(SpectralType::TwoSidedPositive))
        .collect();
    if tsp.is_empty() {
        return Ok(vec![Check::inapplicable(
            "lsf.carrier",
            "S ∩ σ(N) ⊂ σ₊₊(N)",
            "no two-sided positive point",
        )]);
    }
    let disks: Vec<BorelSetDescriptor> = tsp
        .iter()
        .map(|p| disk(p.value, isolation_radius(points, p)))
        .collect::<Result<_>>()?;
    let carrier = BorelSetDescriptor::from_pieces(disks.clone());
    let e = local_spectral_function(op, &carrier, cfg)?;
    let mut deltas = disks.clone();
    deltas.push(BorelSetDescriptor::rect(-1e6, -1e6, 0.0, 1e6)?);
    deltas.push(BorelSetDescriptor::Plane);
    deltas.push(BorelSetDescriptor::Empty);
    if disks.len() >= 2 {
        deltas.push(disks[0].clone().union(disks[1].clone()));
    }
    let n = op.matrix();
    let commutants = vec![
        crate::numerics::identity(op.dim()),
        n.clone(),
        op.adjoint().clone(),
        n * n,
    ];
    let mut checks = verify_lsf_axioms(&e, &deltas, &commutants)?.checks;
    for (k, d) in disks.iter().enumerate() {
        checks.push(verify_maximality(&e, d, 20, derive_seed(seed, k as u64))?);
    }
    Ok(checks)
}

fn resolvent_checks(
    op: &KreinOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for p in points {
        let tag = p.type_tag.expect("classified");
        let jordan = !tag.is_definite() && p.geo_mult < p.alg_mult;
        if tag != SpectralType::TwoSidedPositive && !jordan {
            continue;
        }
        let r0 = 0.5 * isolation_radius(points, p);
        let radii = [r0, r0 * 1e-1, r0 * 1e-2, r0 * 1e-3];
        let probe = resolvent_probe(op, p.value, &radii, 8, cfg)?;
        if jordan {
            checks.push(Check::flag(
                "resolvent.jordan_pole",
                "pole order 2 at a neutral Jordan point",
                probe.pole_order == Some(2),
            ));
        } else {
            checks.push(Check::bound(
                "resolvent.growth",
                "‖(N - λ)⁻¹‖ ≤ C / dist(λ, σ(N))",
                probe.growth(),
                10.0,
            ));
            checks.push(Check::flag(
                "resolvent.pole_order",
                "pole of order one",
                probe.pole_order == Some(1),
            ));
        }
    }
    Ok(checks)
}

fn stability_checks(
    gen: &GeneratedOperator,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<Vec<Check>> {
    let report = strong_stability_check(&gen.operator, cfg)?;
    if !report.stable {
        return Ok(report.checks);
    }
    let mut checks = report.checks;
    let delta = 0.49 * report.classification_margin;
    let perturbed = perturb_structured(gen, delta, derive_seed(seed, u64::MAX))?;
    let after = strong_stability_check(&perturbed.operator, cfg)?;
    checks.push(
        Check::flag(
            "stability.perturbed",
            "‖X - N‖ < δ ⟹ X strongly stable",
            after.stable && after.passed(),
        )
        .with_detail(format!("δ = {delta:.3e}")),
    );
    Ok(checks)
}

fn sylvester_checks(dim: usize, seed: u64) -> Result<Vec<Check>> {
    let m = dim.div_ceil(2);
    let n = dim + 1 - m;
    let (s, t, z) = random_sylvester_instance(m, n, derive_seed(seed, 0x5157));
    let sol = solve_sylvester(&s, &t, &z)?;
    let bound = 1e-8 * (norm2(&s) + norm2(&t)) * norm2(&sol.x) + 1e-8 * norm2(&z);
    let mut checks = vec![
        Check::bound("sylvester.residual", "SX - XT = Z", sol.residual, bound)
            .with_detail(format!("min gap {:.3e}", sol.min_gap)),
    ];
    if m.max(n) <= 8 {
        let dense = solve_sylvester_dense(&s, &t, &z)?;
        checks.push(Check::bound(
            "sylvester.dense_oracle",
            "Bartels–Stewart = vectorized solve",
            norm2(&(&sol.x - dense)) / norm2(&sol.x).max(1.0),
            1e-9,
        ));
    }
    Ok(checks)
}

/// Runs the configured trials in parallel; entries are sorted by trial.
pub fn run_suite(sc: &SuiteConfig) -> VerificationReport {
    let trials: Vec<u64> = match sc.only_trial {
        Some(t) => vec![t],
        None => (0..sc.trials).collect(),
    };
    let factor = relaxation_factor(sc.cond_bound);
    let results: Vec<(u64, Vec<Check>)> = trials
        .par_iter()
        .map(|&t| {
            let checks = sc
                .generate(t)
                .and_then(|g| trial_checks(&g, &sc.tolerances, sc.trial_seed(t)))
                .unwrap_or_else(|e| vec![trial_error(&e, factor)]);
            (t, checks.into_iter().map(|c| relax(c, factor)).collect())
        })
        .collect();
    let mut report = VerificationReport::new("suite");
    report.seed = Some(sc.seed);
    for (t, checks) in results {
        report.extend(checks, Some(t), &sc.reproduce(t));
    }
    report.finalize();
    report
}
