//! Acceptance criteria over seeded generated operators. Prints one PASS/FAIL
//! line per criterion and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use krein_spectra::generators::{
    derive_seed, perturb_structured, random_sylvester_instance, GeneratedOperator,
};
use krein_spectra::harness::SuiteConfig;
use krein_spectra::numerics::{identity, norm2, solve_sylvester, solve_sylvester_dense};
use krein_spectra::projections::{
    local_spectral_function, resolvent_probe, restriction_normality, riesz_projection_contour,
    riesz_projection_oracle, strong_stability_check, verify_lsf_axioms, verify_maximality,
    verify_spectral_set_theorem, BorelSetDescriptor,
};
use krein_spectra::spectral::{
    classify, kernel_angles, verify_selfadjoint_link, SpectralPoint, SpectralType,
};
use krein_spectra::{Result, ToleranceConfig};

const TRIALS: u64 = 500;
const SEED: u64 = 20_240_601;
const COND_BOUND: f64 = 1e3;
const CLASSIFY_BUDGET: Duration = Duration::from_secs(60);

const SELFADJOINT_TOL: f64 = 1e-8;
const MARGIN_FLOOR: f64 = 1e-6;
const RESTRICTION_TOL: f64 = 1e-8;
const LSF_TOL: f64 = 1e-8;
const MAXIMALITY_SUBSPACES: usize = 20;
const ANGLE_TOL: f64 = 1e-8;
const GROWTH_LIMIT: f64 = 10.0;
const STABILITY_TRIALS: usize = 200;
const PERTURBATION_FRACTION: f64 = 0.49;
const CONTOUR_NODES: usize = 64;
const CONTOUR_TOL: f64 = 1e-6;
const SYLVESTER_SCALE: f64 = 1e-8;
const DENSE_TOL: f64 = 1e-9;

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, trial: u64, e: krein_spectra::KreinError) {
        self.record(false, || format!("trial {trial}: {e}"));
    }
}

fn isolation(points: &[SpectralPoint], p: &SpectralPoint) -> f64 {
    points
        .iter()
        .filter(|q| q.value != p.value)
        .map(|q| 0.5 * (q.value - p.value).norm())
        .fold(1.0, f64::min)
}

fn isolating_disk(points: &[SpectralPoint], p: &SpectralPoint) -> Result<BorelSetDescriptor> {
    BorelSetDescriptor::disk(p.value, isolation(points, p))
}

fn two_sided_positive(points: &[SpectralPoint]) -> impl Iterator<Item = &SpectralPoint> {
    points
        .iter()
        .filter(|p| p.type_tag == Some(SpectralType::TwoSidedPositive))
}

fn type_equality(t: &mut Tally, trial: u64, gen: &GeneratedOperator, points: &[SpectralPoint]) {
    for p in points {
        let one_sided = matches!(
            p.type_tag,
            Some(SpectralType::PositiveType | SpectralType::NegativeType)
        );
        t.record(!one_sided, || {
            format!("trial {trial}: {} tagged {:?}", p.value, p.type_tag)
        });
    }
    t.record(points.len() == gen.ground_truth.len(), || {
        format!(
            "trial {trial}: {} points, inventory has {}",
            points.len(),
            gen.ground_truth.len()
        )
    });
}

fn spectral_set(
    t: &mut Tally,
    trial: u64,
    gen: &GeneratedOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<()> {
    let op = &gen.operator;
    for p in points
        .iter()
        .filter(|p| p.type_tag.is_some_and(SpectralType::is_positive))
    {
        let report = verify_spectral_set_theorem(op, &isolating_disk(points, p)?, cfg)?;
        let Some(q) = report.projection else {
            t.record(false, || {
                format!("trial {trial}: no projection at {}", p.value)
            });
            continue;
        };
        let restriction = restriction_normality(op, &q.range)?;
        let ok = q.selfadj_residual <= SELFADJOINT_TOL * (1.0 + q.q_norm)
            && q.gram_margin.margin > MARGIN_FLOOR
            && restriction <= RESTRICTION_TOL;
        t.record(ok, || {
            format!(
                "trial {trial} at {}: ‖Q⁺ - Q‖ {:.2e}, margin {:.2e}, restriction {:.2e}",
                p.value, q.selfadj_residual, q.gram_margin.margin, restriction
            )
        });
    }
    Ok(())
}

fn lsf(
    t: &mut Tally,
    trial: u64,
    gen: &GeneratedOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<()> {
    let disks: Vec<BorelSetDescriptor> = two_sided_positive(points)
        .map(|p| isolating_disk(points, p))
        .collect::<Result<_>>()?;
    if disks.is_empty() {
        return Ok(());
    }
    let op = &gen.operator;
    let e = local_spectral_function(op, &BorelSetDescriptor::from_pieces(disks.clone()), cfg)?;
    let mut deltas = disks.clone();
    deltas.push(BorelSetDescriptor::rect(-1e6, -1e6, 0.0, 1e6)?);
    deltas.push(BorelSetDescriptor::Plane);
    deltas.push(BorelSetDescriptor::Empty);
    if disks.len() >= 2 {
        deltas.push(disks[0].clone().union(disks[1].clone()));
    }
    let n = op.matrix();
    let commutants = [identity(op.dim()), n.clone(), op.adjoint().clone(), n * n];
    let mut checks = verify_lsf_axioms(&e, &deltas, &commutants)?.checks;
    for (k, d) in disks.iter().enumerate() {
        checks.push(verify_maximality(
            &e,
            d,
            MAXIMALITY_SUBSPACES,
            derive_seed(SEED ^ trial, k as u64),
        )?);
    }
    for c in checks {
        t.record(c.passed() && c.tolerance <= LSF_TOL, || {
            format!(
                "trial {trial}: {} residual {:.2e} tolerance {:.0e}",
                c.name, c.residual, c.tolerance
            )
        });
    }
    Ok(())
}

fn a_lambda(
    t: &mut Tally,
    trial: u64,
    gen: &GeneratedOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<()> {
    for p in points {
        let link = verify_selfadjoint_link(&gen.operator, p, cfg)?;
        let two_sided = p.type_tag == Some(SpectralType::TwoSidedPositive);
        t.record(
            link.zero_positive == two_sided && link.consistent == Some(true),
            || {
                format!(
                    "trial {trial} at {}: 0 positive for A(λ) = {}, tag {:?}",
                    p.value, link.zero_positive, p.type_tag
                )
            },
        );
    }
    Ok(())
}

fn kernels(
    t: &mut Tally,
    trial: u64,
    gen: &GeneratedOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<()> {
    for p in points {
        let tag = p.type_tag.expect("classified");
        if tag.is_definite() {
            let angle = kernel_angles(&gen.operator, p, cfg)?.max();
            t.record(angle <= ANGLE_TOL, || {
                format!("trial {trial} at {}: angle {angle:.2e}", p.value)
            });
        } else if p.geo_mult < p.alg_mult {
            t.record(p.alg_mult == 2 * p.geo_mult, || {
                format!(
                    "trial {trial} at {}: m_a {} m_g {}",
                    p.value, p.alg_mult, p.geo_mult
                )
            });
        }
    }
    Ok(())
}

fn resolvent(
    t: &mut Tally,
    trial: u64,
    gen: &GeneratedOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<()> {
    for p in points {
        let tag = p.type_tag.expect("classified");
        let jordan = !tag.is_definite() && p.geo_mult < p.alg_mult;
        if tag != SpectralType::TwoSidedPositive && !jordan {
            continue;
        }
        let r0 = 0.5 * isolation(points, p);
        let probe = resolvent_probe(
            &gen.operator,
            p.value,
            &[r0, r0 * 1e-1, r0 * 1e-2, r0 * 1e-3],
            8,
            cfg,
        )?;
        if jordan {
            t.record(probe.pole_order == Some(2), || {
                format!(
                    "trial {trial} at {}: Jordan pole {:?}",
                    p.value, probe.pole_order
                )
            });
        } else {
            let growth = probe.growth();
            t.record(
                growth <= GROWTH_LIMIT && probe.pole_order == Some(1),
                || {
                    format!(
                        "trial {trial} at {}: growth {growth:.2e}, pole {:?}",
                        p.value, probe.pole_order
                    )
                },
            );
        }
    }
    Ok(())
}

fn oracles(
    t: &mut Tally,
    trial: u64,
    gen: &GeneratedOperator,
    points: &[SpectralPoint],
    cfg: &ToleranceConfig,
) -> Result<()> {
    let op = &gen.operator;
    for p in points {
        let delta = isolating_disk(points, p)?;
        let c = riesz_projection_contour(op, &delta, CONTOUR_NODES, cfg)?;
        let o = riesz_projection_oracle(op, &delta, cfg)?;
        let gap = norm2(&(&c.q - &o.q));
        t.record(gap <= CONTOUR_TOL, || {
            format!("trial {trial} at {}: contour vs oracle {gap:.2e}", p.value)
        });
    }
    let dim = op.dim();
    let (m, n) = (dim.div_ceil(2), dim + 1 - dim.div_ceil(2));
    let (s, tt, z) = random_sylvester_instance(m, n, derive_seed(SEED, trial));
    let sol = solve_sylvester(&s, &tt, &z)?;
    let bound = SYLVESTER_SCALE * ((norm2(&s) + norm2(&tt)) * norm2(&sol.x) + norm2(&z));
    t.record(sol.residual <= bound, || {
        format!(
            "trial {trial}: Sylvester residual {:.2e} > {bound:.2e}",
            sol.residual
        )
    });
    if m.max(n) <= 8 {
        let dense = solve_sylvester_dense(&s, &tt, &z)?;
        let gap = norm2(&(&sol.x - dense)) / norm2(&sol.x).max(1.0);
        t.record(gap <= DENSE_TOL, || {
            format!("trial {trial}: dense oracle {gap:.2e}")
        });
    }
    Ok(())
}

fn stability(cfg: &ToleranceConfig, suite: &SuiteConfig) -> Tally {
    let mut t = Tally::default();
    let mut stable_trials = 0;
    for trial in 0..50 * STABILITY_TRIALS as u64 {
        if stable_trials == STABILITY_TRIALS {
            break;
        }
        let outcome = (|| -> Result<Option<(bool, String)>> {
            let gen = suite.generate(trial)?;
            let report = strong_stability_check(&gen.operator, cfg)?;
            if !report.stable {
                return Ok(None);
            }
            if !report.passed() {
                let bad: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed())
                    .map(|c| c.name.clone())
                    .collect();
                return Ok(Some((false, format!("decomposition checks {bad:?}"))));
            }
            let delta = PERTURBATION_FRACTION * report.classification_margin;
            let x = perturb_structured(&gen, delta, derive_seed(SEED, trial))?;
            let after = strong_stability_check(&x.operator, cfg)?;
            Ok(Some((
                after.stable && after.passed(),
                format!("unstable after δ = {delta:.2e}"),
            )))
        })();
        match outcome {
            Ok(None) => {}
            Ok(Some((ok, why))) => {
                stable_trials += 1;
                t.record(ok, || format!("trial {trial}: {why}"));
            }
            Err(e) => t.error(trial, e),
        }
    }
    if stable_trials < STABILITY_TRIALS {
        t.failures.push(format!(
            "only {stable_trials} strongly stable operators generated"
        ));
    }
    t
}

fn main() -> ExitCode {
    let cfg = ToleranceConfig::default();
    let suite = SuiteConfig {
        trials: TRIALS,
        seed: SEED,
        dims: 2..=12,
        cond_bound: COND_BOUND,
        ..SuiteConfig::default()
    };
    let mut tallies: Vec<Tally> = (0..8).map(|_| Tally::default()).collect();
    let mut classify_time = Duration::ZERO;
    for trial in 0..TRIALS {
        let gen = match suite.generate(trial) {
            Ok(g) => g,
            Err(e) => {
                tallies[0].error(trial, e);
                continue;
            }
        };
        let start = Instant::now();
        let points = match classify(&gen.operator, &cfg) {
            Ok(p) => p,
            Err(e) => {
                tallies[0].error(trial, e);
                continue;
            }
        };
        classify_time += start.elapsed();
        type_equality(&mut tallies[0], trial, &gen, &points);
        type Step = fn(
            &mut Tally,
            u64,
            &GeneratedOperator,
            &[SpectralPoint],
            &ToleranceConfig,
        ) -> Result<()>;
        let steps: [(usize, Step); 6] = [
            (1, spectral_set),
            (2, lsf),
            (3, a_lambda),
            (4, kernels),
            (5, resolvent),
            (7, oracles),
        ];
        for (k, step) in steps {
            if let Err(e) = step(&mut tallies[k], trial, &gen, &points, &cfg) {
                tallies[k].error(trial, e);
            }
        }
    }
    if classify_time > CLASSIFY_BUDGET {
        tallies[0]
            .failures
            .push(format!("classification took {classify_time:?}"));
    }
    tallies[6] = stability(&cfg, &suite);

    let names = [
        "type equality σ₊ = σ₊₊, σ₋ = σ₋₋",
        "spectral-set projection selfadjoint with uniformly positive range",
        "local spectral function axioms and maximality",
        "A(λ) linkage",
        "kernel coincidence and Jordan control",
        "resolvent growth and pole order",
        "strong stability under structured perturbation",
        "contour/Schur and Bartels–Stewart/dense agreement",
    ];
    let mut all = true;
    for (k, (name, t)) in names.iter().zip(&tallies).enumerate() {
        let ok = t.failures.is_empty() && t.checked > 0;
        all &= ok;
        println!(
            "{} criterion {}: {name} ({} checks, {} failures)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            t.checked,
            t.failures.len()
        );
        for f in t.failures.iter().take(5) {
            println!("      {f}");
        }
    }
    println!(
        "classification time over {TRIALS} trials: {:.2}s",
        classify_time.as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
