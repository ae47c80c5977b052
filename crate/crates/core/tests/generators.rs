mod common;

use common::{generated, random_matrix, seeded, spectral_norm};
use krein_spectra::generators::{
    build_normal_with_types, derive_seed, j_unitarity_residual, perturb_structured,
    random_invariant_subspace, random_j_unitary, random_krein_space, Conjugation, GeneratorSpec,
};
use krein_spectra::json::JsonComplex;
use krein_spectra::numerics::eigenvalues;
use krein_spectra::projections::strong_stability_check;
use krein_spectra::spectral::{classify, SpectralType};
use krein_spectra::{c64, indefinite_inner, is_normal, KreinError, ToleranceConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_deterministic(dim in 1usize..13, seed in any::<u64>()) {
        let a = generated(dim, seed);
        let b = generated(dim, seed);
        prop_assert_eq!(&a.spec, &b.spec);
        prop_assert_eq!(a.operator.matrix(), b.operator.matrix());
        prop_assert_eq!(a.spec.dim(), dim);
    }

    #[test]
    fn generated_operators_are_normal(dim in 1usize..13, seed in any::<u64>()) {
        let gen = generated(dim, seed);
        let (normal, residual) = is_normal(gen.operator.matrix(), &gen.space, 1e-9).unwrap();
        prop_assert!(normal, "residual {residual}");
        prop_assert!(gen.conjugator_condition() <= 1e3 * (1.0 + 1e-9));
        prop_assert!(gen.separation() >= 0.5 - 1e-12);
    }

    #[test]
    fn j_unitary_preserves_the_inner_product(p in 0usize..5, q in 0usize..5, seed in any::<u64>(), cond in 1.0f64..1e3) {
        prop_assume!(p + q > 0);
        let space = random_krein_space(p, q, seed).unwrap();
        let u = random_j_unitary(&space, seed, cond).unwrap();
        prop_assert!(krein_spectra::numerics::condition_number(&u) <= cond * (1.0 + 1e-9));
        prop_assert!(j_unitarity_residual(&u, &space).unwrap() <= 1e-10 * cond);
        let mut rng = seeded(seed);
        let x = random_matrix(&mut rng, p + q, 1).column(0).into_owned();
        let y = random_matrix(&mut rng, p + q, 1).column(0).into_owned();
        let before = indefinite_inner(&x, &y, &space).unwrap();
        let after = indefinite_inner(&(&u * &x), &(&u * &y), &space).unwrap();
        prop_assert!((before - after).norm() <= 1e-10 * cond * cond * x.norm() * y.norm());
    }

    #[test]
    fn perturbation_respects_delta_and_structure(dim in 2usize..10, seed in any::<u64>(), delta in 1e-6f64..0.1) {
        let gen = generated(dim, seed);
        let x = perturb_structured(&gen, delta, seed ^ 1).unwrap();
        prop_assert!(spectral_norm(&(x.operator.matrix() - gen.operator.matrix())) <= delta * (1.0 + 1e-9));
        prop_assert!(is_normal(x.operator.matrix(), &x.space, 1e-9).unwrap().0);
        let points = classify(&x.operator, &ToleranceConfig::default()).unwrap();
        for t in gen.ground_truth.iter().filter(|t| t.expected == SpectralType::NeutralType && t.alg_mult == 2) {
            let nearest = points
                .iter()
                .min_by(|a, b| (a.value - t.value.0).norm().total_cmp(&(b.value - t.value.0).norm()))
                .unwrap();
            prop_assert_eq!(nearest.type_tag, Some(SpectralType::NeutralType));
        }
    }

    #[test]
    fn stable_operators_stay_stable_under_small_perturbations(dim in 2usize..10, seed in any::<u64>()) {
        let cfg = ToleranceConfig::default();
        let gen = generated(dim, seed);
        let report = strong_stability_check(&gen.operator, &cfg).unwrap();
        prop_assume!(report.stable);
        let x = perturb_structured(&gen, 0.49 * report.classification_margin, seed).unwrap();
        prop_assert!(strong_stability_check(&x.operator, &cfg).unwrap().stable);
    }

    #[test]
    fn random_invariant_subspaces_are_invariant(dim in 2usize..13, seed in any::<u64>()) {
        let gen = generated(dim, seed);
        let n = gen.operator.matrix();
        let clusters: Vec<Vec<_>> = gen.spec.distinct_eigenvalues().into_iter().map(|z| vec![z]).collect();
        let l = random_invariant_subspace(n, &clusters, 0.1, seed).unwrap();
        prop_assert!(l.dim() >= 1);
        let b = l.columns();
        let restricted = b.adjoint() * n * b;
        prop_assert!(spectral_norm(&(n * b - b * &restricted)) <= 1e-9 * gen.operator.scale());
        for z in eigenvalues(&restricted).unwrap() {
            prop_assert!(clusters.iter().any(|c| (c[0] - z).norm() < 1e-4 * gen.operator.scale()));
        }
    }
}

#[test]
fn zero_delta_returns_the_operator() {
    let gen = generated(6, 11);
    let same = perturb_structured(&gen, 0.0, 5).unwrap();
    assert_eq!(same.operator.matrix(), gen.operator.matrix());
    assert!(matches!(
        perturb_structured(&gen, -1.0, 5),
        Err(KreinError::InvalidSpec(_))
    ));
}

#[test]
fn seeds_derive_distinct_streams() {
    let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
    assert_eq!(seeds.len(), 1000);
    assert_eq!(derive_seed(42, 7), derive_seed(42, 7));
}

#[test]
fn neutral_jordan_spec_builds_a_neutral_point() {
    let spec = GeneratorSpec {
        signature: (1, 1),
        positive_type_eigs: vec![],
        negative_type_eigs: vec![],
        neutral_pairs: vec![],
        neutral_jordan: vec![JsonComplex(c64(3.0, 1.0))],
        conjugation: Conjugation::JUnitary { cond_bound: 10.0 },
        seed: 9,
    };
    let gen = build_normal_with_types(&spec).unwrap();
    let points = classify(&gen.operator, &ToleranceConfig::default()).unwrap();
    assert_eq!(points.len(), 1);
    let p = &points[0];
    assert!((p.value - c64(3.0, 1.0)).norm() < 1e-6);
    assert_eq!(
        (p.type_tag, p.alg_mult, p.geo_mult),
        (Some(SpectralType::NeutralType), 2, 1)
    );
}

#[test]
fn inconsistent_specs_are_rejected() {
    let mut spec = GeneratorSpec {
        signature: (2, 1),
        positive_type_eigs: vec![(JsonComplex(c64(1.0, 0.0)), 1)],
        negative_type_eigs: vec![(JsonComplex(c64(2.0, 0.0)), 1)],
        neutral_pairs: vec![],
        neutral_jordan: vec![],
        conjugation: Conjugation::None,
        seed: 0,
    };
    assert!(matches!(spec.validate(), Err(KreinError::InvalidSpec(_))));
    spec.signature = (1, 1);
    assert!(spec.validate().is_ok());
    spec.negative_type_eigs[0].0 = JsonComplex(c64(1.0, 0.0));
    assert!(matches!(
        spec.validate(),
        Err(KreinError::EigenvalueCollision(_))
    ));
}
