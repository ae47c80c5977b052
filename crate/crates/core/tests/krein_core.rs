mod common;

use std::sync::Arc;

use common::{
    generated, random_gram, random_matrix, random_unitary, seeded, sin_angle, spectral_norm,
};
use krein_spectra::numerics::{from_real_diagonal, from_rows};
use krein_spectra::spectral::{classify, SpectralType};
use krein_spectra::{
    c64, definiteness, indefinite_inner, is_normal, krein_adjoint, orthogonal_companion,
    part_decomposition, CMatrix, DefinitenessKind, KreinOperator, KreinSpace, SubspaceBasis,
    ToleranceConfig,
};
use proptest::prelude::*;

fn swap() -> CMatrix {
    from_rows(&[
        vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        vec![c64(1.0, 0.0), c64(0.0, 0.0)],
    ])
}

fn signature() -> impl Strategy<Value = (usize, usize)> {
    (0usize..4, 0usize..4).prop_filter("nonempty", |(p, q)| p + q > 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_satisfies_defining_identity((p, q) in signature(), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = p + q;
        let space = KreinSpace::new(random_gram(&mut rng, p, q)).unwrap();
        let t = random_matrix(&mut rng, n, n);
        let x = random_matrix(&mut rng, n, 1).column(0).into_owned();
        let y = random_matrix(&mut rng, n, 1).column(0).into_owned();
        let ta = krein_adjoint(&t, &space).unwrap();
        let lhs = indefinite_inner(&(&t * &x), &y, &space).unwrap();
        let rhs = indefinite_inner(&x, &(&ta * &y), &space).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * spectral_norm(&t) * x.norm() * y.norm());
    }

    #[test]
    fn adjoint_is_an_involutive_antihomomorphism((p, q) in signature(), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = p + q;
        let space = KreinSpace::new(random_gram(&mut rng, p, q)).unwrap();
        let s = random_matrix(&mut rng, n, n);
        let t = random_matrix(&mut rng, n, n);
        let scale = spectral_norm(&s) * spectral_norm(&t);
        let tt = krein_adjoint(&krein_adjoint(&t, &space).unwrap(), &space).unwrap();
        prop_assert!(spectral_norm(&(tt - &t)) <= 1e-12 * scale.max(spectral_norm(&t)) * 16.0);
        let st = krein_adjoint(&(&s * &t), &space).unwrap();
        let ts = krein_adjoint(&t, &space).unwrap() * krein_adjoint(&s, &space).unwrap();
        prop_assert!(spectral_norm(&(st - ts)) <= 1e-12 * scale * 16.0);
    }

    #[test]
    fn companion_has_complementary_dimension_and_is_involutive(
        (p, q) in signature(),
        k in 0usize..4,
        seed in any::<u64>(),
    ) {
        let mut rng = seeded(seed);
        let n = p + q;
        let k = k.min(n);
        let space = KreinSpace::new(random_gram(&mut rng, p, q)).unwrap();
        let l = SubspaceBasis::from_orthonormal(random_unitary(&mut rng, n).columns(0, k).into_owned()).unwrap();
        let c = orthogonal_companion(&l, &space).unwrap();
        prop_assert_eq!(l.dim() + c.dim(), n);
        let cc = orthogonal_companion(&c, &space).unwrap();
        prop_assert_eq!(cc.dim(), l.dim());
        prop_assert!(sin_angle(l.columns(), cc.columns()) <= 1e-10);
        // [x, ℓ] = 0 for x in the companion, computed directly
        let cross = c.columns().adjoint() * space.gram() * l.columns();
        prop_assert!(cross.iter().all(|z| z.norm() <= 1e-10));
    }

    #[test]
    fn definiteness_kind_survives_positive_rescaling((p, q) in signature(), k in 1usize..4, seed in any::<u64>()) {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(seed);
        let n = p + q;
        let k = k.min(n);
        let g = random_gram(&mut rng, p, q);
        let l = SubspaceBasis::from_orthonormal(random_unitary(&mut rng, n).columns(0, k).into_owned()).unwrap();
        let v1 = definiteness(&l, &KreinSpace::new(g.clone()).unwrap(), &cfg).unwrap();
        let v3 = definiteness(&l, &KreinSpace::new(g * c64(3.0, 0.0)).unwrap(), &cfg).unwrap();
        prop_assert_eq!(v1.kind, v3.kind);
        if matches!(v1.kind, DefinitenessKind::UniformlyPositive | DefinitenessKind::UniformlyNegative) {
            prop_assert!((v3.margin - 3.0 * v1.margin).abs() <= 1e-12 * v3.margin.abs().max(1.0));
        }
    }

    #[test]
    fn swap_jordan_block_is_normal_for_every_eigenvalue(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let l = c64(re, im);
        let t = from_rows(&[vec![l, c64(1.0, 0.0)], vec![c64(0.0, 0.0), l]]);
        let space = KreinSpace::new(swap()).unwrap();
        // G T* G for the swap Gram reverses both indices of T*
        let expected = from_rows(&[vec![l.conj(), c64(1.0, 0.0)], vec![c64(0.0, 0.0), l.conj()]]);
        prop_assert!((krein_adjoint(&t, &space).unwrap() - &expected).norm() <= 1e-14 * (1.0 + l.norm()));
        let commutator = &t * &expected - &expected * &t;
        prop_assert!(commutator.norm() <= 1e-12 * (1.0 + l.norm_sqr()));
        let (normal, _) = is_normal(&t, &space, 1e-10).unwrap();
        prop_assert!(normal);
    }

    #[test]
    fn real_and_imaginary_parts_commute(dim in 2usize..10, seed in any::<u64>()) {
        let gen = generated(dim, seed);
        let (re, im) = part_decomposition(&gen.operator);
        let n = gen.operator.norm();
        prop_assert!(spectral_norm(&(&re * &im - &im * &re)) <= 1e-10 * n * n);
    }

    #[test]
    fn companion_of_reducing_subspace_is_reducing(dim in 2usize..10, seed in any::<u64>()) {
        let cfg = ToleranceConfig::default();
        let gen = generated(dim, seed);
        let op = &gen.operator;
        let points = classify(op, &cfg).unwrap();
        let definite: Vec<_> = points.iter().filter(|p| p.type_tag.is_some_and(SpectralType::is_definite)).collect();
        prop_assume!(!definite.is_empty());
        let l = &definite[0].kernel;
        let c = orthogonal_companion(l, op.space()).unwrap();
        let scale = op.scale();
        for a in [op.matrix(), op.adjoint()] {
            let p = c.projector();
            prop_assert!(spectral_norm(&(a * &p - &p * a * &p)) <= 1e-10 * scale);
        }
    }
}

#[test]
fn nilpotent_is_not_normal_for_diagonal_signature() {
    let space = KreinSpace::new(from_real_diagonal(&[1.0, -1.0])).unwrap();
    let t = from_rows(&[
        vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        vec![c64(0.0, 0.0), c64(0.0, 0.0)],
    ]);
    // T⁺ = J T* J = [[0, 0], [-1, 0]]; TT⁺ = diag(-1, 0), T⁺T = diag(0, -1)
    let ta = from_rows(&[
        vec![c64(0.0, 0.0), c64(0.0, 0.0)],
        vec![c64(-1.0, 0.0), c64(0.0, 0.0)],
    ]);
    assert!((krein_adjoint(&t, &space).unwrap() - &ta).norm() < 1e-15);
    let commutator = &t * &ta - &ta * &t;
    assert!((commutator - from_real_diagonal(&[-1.0, 1.0])).norm() < 1e-15);
    let (normal, residual) = is_normal(&t, &space, 1e-8).unwrap();
    assert!(!normal);
    assert!(residual > 0.5);
    let err = KreinOperator::new(t, Arc::new(space), &ToleranceConfig::default()).unwrap_err();
    assert!(err.is_precondition());
}

#[test]
fn neutral_line_is_inside_its_own_companion() {
    let space = KreinSpace::new(swap()).unwrap();
    let e1 = SubspaceBasis::coordinate(2, &[0]);
    // [x, e₁] = x₂ for the swap Gram, so the companion is span(e₁)
    let c = orthogonal_companion(&e1, &space).unwrap();
    assert_eq!(c.dim(), 1);
    assert!(c.distance(&e1) < 1e-14);
}

#[test]
fn unitary_is_normal_in_hilbert_space() {
    let mut rng = seeded(3);
    let u = random_unitary(&mut rng, 5);
    let (normal, residual) = is_normal(&u, &KreinSpace::canonical(5, 0), 1e-12).unwrap();
    assert!(normal);
    assert!(residual < 1e-14);
}
