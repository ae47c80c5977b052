mod common;

use common::{kronecker_sylvester, random_matrix, seeded, sin_angle, spectral_norm};
use krein_spectra::numerics::{
    circle_quadrature, contour_integral_resolvent, from_diagonal, from_real_diagonal, from_rows,
    identity, ordered_spectral_decomposition, rectangle_quadrature, solve_sylvester,
    solve_sylvester_dense, Circle,
};
use krein_spectra::projections::projector_from_decomposition;
use krein_spectra::{c64, CMatrix, Complex64, KreinError};
use proptest::prelude::*;

/// `V diag(eigs) V⁻¹` with a random well-conditioned `V`, returned with `V`.
fn diagonalizable(seed: u64, eigs: &[Complex64]) -> (CMatrix, CMatrix) {
    let mut rng = seeded(seed);
    let n = eigs.len();
    let v = identity(n) * c64(2.0, 0.0)
        + random_matrix(&mut rng, n, n) * c64(0.5 / (n as f64).sqrt(), 0.0);
    let a = &v * from_diagonal(eigs) * v.clone().try_inverse().unwrap();
    (a, v)
}

fn grid_eigs(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| c64(k as f64 - n as f64 / 2.0, (k % 3) as f64))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_projector_matches_eigenvector_projector(n in 2usize..13, seed in any::<u64>(), mask in any::<u16>()) {
        let eigs = grid_eigs(n);
        let (a, v) = diagonalizable(seed, &eigs);
        let picked = |z: Complex64| eigs.iter().position(|&e| (e - z).norm() < 0.25).is_some_and(|k| mask >> k & 1 == 1);
        let dec = ordered_spectral_decomposition(&a, picked, 1e-5).unwrap();
        prop_assert!(dec.backward_error <= 1e-12);
        prop_assert!(dec.unitarity_error() <= 1e-12);
        prop_assert_eq!(dec.split, (0..n).filter(|&k| mask >> k & 1 == 1).count());
        prop_assert!(dec.eigenvalues()[..dec.split].iter().all(|&z| picked(z)));
        let expected = {
            let sel: Vec<f64> = (0..n).map(|k| f64::from(mask >> k & 1)).collect();
            &v * from_real_diagonal(&sel) * v.clone().try_inverse().unwrap()
        };
        let q = projector_from_decomposition(&dec, true);
        prop_assert!(spectral_norm(&(&q - &expected)) <= 1e-10 * spectral_norm(&expected).max(1.0));
    }

    #[test]
    fn complementary_selectors_sum_to_identity(n in 2usize..13, seed in any::<u64>(), cut in -6.0f64..6.0) {
        let (a, _) = diagonalizable(seed, &grid_eigs(n));
        let left = |z: Complex64| z.re < cut.floor() + 0.5;
        let p = projector_from_decomposition(&ordered_spectral_decomposition(&a, left, 1e-5).unwrap(), true);
        let q = projector_from_decomposition(&ordered_spectral_decomposition(&a, |z| !left(z), 1e-5).unwrap(), true);
        prop_assert!(spectral_norm(&(&p + &q - identity(n))) <= 1e-9 * spectral_norm(&p).max(1.0));
        prop_assert!(spectral_norm(&(&p * &q)) <= 1e-9 * spectral_norm(&p).max(1.0));
    }

    #[test]
    fn sylvester_matches_kronecker_oracle(m in 1usize..9, n in 1usize..9, seed in any::<u64>()) {
        let (s, t, z) = krein_spectra::generators::random_sylvester_instance(m, n, seed);
        let expected = kronecker_sylvester(&s, &t, &z);
        let sol = solve_sylvester(&s, &t, &z).unwrap();
        let scale = spectral_norm(&expected).max(1.0);
        prop_assert!(spectral_norm(&(&sol.x - &expected)) <= 1e-9 * scale);
        prop_assert!(spectral_norm(&(solve_sylvester_dense(&s, &t, &z).unwrap() - &expected)) <= 1e-9 * scale);
        prop_assert!(sol.within_bound(&s, &t, &z));
        prop_assert!(sol.min_gap >= 4.0 - 1e-9);
    }

    #[test]
    fn sylvester_residual_bound_at_larger_sizes(m in 9usize..40, n in 9usize..40, seed in any::<u64>()) {
        let (s, t, z) = krein_spectra::generators::random_sylvester_instance(m, n, seed);
        let sol = solve_sylvester(&s, &t, &z).unwrap();
        prop_assert!(sol.within_bound(&s, &t, &z), "residual {}", sol.residual);
    }

    #[test]
    fn circle_contour_converges_under_node_doubling(n in 2usize..10, seed in any::<u64>()) {
        let eigs = grid_eigs(n);
        let (a, v) = diagonalizable(seed, &eigs);
        let circle = Circle::new(eigs[0], 0.5);
        let coarse = contour_integral_resolvent(&a, circle, 0, 32, 1e-3).unwrap();
        let fine = contour_integral_resolvent(&a, circle, 0, 256, 1e-3).unwrap();
        prop_assert!(spectral_norm(&(&coarse - &fine)) <= 1e-9 * spectral_norm(&fine).max(1.0));
        let mut sel = vec![0.0; n];
        sel[0] = 1.0;
        let expected = &v * from_real_diagonal(&sel) * v.clone().try_inverse().unwrap();
        prop_assert!(spectral_norm(&(&fine - &expected)) <= 1e-9 * spectral_norm(&expected));
    }
}

#[test]
fn riesz_projector_of_upper_triangular_example() {
    let (z, one) = (c64(0.0, 0.0), c64(1.0, 0.0));
    let a = from_rows(&[vec![one, one], vec![z, c64(2.0, 0.0)]]);
    // eigenvector (1, 1) for 2, (1, 0) for 1, so the projector onto the
    // first along the second is [[0, 1], [0, 1]]
    let dec =
        ordered_spectral_decomposition(&a, |w| (w - c64(2.0, 0.0)).norm() < 0.5, 1e-5).unwrap();
    assert_eq!(dec.split, 1);
    let b = dec.leading_basis();
    let expected = CMatrix::from_element(2, 1, c64(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    assert!(sin_angle(&b, &expected) < 1e-14);
    let q = projector_from_decomposition(&dec, false);
    assert!((q - from_rows(&[vec![z, one], vec![z, one]])).norm() < 1e-14);
}

#[test]
fn first_moment_vanishes_at_semisimple_point() {
    let n = from_real_diagonal(&[1.0, 3.0, -2.0]);
    let circle = Circle::new(c64(1.0, 0.0), 0.7);
    // (1/2πi)∮ (z - 1)(z - N)⁻¹ dz = (N - 1) P = 0 on a diagonal N
    let m1 = circle_quadrature(&n, &circle, 1, 64).unwrap();
    assert!(m1.norm() < 1e-14);
    let m0 = circle_quadrature(&n, &circle, 0, 64).unwrap();
    assert!((m0 - from_real_diagonal(&[1.0, 0.0, 0.0])).norm() < 1e-13);
}

#[test]
fn first_moment_recovers_nilpotent_part() {
    let (z, one) = (c64(0.0, 0.0), c64(1.0, 0.0));
    let n = from_rows(&[vec![one, one], vec![z, one]]);
    let m1 = circle_quadrature(&n, &Circle::new(one, 0.5), 1, 64).unwrap();
    assert!((m1 - from_rows(&[vec![z, one], vec![z, z]])).norm() < 1e-13);
}

#[test]
fn rectangle_contour_selects_enclosed_eigenvalues() {
    let n = from_diagonal(&[c64(0.0, 0.0), c64(1.0, 1.0), c64(4.0, 0.0)]);
    let eigs = [c64(0.0, 0.0), c64(1.0, 1.0), c64(4.0, 0.0)];
    let (q, used) = rectangle_quadrature(&n, (-1.0, -1.0, 2.0, 2.0), &eigs, 64).unwrap();
    assert!(used >= 64);
    assert!((q - from_real_diagonal(&[1.0, 1.0, 0.0])).norm() < 1e-12);
}

#[test]
fn contour_through_spectrum_is_refused() {
    let n = from_real_diagonal(&[1.0, 2.0]);
    let err =
        contour_integral_resolvent(&n, Circle::new(c64(0.0, 0.0), 1.0), 0, 64, 1e-6).unwrap_err();
    assert!(matches!(err, KreinError::BoundaryThroughSpectrum { .. }));
}

#[test]
fn overlapping_sylvester_spectra_are_refused() {
    let s = from_real_diagonal(&[1.0, 2.0]);
    let err = solve_sylvester(&s, &from_real_diagonal(&[2.0]), &CMatrix::zeros(2, 1)).unwrap_err();
    assert!(matches!(err, KreinError::SpectralOverlap { .. }));
}

#[test]
fn ambiguous_selector_is_refused() {
    let a = from_real_diagonal(&[1.0, 1.0 + 1e-9]);
    let err = ordered_spectral_decomposition(&a, |z| z.re <= 1.0, 1e-5).unwrap_err();
    assert!(matches!(err, KreinError::SelectorAmbiguity(_)));
}
