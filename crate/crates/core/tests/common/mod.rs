#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use krein_spectra::generators::{build_normal_with_types, GeneratedOperator, GeneratorSpec};
use krein_spectra::{c64, CMatrix, Complex64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn generated(dim: usize, seed: u64) -> GeneratedOperator {
    let spec = GeneratorSpec::random(dim, 1e3, seed).expect("spec");
    build_normal_with_types(&spec).expect("generated operator")
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).qr().q()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hermitian `W diag(d) W*` with `|d| ∈ [0.5, 2]` and `p` positive entries.
pub fn random_gram(rng: &mut ChaCha8Rng, p: usize, q: usize) -> CMatrix {
    let n = p + q;
    let w = random_unitary(rng, n);
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i != j {
            return c64(0.0, 0.0);
        }
        let m = 0.5 + 1.5 * (((i * 7 + 3) % 11) as f64 / 10.0);
        c64(if i < p { m } else { -m }, 0.0)
    });
    &w * d * w.adjoint()
}

/// `sqrt(λ_max(A*A))` from the Hermitian eigensolver.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let top = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    top.max(0.0).sqrt()
}

/// Riesz projection of a generated operator onto the eigenvalues accepted
/// by `select`, built from the block inventory: in canonical coordinates
/// the block projector is a coordinate projector on definite blocks and
/// `C diag(a, b) C` on swap blocks, and `N = U⁻¹ B U`.
pub fn block_projector(gen: &GeneratedOperator, select: impl Fn(Complex64) -> bool) -> CMatrix {
    let spec = &gen.spec;
    let (p, q) = spec.signature;
    let n = p + q;
    let mut d = CMatrix::zeros(n, n);
    let one = |on: bool| if on { 1.0 } else { 0.0 };
    let mut pi = 0;
    for (z, m) in &spec.positive_type_eigs {
        for _ in 0..*m {
            d[(pi, pi)] = c64(one(select(z.0)), 0.0);
            pi += 1;
        }
    }
    let mut ni = p;
    for (z, m) in &spec.negative_type_eigs {
        for _ in 0..*m {
            d[(ni, ni)] = c64(one(select(z.0)), 0.0);
            ni += 1;
        }
    }
    let swap_blocks = spec
        .neutral_pairs
        .iter()
        .map(|(a, b)| (one(select(a.0)), one(select(b.0))))
        .chain(
            spec.neutral_jordan
                .iter()
                .map(|z| (one(select(z.0)), one(select(z.0)))),
        );
    for (a, b) in swap_blocks {
        // C diag(a, b) C with C = [[1, 1], [1, -1]]/√2
        let h = FRAC_1_SQRT_2 * FRAC_1_SQRT_2;
        let local = [[h * (a + b), h * (a - b)], [h * (a - b), h * (a + b)]];
        let idx = [pi, ni];
        for i in 0..2 {
            for j in 0..2 {
                d[(idx[i], idx[j])] = c64(local[i][j], 0.0);
            }
        }
        pi += 1;
        ni += 1;
    }
    let u = &gen.conjugator;
    let u_inv = u.clone().try_inverse().expect("invertible conjugator");
    u_inv * d * u
}

/// Solves `SX - XT = Z` through the `mn x mn` system
/// `(I ⊗ S - Tᵀ ⊗ I) vec X = vec Z`.
pub fn kronecker_sylvester(s: &CMatrix, t: &CMatrix, z: &CMatrix) -> CMatrix {
    let (m, n) = (s.nrows(), t.nrows());
    let mut k = CMatrix::zeros(m * n, m * n);
    for j in 0..n {
        for i in 0..m {
            let row = j * m + i;
            for l in 0..m {
                k[(row, j * m + l)] += s[(i, l)];
            }
            for l in 0..n {
                k[(row, l * m + i)] -= t[(l, j)];
            }
        }
    }
    let rhs = CMatrix::from_fn(m * n, 1, |r, _| z[(r % m, r / m)]);
    let x = k.lu().solve(&rhs).expect("nonsingular Kronecker system");
    CMatrix::from_fn(m, n, |i, j| x[(j * m + i, 0)])
}

/// `‖(I - P_B) A‖₂` for orthonormal `a` and `b`: the sine of the largest
/// principal angle from span(a) into span(b).
pub fn sin_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    spectral_norm(&(a - b * (b.adjoint() * a)))
}
