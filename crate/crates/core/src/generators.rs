//! Seeded J-normal operators with a known inventory of spectral types.
//!
//! Operators are direct sums of blocks: definite eigenvalues on `±1` Gram
//! entries, and `diag(λ, μ)` or Jordan blocks `[[λ, 1], [0, λ]]` on the swap
//! Gram `[[0, 1], [1, 0]]`. Swap blocks are rotated into the canonical form
//! `diag(1, -1)` so that every space is `diag(I_p, -I_q)`; the result is then
//! optionally conjugated by a random J-unitary.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::json::JsonComplex;
use crate::krein::{KreinOperator, KreinSpace, SubspaceBasis};
use crate::numerics::{
    c64, condition_number, expm, identity, norm2, ordered_spectral_decomposition, CMatrix,
    Complex64,
};
use crate::spectral::SpectralType;
use crate::tolerance::ToleranceConfig;

/// Normality tolerance every generated operator must meet.
pub const GENERATOR_NORMALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conjugation {
    None,
    JUnitary { cond_bound: f64 },
}

/// Block inventory of a generated operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub signature: (usize, usize),
    /// `(λ, multiplicity)` on positive Gram entries.
    pub positive_type_eigs: Vec<(JsonComplex, usize)>,
    pub negative_type_eigs: Vec<(JsonComplex, usize)>,
    /// `diag(λ, μ)` on a swap Gram block.
    pub neutral_pairs: Vec<(JsonComplex, JsonComplex)>,
    /// Eigenvalues of 2x2 Jordan blocks on swap Gram blocks.
    pub neutral_jordan: Vec<JsonComplex>,
    pub conjugation: Conjugation,
    pub seed: u64,
}

/// Expected classification of one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub value: JsonComplex,
    pub expected: SpectralType,
    pub alg_mult: usize,
    pub geo_mult: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratedOperator {
    pub spec: GeneratorSpec,
    pub space: Arc<KreinSpace>,
    pub operator: KreinOperator,
    pub ground_truth: Vec<GroundTruth>,
    /// Block operator in canonical coordinates, before conjugation.
    pub block: CMatrix,
    /// `U` with `N = U⁻¹ B U`; the identity without conjugation.
    pub conjugator: CMatrix,
}

/// SplitMix64 step; derives independent per-trial seeds from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    // fill row by row so the stream order is independent of storage layout
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// The canonical Krein space `diag(I_p, -I_q)`. Canonical forms carry no
/// randomness; the seed is accepted for interface symmetry.
pub fn random_krein_space(p: usize, q: usize, _seed: u64) -> Result<KreinSpace> {
    if p + q == 0 {
        return Err(KreinError::InvalidSpec("p + q must be at least 1".into()));
    }
    Ok(KreinSpace::canonical(p, q))
}

/// `exp(sK)` for a random J-skew `K` normalized to `‖K‖₂ = 1`, with `s`
/// reduced until `cond(U) ≤ cond_bound`.
pub fn random_j_unitary(space: &KreinSpace, seed: u64, cond_bound: f64) -> Result<CMatrix> {
    if !(cond_bound >= 1.0) {
        return Err(KreinError::InvalidSpec(format!(
            "cond_bound must be at least 1, got {cond_bound}"
        )));
    }
    let mut r = rng(seed);
    let k = j_skew(space, &mut r)?;
    if k.norm() == 0.0 || cond_bound == 1.0 {
        return Ok(identity(space.dim()));
    }
    let mut s = cond_bound.ln().max(1.0);
    for _ in 0..200 {
        let u = expm(&(&k * c64(s, 0.0)));
        if condition_number(&u) <= cond_bound {
            return Ok(u);
        }
        s *= 0.75;
    }
    Ok(identity(space.dim()))
}

/// Random J-skew matrix `(K - K⁺)/2` with unit spectral norm.
fn j_skew(space: &KreinSpace, r: &mut ChaCha8Rng) -> Result<CMatrix> {
    let n = space.dim();
    let k = gaussian_matrix(r, n, n);
    let skew = (&k - space.adjoint(&k)?) * c64(0.5, 0.0);
    let nrm = norm2(&skew);
    Ok(if nrm > 0.0 {
        skew * c64(1.0 / nrm, 0.0)
    } else {
        skew
    })
}

/// `‖U⁺U - I‖_F`.
pub fn j_unitarity_residual(u: &CMatrix, space: &KreinSpace) -> Result<f64> {
    Ok((space.adjoint(u)? * u - identity(u.nrows())).norm())
}

/// One block of the direct sum, in block coordinates.
enum Block {
    Positive(Complex64),
    Negative(Complex64),
    Pair(Complex64, Complex64),
    Jordan(Complex64),
}

impl GeneratorSpec {
    /// All eigenvalues of the spec, one entry per distinct value.
    pub fn distinct_eigenvalues(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = Vec::new();
        v.extend(self.positive_type_eigs.iter().map(|(z, _)| z.0));
        v.extend(self.negative_type_eigs.iter().map(|(z, _)| z.0));
        for (a, b) in &self.neutral_pairs {
            v.push(a.0);
            v.push(b.0);
        }
        v.extend(self.neutral_jordan.iter().map(|z| z.0));
        v
    }

    pub fn dim(&self) -> usize {
        self.signature.0 + self.signature.1
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = self.signature;
        if p + q == 0 {
            return Err(KreinError::InvalidSpec("empty signature".into()));
        }
        let neutral = self.neutral_pairs.len() + self.neutral_jordan.len();
        let pos: usize = self.positive_type_eigs.iter().map(|e| e.1).sum();
        let neg: usize = self.negative_type_eigs.iter().map(|e| e.1).sum();
        if self
            .positive_type_eigs
            .iter()
            .chain(&self.negative_type_eigs)
            .any(|e| e.1 == 0)
        {
            return Err(KreinError::InvalidSpec(
                "multiplicities must be positive".into(),
            ));
        }
        if pos + neutral != p || neg + neutral != q {
            return Err(KreinError::InvalidSpec(format!(
                "blocks use inertia ({}, {}) but signature is ({p}, {q})",
                pos + neutral,
                neg + neutral
            )));
        }
        if let Conjugation::JUnitary { cond_bound } = self.conjugation {
            if !(cond_bound >= 1.0) {
                return Err(KreinError::InvalidSpec(format!(
                    "cond_bound must be at least 1, got {cond_bound}"
                )));
            }
        }
        let eigs = self.distinct_eigenvalues();
        if let Some(z) = eigs
            .iter()
            .find(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(KreinError::InvalidSpec(format!(
                "non-finite eigenvalue {z}"
            )));
        }
        let scale = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let min_sep = 10.0 * ToleranceConfig::default().cluster_tol * scale;
        for i in 0..eigs.len() {
            for j in (i + 1)..eigs.len() {
                if (eigs[i] - eigs[j]).norm() < min_sep {
                    return Err(KreinError::EigenvalueCollision(eigs[i]));
                }
            }
        }
        Ok(())
    }

    fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        for (z, m) in &self.positive_type_eigs {
            out.extend((0..*m).map(|_| Block::Positive(z.0)));
        }
        for (z, m) in &self.negative_type_eigs {
            out.extend((0..*m).map(|_| Block::Negative(z.0)));
        }
        for (a, b) in &self.neutral_pairs {
            out.push(Block::Pair(a.0, b.0));
        }
        for z in &self.neutral_jordan {
            out.push(Block::Jordan(z.0));
        }
        out
    }

    pub fn ground_truth(&self) -> Vec<GroundTruth> {
        let mut gt = Vec::new();
        for (z, m) in &self.positive_type_eigs {
            gt.push(GroundTruth {
                value: *z,
                expected: SpectralType::TwoSidedPositive,
                alg_mult: *m,
                geo_mult: *m,
            });
        }
        for (z, m) in &self.negative_type_eigs {
            gt.push(GroundTruth {
                value: *z,
                expected: SpectralType::TwoSidedNegative,
                alg_mult: *m,
                geo_mult: *m,
            });
        }
        for (a, b) in &self.neutral_pairs {
            for z in [a, b] {
                gt.push(GroundTruth {
                    value: *z,
                    expected: SpectralType::NeutralType,
                    alg_mult: 1,
                    geo_mult: 1,
                });
            }
        }
        for z in &self.neutral_jordan {
            gt.push(GroundTruth {
                value: *z,
                expected: SpectralType::NeutralType,
                alg_mult: 2,
                geo_mult: 1,
            });
        }
        gt.sort_by(|a, b| {
            a.value
                .0
                .re
                .total_cmp(&b.value.0.re)
                .then(a.value.0.im.total_cmp(&b.value.0.im))
        });
        gt
    }

    /// A random inventory of dimension `dim`: eigenvalues in the box
    /// `[-4, 4]²` pairwise at least 0.5 apart, about 40% of specs without
    /// neutral blocks, and J-unitary conjugation with the given bound.
    pub fn random(dim: usize, cond_bound: f64, seed: u64) -> Result<GeneratorSpec> {
        if dim == 0 {
            return Err(KreinError::InvalidSpec("dimension must be positive".into()));
        }
        let mut r = rng(seed);
        let mut used: Vec<Complex64> = Vec::new();
        let mut fresh = |r: &mut ChaCha8Rng| -> Complex64 {
            loop {
                let z = c64(r.random_range(-4.0..4.0), r.random_range(-4.0..4.0));
                if used.iter().all(|&u| (u - z).norm() >= 0.5) {
                    used.push(z);
                    return z;
                }
            }
        };

        let definite_only = r.random_bool(0.4);
        let max_neutral = dim / 2;
        let n_neutral = if definite_only || max_neutral == 0 {
            0
        } else {
            r.random_range(1..=max_neutral)
        };
        let mut neutral_pairs = Vec::new();
        let mut neutral_jordan = Vec::new();
        for _ in 0..n_neutral {
            if r.random_bool(0.5) {
                neutral_jordan.push(JsonComplex(fresh(&mut r)));
            } else {
                let a = fresh(&mut r);
                let b = fresh(&mut r);
                neutral_pairs.push((JsonComplex(a), JsonComplex(b)));
            }
        }
        let rest = dim - 2 * n_neutral;
        let n_pos = r.random_range(0..=rest);
        let n_neg = rest - n_pos;
        let mut group = |count: usize, r: &mut ChaCha8Rng| -> Vec<(JsonComplex, usize)> {
            let mut out = Vec::new();
            let mut left = count;
            while left > 0 {
                let m = if left >= 2 && r.random_bool(0.3) {
                    2
                } else {
                    1
                };
                out.push((JsonComplex(fresh(r)), m));
                left -= m;
            }
            out
        };
        let positive_type_eigs = group(n_pos, &mut r);
        let negative_type_eigs = group(n_neg, &mut r);
        let conjugation = if cond_bound > 1.0 {
            Conjugation::JUnitary { cond_bound }
        } else {
            Conjugation::None
        };
        Ok(GeneratorSpec {
            signature: (n_pos + n_neutral, n_neg + n_neutral),
            positive_type_eigs,
            negative_type_eigs,
            neutral_pairs,
            neutral_jordan,
            conjugation,
            seed: r.random(),
        })
    }
}

/// Block operator in canonical coordinates `diag(I_p, -I_q)`.
fn canonical_block(spec: &GeneratorSpec) -> CMatrix {
    let (p, q) = spec.signature;
    let n = p + q;
    let mut m = CMatrix::zeros(n, n);
    let (mut pi, mut ni) = (0, p);
    for block in spec.blocks() {
        match block {
            Block::Positive(z) => {
                m[(pi, pi)] = z;
                pi += 1;
            }
            Block::Negative(z) => {
                m[(ni, ni)] = z;
                ni += 1;
            }
            Block::Pair(a, b) => {
                place_swap_block(&mut m, pi, ni, [[a, c64(0.0, 0.0)], [c64(0.0, 0.0), b]])
            }
            Block::Jordan(a) => {
                place_swap_block(&mut m, pi, ni, [[a, c64(1.0, 0.0)], [c64(0.0, 0.0), a]])
            }
        }
        if matches!(block, Block::Pair(..) | Block::Jordan(_)) {
            pi += 1;
            ni += 1;
        }
    }
    m
}

/// Writes the swap-Gram block `local` at canonical indices `(pi, ni)`.
fn place_swap_block(m: &mut CMatrix, pi: usize, ni: usize, local: [[Complex64; 2]; 2]) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // C B C with C = [[1, 1], [1, -1]]/√2, so that C S C = diag(1, -1)
    let c = [[h, h], [h, -h]];
    let mut rotated = [[c64(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    rotated[i][j] += local[k][l] * c[i][k] * c[l][j];
                }
            }
        }
    }
    let idx = [pi, ni];
    for i in 0..2 {
        for j in 0..2 {
            m[(idx[i], idx[j])] = rotated[i][j];
        }
    }
}

/// Builds the operator described by `spec`, certified J-normal at
/// [`GENERATOR_NORMALITY_TOL`].
pub fn build_normal_with_types(spec: &GeneratorSpec) -> Result<GeneratedOperator> {
    spec.validate()?;
    let (p, q) = spec.signature;
    let space = Arc::new(random_krein_space(p, q, spec.seed)?);
    let block = canonical_block(spec);
    let conjugator = match spec.conjugation {
        Conjugation::None => identity(p + q),
        Conjugation::JUnitary { cond_bound } => random_j_unitary(&space, spec.seed, cond_bound)?,
    };
    let matrix = space.adjoint(&conjugator)? * &block * &conjugator;
    let cfg = ToleranceConfig {
        normality_tol: GENERATOR_NORMALITY_TOL,
        ..Default::default()
    };
    let operator = KreinOperator::new(matrix, Arc::clone(&space), &cfg)?;
    Ok(GeneratedOperator {
        spec: spec.clone(),
        space,
        operator,
        ground_truth: spec.ground_truth(),
        block,
        conjugator,
    })
}

impl GeneratedOperator {
    pub fn conjugator_condition(&self) -> f64 {
        condition_number(&self.conjugator)
    }

    /// Smallest distance between distinct eigenvalues of the inventory.
    pub fn separation(&self) -> f64 {
        let e = self.spec.distinct_eigenvalues();
        let mut best = f64::INFINITY;
        for i in 0..e.len() {
            for j in (i + 1)..e.len() {
                best = best.min((e[i] - e[j]).norm());
            }
        }
        best
    }
}

/// Structure-preserving perturbation `X` of a generated operator with
/// `‖X - N‖₂ ≤ δ`.
///
/// Block eigenvalues move by at most `δ / (2 cond(U))`, which bounds the
/// effect of the shift by `δ/2` after conjugation; the result is then
/// conjugated by `exp(tK)` with `t` halved until the total distance is at
/// most `δ`.
pub fn perturb_structured(
    gen: &GeneratedOperator,
    delta: f64,
    seed: u64,
) -> Result<GeneratedOperator> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(KreinError::InvalidSpec(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(gen.clone());
    }
    let mut r = rng(seed);
    let shift_bound = 0.5 * delta / gen.conjugator_condition().max(1.0);
    let shift = |z: &JsonComplex, r: &mut ChaCha8Rng| -> JsonComplex {
        let radius = shift_bound * r.random_range(0.0..1.0);
        let angle = r.random_range(0.0..std::f64::consts::TAU);
        JsonComplex(z.0 + Complex64::from_polar(radius, angle))
    };
    let mut spec = gen.spec.clone();
    for e in spec
        .positive_type_eigs
        .iter_mut()
        .chain(spec.negative_type_eigs.iter_mut())
    {
        e.0 = shift(&e.0, &mut r);
    }
    for (a, b) in spec.neutral_pairs.iter_mut() {
        *a = shift(a, &mut r);
        *b = shift(b, &mut r);
    }
    for z in spec.neutral_jordan.iter_mut() {
        *z = shift(z, &mut r);
    }

    let space = Arc::clone(&gen.space);
    let block = canonical_block(&spec);
    let shifted = space.adjoint(&gen.conjugator)? * &block * &gen.conjugator;
    let k = j_skew(&space, &mut r)?;
    let base = gen.operator.matrix();
    let room = (delta - norm2(&(&shifted - base))).max(0.0);
    let mut t = room / (4.0 * norm2(&shifted).max(1.0));
    let mut chosen = (identity(space.dim()), shifted.clone());
    for _ in 0..60 {
        let v = expm(&(&k * c64(t, 0.0)));
        let x = space.adjoint(&v)? * &shifted * &v;
        if norm2(&(&x - base)) <= delta {
            chosen = (v, x);
            break;
        }
        t *= 0.5;
    }
    let (v, matrix) = chosen;
    let cfg = ToleranceConfig {
        normality_tol: GENERATOR_NORMALITY_TOL,
        ..Default::default()
    };
    let operator = KreinOperator::new(matrix, Arc::clone(&space), &cfg)?;
    Ok(GeneratedOperator {
        ground_truth: spec.ground_truth(),
        spec,
        space,
        operator,
        block,
        conjugator: &gen.conjugator * v,
    })
}

/// Random `N`-invariant subspace whose restricted spectrum lies in the given
/// eigenvalue clusters (identified by membership within `radius`).
///
/// The invariant subspace of a random nonempty subset of the clusters is
/// rotated by a random unitary, re-triangularized, and truncated to a random
/// leading Schur block, which is again invariant.
pub fn random_invariant_subspace(
    n: &CMatrix,
    clusters: &[Vec<Complex64>],
    radius: f64,
    seed: u64,
) -> Result<SubspaceBasis> {
    let dim = n.nrows();
    if clusters.is_empty() {
        return Ok(SubspaceBasis::zero(dim));
    }
    let mut r = rng(seed);
    let mut chosen: Vec<&Vec<Complex64>> = clusters.iter().filter(|_| r.random_bool(0.5)).collect();
    if chosen.is_empty() {
        chosen.push(&clusters[r.random_range(0..clusters.len())]);
    }
    let inside = |z: Complex64| {
        chosen
            .iter()
            .any(|c| c.iter().any(|&m| (m - z).norm() <= radius))
    };
    let outer = ordered_spectral_decomposition(n, inside, radius)?;
    let l = outer.leading_basis();
    let k = l.ncols();
    if k == 0 {
        return Ok(SubspaceBasis::zero(dim));
    }
    let restricted = l.adjoint() * n * &l;
    let w = gaussian_matrix(&mut r, k, k).qr().q();
    let rotated = w.adjoint() * restricted * &w;
    let picked: Vec<Complex64> = {
        let (_, t) = crate::numerics::schur_form(&rotated)?;
        (0..k).map(|i| t[(i, i)]).collect()
    };
    let anchor = picked[r.random_range(0..k)];
    let inner =
        ordered_spectral_decomposition(&rotated, |z| (z - anchor).norm() <= radius, radius)?;
    let j = r.random_range(1..=k);
    let m = &l * &w * inner.unitary.columns(0, j);
    Ok(SubspaceBasis::from_columns_unchecked(m))
}

/// Coefficients `S` (`m x m`), `T` (`n x n`) and right-hand side `Z` for
/// `S X - X T = Z`, with `σ(S)` in the disk of radius 1 about `3` and `σ(T)`
/// in the disk of radius 1 about `-3`.
pub fn random_sylvester_instance(m: usize, n: usize, seed: u64) -> (CMatrix, CMatrix, CMatrix) {
    let mut r = rng(seed);
    let coefficient = |k: usize, center: f64, r: &mut ChaCha8Rng| -> CMatrix {
        let mut t = gaussian_matrix(r, k, k) * c64(0.3, 0.0);
        for i in 0..k {
            for j in 0..i {
                t[(i, j)] = c64(0.0, 0.0);
            }
            let radius = r.random_range(0.0..1.0);
            let angle = r.random_range(0.0..std::f64::consts::TAU);
            t[(i, i)] = c64(center, 0.0) + Complex64::from_polar(radius, angle);
        }
        let q = gaussian_matrix(r, k, k).qr().q();
        &q * t * q.adjoint()
    };
    let s = coefficient(m, 3.0, &mut r);
    let t = coefficient(n, -3.0, &mut r);
    let z = gaussian_matrix(&mut r, m, n);
    (s, t, z)
}
