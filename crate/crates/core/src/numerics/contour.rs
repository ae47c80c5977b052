//! Resolvent contour integrals `(1/2πi) ∮ (z - c)^k (z - N)⁻¹ dz`.
//!
//! Circles use the trapezoidal rule, which converges geometrically for the
//! analytic integrand; the node count is raised above the requested minimum
//! until the geometric error bound `ρ^n` (with `ρ` the worst ratio of
//! eigenvalue distance to radius) drops below machine precision. Rectangle
//! edges use composite Gauss–Legendre panels refined until each panel is no
//! longer than its distance to the spectrum.

use std::f64::consts::PI;

use super::{c64, ensure_square, identity, solve, CMatrix, Complex64};
use crate::error::{KreinError, Result};

const GL_ORDER: usize = 16;
const MAX_NODES: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let m = order;
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m <= 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn resolvent(n: &CMatrix, z: Complex64) -> Result<CMatrix> {
    let dim = n.nrows();
    let shifted = identity(dim) * z - n;
    solve(&shifted, &identity(dim))
}

fn check_boundary<F: Fn(Complex64) -> f64>(
    eigs: &[Complex64],
    distance: F,
    guard: f64,
) -> Result<()> {
    let mut gap = f64::INFINITY;
    let mut offending = Vec::new();
    for &e in eigs {
        let d = distance(e);
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

/// Node count for the trapezoidal rule on `circle` given the spectrum.
pub fn adaptive_circle_nodes(eigs: &[Complex64], circle: &Circle, minimum: usize) -> usize {
    let rho = eigs
        .iter()
        .map(|&e| {
            let d = (e - circle.center).norm();
            if d < circle.radius {
                d / circle.radius
            } else {
                circle.radius / d
            }
        })
        .fold(0.0, f64::max);
    let needed = if rho <= 0.0 {
        0
    } else if rho >= 1.0 {
        MAX_NODES
    } else {
        ((1e-17f64).ln() / rho.ln()).ceil() as usize + 8
    };
    let n = minimum.max(needed).min(MAX_NODES).max(8);
    n.div_ceil(8) * 8
}

/// Trapezoidal rule on the circle with exactly `nodes` points.
pub fn circle_quadrature(n: &CMatrix, circle: &Circle, k: u32, nodes: usize) -> Result<CMatrix> {
    let dim = n.nrows();
    let mut acc = CMatrix::zeros(dim, dim);
    for j in 0..nodes {
        let theta = 2.0 * PI * (j as f64 + 0.5) / nodes as f64;
        let w = Complex64::from_polar(circle.radius, theta);
        let z = circle.center + w;
        // (1/2πi) (z-c)^k dz with dz = i w dθ and dθ = 2π / nodes
        let weight = w.powu(k + 1) / nodes as f64;
        acc += resolvent(n, z)? * weight;
    }
    Ok(acc)
}

/// `(1/2πi) ∮ (z - center)^k (z - N)⁻¹ dz` over a circle.
///
/// `nodes` is the minimum node count; `guard` is the smallest admissible
/// distance between the circle and the spectrum.
pub fn contour_integral_resolvent(
    n: &CMatrix,
    circle: Circle,
    k: u32,
    nodes: usize,
    guard: f64,
) -> Result<CMatrix> {
    ensure_square(n)?;
    let eigs = super::eigenvalues(n)?;
    check_boundary(&eigs, |e| circle.boundary_distance(e), guard)?;
    let count = adaptive_circle_nodes(&eigs, &circle, nodes);
    circle_quadrature(n, &circle, k, count)
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Splits the segment `[a, b]` into panels no longer than their distance to
/// the spectrum, starting from `initial` equal panels.
fn refine_panels(
    a: Complex64,
    b: Complex64,
    eigs: &[Complex64],
    initial: usize,
) -> Vec<(Complex64, Complex64)> {
    let mut stack: Vec<(Complex64, Complex64)> = (0..initial)
        .rev()
        .map(|i| {
            let s = a + (b - a) * (i as f64 / initial as f64);
            let e = a + (b - a) * ((i + 1) as f64 / initial as f64);
            (s, e)
        })
        .collect();
    let mut out = Vec::new();
    while let Some((s, e)) = stack.pop() {
        let len = (e - s).norm();
        let dist = eigs
            .iter()
            .map(|&z| segment_distance(s, e, z))
            .fold(f64::INFINITY, f64::min);
        if len <= dist || out.len() + stack.len() > MAX_NODES / GL_ORDER {
            out.push((s, e));
        } else {
            let mid = (s + e) * 0.5;
            stack.push((mid, e));
            stack.push((s, mid));
        }
    }
    out
}

/// Counterclockwise contour integral of the resolvent over the boundary of
/// the rectangle `[x0, x1] x [y0, y1]`, with at least `nodes` points in total.
/// Returns the integral and the node count used.
pub fn rectangle_quadrature(
    n: &CMatrix,
    corners: (f64, f64, f64, f64),
    eigs: &[Complex64],
    nodes: usize,
) -> Result<(CMatrix, usize)> {
    let (x0, y0, x1, y1) = corners;
    let dim = n.nrows();
    let verts = [c64(x0, y0), c64(x1, y0), c64(x1, y1), c64(x0, y1)];
    let per_edge = nodes.div_ceil(4).div_ceil(GL_ORDER).max(1);
    let rule = gauss_legendre(GL_ORDER);
    let mut acc = CMatrix::zeros(dim, dim);
    let mut used = 0;
    for e in 0..4 {
        let a = verts[e];
        let b = verts[(e + 1) % 4];
        for (s, t) in refine_panels(a, b, eigs, per_edge) {
            let half = (t - s) * 0.5;
            let mid = (s + t) * 0.5;
            for &(x, w) in &rule {
                let z = mid + half * x;
                // (1/2πi) dz
                let weight = half * w / c64(0.0, 2.0 * PI);
                acc += resolvent(n, z)? * weight;
                used += 1;
            }
        }
    }
    Ok((acc, used))
}
