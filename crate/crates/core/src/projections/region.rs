//! Borel-set descriptors: finite set expressions over closed disks and
//! half-open rectangles.

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::json::JsonComplex;
use crate::numerics::{c64, Complex64};

/// A subset of the complex plane.
///
/// Rectangles are `[x0, x1) × [y0, y1)`, so that adjacent rectangles tile
/// without overlap. Membership is exact for every complex number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BorelSetDescriptor {
    Empty,
    Plane,
    Disk {
        center: JsonComplex,
        radius: f64,
    },
    Rect {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    },
    Union {
        pieces: Vec<BorelSetDescriptor>,
    },
    Intersection {
        left: Box<BorelSetDescriptor>,
        right: Box<BorelSetDescriptor>,
    },
    Difference {
        left: Box<BorelSetDescriptor>,
        right: Box<BorelSetDescriptor>,
    },
    /// `{ z̄ : z ∈ inner }`.
    Conjugate {
        inner: Box<BorelSetDescriptor>,
    },
}

/// Contour primitive: the boundary of a disk or rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Disk { center: Complex64, radius: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Primitive {
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match *self {
            Primitive::Disk { center, radius } => ((z - center).norm() - radius).abs(),
            Primitive::Rect { x0, y0, x1, y1 } => {
                let edges = [
                    (c64(x0, y0), c64(x1, y0)),
                    (c64(x1, y0), c64(x1, y1)),
                    (c64(x1, y1), c64(x0, y1)),
                    (c64(x0, y1), c64(x0, y0)),
                ];
                edges
                    .iter()
                    .map(|&(a, b)| segment_distance(a, b, z))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

impl BorelSetDescriptor {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0)
            || !(center.re.is_finite() && center.im.is_finite())
        {
            return Err(KreinError::InvalidSpec(format!(
                "disk needs a finite center and positive radius, got {center}, {radius}"
            )));
        }
        Ok(BorelSetDescriptor::Disk {
            center: JsonComplex(center),
            radius,
        })
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let finite = [x0, y0, x1, y1].iter().all(|v| v.is_finite());
        if !finite || x0 >= x1 || y0 >= y1 {
            return Err(KreinError::InvalidSpec(format!(
                "rectangle needs x0 < x1 and y0 < y1, got [{x0}, {x1}) x [{y0}, {y1})"
            )));
        }
        Ok(BorelSetDescriptor::Rect { x0, y0, x1, y1 })
    }

    /// Union of the given pieces; the empty set for no pieces.
    pub fn from_pieces(pieces: Vec<BorelSetDescriptor>) -> Self {
        match pieces.len() {
            0 => BorelSetDescriptor::Empty,
            1 => pieces.into_iter().next().expect("one piece"),
            _ => BorelSetDescriptor::Union { pieces },
        }
    }

    pub fn union(self, other: BorelSetDescriptor) -> Self {
        BorelSetDescriptor::from_pieces(vec![self, other])
    }

    pub fn intersect(self, other: BorelSetDescriptor) -> Self {
        BorelSetDescriptor::Intersection {
            left: Box::new(self),
            right: Box::new(other),
        }
    }

    pub fn minus(self, other: BorelSetDescriptor) -> Self {
        BorelSetDescriptor::Difference {
            left: Box::new(self),
            right: Box::new(other),
        }
    }

    pub fn conjugate(self) -> Self {
        BorelSetDescriptor::Conjugate {
            inner: Box::new(self),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            BorelSetDescriptor::Empty => false,
            BorelSetDescriptor::Plane => true,
            BorelSetDescriptor::Disk { center, radius } => (z - center.0).norm() <= *radius,
            BorelSetDescriptor::Rect { x0, y0, x1, y1 } => {
                *x0 <= z.re && z.re < *x1 && *y0 <= z.im && z.im < *y1
            }
            BorelSetDescriptor::Union { pieces } => pieces.iter().any(|p| p.contains(z)),
            BorelSetDescriptor::Intersection { left, right } => {
                left.contains(z) && right.contains(z)
            }
            BorelSetDescriptor::Difference { left, right } => {
                left.contains(z) && !right.contains(z)
            }
            BorelSetDescriptor::Conjugate { inner } => inner.contains(z.conj()),
        }
    }

    /// Membership in the closure. Exact for primitives and unions; for
    /// intersections, differences and conjugates it tests the corresponding
    /// expression over closed primitives, which contains the closure.
    pub fn closure_contains(&self, z: Complex64) -> bool {
        match self {
            BorelSetDescriptor::Empty => false,
            BorelSetDescriptor::Plane => true,
            BorelSetDescriptor::Disk { center, radius } => (z - center.0).norm() <= *radius,
            BorelSetDescriptor::Rect { x0, y0, x1, y1 } => {
                *x0 <= z.re && z.re <= *x1 && *y0 <= z.im && z.im <= *y1
            }
            BorelSetDescriptor::Union { pieces } => pieces.iter().any(|p| p.closure_contains(z)),
            BorelSetDescriptor::Intersection { left, right } => {
                left.closure_contains(z) && right.closure_contains(z)
            }
            BorelSetDescriptor::Difference { left, .. } => left.closure_contains(z),
            BorelSetDescriptor::Conjugate { inner } => inner.closure_contains(z.conj()),
        }
    }

    /// Primitive boundaries, with conjugation pushed down to the primitives.
    pub fn primitives(&self) -> Vec<Primitive> {
        let mut out = Vec::new();
        self.collect_primitives(false, &mut out);
        out
    }

    fn collect_primitives(&self, conj: bool, out: &mut Vec<Primitive>) {
        match self {
            BorelSetDescriptor::Empty | BorelSetDescriptor::Plane => {}
            BorelSetDescriptor::Disk { center, radius } => out.push(Primitive::Disk {
                center: if conj { center.0.conj() } else { center.0 },
                radius: *radius,
            }),
            BorelSetDescriptor::Rect { x0, y0, x1, y1 } => out.push(if conj {
                Primitive::Rect {
                    x0: *x0,
                    y0: -*y1,
                    x1: *x1,
                    y1: -*y0,
                }
            } else {
                Primitive::Rect {
                    x0: *x0,
                    y0: *y0,
                    x1: *x1,
                    y1: *y1,
                }
            }),
            BorelSetDescriptor::Union { pieces } => {
                pieces.iter().for_each(|p| p.collect_primitives(conj, out))
            }
            BorelSetDescriptor::Intersection { left, right }
            | BorelSetDescriptor::Difference { left, right } => {
                left.collect_primitives(conj, out);
                right.collect_primitives(conj, out);
            }
            BorelSetDescriptor::Conjugate { inner } => inner.collect_primitives(!conj, out),
        }
    }

    /// Distance from `z` to the union of all primitive boundaries, which
    /// contains the topological boundary of the set.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        self.primitives()
            .iter()
            .map(|p| p.boundary_distance(z))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            BorelSetDescriptor::Empty
            | BorelSetDescriptor::Disk { .. }
            | BorelSetDescriptor::Rect { .. } => true,
            BorelSetDescriptor::Plane => false,
            BorelSetDescriptor::Union { pieces } => pieces.iter().all(Self::is_bounded),
            BorelSetDescriptor::Intersection { left, right } => {
                left.is_bounded() || right.is_bounded()
            }
            BorelSetDescriptor::Difference { left, .. } => left.is_bounded(),
            BorelSetDescriptor::Conjugate { inner } => inner.is_bounded(),
        }
    }

    /// Parses `cx,cy,r`.
    pub fn parse_disk(s: &str) -> Result<Self> {
        let v = parse_floats(s, 3)?;
        Self::disk(c64(v[0], v[1]), v[2])
    }

    /// Parses `x0,y0,x1,y1`.
    pub fn parse_rect(s: &str) -> Result<Self> {
        let v = parse_floats(s, 4)?;
        Self::rect(v[0], v[1], v[2], v[3])
    }
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(KreinError::InvalidSpec(format!(
            "expected {n} comma-separated numbers, got '{s}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangles_are_half_open() {
        let r = BorelSetDescriptor::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(r.contains(c64(0.0, 0.0)));
        assert!(!r.contains(c64(1.0, 0.5)));
        assert!(!r.contains(c64(0.5, 1.0)));
        assert!(r.closure_contains(c64(1.0, 1.0)));
    }

    #[test]
    fn disks_are_closed() {
        let d = BorelSetDescriptor::disk(c64(1.0, 0.0), 0.5).unwrap();
        assert!(d.contains(c64(1.5, 0.0)));
        assert!(!d.contains(c64(1.50001, 0.0)));
    }

    #[test]
    fn set_algebra() {
        let a = BorelSetDescriptor::disk(c64(0.0, 0.0), 1.0).unwrap();
        let b = BorelSetDescriptor::rect(0.0, -2.0, 2.0, 2.0).unwrap();
        let z = c64(0.5, 0.0);
        let w = c64(-0.5, 0.0);
        assert!(a.clone().intersect(b.clone()).contains(z));
        assert!(!a.clone().intersect(b.clone()).contains(w));
        assert!(a.clone().minus(b.clone()).contains(w));
        assert!(a.clone().union(b.clone()).contains(c64(1.5, 1.5)));
        let up = BorelSetDescriptor::disk(c64(0.0, 1.0), 0.5).unwrap();
        assert!(up.clone().conjugate().contains(c64(0.0, -1.0)));
        assert!(!up.conjugate().contains(c64(0.0, 1.0)));
    }

    #[test]
    fn conjugate_primitives_are_reflected() {
        let r = BorelSetDescriptor::rect(0.0, 1.0, 1.0, 2.0)
            .unwrap()
            .conjugate();
        assert_eq!(
            r.primitives(),
            vec![Primitive::Rect {
                x0: 0.0,
                y0: -2.0,
                x1: 1.0,
                y1: -1.0
            }]
        );
    }

    #[test]
    fn boundary_distances() {
        let d = BorelSetDescriptor::disk(c64(0.0, 0.0), 1.0).unwrap();
        assert!((d.boundary_distance(c64(0.25, 0.0)) - 0.75).abs() < 1e-15);
        let r = BorelSetDescriptor::rect(0.0, 0.0, 2.0, 2.0).unwrap();
        assert!((r.boundary_distance(c64(1.0, 0.5)) - 0.5).abs() < 1e-15);
        assert_eq!(
            BorelSetDescriptor::Plane.boundary_distance(c64(0.0, 0.0)),
            f64::INFINITY
        );
    }

    #[test]
    fn parsing_flags() {
        let d = BorelSetDescriptor::parse_disk("1,0,0.4").unwrap();
        assert!(d.contains(c64(1.2, 0.0)));
        assert!(BorelSetDescriptor::parse_disk("1,0").is_err());
        assert!(BorelSetDescriptor::parse_rect("0,0,-1,1").is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = BorelSetDescriptor::disk(c64(1.0, 2.0), 0.5)
            .unwrap()
            .union(BorelSetDescriptor::rect(0.0, 0.0, 1.0, 1.0).unwrap());
        let s = serde_json::to_string(&a).unwrap();
        let b: BorelSetDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
