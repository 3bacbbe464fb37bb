//! The harmonic triple on the unit equilateral triangle and error metrics for
//! estimated Cardy–Carleson fields.
//!
//! The triangle has vertices `(0,0)`, `(1,0)` and `(½, √3/2)`. Side C is the
//! bottom, A the right side and B the left side, matching the triangle domain
//! built in [`crate::geometry`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::Estimate;
use crate::geometry::{ArcName, SQRT3};

const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrianglePoint {
    x: f64,
    y: f64,
}

impl TrianglePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let h = linear_triple(x, y);
        if h.iter().all(|v| *v >= -TOL) && x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::OutsideTriangle { x, y })
        }
    }

    /// The point with barycentric weights `(a, b, c)` on the vertices
    /// `(0,0)`, `(1,0)`, `(½, √3/2)`.
    pub fn from_barycentric(a: f64, b: f64, c: f64) -> Result<Self> {
        let t = a + b + c;
        Self::new((b + c / 2.0) / t, c * SQRT3 / 2.0 / t)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn centroid() -> Self {
        Self { x: 0.5, y: SQRT3 / 6.0 }
    }
}

/// `(h_A, h_B, h_C)` extended linearly to the whole plane.
fn linear_triple(x: f64, y: f64) -> [f64; 3] {
    [1.0 - (x + y / SQRT3), x - y / SQRT3, 2.0 * y / SQRT3]
}

/// `(h_A, h_B, h_C)`: each vanishes on its own side and equals one at the
/// opposite vertex.
pub fn h_triple(p: TrianglePoint) -> (f64, f64, f64) {
    let [a, b, c] = linear_triple(p.x, p.y);
    (a, b, c)
}

/// The member of the triple that vanishes on side `which`.
pub fn h_component(which: ArcName, x: f64, y: f64) -> Result<f64> {
    let h = linear_triple(x, y);
    match which {
        ArcName::A => Ok(h[0]),
        ArcName::B => Ok(h[1]),
        ArcName::C => Ok(h[2]),
        other => Err(Error::InvalidInput(format!("the triangle has no side {other}"))),
    }
}

/// Euclidean distance from `(x, y)` to the triangle boundary; negative outside.
pub fn distance_to_boundary(x: f64, y: f64) -> f64 {
    let h = linear_triple(x, y);
    SQRT3 / 2.0 * h.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest discrete Cauchy–Riemann defect of `f` over square cells of side
/// `h` lying inside the triangle.
///
/// For a cell with corners `z, z+h, z+ih, z+h+ih` the defect compares the
/// difference quotients along the two diagonals.
pub fn cauchy_riemann_residual(f: impl Fn(f64, f64) -> Complex64, h: f64) -> f64 {
    assert!(h > 0.0, "grid spacing must be positive");
    let inside = |x: f64, y: f64| linear_triple(x, y).iter().all(|v| *v >= -TOL);
    let steps = (1.0 / h).floor() as usize;
    let mut worst: f64 = 0.0;
    for i in 0..=steps {
        for j in 0..=steps {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if !(inside(x, y) && inside(x + h, y) && inside(x, y + h) && inside(x + h, y + h)) {
                continue;
            }
            let d1 = (f(x + h, y + h) - f(x, y)) / Complex64::new(h, h);
            let d2 = (f(x, y + h) - f(x + h, y)) / Complex64::new(-h, h);
            worst = worst.max((d1 - d2).norm());
        }
    }
    worst
}

/// `h_A + (i/√3)(h_B − h_C)`.
pub fn analytic_combination(x: f64, y: f64) -> Complex64 {
    let [a, b, c] = linear_triple(x, y);
    Complex64::new(a, (b - c) / SQRT3)
}

/// Discrete analyticity residual of `h_A + (i/√3)(h_B − h_C)` on a grid of spacing `h`.
pub fn harmonic_triple_residual(h: f64) -> f64 {
    cauchy_riemann_residual(analytic_combination, h)
}

/// An estimated field value at a point of the unit triangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub x: f64,
    pub y: f64,
    pub estimate: Estimate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub count: usize,
    pub max_abs: f64,
    pub l2: f64,
    pub max_stderr: f64,
}

impl ErrorSummary {
    fn from_points<'a>(pts: impl Iterator<Item = (f64, &'a Estimate)>) -> Self {
        let mut s = Self::default();
        let mut sq = 0.0;
        for (err, e) in pts {
            s.count += 1;
            s.max_abs = s.max_abs.max(err.abs());
            s.max_stderr = s.max_stderr.max(e.stderr);
            sq += err * err;
        }
        if s.count > 0 {
            s.l2 = (sq / s.count as f64).sqrt();
        }
        s
    }
}

/// Errors of a field against one member of the harmonic triple.
///
/// `interior` covers points at distance at least `2/N` from the boundary; the
/// rest are summarised in `boundary`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldError {
    pub interior: ErrorSummary,
    pub boundary: ErrorSummary,
}

impl FieldError {
    pub fn max_abs(&self) -> f64 {
        self.interior.max_abs
    }

    pub fn l2(&self) -> f64 {
        self.interior.l2
    }

    pub fn max_stderr(&self) -> f64 {
        self.interior.max_stderr
    }
}

pub fn field_error(field: &[FieldPoint], which: ArcName, n_mesh: f64) -> Result<FieldError> {
    if field.is_empty() {
        return Err(Error::InvalidInput("empty field".into()));
    }
    let cut = 2.0 / n_mesh;
    let mut errs = Vec::with_capacity(field.len());
    for p in field {
        let err = p.estimate.mean - h_component(which, p.x, p.y)?;
        errs.push((distance_to_boundary(p.x, p.y) >= cut, err, &p.estimate));
    }
    Ok(FieldError {
        interior: ErrorSummary::from_points(errs.iter().filter(|e| e.0).map(|e| (e.1, e.2))),
        boundary: ErrorSummary::from_points(errs.iter().filter(|e| !e.0).map(|e| (e.1, e.2))),
    })
}
