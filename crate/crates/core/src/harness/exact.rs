//! Closed-form reference fields.
//!
//! Each [`ExactSolution`] solves its governing equation everywhere away from
//! the listed singular points, so the same expression serves as Dirichlet
//! data on a boundary and as the ground truth on an evaluation grid.
//! [`BoundaryData`] extends the catalog with boundary-only functions that are
//! not PDE solutions (the non-smooth corner data, whose reference field comes
//! from the finite-difference oracle instead).

use crate::geometry::Point2;
use crate::kernels::bessel;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Distance below which a point counts as sitting on a singularity.
const SINGULAR_RADIUS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ExactError {
    /// The field is singular at the requested point.
    SingularPoint { x: f64, y: f64 },
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::SingularPoint { x, y } => {
                write!(f, "the reference field is singular at ({x}, {y})")
            }
        }
    }
}

impl std::error::Error for ExactError {}

/// Closed-form solutions of the Laplace or Helmholtz equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExactSolution {
    /// `e^{a x} sin(a y)`; harmonic for every `a`.
    HarmonicExpSin { a: f64 },
    /// `e^{i k (x cos(angle) + y sin(angle))}`; solves the Helmholtz
    /// equation with wavenumber `k`.
    PlaneWave { k: f64, angle: f64 },
    /// Outgoing cylindrical wave `H0^(1)(k |p - center|)`; solves the
    /// Helmholtz equation away from the center, where it is singular.
    HankelSource { k: f64, center: [f64; 2] },
    /// `x / (x^2 + y^2)`; harmonic away from the origin and decaying at
    /// infinity, the standard exterior-problem reference.
    InverseSquareX,
    /// `(x - cx)(y - cy) + (x - cx) + (y - cy) + 1`; harmonic. `center` is
    /// usually the vertex mean of the domain it is used on.
    BarycentricPoly { center: [f64; 2] },
}

impl ExactSolution {
    /// True when the field has a nonzero imaginary part.
    pub fn is_complex(&self) -> bool {
        matches!(
            self,
            ExactSolution::PlaneWave { .. } | ExactSolution::HankelSource { .. }
        )
    }

    /// The Helmholtz wavenumber this field solves for, or None for the
    /// harmonic entries.
    pub fn wavenumber(&self) -> Option<f64> {
        match self {
            ExactSolution::PlaneWave { k, .. } | ExactSolution::HankelSource { k, .. } => Some(*k),
            _ => None,
        }
    }

    /// Field value at `p`. Real solutions return a zero imaginary part.
    pub fn evaluate(&self, p: Point2) -> Result<Complex64, ExactError> {
        match *self {
            ExactSolution::HarmonicExpSin { a } => {
                Ok(Complex64::new((a * p.x).exp() * (a * p.y).sin(), 0.0))
            }
            ExactSolution::PlaneWave { k, angle } => {
                let phase = k * (p.x * angle.cos() + p.y * angle.sin());
                Ok(Complex64::new(phase.cos(), phase.sin()))
            }
            ExactSolution::HankelSource { k, center } => {
                let r = (p - Point2::new(center[0], center[1])).norm();
                if r < SINGULAR_RADIUS {
                    return Err(ExactError::SingularPoint { x: p.x, y: p.y });
                }
                Ok(Complex64::new(bessel::j0(k * r), bessel::y0(k * r)))
            }
            ExactSolution::InverseSquareX => {
                let r2 = p.norm_squared();
                if r2 < SINGULAR_RADIUS * SINGULAR_RADIUS {
                    return Err(ExactError::SingularPoint { x: p.x, y: p.y });
                }
                Ok(Complex64::new(p.x / r2, 0.0))
            }
            ExactSolution::BarycentricPoly { center } => {
                let dx = p.x - center[0];
                let dy = p.y - center[1];
                Ok(Complex64::new(dx * dy + dx + dy + 1.0, 0.0))
            }
        }
    }
}

/// Dirichlet data for a training problem: either the trace of a closed-form
/// solution, or a boundary-only function with no closed-form field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryData {
    Exact(ExactSolution),
    /// `2 - |x| - |y|`: continuous but not differentiable where an axis
    /// crosses the boundary.
    CornerRidge,
}

impl BoundaryData {
    pub fn is_complex(&self) -> bool {
        match self {
            BoundaryData::Exact(s) => s.is_complex(),
            BoundaryData::CornerRidge => false,
        }
    }

    pub fn evaluate(&self, p: Point2) -> Result<Complex64, ExactError> {
        match self {
            BoundaryData::Exact(s) => s.evaluate(p),
            BoundaryData::CornerRidge => Ok(Complex64::new(2.0 - p.x.abs() - p.y.abs(), 0.0)),
        }
    }
}
