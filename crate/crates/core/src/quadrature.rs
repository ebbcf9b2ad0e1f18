//! Dense boundary-integral operator assembly.
//!
//! The potentials carry a leading minus sign:
//!
//! ```text
//! S[h](x) = -∫ G(x,y) h(y) ds(y)
//! D[h](x) = -∫ dG/dn_y(x,y) h(y) ds(y)
//! ```
//!
//! Boundary operators discretize these with the grid from
//! [`crate::geometry::discretize`]:
//!
//! - smooth curves: periodic trapezoid. The single-layer kernel's log
//!   singularity is handled by Kapur-Rokhlin corrected weights (the node's
//!   own term is dropped and nearby weights are adjusted); the double-layer
//!   kernel is continuous along smooth curves with diagonal limit
//!   `+kappa(x)/(4pi)`, which becomes the diagonal entry.
//! - polygons (Laplace only): the kernel integral over each flat panel has a
//!   closed form - `∫ ln|x-y| ds` for the single layer and the signed
//!   subtended angle for the double layer - so every entry is the exact
//!   integral of the kernel against that panel's piecewise-constant density.
//!   Same-edge double-layer entries are exactly zero (collinear panels).
//!
//! The boundary trace of the double layer jumps across the boundary; with
//! the sign conventions above the interior trace is `(1/2 I + D)[h]` and the
//! exterior trace `(-1/2 I + D)[h]`, and `include_jump` folds the `±1/2`
//! into the assembled matrix. The single layer is continuous (no jump).
//!
//! Complex (Helmholtz) operators are stored as separate real/imaginary
//! parts, acting on two-channel stacked densities `(Re h, Im h)` exactly as
//! the real 2x2 block matrix `[[Re A, -Im A], [Im A, Re A]]`.

use crate::geometry::{BoundaryGeometry, Point2, QuadratureGrid};
use crate::kernels::{self, PdeKind};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Single,
    Double,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSide {
    Interior,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldType {
    Real,
    ComplexBlocks,
}

/// Kapur-Rokhlin correction order for the log-singular trapezoid rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KrOrder {
    Two,
    Six,
    Ten,
}

impl KrOrder {
    /// Correction weights applied (scaled by h) to the 1st..k-th neighbors
    /// on each side of the singular node, whose own weight is zero.
    pub fn gamma(&self) -> &'static [f64] {
        match self {
            KrOrder::Two => &[1.825748064736159, -1.325748064736159],
            KrOrder::Six => &[
                4.967362978287758,
                -16.20501504859126,
                25.85153761832639,
                -22.22599466791883,
                9.930104998037539,
                -1.817995878141594,
            ],
            KrOrder::Ten => &[
                7.832432020568779,
                -4.565161670374749e1,
                1.452168846354677e2,
                -2.901348302886379e2,
                3.870862162579900e2,
                -3.523821383570681e2,
                2.172421547519342e2,
                -8.707796087382991e1,
                2.053584266072635e1,
                -2.166984103403823,
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AssemblyError {
    /// Operator assembly only supports the 2D Laplace/Helmholtz kernels.
    UnsupportedPde(&'static str),
    /// Polygon assembly needs per-panel closed forms, available for Laplace.
    UnsupportedPolygonKernel(&'static str),
    /// Grid has fewer nodes than the correction bandwidth allows.
    GridTooSmallForOrder { nodes: usize, needed: usize },
    /// Evaluation target lies on the boundary curve.
    TargetOnBoundary { index: usize },
}

impl fmt::Display for AssemblyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssemblyError::UnsupportedPde(msg) | AssemblyError::UnsupportedPolygonKernel(msg) => {
                write!(f, "{msg}")
            }
            AssemblyError::GridTooSmallForOrder { nodes, needed } => write!(
                f,
                "grid has {nodes} nodes but the correction bandwidth needs at least {needed}"
            ),
            AssemblyError::TargetOnBoundary { index } => write!(
                f,
                "evaluation target {index} lies on the boundary; boundary traces come from the boundary operator"
            ),
        }
    }
}

impl std::error::Error for AssemblyError {}

/// Dense discretization of a layer-potential operator.
///
/// Rows index targets, columns index boundary nodes. `near_flags` is present
/// on evaluation operators and marks targets inside the near-boundary band
/// (3x the largest node spacing) where plain quadrature degrades.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub re: DMatrix<f64>,
    pub im: Option<DMatrix<f64>>,
    pub field: FieldType,
    pub potential: PotentialKind,
    pub side: Option<TraceSide>,
    pub jump_included: bool,
    pub near_flags: Option<Vec<bool>>,
}

impl OperatorMatrix {
    pub fn nrows(&self) -> usize {
        self.re.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.re.ncols()
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    /// Apply to a channel matrix (nodes x channels). Real operators act on
    /// each channel independently; complex operators require exactly two
    /// channels `(Re h, Im h)` and apply the 2x2 block structure.
    pub fn apply_channels(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(h.nrows(), self.ncols(), "density length mismatch");
        match &self.im {
            None => &self.re * h,
            Some(im) => {
                assert_eq!(h.ncols(), 2, "complex operator needs 2 channels");
                let h0 = h.column(0);
                let h1 = h.column(1);
                let mut out = DMatrix::zeros(self.nrows(), 2);
                out.set_column(0, &(&self.re * h0 - im * h1));
                out.set_column(1, &(im * h0 + &self.re * h1));
                out
            }
        }
    }

    /// Apply the transpose of the real block form; the adjoint used by
    /// gradient backpropagation through the operator.
    pub fn apply_transpose_channels(&self, r: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(r.nrows(), self.nrows(), "residual length mismatch");
        match &self.im {
            None => self.re.transpose() * r,
            Some(im) => {
                assert_eq!(r.ncols(), 2, "complex operator needs 2 channels");
                let r0 = r.column(0);
                let r1 = r.column(1);
                let ret = self.re.transpose();
                let imt = im.transpose();
                let mut out = DMatrix::zeros(self.ncols(), 2);
                out.set_column(0, &(&ret * r0 + &imt * r1));
                out.set_column(1, &(-&imt * r0 + ret * r1));
                out
            }
        }
    }

    /// Apply to a complex density vector.
    pub fn apply_complex(&self, h: &[Complex64]) -> Vec<Complex64> {
        let mut hm = DMatrix::zeros(h.len(), 2);
        for (i, v) in h.iter().enumerate() {
            hm[(i, 0)] = v.re;
            hm[(i, 1)] = v.im;
        }
        let out = self.apply_channels(&hm);
        (0..out.nrows())
            .map(|i| Complex64::new(out[(i, 0)], out[(i, 1)]))
            .collect()
    }

    /// Materialize the stacked real form: `A` for real operators,
    /// `[[Re A, -Im A], [Im A, Re A]]` for complex ones.
    pub fn as_real_block(&self) -> DMatrix<f64> {
        match &self.im {
            None => self.re.clone(),
            Some(im) => {
                let (m, n) = (self.nrows(), self.ncols());
                let mut b = DMatrix::zeros(2 * m, 2 * n);
                b.view_mut((0, 0), (m, n)).copy_from(&self.re);
                b.view_mut((0, n), (m, n)).copy_from(&(-im));
                b.view_mut((m, 0), (m, n)).copy_from(im);
                b.view_mut((m, n), (m, n)).copy_from(&self.re);
                b
            }
        }
    }
}

/// Trapezoid weights for a 2pi-periodic integrand with a log singularity at
/// node 0: the singular node's weight is zero and the `gamma` corrections
/// are added to the nearest neighbors on both sides (periodically).
pub fn kapur_rokhlin_weights(n: usize, order: KrOrder) -> Result<Vec<f64>, AssemblyError> {
    let gamma = order.gamma();
    if n < 2 * gamma.len() + 2 {
        return Err(AssemblyError::GridTooSmallForOrder {
            nodes: n,
            needed: 2 * gamma.len() + 2,
        });
    }
    let h = 2.0 * PI / n as f64;
    let mut w = vec![h; n];
    w[0] = 0.0;
    for (m, g) in gamma.iter().enumerate() {
        w[m + 1] += g * h;
        w[n - 1 - m] += g * h;
    }
    Ok(w)
}

/// Exact `∫_segment ln|x - y| ds(y)` over the segment from `p0` to `p1`.
///
/// Valid for any target, including targets on the segment itself (the log
/// singularity is integrable). Antiderivative of `ln sqrt(u^2 + d^2)` in the
/// arc-length coordinate u at perpendicular distance d.
pub fn segment_log_integral(p0: Point2, p1: Point2, x: Point2) -> f64 {
    let t = p1 - p0;
    let len = t.norm();
    let that = t / len;
    let w = x - p0;
    let a = w.dot(&that);
    let mut d = (w - that * a).norm();
    if d < len * 1e-14 {
        d = 0.0;
    }
    let f = |u: f64| -> f64 {
        if d == 0.0 {
            if u == 0.0 {
                0.0
            } else {
                u * u.abs().ln() - u
            }
        } else {
            0.5 * u * (u * u + d * d).ln() - u + d * (u / d).atan()
        }
    };
    f(len - a) - f(-a)
}

/// Signed angle subtended at `x` by the directed segment `p0 -> p1`, in
/// `(-pi, pi)`. Equals `∫_segment n_y.(y-x)/|y-x|^2 ds(y)` for a flat panel
/// with normal `(t_y, -t_x)`. Zero when `x` is collinear with the panel.
pub fn subtended_angle(p0: Point2, p1: Point2, x: Point2) -> f64 {
    let a = p0 - x;
    let b = p1 - x;
    let cross = a.x * b.y - a.y * b.x;
    if cross == 0.0 {
        return 0.0;
    }
    cross.atan2(a.dot(&b))
}

fn check_assembly_pde(pde: &PdeKind) -> Result<(), AssemblyError> {
    if pde.assembly_supported() {
        Ok(())
    } else {
        Err(AssemblyError::UnsupportedPde(
            "operator assembly supports the 2D Laplace and Helmholtz kernels only",
        ))
    }
}

/// Assemble the boundary-trace operator of a layer potential on its own grid.
///
/// `include_jump` adds the `±1/2 I` double-layer trace term (`+` interior,
/// `-` exterior); it is ignored for the single layer, whose trace is
/// continuous. `kr_order` picks the log-singularity correction used for the
/// single layer on smooth curves.
pub fn assemble_boundary_operator(
    pde: &PdeKind,
    grid: &QuadratureGrid,
    potential: PotentialKind,
    side: TraceSide,
    include_jump: bool,
    kr_order: KrOrder,
) -> Result<OperatorMatrix, AssemblyError> {
    check_assembly_pde(pde)?;
    let n = grid.len();
    let complex = matches!(pde, PdeKind::Helmholtz2D { .. });
    let mut re = DMatrix::zeros(n, n);
    let mut im = if complex {
        Some(DMatrix::zeros(n, n))
    } else {
        None
    };

    if grid.is_smooth() {
        match potential {
            PotentialKind::Single => {
                let gamma = kr_order.gamma();
                if n < 2 * gamma.len() + 2 {
                    return Err(AssemblyError::GridTooSmallForOrder {
                        nodes: n,
                        needed: 2 * gamma.len() + 2,
                    });
                }
                for j in 0..n {
                    for i in 0..n {
                        if i == j {
                            continue;
                        }
                        let ring = (i + n - j) % n;
                        let dist = ring.min(n - ring);
                        let corr = if dist <= gamma.len() {
                            1.0 + gamma[dist - 1]
                        } else {
                            1.0
                        };
                        let w = grid.weights[j] * corr;
                        match *pde {
                            PdeKind::Laplace2D => {
                                let r = (grid.points[i] - grid.points[j]).norm();
                                re[(i, j)] = -kernels::laplace_green(r) * w;
                            }
                            PdeKind::Helmholtz2D { k } => {
                                let r = (grid.points[i] - grid.points[j]).norm();
                                let g = kernels::helmholtz_green(k, r) * (-w);
                                re[(i, j)] = g.re;
                                im.as_mut().unwrap()[(i, j)] = g.im;
                            }
                            _ => unreachable!(),
                        }
                    }
                }
            }
            PotentialKind::Double => {
                let kappa = grid
                    .curvatures
                    .as_ref()
                    .expect("smooth grids carry curvatures");
                for j in 0..n {
                    for i in 0..n {
                        if i == j {
                            re[(i, j)] = kappa[i] * grid.weights[i] / (4.0 * PI);
                            continue;
                        }
                        match *pde {
                            PdeKind::Laplace2D => {
                                let v = kernels::laplace_dn(
                                    grid.points[i],
                                    grid.points[j],
                                    grid.normals[j],
                                );
                                re[(i, j)] = -v * grid.weights[j];
                            }
                            PdeKind::Helmholtz2D { k } => {
                                let v = kernels::helmholtz_dn(
                                    k,
                                    grid.points[i],
                                    grid.points[j],
                                    grid.normals[j],
                                ) * (-grid.weights[j]);
                                re[(i, j)] = v.re;
                                im.as_mut().unwrap()[(i, j)] = v.im;
                            }
                            _ => unreachable!(),
                        }
                    }
                }
            }
        }
    } else {
        // Polygon: exact per-panel closed forms, Laplace only.
        if complex {
            return Err(AssemblyError::UnsupportedPolygonKernel(
                "polygon operator assembly is implemented for the Laplace kernel only",
            ));
        }
        let panels = grid.panels.as_ref().expect("polygon grids carry panels");
        let edges = grid
            .edge_of_node
            .as_ref()
            .expect("polygon grids carry edge ids");
        for j in 0..n {
            let (p0, p1) = panels[j];
            for i in 0..n {
                re[(i, j)] = match potential {
                    // S kernel is +ln(r)/(2pi) after the leading minus sign.
                    PotentialKind::Single => {
                        segment_log_integral(p0, p1, grid.points[i]) / (2.0 * PI)
                    }
                    PotentialKind::Double => {
                        if edges[i] == edges[j] {
                            0.0
                        } else {
                            subtended_angle(p0, p1, grid.points[i]) / (2.0 * PI)
                        }
                    }
                };
            }
        }
    }

    let jump_included = include_jump && potential == PotentialKind::Double;
    if jump_included {
        let jump = match side {
            TraceSide::Interior => 0.5,
            TraceSide::Exterior => -0.5,
        };
        for i in 0..n {
            re[(i, i)] += jump;
        }
    }

    Ok(OperatorMatrix {
        re,
        im,
        field: if complex {
            FieldType::ComplexBlocks
        } else {
            FieldType::Real
        },
        potential,
        side: Some(side),
        jump_included,
        near_flags: None,
    })
}

/// Assemble the evaluation operator from boundary nodes to off-boundary
/// targets: plain trapezoid on smooth curves, exact panel integrals on
/// polygons. Targets on the boundary error; targets within 3x the largest
/// node spacing are flagged (`near_flags`) since plain quadrature degrades
/// there.
pub fn assemble_eval_operator(
    pde: &PdeKind,
    geom: &BoundaryGeometry,
    grid: &QuadratureGrid,
    targets: &[Point2],
    potential: PotentialKind,
) -> Result<OperatorMatrix, AssemblyError> {
    check_assembly_pde(pde)?;
    let n = grid.len();
    let m = targets.len();
    let complex = matches!(pde, PdeKind::Helmholtz2D { .. });
    if !grid.is_smooth() && complex {
        return Err(AssemblyError::UnsupportedPolygonKernel(
            "polygon operator assembly is implemented for the Laplace kernel only",
        ));
    }

    let near = 3.0 * grid.max_spacing();
    let mut flags = vec![false; m];
    for (idx, t) in targets.iter().enumerate() {
        let d = geom.distance_to_boundary(*t);
        if d <= 1e-12 {
            return Err(AssemblyError::TargetOnBoundary { index: idx });
        }
        flags[idx] = d < near;
    }

    let mut re = DMatrix::zeros(m, n);
    let mut im = if complex {
        Some(DMatrix::zeros(m, n))
    } else {
        None
    };

    if grid.is_smooth() {
        for j in 0..n {
            for (i, t) in targets.iter().enumerate() {
                match (potential, *pde) {
                    (PotentialKind::Single, PdeKind::Laplace2D) => {
                        let r = (t - grid.points[j]).norm();
                        re[(i, j)] = -kernels::laplace_green(r) * grid.weights[j];
                    }
                    (PotentialKind::Single, PdeKind::Helmholtz2D { k }) => {
                        let r = (t - grid.points[j]).norm();
                        let g = kernels::helmholtz_green(k, r) * (-grid.weights[j]);
                        re[(i, j)] = g.re;
                        im.as_mut().unwrap()[(i, j)] = g.im;
                    }
                    (PotentialKind::Double, PdeKind::Laplace2D) => {
                        let v = kernels::laplace_dn(*t, grid.points[j], grid.normals[j]);
                        re[(i, j)] = -v * grid.weights[j];
                    }
                    (PotentialKind::Double, PdeKind::Helmholtz2D { k }) => {
                        let v = kernels::helmholtz_dn(k, *t, grid.points[j], grid.normals[j])
                            * (-grid.weights[j]);
                        re[(i, j)] = v.re;
                        im.as_mut().unwrap()[(i, j)] = v.im;
                    }
                    _ => unreachable!(),
                }
            }
        }
    } else {
        let panels = grid.panels.as_ref().expect("polygon grids carry panels");
        for j in 0..n {
            let (p0, p1) = panels[j];
            for (i, t) in targets.iter().enumerate() {
                re[(i, j)] = match potential {
                    PotentialKind::Single => segment_log_integral(p0, p1, *t) / (2.0 * PI),
                    PotentialKind::Double => subtended_angle(p0, p1, *t) / (2.0 * PI),
                };
            }
        }
    }

    Ok(OperatorMatrix {
        re,
        im,
        field: if complex {
            FieldType::ComplexBlocks
        } else {
            FieldType::Real
        },
        potential,
        side: None,
        jump_included: false,
        near_flags: Some(flags),
    })
}
