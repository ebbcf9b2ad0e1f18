//! Fundamental solutions of the supported PDE families, and the normal
//! derivatives the double-layer potential needs.
//!
//! The sign conventions follow the potential-theory setup used across this
//! crate: `G` solves `-L G = delta` for the respective operator `L` (so the
//! 2D Laplace kernel is `-(1/2pi) ln|x-y|`), and layer potentials carry a
//! leading minus sign (see [`crate::quadrature`]).
//!
//! Only the 2D Laplace and Helmholtz kernels participate in operator
//! assembly and experiments; the remaining catalog entries are pointwise
//! evaluators with their defining identities unit-tested.

pub mod bessel;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

/// PDE family a fundamental solution belongs to.
///
/// For the n-dimensional Laplace/Helmholtz entries (`dim >= 3`) the
/// normalizing factor is `1/((n-2) w_n)` where `w_n` denotes the surface
/// measure of the unit sphere in R^n (`4 pi` for n = 3), which is the choice
/// that makes `-Delta G = delta` hold; for n = 3 this is the familiar
/// `1/(4 pi |x-y|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PdeKind {
    Laplace2D,
    Helmholtz2D { k: f64 },
    /// Laplace in `dim >= 3` dimensions.
    LaplaceND { dim: usize },
    /// Helmholtz in `dim >= 3` dimensions, kernel `e^{ikr}/((n-2) w_n r^{n-2})`.
    HelmholtzND { dim: usize, k: f64 },
    /// Linear isotropic elastostatics with Lame constants `lambda`, `mu`.
    Navier2D { lambda: f64, mu: f64 },
    Navier3D { lambda: f64, mu: f64 },
    /// Steady Stokes flow with dynamic viscosity `mu`.
    Stokes2D { mu: f64 },
    Stokes3D { mu: f64 },
    Biharmonic2D,
}

impl PdeKind {
    /// Spatial dimension of the kernel's arguments.
    pub fn dim(&self) -> usize {
        match self {
            PdeKind::Laplace2D
            | PdeKind::Helmholtz2D { .. }
            | PdeKind::Navier2D { .. }
            | PdeKind::Stokes2D { .. }
            | PdeKind::Biharmonic2D => 2,
            PdeKind::Navier3D { .. } | PdeKind::Stokes3D { .. } => 3,
            PdeKind::LaplaceND { dim } | PdeKind::HelmholtzND { dim, .. } => *dim,
        }
    }

    /// True for the two kernels the operator-assembly layer accepts.
    pub fn assembly_supported(&self) -> bool {
        matches!(self, PdeKind::Laplace2D | PdeKind::Helmholtz2D { .. })
    }
}

/// Value of a fundamental solution at one point pair.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelValue {
    /// Scalar kernels (Laplace, Helmholtz, biharmonic). Real kernels have a
    /// zero imaginary part.
    Scalar(Complex64),
    /// Displacement Green tensor of the 2D Navier equations.
    Matrix2(Matrix2<f64>),
    /// Displacement Green tensor of the 3D Navier equations.
    Matrix3(Matrix3<f64>),
    /// Stokeslet: `velocity[(j, k)]` is the j-th velocity component for a
    /// unit point force along axis k; `pressure[k]` the matching pressure.
    Stokes2 {
        velocity: Matrix2<f64>,
        pressure: Vector2<f64>,
    },
    Stokes3 {
        velocity: Matrix3<f64>,
        pressure: Vector3<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelError {
    DimensionMismatch {
        expected: usize,
        got_x: usize,
        got_y: usize,
    },
    /// x == y where the kernel is singular.
    CoincidentPoints,
    /// Operation not defined for this PDE kind.
    Unsupported(&'static str),
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::DimensionMismatch {
                expected,
                got_x,
                got_y,
            } => write!(
                f,
                "kernel expects {expected}-dimensional points, got x: {got_x}, y: {got_y}"
            ),
            KernelError::CoincidentPoints => {
                write!(f, "kernel is singular at coincident points x == y")
            }
            KernelError::Unsupported(what) => write!(f, "{what}"),
        }
    }
}

impl std::error::Error for KernelError {}

/// Surface measure of the unit sphere in R^dim.
fn unit_sphere_area(dim: usize) -> f64 {
    // gamma(dim/2) by upward recursion from gamma(1) or gamma(1/2).
    let (mut g, mut a) = if dim % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = dim as f64 / 2.0;
    while a < target - 1e-9 {
        g *= a;
        a += 1.0;
    }
    2.0 * PI.powf(target) / g
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Fundamental solution `G(x, y)` of the given PDE.
///
/// Errors on coincident points (except the biharmonic kernel, whose
/// `r^2 ln r` value extends by 0) and on dimension mismatches.
pub fn greens(pde: &PdeKind, x: &[f64], y: &[f64]) -> Result<KernelValue, KernelError> {
    let dim = pde.dim();
    if x.len() != dim || y.len() != dim {
        return Err(KernelError::DimensionMismatch {
            expected: dim,
            got_x: x.len(),
            got_y: y.len(),
        });
    }
    let r = distance(x, y);
    if r == 0.0 {
        return match pde {
            PdeKind::Biharmonic2D => Ok(KernelValue::Scalar(Complex64::new(0.0, 0.0))),
            _ => Err(KernelError::CoincidentPoints),
        };
    }
    Ok(match *pde {
        PdeKind::Laplace2D => KernelValue::Scalar(Complex64::new(laplace_green(r), 0.0)),
        PdeKind::Helmholtz2D { k } => KernelValue::Scalar(helmholtz_green(k, r)),
        PdeKind::LaplaceND { dim } => {
            let c = 1.0 / ((dim as f64 - 2.0) * unit_sphere_area(dim));
            KernelValue::Scalar(Complex64::new(c / r.powi(dim as i32 - 2), 0.0))
        }
        PdeKind::HelmholtzND { dim, k } => {
            let c = 1.0 / ((dim as f64 - 2.0) * unit_sphere_area(dim));
            let phase = Complex64::new(0.0, k * r).exp();
            KernelValue::Scalar(phase * (c / r.powi(dim as i32 - 2)))
        }
        PdeKind::Navier2D { lambda, mu } => {
            let c = (lambda + 3.0 * mu) / (4.0 * PI * mu * (lambda + 2.0 * mu));
            let b = (lambda + mu) / (lambda + 3.0 * mu);
            let d = Vector2::new(x[0] - y[0], x[1] - y[1]);
            let g = Matrix2::identity() * (1.0 / r).ln() + (d * d.transpose()) * (b / (r * r));
            KernelValue::Matrix2(g * c)
        }
        PdeKind::Navier3D { lambda, mu } => {
            let c = (lambda + 3.0 * mu) / (8.0 * PI * mu * (lambda + 2.0 * mu));
            let b = (lambda + mu) / (lambda + 3.0 * mu);
            let d = Vector3::new(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
            let g = Matrix3::identity() / r + (d * d.transpose()) * (b / (r * r * r));
            KernelValue::Matrix3(g * c)
        }
        PdeKind::Stokes2D { mu } => {
            let d = Vector2::new(x[0] - y[0], x[1] - y[1]);
            let c = 1.0 / (4.0 * PI * mu);
            let velocity =
                (Matrix2::identity() * (1.0 / r).ln() + (d * d.transpose()) / (r * r)) * c;
            let pressure = d * (1.0 / (2.0 * PI * r * r));
            KernelValue::Stokes2 { velocity, pressure }
        }
        PdeKind::Stokes3D { mu } => {
            let d = Vector3::new(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
            let c = 1.0 / (8.0 * PI * mu);
            let velocity = (Matrix3::identity() / r + (d * d.transpose()) / (r * r * r)) * c;
            let pressure = d * (1.0 / (4.0 * PI * r * r * r));
            KernelValue::Stokes3 { velocity, pressure }
        }
        PdeKind::Biharmonic2D => KernelValue::Scalar(Complex64::new(r * r * r.ln() / (8.0 * PI), 0.0)),
    })
}

/// Normal derivative `dG/dn_y(x, y)` for the 2D Laplace/Helmholtz kernels,
/// the integrand of the double-layer potential. Other PDE kinds error.
pub fn greens_dn(
    pde: &PdeKind,
    x: &[f64],
    y: &[f64],
    n_y: &[f64],
) -> Result<Complex64, KernelError> {
    if !pde.assembly_supported() {
        return Err(KernelError::Unsupported(
            "normal-derivative kernel is only defined for the 2D Laplace and Helmholtz kernels",
        ));
    }
    if x.len() != 2 || y.len() != 2 || n_y.len() != 2 {
        return Err(KernelError::DimensionMismatch {
            expected: 2,
            got_x: x.len(),
            got_y: y.len(),
        });
    }
    let xv = Vector2::new(x[0], x[1]);
    let yv = Vector2::new(y[0], y[1]);
    if xv == yv {
        return Err(KernelError::CoincidentPoints);
    }
    let nv = Vector2::new(n_y[0], n_y[1]);
    Ok(match *pde {
        PdeKind::Laplace2D => Complex64::new(laplace_dn(xv, yv, nv), 0.0),
        PdeKind::Helmholtz2D { k } => helmholtz_dn(k, xv, yv, nv),
        _ => unreachable!(),
    })
}

// Fast 2D paths used by operator assembly.

/// `-(1/2pi) ln r`.
#[inline]
pub(crate) fn laplace_green(r: f64) -> f64 {
    -r.ln() / (2.0 * PI)
}

/// `(i/4) H0^1(k r)`.
#[inline]
pub(crate) fn helmholtz_green(k: f64, r: f64) -> Complex64 {
    Complex64::new(0.0, 0.25) * bessel::h0(k * r)
}

/// `dG/dn_y = -(1/2pi) n_y . (y - x) / |x-y|^2`.
#[inline]
pub(crate) fn laplace_dn(x: Vector2<f64>, y: Vector2<f64>, n_y: Vector2<f64>) -> f64 {
    let d = y - x;
    -n_y.dot(&d) / (2.0 * PI * d.norm_squared())
}

/// `dG/dn_y = -(ik/4) H1^1(k r) n_y . (y - x) / r`.
#[inline]
pub(crate) fn helmholtz_dn(
    k: f64,
    x: Vector2<f64>,
    y: Vector2<f64>,
    n_y: Vector2<f64>,
) -> Complex64 {
    let d = y - x;
    let r = d.norm();
    Complex64::new(0.0, -0.25 * k) * bessel::h1(k * r) * (n_y.dot(&d) / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: KernelValue) -> Complex64 {
        match v {
            KernelValue::Scalar(c) => c,
            other => panic!("expected scalar kernel value, got {other:?}"),
        }
    }

    #[test]
    fn laplace2d_matches_closed_form() {
        let g = scalar(greens(&PdeKind::Laplace2D, &[0.0, 0.0], &[1.0, 0.0]).unwrap());
        assert!(g.re.abs() < 1e-15 && g.im == 0.0);
        let g = scalar(greens(&PdeKind::Laplace2D, &[0.3, -0.2], &[1.1, 0.4]).unwrap());
        let r: f64 = (0.8f64 * 0.8 + 0.6 * 0.6).sqrt();
        assert!((g.re - (-(r.ln()) / (2.0 * PI))).abs() < 1e-15);
    }

    #[test]
    fn helmholtz2d_frozen_value_unit_distance() {
        // (i/4) H0^1(1) = -Y0(1)/4 + i J0(1)/4 with the frozen Bessel values.
        let g = scalar(greens(&PdeKind::Helmholtz2D { k: 1.0 }, &[0.0, 0.0], &[0.0, 1.0]).unwrap());
        assert!((g.re - (-0.088_256_964_215_677_0 / 4.0)).abs() < 1e-12);
        assert!((g.im - (0.765_197_686_557_966_6 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_error_except_biharmonic() {
        let p = [0.4, 0.7];
        assert_eq!(
            greens(&PdeKind::Laplace2D, &p, &p).unwrap_err(),
            KernelError::CoincidentPoints
        );
        assert_eq!(
            scalar(greens(&PdeKind::Biharmonic2D, &p, &p).unwrap()),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn dimension_checks() {
        assert!(matches!(
            greens(&PdeKind::Laplace2D, &[0.0], &[1.0, 0.0]),
            Err(KernelError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            greens(&PdeKind::LaplaceND { dim: 4 }, &[0.0; 4], &[1.0, 0.0, 0.0]),
            Err(KernelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn normal_derivative_constant_on_unit_circle() {
        // Viewed from any boundary point of the unit circle, dG/dn_y of the
        // Laplace kernel is -1/(4pi) at every other boundary point.
        let x = [1.0, 0.0];
        for i in 1..40 {
            let t = 2.0 * PI * i as f64 / 40.0;
            let y = [t.cos(), t.sin()];
            let v = greens_dn(&PdeKind::Laplace2D, &x, &y, &y).unwrap();
            assert!((v.re + 1.0 / (4.0 * PI)).abs() < 1e-12, "t = {t}");
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn gauss_identity_interior_point() {
        // Trapezoid over the unit circle: integral of dG/dn_y ds = -1 for x
        // inside (spectrally accurate for smooth integrands).
        let x = [0.3, 0.1];
        let n = 512;
        let mut acc = 0.0;
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let y = [t.cos(), t.sin()];
            acc += greens_dn(&PdeKind::Laplace2D, &x, &y, &y).unwrap().re * (2.0 * PI / n as f64);
        }
        assert!((acc + 1.0).abs() < 1e-10, "integral {acc}");
    }

    #[test]
    fn helmholtz_dn_reduces_to_laplace_as_k_vanishes() {
        let (x, y) = ([0.1, 0.2], [0.35, 0.65]);
        // |x-y| = 0.5; unit normal at y, arbitrary fixed direction.
        let n_y = [0.6, 0.8];
        let h = greens_dn(&PdeKind::Helmholtz2D { k: 1e-4 }, &x, &y, &n_y).unwrap();
        let l = greens_dn(&PdeKind::Laplace2D, &x, &y, &n_y).unwrap();
        assert!(((h.re / l.re) - 1.0).abs() < 1e-3);
        assert!(h.im.abs() < 1e-3 * l.re.abs());
    }

    #[test]
    fn greens_dn_unsupported_for_other_pdes() {
        let e = greens_dn(
            &PdeKind::Stokes2D { mu: 1.0 },
            &[0.0, 0.0],
            &[1.0, 0.0],
            &[1.0, 0.0],
        )
        .unwrap_err();
        assert!(matches!(e, KernelError::Unsupported(_)));
    }

    /// Five-point FD Laplacian in the y variable of the scalar kernel.
    fn fd_laplacian_y(pde: &PdeKind, x: &[f64; 2], y: &[f64; 2], h: f64) -> (Complex64, f64) {
        let g = |yy: [f64; 2]| scalar(greens(pde, x, &yy).unwrap());
        let c = g(*y);
        let xp = g([y[0] + h, y[1]]);
        let xm = g([y[0] - h, y[1]]);
        let yp = g([y[0], y[1] + h]);
        let ym = g([y[0], y[1] - h]);
        let lap = (xp + xm + yp + ym - 4.0 * c) / (h * h);
        // Scale for a relative residual: the size of the second-derivative terms.
        let scale = ((xp + xm - 2.0 * c).norm() + (yp + ym - 2.0 * c).norm()) / (h * h);
        (lap, scale)
    }

    #[test]
    fn laplace2d_is_harmonic_fd() {
        let x = [0.0, 0.0];
        for &y in &[[1.0, 0.3], [-0.4, 0.8], [0.9, -1.2]] {
            let (lap, scale) = fd_laplacian_y(&PdeKind::Laplace2D, &x, &y, 1e-4);
            assert!(lap.norm() / scale < 1e-4, "residual {}", lap.norm() / scale);
        }
    }

    #[test]
    fn helmholtz2d_satisfies_equation_fd() {
        for &k in &[1.0, 4.0] {
            let pde = PdeKind::Helmholtz2D { k };
            let x = [0.0, 0.0];
            for &y in &[[1.0, 0.3], [-0.4, 0.8]] {
                let (lap, scale) = fd_laplacian_y(&pde, &x, &y, 1e-4);
                let g = scalar(greens(&pde, &x, &y).unwrap());
                let residual = lap + g * (k * k);
                let rel = residual.norm() / (scale + k * k * g.norm());
                assert!(rel < 1e-3, "k = {k}: residual {rel}");
            }
        }
    }

    #[test]
    fn laplace3d_matches_quarter_pi_r_and_is_harmonic() {
        let pde = PdeKind::LaplaceND { dim: 3 };
        let x = [0.0, 0.0, 0.0];
        let y = [0.3, -0.4, 1.2];
        let r = distance(&x, &y);
        let g = scalar(greens(&pde, &x, &y).unwrap());
        assert!((g.re - 1.0 / (4.0 * PI * r)).abs() < 1e-14);
        // FD Laplacian over the three axes.
        let h = 1e-4;
        let gv = |yy: [f64; 3]| scalar(greens(&pde, &x, &yy).unwrap()).re;
        let mut lap = 0.0;
        let mut scale = 0.0;
        for ax in 0..3 {
            let mut p = y;
            let mut m = y;
            p[ax] += h;
            m[ax] -= h;
            let second = (gv(p) + gv(m) - 2.0 * g.re) / (h * h);
            lap += second;
            scale += second.abs();
        }
        assert!(lap.abs() / scale < 1e-4);
    }

    #[test]
    fn helmholtz_nd_reduces_to_laplace_nd_as_k_vanishes() {
        let x = [0.0, 0.0, 0.0, 0.0];
        let y = [0.4, 0.1, -0.3, 0.2];
        let h = scalar(greens(&PdeKind::HelmholtzND { dim: 4, k: 1e-6 }, &x, &y).unwrap());
        let l = scalar(greens(&PdeKind::LaplaceND { dim: 4 }, &x, &y).unwrap());
        assert!((h.re / l.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn navier_kernels_are_symmetric() {
        let (lambda, mu) = (1.3, 0.7);
        let g2 = greens(
            &PdeKind::Navier2D { lambda, mu },
            &[0.2, -0.5],
            &[1.0, 0.8],
        )
        .unwrap();
        if let KernelValue::Matrix2(m) = g2 {
            assert!((m - m.transpose()).norm() < 1e-15);
        } else {
            panic!("expected 2x2 matrix");
        }
        let g3 = greens(
            &PdeKind::Navier3D { lambda, mu },
            &[0.2, -0.5, 0.1],
            &[1.0, 0.8, -0.4],
        )
        .unwrap();
        if let KernelValue::Matrix3(m) = g3 {
            assert!((m - m.transpose()).norm() < 1e-15);
            // Swapping arguments only flips x - y, which the dyadic absorbs.
            let swapped = greens(
                &PdeKind::Navier3D { lambda, mu },
                &[1.0, 0.8, -0.4],
                &[0.2, -0.5, 0.1],
            )
            .unwrap();
            if let KernelValue::Matrix3(ms) = swapped {
                assert!((m - ms).norm() < 1e-15);
            }
        } else {
            panic!("expected 3x3 matrix");
        }
    }

    #[test]
    fn stokes_velocity_is_divergence_free_fd() {
        // d/dx_j v^k_j = 0 for each force direction k, by central differences.
        let h = 1e-5;
        let y2 = [0.1, -0.3];
        let v2 = |x: [f64; 2]| match greens(&PdeKind::Stokes2D { mu: 0.9 }, &x, &y2).unwrap() {
            KernelValue::Stokes2 { velocity, .. } => velocity,
            _ => unreachable!(),
        };
        let x = [1.0, 0.7];
        for k in 0..2 {
            let mut div = 0.0;
            for j in 0..2 {
                let mut p = x;
                let mut m = x;
                p[j] += h;
                m[j] -= h;
                div += (v2(p)[(j, k)] - v2(m)[(j, k)]) / (2.0 * h);
            }
            assert!(div.abs() < 1e-4, "2d k = {k}: div {div}");
        }

        let y3 = [0.1, -0.3, 0.2];
        let v3 = |x: [f64; 3]| match greens(&PdeKind::Stokes3D { mu: 1.4 }, &x, &y3).unwrap() {
            KernelValue::Stokes3 { velocity, .. } => velocity,
            _ => unreachable!(),
        };
        let x = [0.9, 0.6, -0.5];
        for k in 0..3 {
            let mut div = 0.0;
            for j in 0..3 {
                let mut p = x;
                let mut m = x;
                p[j] += h;
                m[j] -= h;
                div += (v3(p)[(j, k)] - v3(m)[(j, k)]) / (2.0 * h);
            }
            assert!(div.abs() < 1e-4, "3d k = {k}: div {div}");
        }
    }

    #[test]
    fn stokes_pressure_closed_form() {
        let (x, y) = ([1.0, 0.5], [0.2, -0.1]);
        if let KernelValue::Stokes2 { pressure, .. } =
            greens(&PdeKind::Stokes2D { mu: 2.0 }, &x, &y).unwrap()
        {
            let d = Vector2::new(x[0] - y[0], x[1] - y[1]);
            let expect = d / (2.0 * PI * d.norm_squared());
            assert!((pressure - expect).norm() < 1e-15);
        } else {
            panic!("expected stokeslet");
        }
    }

    #[test]
    fn biharmonic_kernel_satisfies_bilaplace_fd() {
        // Delta(r^2 ln r)/(8pi) = (4 ln r + 4)/(8pi), whose Laplacian vanishes.
        let x = [0.0, 0.0];
        let y = [0.8, 0.45];
        let r = distance(&x, &y);
        let h = 1e-3;
        let (lap, _) = fd_laplacian_y(&PdeKind::Biharmonic2D, &x, &[y[0], y[1]], h);
        let expect = (4.0 * r.ln() + 4.0) / (8.0 * PI);
        assert!((lap.re - expect).abs() / expect.abs() < 1e-4);
        // Laplacian of the Laplacian by nesting the same stencil.
        let lap_at = |yy: [f64; 2]| fd_laplacian_y(&PdeKind::Biharmonic2D, &x, &yy, h).0.re;
        let c = lap_at(y);
        let bil = (lap_at([y[0] + h, y[1]])
            + lap_at([y[0] - h, y[1]])
            + lap_at([y[0], y[1] + h])
            + lap_at([y[0], y[1] - h])
            - 4.0 * c)
            / (h * h);
        // Scale against the leading Laplacian magnitude / h^2.
        assert!(bil.abs() < 1e-3 * c.abs() / (h * h));
    }

    #[test]
    fn unit_sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
