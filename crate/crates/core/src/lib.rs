//! Boundary-integral neural PDE solver.
//!
//! A homogeneous linear PDE on a domain is solved by writing the solution as a
//! layer potential over the boundary,
//!
//! ```text
//! u(x) = -∫_∂Ω G(x, y) h(y) ds(y)          (single layer)
//! u(x) = -∫_∂Ω ∂G/∂n_y(x, y) h(y) ds(y)    (double layer)
//! ```
//!
//! where `G` is the fundamental solution of the PDE and the density `h` is a
//! neural network. Any such potential satisfies the PDE exactly in the domain,
//! so training only has to fit the boundary condition: the loss is the mean
//! squared mismatch between the potential's boundary trace (including the
//! double-layer jump term) and the boundary data.
//!
//! Crate layout:
//! - [`geometry`]: parametric curves, polygons, boundary quadrature grids
//! - [`kernels`]: fundamental solutions and their normal derivatives, plus the
//!   Bessel/Hankel functions they need
//! - [`quadrature`]: dense boundary/evaluation operator assembly, including
//!   singular-quadrature corrections
//! - [`network`]: small dense networks (MLP / residual) with hand-written
//!   reverse-mode gradients and Adam
//! - [`solver`]: boundary-loss training loops and field evaluation
//! - [`ntk`]: empirical and analytic neural tangent kernels composed with the
//!   boundary operator, and the width/drift studies
//! - [`harness`]: experiment configs, exact solutions, a finite-difference
//!   reference solver, runners and report emission

pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod network;
pub mod ntk;
pub mod quadrature;
pub mod solver;

mod rng;

pub use rng::SeedStream;
