//! Neural tangent kernels, empirical and analytic, and their composition
//! with boundary-integral operators.
//!
//! For a scalar-output network `h(y; theta)` on samples `y_1..y_n`, the
//! empirical tangent kernel is `K_ij = <dh(y_i)/dtheta, dh(y_j)/dtheta>`.
//! It is assembled layer by layer from the backward pass: if `B_l` holds the
//! per-sample sensitivities of the output to layer `l`'s preactivation and
//! `X_l` the per-sample inputs of that layer, the parameter Jacobian rows
//! are `outer(B_l[i], X_l[i])`, so
//!
//! ```text
//! K = sum_l (B_l B_l^T) .* (X_l X_l^T)   (+ B_l B_l^T for biased layers)
//! ```
//!
//! without materializing a single Jacobian. This works for any architecture
//! whose rows are per-sample independent, widths into the thousands
//! included.
//!
//! When the training loss reads the network through a boundary operator
//! (`L = ||A h - g||^2 / n`), the kernel that drives the residual dynamics
//! is the composed `N = A K A^T`; to first order in the parameter
//! displacement each gradient-descent step maps the residual by
//! `r -> (I - (2 eta / n) N) r`.
//!
//! For infinitely wide scaled (NTK-parameterized) bias-free ReLU
//! perceptrons the limit of `K` is closed-form. With unit-norm inputs and
//! `Sigma^0 = y_i . y_j`, the arc-cosine recursions
//!
//! ```text
//! Sigma^l     = sqrt(u v) (sqrt(1 - rho^2) + (pi - arccos rho) rho) / pi
//! Sigma-dot^l = (pi - arccos rho) / pi
//! ```
//!
//! (with `rho` the previous layer's correlation) build
//! `Theta = sum_{l=1}^{L+1} Sigma^{l-1} prod_{l'=l}^{L+1} Sigma-dot^{l'}`,
//! the analytic tangent kernel; its diagonal is exactly `L + 1`.

use crate::network::{Activation, Arch, Network, Parameterization};
use crate::quadrature::OperatorMatrix;
use crate::solver::{train, TrainConfig};
use crate::SeedStream;
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum NtkError {
    /// Kernel analysis is defined for scalar-output networks.
    MultiOutput { outputs: usize },
    /// Composition requires a real operator.
    ComplexOperator,
    /// The analytic kernel assumes unit-norm inputs.
    NonUnitInput { index: usize, norm: f64 },
    /// The analytic kernel covers scaled bias-free ReLU perceptrons.
    TheoryNeedsScaledRelu,
    /// Study configuration problems (empty widths, unsorted checkpoints...).
    BadStudy(&'static str),
}

impl fmt::Display for NtkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NtkError::MultiOutput { outputs } => {
                write!(f, "kernel analysis needs a scalar output, network has {outputs}")
            }
            NtkError::ComplexOperator => write!(f, "kernel composition needs a real operator"),
            NtkError::NonUnitInput { index, norm } => {
                write!(f, "input row {index} has norm {norm}, expected 1")
            }
            NtkError::TheoryNeedsScaledRelu => write!(
                f,
                "the analytic kernel is for ReLU perceptrons in the scaled parameterization"
            ),
            NtkError::BadStudy(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for NtkError {}

/// Empirical tangent kernel `K_ij = <dh(y_i)/dtheta, dh(y_j)/dtheta>` at the
/// network's current parameters.
pub fn empirical_kernel(net: &Network, inputs: &DMatrix<f64>) -> Result<DMatrix<f64>, NtkError> {
    if net.output_dim != 1 {
        return Err(NtkError::MultiOutput { outputs: net.output_dim });
    }
    let n = inputs.nrows();
    let pass = net.forward(inputs);
    let ones = DMatrix::from_element(n, 1, 1.0);
    let grads = net.backward(&pass, &ones);
    let mut k = DMatrix::zeros(n, n);
    for (l, b) in grads.layer_sensitivities.iter().enumerate() {
        let bb = b * b.transpose();
        let x = &pass.inputs[l];
        let xx = x * x.transpose();
        for j in 0..n {
            for i in 0..n {
                k[(i, j)] += bb[(i, j)] * xx[(i, j)];
            }
        }
        if net.biases[l].is_some() {
            k += &bb;
        }
    }
    Ok(k)
}

/// Tangent kernel of the composed map `y -> A h(y)`: `N = A K A^T`.
pub fn composed_empirical_kernel(
    net: &Network,
    inputs: &DMatrix<f64>,
    op: &OperatorMatrix,
) -> Result<DMatrix<f64>, NtkError> {
    if op.is_complex() {
        return Err(NtkError::ComplexOperator);
    }
    let k = empirical_kernel(net, inputs)?;
    Ok(&op.re * k * op.re.transpose())
}

fn unit_rows(inputs: &DMatrix<f64>, normalize: bool) -> Result<DMatrix<f64>, NtkError> {
    let mut y = inputs.clone();
    for i in 0..y.nrows() {
        let norm = y.row(i).norm();
        if normalize {
            if norm == 0.0 {
                return Err(NtkError::NonUnitInput { index: i, norm });
            }
            let inv = 1.0 / norm;
            y.row_mut(i).scale_mut(inv);
        } else if (norm - 1.0).abs() > 1e-12 {
            return Err(NtkError::NonUnitInput { index: i, norm });
        }
    }
    Ok(y)
}

/// Closed-form infinite-width tangent kernel of a scaled bias-free ReLU
/// perceptron with `hidden_layers` hidden layers, on unit-norm inputs
/// (`normalize` projects rows onto the sphere first).
pub fn analytic_theta(
    inputs: &DMatrix<f64>,
    hidden_layers: usize,
    normalize: bool,
) -> Result<DMatrix<f64>, NtkError> {
    let y = unit_rows(inputs, normalize)?;
    let n = y.nrows();
    let mut sigma = &y * y.transpose();
    let mut theta = sigma.clone();
    for _ in 0..hidden_layers {
        let mut next = DMatrix::zeros(n, n);
        let mut dot = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let u = sigma[(i, i)];
                let v = sigma[(j, j)];
                let rho = (sigma[(i, j)] / (u * v).sqrt()).clamp(-1.0, 1.0);
                let acos = rho.acos();
                next[(i, j)] =
                    (u * v).sqrt() * ((1.0 - rho * rho).sqrt() + (PI - acos) * rho) / PI;
                dot[(i, j)] = (PI - acos) / PI;
            }
        }
        for j in 0..n {
            for i in 0..n {
                theta[(i, j)] = theta[(i, j)] * dot[(i, j)] + next[(i, j)];
            }
        }
        sigma = next;
    }
    Ok(theta)
}

/// `A Theta A^T`, the analytic limit of the operator-composed kernel.
pub fn composed_analytic_theta(
    inputs: &DMatrix<f64>,
    hidden_layers: usize,
    normalize: bool,
    op: &OperatorMatrix,
) -> Result<DMatrix<f64>, NtkError> {
    if op.is_complex() {
        return Err(NtkError::ComplexOperator);
    }
    let theta = analytic_theta(inputs, hidden_layers, normalize)?;
    Ok(&op.re * theta * op.re.transpose())
}

fn check_theory_net(net: &Network) -> Result<usize, NtkError> {
    match (net.arch, net.activation, net.parameterization) {
        (Arch::Mlp { hidden_layers, .. }, Activation::Relu, Parameterization::Ntk) => {
            Ok(hidden_layers)
        }
        _ => Err(NtkError::TheoryNeedsScaledRelu),
    }
}

/// Deviation of one freshly initialized network's kernel from the analytic
/// limit, in the entrywise max norm. `op` switches both sides to the
/// composed kernel.
pub fn deviation_from_theory(
    net: &Network,
    inputs: &DMatrix<f64>,
    op: Option<&OperatorMatrix>,
) -> Result<f64, NtkError> {
    let depth = check_theory_net(net)?;
    let (emp, theory) = match op {
        None => (
            empirical_kernel(net, inputs)?,
            analytic_theta(inputs, depth, false)?,
        ),
        Some(a) => (
            composed_empirical_kernel(net, inputs, a)?,
            composed_analytic_theta(inputs, depth, false, a)?,
        ),
    };
    Ok((emp - theory).abs().max())
}

#[derive(Clone, Debug)]
pub struct KernelDeviation {
    pub width: usize,
    pub deviations: Vec<f64>,
    pub median: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Initialization study: how far the finite-width kernel sits from its
/// infinite-width limit, per width, over fresh random initializations.
pub fn width_deviation_study(
    widths: &[usize],
    trials: usize,
    hidden_layers: usize,
    inputs: &DMatrix<f64>,
    op: Option<&OperatorMatrix>,
    rng: &mut SeedStream,
) -> Result<Vec<KernelDeviation>, NtkError> {
    if widths.is_empty() || trials == 0 {
        return Err(NtkError::BadStudy("need at least one width and one trial"));
    }
    let mut out = Vec::with_capacity(widths.len());
    for &width in widths {
        let mut deviations = Vec::with_capacity(trials);
        for _ in 0..trials {
            let net = Network::new(
                Arch::Mlp { hidden_layers, width },
                Activation::Relu,
                Parameterization::Ntk,
                inputs.ncols(),
                1,
                rng,
            )
            .expect("valid study architecture");
            deviations.push(deviation_from_theory(&net, inputs, op)?);
        }
        let median = median(&deviations);
        out.push(KernelDeviation { width, deviations, median });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DriftSample {
    pub epoch: usize,
    /// `max|N_t - N_0| / max|N_0|`.
    pub relative_drift: f64,
}

#[derive(Clone, Debug)]
pub struct DriftCurve {
    pub width: usize,
    pub samples: Vec<DriftSample>,
}

/// Training study: how much the composed kernel moves during plain gradient
/// descent, per width, at the given checkpoint epochs (checkpoint 0 is the
/// initialization and always drifts by zero).
pub fn kernel_drift_study(
    widths: &[usize],
    hidden_layers: usize,
    inputs: &DMatrix<f64>,
    op: &OperatorMatrix,
    target: &DMatrix<f64>,
    learning_rate: f64,
    checkpoints: &[usize],
    rng: &mut SeedStream,
) -> Result<Vec<DriftCurve>, NtkError> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NtkError::BadStudy("checkpoints must be strictly increasing"));
    }
    if op.is_complex() {
        return Err(NtkError::ComplexOperator);
    }
    let epochs = *checkpoints.last().unwrap();
    let mut out = Vec::with_capacity(widths.len());
    for &width in widths {
        let mut net = Network::new(
            Arch::Mlp { hidden_layers, width },
            Activation::Relu,
            Parameterization::Ntk,
            inputs.ncols(),
            1,
            rng,
        )
        .expect("valid study architecture");
        let mut cfg = TrainConfig::gradient_descent(epochs, learning_rate);
        cfg.record_every = 0;
        cfg.snapshot_epochs = checkpoints.to_vec();
        if !cfg.snapshot_epochs.contains(&0) {
            cfg.snapshot_epochs.insert(0, 0);
        }
        let result = train(&mut net, op, inputs, target, &cfg)
            .map_err(|_| NtkError::BadStudy("training shapes are inconsistent"))?;
        let base = composed_empirical_kernel(&result.snapshots[0].1, inputs, op)?;
        let base_scale = base.abs().max();
        let mut samples = Vec::new();
        for (epoch, snap) in &result.snapshots {
            let k = composed_empirical_kernel(snap, inputs, op)?;
            samples.push(DriftSample {
                epoch: *epoch,
                relative_drift: (k - &base).abs().max() / base_scale,
            });
        }
        out.push(DriftCurve { width, samples });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, make_curve, CurveSpec};
    use crate::kernels::PdeKind;
    use crate::quadrature::{assemble_boundary_operator, KrOrder, PotentialKind, TraceSide};
    use crate::solver::boundary_inputs;
    use nalgebra::SymmetricEigen;

    fn unit_circle_inputs(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, 2, |i, j| {
            let t = 2.0 * PI * i as f64 / n as f64;
            if j == 0 {
                t.cos()
            } else {
                t.sin()
            }
        })
    }

    fn dlp_interior_op(n: usize) -> OperatorMatrix {
        let geom = make_curve(&CurveSpec::Circle { radius: 1.0 }).unwrap();
        let grid = discretize(&geom, n).unwrap();
        assemble_boundary_operator(
            &PdeKind::Laplace2D,
            &grid,
            PotentialKind::Double,
            TraceSide::Interior,
            true,
            KrOrder::Six,
        )
        .unwrap()
    }

    /// Finite-difference Jacobian oracle: K = J J^T entry by entry.
    fn fd_kernel(net: &mut Network, inputs: &DMatrix<f64>) -> DMatrix<f64> {
        let n = inputs.nrows();
        let h = 1e-6;
        let mut jac: Vec<Vec<f64>> = vec![Vec::new(); n];
        for l in 0..net.weights.len() {
            for idx in 0..net.weights[l].len() {
                let orig = net.weights[l][idx];
                net.weights[l][idx] = orig + h;
                let up = net.predict(inputs);
                net.weights[l][idx] = orig - h;
                let dn = net.predict(inputs);
                net.weights[l][idx] = orig;
                for i in 0..n {
                    jac[i].push((up[(i, 0)] - dn[(i, 0)]) / (2.0 * h));
                }
            }
            if net.biases[l].is_some() {
                for idx in 0..net.biases[l].as_ref().unwrap().len() {
                    let orig = net.biases[l].as_ref().unwrap()[idx];
                    net.biases[l].as_mut().unwrap()[idx] = orig + h;
                    let up = net.predict(inputs);
                    net.biases[l].as_mut().unwrap()[idx] = orig - h;
                    let dn = net.predict(inputs);
                    net.biases[l].as_mut().unwrap()[idx] = orig;
                    for i in 0..n {
                        jac[i].push((up[(i, 0)] - dn[(i, 0)]) / (2.0 * h));
                    }
                }
            }
        }
        DMatrix::from_fn(n, n, |i, j| {
            jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum()
        })
    }

    #[test]
    fn empirical_kernel_matches_jacobian_oracle_mlp() {
        let mut rng = SeedStream::new(3);
        let mut net = Network::new(
            Arch::Mlp { hidden_layers: 2, width: 8 },
            Activation::Tanh,
            Parameterization::Standard,
            2,
            1,
            &mut rng,
        )
        .unwrap();
        let x = DMatrix::from_fn(5, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let k = empirical_kernel(&net, &x).unwrap();
        let k_fd = fd_kernel(&mut net, &x);
        let dev = (&k - &k_fd).abs().max();
        assert!(dev < 1e-7, "max deviation {dev}");
    }

    #[test]
    fn empirical_kernel_matches_jacobian_oracle_resnet() {
        let mut rng = SeedStream::new(5);
        let mut net = Network::new(
            Arch::ResNet { blocks: 2, width: 6 },
            Activation::Tanh,
            Parameterization::Standard,
            2,
            1,
            &mut rng,
        )
        .unwrap();
        let x = DMatrix::from_fn(4, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let k = empirical_kernel(&net, &x).unwrap();
        let k_fd = fd_kernel(&mut net, &x);
        let dev = (&k - &k_fd).abs().max();
        assert!(dev < 1e-7, "max deviation {dev}");
    }

    #[test]
    fn depth_zero_kernel_is_input_gram() {
        let mut rng = SeedStream::new(7);
        let net = Network::new(
            Arch::Mlp { hidden_layers: 0, width: 0 },
            Activation::Relu,
            Parameterization::Ntk,
            2,
            1,
            &mut rng,
        )
        .unwrap();
        let y = unit_circle_inputs(16);
        let k = empirical_kernel(&net, &y).unwrap();
        let gram = &y * y.transpose();
        assert!((&k - &gram).abs().max() < 1e-12);

        // Composed with an operator: exactly A (Y Y^T) A^T.
        let op = dlp_interior_op(16);
        let n = composed_empirical_kernel(&net, &y, &op).unwrap();
        let direct = &op.re * &gram * op.re.transpose();
        assert!((&n - &direct).abs().max() < 1e-12);
    }

    #[test]
    fn empirical_kernel_is_positive_semidefinite() {
        let mut rng = SeedStream::new(11);
        let net = Network::new(
            Arch::Mlp { hidden_layers: 3, width: 32 },
            Activation::Tanh,
            Parameterization::Standard,
            2,
            1,
            &mut rng,
        )
        .unwrap();
        let x = DMatrix::from_fn(16, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let k = empirical_kernel(&net, &x).unwrap();
        let eig = SymmetricEigen::new(k);
        let min = eig.eigenvalues.min();
        assert!(min > -1e-10, "minimum eigenvalue {min}");
    }

    #[test]
    fn theta_diagonal_is_depth_plus_one() {
        let y = unit_circle_inputs(8);
        for depth in [0usize, 1, 2, 5] {
            let theta = analytic_theta(&y, depth, false).unwrap();
            for i in 0..8 {
                assert!(
                    (theta[(i, i)] - (depth as f64 + 1.0)).abs() < 1e-12,
                    "depth {depth}: diagonal {}",
                    theta[(i, i)]
                );
            }
        }
    }

    #[test]
    fn theta_orthogonal_pair_first_layer_value() {
        // For y . y' = 0 and one hidden layer:
        // Theta = Sigma^0 * dot + Sigma^1 = 0 + 1/pi.
        let y = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let theta = analytic_theta(&y, 1, false).unwrap();
        assert!((theta[(0, 1)] - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn theta_requires_unit_inputs_unless_normalizing() {
        let y = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            analytic_theta(&y, 1, false),
            Err(NtkError::NonUnitInput { index: 0, .. })
        ));
        let a = analytic_theta(&y, 1, true).unwrap();
        let y_unit = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = analytic_theta(&y_unit, 1, false).unwrap();
        assert!((&a - &b).abs().max() < 1e-14);
    }

    #[test]
    fn arccosine_formulas_match_monte_carlo() {
        // The layer maps are Gaussian integrals:
        //   E[2 relu'(z1) relu'(z2)] = (pi - arccos rho) / pi
        //   E[2 relu(z1) relu(z2)]   = (sqrt(1-rho^2) + (pi - arccos rho) rho) / pi
        // for (z1, z2) standard bivariate normal with correlation rho.
        let mut rng = SeedStream::new(13);
        let samples = 10_000_000usize;
        let rhos = [-0.9, -0.3, 0.2, 0.7, 0.95];
        let mut acc_val = [0.0f64; 5];
        let mut acc_der = [0.0f64; 5];
        for _ in 0..samples {
            let z1 = rng.normal();
            let w = rng.normal();
            for (r, rho) in rhos.iter().enumerate() {
                let z2 = rho * z1 + (1.0 - rho * rho).sqrt() * w;
                if z1 > 0.0 && z2 > 0.0 {
                    acc_der[r] += 2.0;
                    acc_val[r] += 2.0 * z1 * z2;
                }
            }
        }
        for (r, rho) in rhos.iter().enumerate() {
            let mc_der = acc_der[r] / samples as f64;
            let mc_val = acc_val[r] / samples as f64;
            let acos = rho.acos();
            let exact_der = (PI - acos) / PI;
            let exact_val = ((1.0 - rho * rho).sqrt() + (PI - acos) * rho) / PI;
            assert!(
                (mc_der - exact_der).abs() < 3e-3,
                "rho {rho}: derivative integral {mc_der} vs {exact_der}"
            );
            assert!(
                (mc_val - exact_val).abs() < 3e-3,
                "rho {rho}: value integral {mc_val} vs {exact_val}"
            );
        }
    }

    #[test]
    fn finite_width_kernel_approaches_theta() {
        let y = unit_circle_inputs(8);
        let mut rng = SeedStream::new(17);
        let study =
            width_deviation_study(&[64, 256, 1024], 5, 2, &y, None, &mut rng).unwrap();
        assert!(
            study[0].median > study[1].median && study[1].median > study[2].median,
            "medians {:?} {:?} {:?}",
            study[0].median,
            study[1].median,
            study[2].median
        );
        // At width 1024 the kernel is close in absolute terms too (diagonal
        // scale is depth + 1 = 3).
        assert!(study[2].median < 0.5, "width-1024 median {}", study[2].median);
    }

    #[test]
    fn composed_deviation_scales_with_the_operator() {
        // Doubling A quadruples A K A^T - A Theta A^T exactly.
        let y = unit_circle_inputs(16);
        let op = dlp_interior_op(16);
        let mut doubled = op.clone();
        doubled.re *= 2.0;
        let mut rng = SeedStream::new(19);
        let net = Network::new(
            Arch::Mlp { hidden_layers: 2, width: 64 },
            Activation::Relu,
            Parameterization::Ntk,
            2,
            1,
            &mut rng,
        )
        .unwrap();
        let d1 = deviation_from_theory(&net, &y, Some(&op)).unwrap();
        let d2 = deviation_from_theory(&net, &y, Some(&doubled)).unwrap();
        assert!((d2 / d1 - 4.0).abs() < 1e-10, "ratio {}", d2 / d1);
    }

    #[test]
    fn composed_analytic_kernel_is_positive_definite() {
        let op = dlp_interior_op(64);
        let y = unit_circle_inputs(64);
        let n = composed_analytic_theta(&y, 2, false, &op).unwrap();
        let sym = SymmetricEigen::new((&n + n.transpose()) * 0.5);
        let min = sym.eigenvalues.min();
        let max = sym.eigenvalues.max();
        assert!(min > 1e-12 * max, "eigenvalue range [{min}, {max}]");
    }

    #[test]
    fn gradient_descent_follows_linearized_dynamics() {
        // Under the composed kernel N0 at initialization, the residual of
        // full-batch gradient descent should evolve like
        // r_{t+1} = (I - (2 eta / n) N0) r_t while the kernel barely moves.
        let n = 16usize;
        let geom = make_curve(&CurveSpec::Circle { radius: 1.0 }).unwrap();
        let grid = discretize(&geom, n).unwrap();
        let op = assemble_boundary_operator(
            &PdeKind::Laplace2D,
            &grid,
            PotentialKind::Double,
            TraceSide::Interior,
            true,
            KrOrder::Six,
        )
        .unwrap();
        let inputs = boundary_inputs(&grid);
        let params = grid.params.as_ref().unwrap();
        let target = DMatrix::from_iterator(
            n,
            1,
            params.iter().map(|t| 0.8 * t.cos() - 0.3 * (2.0 * t).sin()),
        );

        let mut rng = SeedStream::new(23);
        let mut net = Network::new(
            Arch::Mlp { hidden_layers: 2, width: 1024 },
            Activation::Relu,
            Parameterization::Ntk,
            2,
            1,
            &mut rng,
        )
        .unwrap();

        let n0 = composed_empirical_kernel(&net, &inputs, &op).unwrap();
        let r0 = op.apply_channels(&net.predict(&inputs)) - &target;

        let sym = SymmetricEigen::new((&n0 + n0.transpose()) * 0.5);
        let lam_max = sym.eigenvalues.max();
        let eta = 0.05 * n as f64 / lam_max;
        let steps = 200usize;

        // Linear prediction through the eigenbasis.
        let v = &sym.eigenvectors;
        let mut coeffs = v.transpose() * &r0;
        for (i, lam) in sym.eigenvalues.iter().enumerate() {
            let factor = (1.0 - 2.0 * eta / n as f64 * lam).powi(steps as i32);
            coeffs[(i, 0)] *= factor;
        }
        let r_pred = v * coeffs;

        let cfg = TrainConfig {
            record_every: 0,
            ..TrainConfig::gradient_descent(steps, eta)
        };
        let result = train(&mut net, &op, &inputs, &target, &cfg).unwrap();
        assert!(!result.diverged);
        let r_actual = op.apply_channels(&net.predict(&inputs)) - &target;

        let denom = r0.norm();
        let dev = (&r_actual - &r_pred).norm() / denom;
        assert!(dev < 0.1, "linearization deviation {dev}");
        assert!(
            r_actual.norm() < 0.8 * denom,
            "training should make visible progress"
        );
    }

    #[test]
    fn kernel_drift_shrinks_with_width() {
        let n = 16usize;
        let op = dlp_interior_op(n);
        let geom = make_curve(&CurveSpec::Circle { radius: 1.0 }).unwrap();
        let grid = discretize(&geom, n).unwrap();
        let inputs = boundary_inputs(&grid);
        let params = grid.params.as_ref().unwrap();
        let target = DMatrix::from_iterator(n, 1, params.iter().map(|t| t.cos()));

        // Width-independent learning rate from the analytic kernel.
        let theta_op = composed_analytic_theta(&inputs, 2, false, &op).unwrap();
        let lam_max = SymmetricEigen::new((&theta_op + theta_op.transpose()) * 0.5)
            .eigenvalues
            .max();
        let eta = 0.05 * n as f64 / lam_max;

        let mut rng = SeedStream::new(29);
        let curves = kernel_drift_study(
            &[64, 512],
            2,
            &inputs,
            &op,
            &target,
            eta,
            &[0, 10, 100],
            &mut rng,
        )
        .unwrap();
        let at = |c: &DriftCurve, epoch: usize| {
            c.samples.iter().find(|s| s.epoch == epoch).unwrap().relative_drift
        };
        assert_eq!(at(&curves[0], 0), 0.0);
        assert_eq!(at(&curves[1], 0), 0.0);
        let narrow = at(&curves[0], 100);
        let wide = at(&curves[1], 100);
        assert!(narrow > 0.0, "narrow net must drift");
        assert!(
            wide < 0.6 * narrow,
            "drift should shrink with width: {wide} vs {narrow}"
        );

        // Zero learning rate freezes the kernel exactly.
        let frozen = kernel_drift_study(
            &[64],
            2,
            &inputs,
            &op,
            &target,
            0.0,
            &[0, 10],
            &mut rng,
        )
        .unwrap();
        assert_eq!(at(&frozen[0], 10), 0.0);
    }

    #[test]
    fn multi_output_networks_are_rejected() {
        let mut rng = SeedStream::new(31);
        let net = Network::new(
            Arch::Mlp { hidden_layers: 1, width: 8 },
            Activation::Tanh,
            Parameterization::Standard,
            2,
            2,
            &mut rng,
        )
        .unwrap();
        let x = DMatrix::from_fn(4, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        assert!(matches!(
            empirical_kernel(&net, &x),
            Err(NtkError::MultiOutput { outputs: 2 })
        ));
    }

    #[test]
    fn median_of_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
