//! Dense feed-forward networks with explicit forward/backward passes.
//!
//! Two architectures cover the solver's needs: plain multilayer perceptrons
//! and residual networks built from `z + sigma(W2 sigma(W1 z + b1) + b2)`
//! blocks between linear input/output projections.
//!
//! Two parameterizations:
//!
//! - `Standard`: `f = W g + b`, Kaiming-style init `W ~ N(0, gain/fan_in)`,
//!   zero biases. This is the everyday training setup.
//! - `Ntk`: bias-free with unit-variance weights and the activation scaled
//!   by `sqrt(c_sigma / width)`, so the forward map is
//!   `g0 = y, f_l = W_l g_{l-1}, g_l = sqrt(c_sigma/d_l) sigma(f_l)`,
//!   `h = W_{L+1} g_L`. Under this scaling the output at initialization has
//!   unit variance for unit inputs and the tangent kernel has a
//!   width-independent limit, which the kernel-analysis module relies on.
//!
//! `c_sigma = 1 / E[sigma(Z)^2]`, `Z ~ N(0,1)`, keeps layer activations at
//! unit mean square. It is closed-form for ReLU (2), ReLU^3 (2/15) and sine
//! (2/(1 - e^{-2})), and computed by quadrature for tanh/sigmoid.
//!
//! Batches are row-major: inputs are `(samples x input_dim)` matrices. The
//! backward pass returns, besides parameter gradients, the per-layer
//! sensitivity matrices `B_l = dL/df_l` and keeps the per-layer inputs in
//! the forward cache; together these give per-sample parameter Jacobians as
//! `outer(B_l[i], X_l[i])` without ever materializing them, which is how the
//! tangent-kernel module assembles Gram matrices at large widths.

use crate::SeedStream;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Relu,
    ReluCubed,
    Sigmoid,
    Tanh,
    Sine,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::ReluCubed => {
                let r = x.max(0.0);
                r * r * r
            }
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Sine => x.sin(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::ReluCubed => {
                if x > 0.0 {
                    3.0 * x * x
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-x).exp());
                s * (1.0 - s)
            }
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Sine => x.cos(),
        }
    }

    /// Normalization constant `c_sigma = 1 / E[sigma(Z)^2]` for `Z ~ N(0,1)`.
    pub fn gain(&self) -> f64 {
        match self {
            Activation::Relu => 2.0,
            // E[(Z_+^3)^2] = E[Z^6]/2 = 15/2.
            Activation::ReluCubed => 2.0 / 15.0,
            // E[sin^2 Z] = (1 - e^{-2}) / 2.
            Activation::Sine => 2.0 / (1.0 - (-2.0f64).exp()),
            Activation::Sigmoid => {
                static GAIN: OnceLock<f64> = OnceLock::new();
                *GAIN.get_or_init(|| 1.0 / gaussian_mean_square(|z| 1.0 / (1.0 + (-z).exp())))
            }
            Activation::Tanh => {
                static GAIN: OnceLock<f64> = OnceLock::new();
                *GAIN.get_or_init(|| 1.0 / gaussian_mean_square(f64::tanh))
            }
        }
    }
}

/// `E[f(Z)^2]` for standard normal `Z`, by composite Simpson on [-10, 10].
fn gaussian_mean_square<F: Fn(f64) -> f64>(f: F) -> f64 {
    let n = 4000;
    let (a, b) = (-10.0f64, 10.0f64);
    let h = (b - a) / n as f64;
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let g = |z: f64| {
        let v = f(z);
        v * v * phi(z)
    };
    let mut acc = g(a) + g(b);
    for i in 1..n {
        let z = a + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(z);
    }
    acc * h / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameterization {
    Standard,
    Ntk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Arch {
    /// `hidden_layers` activated layers of the given width. Zero hidden
    /// layers is a single linear map.
    Mlp { hidden_layers: usize, width: usize },
    /// Linear projection in, `blocks` residual blocks, linear projection out.
    ResNet { blocks: usize, width: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkError {
    InvalidShape(&'static str),
    UnsupportedCombination(&'static str),
    BadCheckpoint(String),
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkError::InvalidShape(msg) | NetworkError::UnsupportedCombination(msg) => {
                write!(f, "{msg}")
            }
            NetworkError::BadCheckpoint(msg) => write!(f, "bad checkpoint: {msg}"),
        }
    }
}

impl std::error::Error for NetworkError {}

/// Weight shapes (fan_in, fan_out, feeds_an_activation) in storage order.
fn layer_shapes(arch: &Arch, input_dim: usize, output_dim: usize) -> Vec<(usize, usize, bool)> {
    match *arch {
        Arch::Mlp { hidden_layers, width } => {
            if hidden_layers == 0 {
                return vec![(input_dim, output_dim, false)];
            }
            let mut v = vec![(input_dim, width, true)];
            for _ in 1..hidden_layers {
                v.push((width, width, true));
            }
            v.push((width, output_dim, false));
            v
        }
        Arch::ResNet { blocks, width } => {
            let mut v = vec![(input_dim, width, false)];
            for _ in 0..blocks {
                v.push((width, width, true));
                v.push((width, width, true));
            }
            v.push((width, output_dim, false));
            v
        }
    }
}

/// A dense network. Weights are stored `(fan_in x fan_out)` so a batch
/// forward is `F = X W (+ b)` on row-major sample matrices.
#[derive(Clone, Debug)]
pub struct Network {
    pub arch: Arch,
    pub activation: Activation,
    pub parameterization: Parameterization,
    pub input_dim: usize,
    pub output_dim: usize,
    pub weights: Vec<DMatrix<f64>>,
    pub biases: Vec<Option<DVector<f64>>>,
}

/// Everything the backward pass needs from a forward evaluation.
pub struct ForwardPass {
    pub output: DMatrix<f64>,
    /// Input consumed by each weight layer, in weight order.
    pub inputs: Vec<DMatrix<f64>>,
    /// Preactivation of each weight layer, in weight order.
    preacts: Vec<DMatrix<f64>>,
}

/// Parameter gradients plus the per-layer sensitivities that produced them.
pub struct NetworkGradients {
    pub d_weights: Vec<DMatrix<f64>>,
    pub d_biases: Vec<Option<DVector<f64>>>,
    /// `B_l = dL/d(preactivation of layer l)`, one per weight layer; row i
    /// depends only on sample i.
    pub layer_sensitivities: Vec<DMatrix<f64>>,
}

impl Network {
    pub fn new(
        arch: Arch,
        activation: Activation,
        parameterization: Parameterization,
        input_dim: usize,
        output_dim: usize,
        rng: &mut SeedStream,
    ) -> Result<Self, NetworkError> {
        if input_dim == 0 || output_dim == 0 {
            return Err(NetworkError::InvalidShape("zero input or output dimension"));
        }
        match arch {
            Arch::Mlp { hidden_layers, width } => {
                if hidden_layers > 0 && width == 0 {
                    return Err(NetworkError::InvalidShape("zero hidden width"));
                }
            }
            Arch::ResNet { blocks, width } => {
                if blocks == 0 || width == 0 {
                    return Err(NetworkError::InvalidShape("residual net needs blocks and width"));
                }
                if parameterization == Parameterization::Ntk {
                    return Err(NetworkError::UnsupportedCombination(
                        "the scaled parameterization is defined for plain multilayer perceptrons",
                    ));
                }
            }
        }
        let gain = activation.gain();
        let shapes = layer_shapes(&arch, input_dim, output_dim);
        let mut weights = Vec::with_capacity(shapes.len());
        let mut biases = Vec::with_capacity(shapes.len());
        for (fan_in, fan_out, activated) in &shapes {
            let std = match parameterization {
                Parameterization::Ntk => 1.0,
                Parameterization::Standard => {
                    let g = if *activated { gain } else { 1.0 };
                    (g / *fan_in as f64).sqrt()
                }
            };
            weights.push(DMatrix::from_fn(*fan_in, *fan_out, |_, _| std * rng.normal()));
            biases.push(match parameterization {
                Parameterization::Ntk => None,
                Parameterization::Standard => Some(DVector::zeros(*fan_out)),
            });
        }
        Ok(Network {
            arch,
            activation,
            parameterization,
            input_dim,
            output_dim,
            weights,
            biases,
        })
    }

    pub fn num_params(&self) -> usize {
        let w: usize = self.weights.iter().map(|w| w.len()).sum();
        let b: usize = self.biases.iter().flatten().map(|b| b.len()).sum();
        w + b
    }

    /// Post-activation scale of `activated` layers: `sqrt(c_sigma / width)`
    /// in the scaled parameterization, 1 otherwise.
    fn act_scale(&self, fan_out: usize) -> f64 {
        match self.parameterization {
            Parameterization::Ntk => (self.activation.gain() / fan_out as f64).sqrt(),
            Parameterization::Standard => 1.0,
        }
    }

    fn affine(&self, l: usize, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut f = x * &self.weights[l];
        if let Some(b) = &self.biases[l] {
            let bt = b.transpose();
            for mut row in f.row_iter_mut() {
                row += &bt;
            }
        }
        f
    }

    /// Batched forward pass; rows of `x` are samples.
    pub fn forward(&self, x: &DMatrix<f64>) -> ForwardPass {
        assert_eq!(x.ncols(), self.input_dim, "input dimension mismatch");
        let act = self.activation;
        let mut inputs = Vec::new();
        let mut preacts = Vec::new();
        match self.arch {
            Arch::Mlp { .. } => {
                let mut g = x.clone();
                let last = self.weights.len() - 1;
                for l in 0..=last {
                    let f = self.affine(l, &g);
                    inputs.push(g);
                    if l < last {
                        let s = self.act_scale(f.ncols());
                        g = f.map(|v| s * act.apply(v));
                    } else {
                        g = f.clone();
                    }
                    preacts.push(f);
                }
                ForwardPass { output: g, inputs, preacts }
            }
            Arch::ResNet { blocks, .. } => {
                let f_in = self.affine(0, x);
                inputs.push(x.clone());
                let mut z = f_in.clone();
                preacts.push(f_in);
                for bl in 0..blocks {
                    let l1 = 1 + 2 * bl;
                    let f1 = self.affine(l1, &z);
                    let a1 = f1.map(|v| act.apply(v));
                    let f2 = self.affine(l1 + 1, &a1);
                    let a2 = f2.map(|v| act.apply(v));
                    inputs.push(z.clone());
                    preacts.push(f1);
                    inputs.push(a1);
                    preacts.push(f2);
                    z += a2;
                }
                let last = self.weights.len() - 1;
                let out = self.affine(last, &z);
                inputs.push(z);
                preacts.push(out.clone());
                ForwardPass { output: out, inputs, preacts }
            }
        }
    }

    /// Convenience forward without keeping the cache.
    pub fn predict(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.forward(x).output
    }

    /// Backpropagate `upstream = dL/d(output)` (samples x output_dim).
    pub fn backward(&self, pass: &ForwardPass, upstream: &DMatrix<f64>) -> NetworkGradients {
        assert_eq!(upstream.nrows(), pass.output.nrows());
        assert_eq!(upstream.ncols(), self.output_dim);
        let act = self.activation;
        let nl = self.weights.len();
        let mut bs: Vec<DMatrix<f64>> = vec![DMatrix::zeros(0, 0); nl];
        match self.arch {
            Arch::Mlp { .. } => {
                let mut b = upstream.clone();
                bs[nl - 1] = b.clone();
                for l in (0..nl - 1).rev() {
                    let mut u = &b * self.weights[l + 1].transpose();
                    let s = self.act_scale(pass.preacts[l].ncols());
                    u.zip_apply(&pass.preacts[l], |ui, fi| *ui *= s * act.derivative(fi));
                    b = u;
                    bs[l] = b.clone();
                }
            }
            Arch::ResNet { blocks, .. } => {
                // dL/dz after the last block.
                let mut uz = upstream * self.weights[nl - 1].transpose();
                bs[nl - 1] = upstream.clone();
                for bl in (0..blocks).rev() {
                    let l1 = 1 + 2 * bl;
                    let mut b2 = uz.clone();
                    b2.zip_apply(&pass.preacts[l1 + 1], |ui, fi| *ui *= act.derivative(fi));
                    let mut b1 = &b2 * self.weights[l1 + 1].transpose();
                    b1.zip_apply(&pass.preacts[l1], |ui, fi| *ui *= act.derivative(fi));
                    uz += &b1 * self.weights[l1].transpose();
                    bs[l1 + 1] = b2;
                    bs[l1] = b1;
                }
                bs[0] = uz;
            }
        }
        let mut d_weights = Vec::with_capacity(nl);
        let mut d_biases = Vec::with_capacity(nl);
        for l in 0..nl {
            d_weights.push(pass.inputs[l].tr_mul(&bs[l]));
            d_biases.push(self.biases[l].as_ref().map(|_| {
                let rs = bs[l].row_sum();
                rs.transpose()
            }));
        }
        NetworkGradients {
            d_weights,
            d_biases,
            layer_sensitivities: bs,
        }
    }

    pub fn to_json(&self) -> String {
        let ck = Checkpoint {
            version: CHECKPOINT_VERSION,
            arch: self.arch,
            activation: self.activation,
            parameterization: self.parameterization,
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            weights: self
                .weights
                .iter()
                .map(|w| TensorData {
                    rows: w.nrows(),
                    cols: w.ncols(),
                    data: w.iter().cloned().collect(),
                })
                .collect(),
            biases: self
                .biases
                .iter()
                .map(|b| b.as_ref().map(|v| v.iter().cloned().collect()))
                .collect(),
        };
        serde_json::to_string(&ck).expect("checkpoint serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let ck: Checkpoint =
            serde_json::from_str(text).map_err(|e| NetworkError::BadCheckpoint(e.to_string()))?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(NetworkError::BadCheckpoint(format!(
                "version {} (expected {CHECKPOINT_VERSION})",
                ck.version
            )));
        }
        let shapes = layer_shapes(&ck.arch, ck.input_dim, ck.output_dim);
        if shapes.len() != ck.weights.len() || shapes.len() != ck.biases.len() {
            return Err(NetworkError::BadCheckpoint("layer count mismatch".into()));
        }
        let mut weights = Vec::with_capacity(shapes.len());
        for ((fan_in, fan_out, _), td) in shapes.iter().zip(&ck.weights) {
            if td.rows != *fan_in || td.cols != *fan_out || td.data.len() != td.rows * td.cols {
                return Err(NetworkError::BadCheckpoint("weight shape mismatch".into()));
            }
            weights.push(DMatrix::from_iterator(td.rows, td.cols, td.data.iter().cloned()));
        }
        let mut biases = Vec::with_capacity(shapes.len());
        for ((_, fan_out, _), b) in shapes.iter().zip(&ck.biases) {
            match b {
                None => biases.push(None),
                Some(v) => {
                    if v.len() != *fan_out {
                        return Err(NetworkError::BadCheckpoint("bias shape mismatch".into()));
                    }
                    biases.push(Some(DVector::from_iterator(v.len(), v.iter().cloned())));
                }
            }
        }
        Ok(Network {
            arch: ck.arch,
            activation: ck.activation,
            parameterization: ck.parameterization,
            input_dim: ck.input_dim,
            output_dim: ck.output_dim,
            weights,
            biases,
        })
    }
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorData {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    arch: Arch,
    activation: Activation,
    parameterization: Parameterization,
    input_dim: usize,
    output_dim: usize,
    weights: Vec<TensorData>,
    biases: Vec<Option<Vec<f64>>>,
}

/// First-order optimizers over a network's parameter list.
pub enum Optimizer {
    Adam(AdamState),
    Sgd { lr: f64 },
}

pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    m_w: Vec<DMatrix<f64>>,
    v_w: Vec<DMatrix<f64>>,
    m_b: Vec<Option<DVector<f64>>>,
    v_b: Vec<Option<DVector<f64>>>,
}

impl Optimizer {
    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam(AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m_w: Vec::new(),
            v_w: Vec::new(),
            m_b: Vec::new(),
            v_b: Vec::new(),
        })
    }

    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr }
    }

    pub fn learning_rate(&self) -> f64 {
        match self {
            Optimizer::Adam(s) => s.lr,
            Optimizer::Sgd { lr } => *lr,
        }
    }

    pub fn step(&mut self, net: &mut Network, grads: &NetworkGradients) {
        match self {
            Optimizer::Sgd { lr } => {
                for (w, g) in net.weights.iter_mut().zip(&grads.d_weights) {
                    w.zip_apply(g, |wi, gi| *wi -= *lr * gi);
                }
                for (b, g) in net.biases.iter_mut().zip(&grads.d_biases) {
                    if let (Some(b), Some(g)) = (b.as_mut(), g.as_ref()) {
                        b.zip_apply(g, |bi, gi| *bi -= *lr * gi);
                    }
                }
            }
            Optimizer::Adam(s) => {
                if s.m_w.is_empty() {
                    s.m_w = net.weights.iter().map(|w| DMatrix::zeros(w.nrows(), w.ncols())).collect();
                    s.v_w = s.m_w.clone();
                    s.m_b = net
                        .biases
                        .iter()
                        .map(|b| b.as_ref().map(|v| DVector::zeros(v.len())))
                        .collect();
                    s.v_b = s.m_b.clone();
                }
                s.t += 1;
                let bc1 = 1.0 - s.beta1.powi(s.t as i32);
                let bc2 = 1.0 - s.beta2.powi(s.t as i32);
                for l in 0..net.weights.len() {
                    let g = &grads.d_weights[l];
                    s.m_w[l].zip_apply(g, |mi, gi| *mi = s.beta1 * *mi + (1.0 - s.beta1) * gi);
                    s.v_w[l].zip_apply(g, |vi, gi| *vi = s.beta2 * *vi + (1.0 - s.beta2) * gi * gi);
                    let (m, v) = (&s.m_w[l], &s.v_w[l]);
                    let w = &mut net.weights[l];
                    for i in 0..w.len() {
                        let mh = m[i] / bc1;
                        let vh = v[i] / bc2;
                        w[i] -= s.lr * mh / (vh.sqrt() + s.eps);
                    }
                    if let (Some(b), Some(gb)) = (net.biases[l].as_mut(), grads.d_biases[l].as_ref()) {
                        let mb = s.m_b[l].as_mut().unwrap();
                        let vb = s.v_b[l].as_mut().unwrap();
                        mb.zip_apply(gb, |mi, gi| *mi = s.beta1 * *mi + (1.0 - s.beta1) * gi);
                        vb.zip_apply(gb, |vi, gi| *vi = s.beta2 * *vi + (1.0 - s.beta2) * gi * gi);
                        for i in 0..b.len() {
                            let mh = mb[i] / bc1;
                            let vh = vb[i] / bc2;
                            b[i] -= s.lr * mh / (vh.sqrt() + s.eps);
                        }
                    }
                }
            }
        }
    }
}
