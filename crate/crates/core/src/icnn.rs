//! Input-convex neural network (ICNN) parameterization of the Pickands
//! function, its exact gradient, and the exponential maximum-likelihood
//! training loop.
//!
//! The network is
//!
//! ```text
//! z_1     = σ(W_0^x w + b_0)
//! z_{l+1} = σ(W_l^z z_l + W_l^x w + b_l)        l = 1..L-1
//! f(w)    = W_L^z z_L + W_L^x w + b_L
//! ```
//!
//! with `W^z >= 0` and σ the leaky rectifier, so `f` is convex in `w`. The
//! Pickands function subtracts the linear interpolation of the vertex values,
//! `A(w) = relu(f(w) - Σ_k w_k f(e_k) + 1)`, which pins `A(e_k) = 1` and, by
//! convexity of `f`, keeps `A <= 1` everywhere.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{PickandsFunction, Provenance};
use crate::nn::{self, Adam, AdamConfig};
use crate::pipeline::UniformizedDataset;
use crate::rng;
use crate::simplex::{fill_uniform_simplex, SimplexPoint};

/// Floor applied to `A` inside `log A` in the likelihood.
pub const LOG_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct IcnnLayer {
    /// Passthrough weights acting on `w` (`out × d`), unconstrained.
    pub w_x: Array2<f64>,
    /// Weights on the previous hidden state (`out × in`), nonnegative.
    /// Absent on the first layer.
    pub w_z: Option<Array2<f64>>,
    pub bias: Array1<f64>,
}

impl IcnnLayer {
    fn zeros_like(&self) -> Self {
        Self {
            w_x: Array2::zeros(self.w_x.raw_dim()),
            w_z: self.w_z.as_ref().map(|m| Array2::zeros(m.raw_dim())),
            bias: Array1::zeros(self.bias.raw_dim()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcnnArchitecture {
    pub widths: Vec<usize>,
    pub negative_slope: f64,
}

impl IcnnArchitecture {
    /// Width 16, depth 4: synthetic benchmarks.
    pub fn synthetic() -> Self {
        Self { widths: vec![16; 4], negative_slope: 0.01 }
    }

    /// Width 24, depth 3: real-data mode.
    pub fn real_data() -> Self {
        Self { widths: vec![24; 3], negative_slope: 0.01 }
    }
}

impl Default for IcnnArchitecture {
    fn default() -> Self {
        Self::synthetic()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcnnParams {
    dim: usize,
    arch: IcnnArchitecture,
    layers: Vec<IcnnLayer>,
}

/// Per-layer activations recorded by the forward pass.
struct Trace {
    /// Pre-activations of the hidden layers.
    pre: Vec<Array2<f64>>,
    /// Hidden states `z_1..z_L`.
    hidden: Vec<Array2<f64>>,
    out: Array1<f64>,
}

impl IcnnParams {
    /// Random initialisation: Gaussian passthrough weights, small
    /// nonnegative recurrent weights, zero biases.
    pub fn init<R: Rng + ?Sized>(dim: usize, arch: IcnnArchitecture, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter(format!("ICNN input dimension must be >= 2, got {dim}")));
        }
        if arch.widths.is_empty() || arch.widths.contains(&0) {
            return Err(Error::Parameter("ICNN needs at least one hidden layer of positive width".into()));
        }
        if !(0.0..1.0).contains(&arch.negative_slope) {
            return Err(Error::Parameter(format!("negative slope {} outside [0, 1)", arch.negative_slope)));
        }
        let x_std = 1.0 / (dim as f64).sqrt();
        let mut layers = Vec::with_capacity(arch.widths.len() + 1);
        let mut prev = 0usize;
        for &width in arch.widths.iter().chain(std::iter::once(&1)) {
            let w_z = (prev > 0).then(|| nn::gaussian_matrix(width, prev, 1.0 / prev as f64, rng).mapv(f64::abs));
            layers.push(IcnnLayer {
                w_x: nn::gaussian_matrix(width, dim, x_std, rng),
                w_z,
                bias: Array1::zeros(width),
            });
            prev = width;
        }
        Ok(Self { dim, arch, layers })
    }

    /// Builds parameters from explicit layers, validating shapes and the
    /// nonnegativity of the recurrent weights.
    pub fn from_layers(dim: usize, arch: IcnnArchitecture, layers: Vec<IcnnLayer>) -> Result<Self> {
        if layers.len() != arch.widths.len() + 1 {
            return Err(Error::Input(format!(
                "ICNN with {} hidden layers needs {} layers, got {}",
                arch.widths.len(),
                arch.widths.len() + 1,
                layers.len()
            )));
        }
        let mut prev = 0usize;
        for (l, (layer, &width)) in layers.iter().zip(arch.widths.iter().chain(std::iter::once(&1))).enumerate() {
            if layer.w_x.dim() != (width, dim) || layer.bias.len() != width {
                return Err(Error::Input(format!("ICNN layer {l} has inconsistent shape")));
            }
            match (&layer.w_z, prev) {
                (None, 0) => {}
                (Some(m), p) if p > 0 && m.dim() == (width, p) => {
                    if m.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                        return Err(Error::Input(format!("ICNN layer {l} has negative recurrent weights")));
                    }
                }
                _ => return Err(Error::Input(format!("ICNN layer {l} has inconsistent recurrent weights"))),
            }
            prev = width;
        }
        Ok(Self { dim, arch, layers })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn architecture(&self) -> &IcnnArchitecture {
        &self.arch
    }

    pub fn layers(&self) -> &[IcnnLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [IcnnLayer] {
        &mut self.layers
    }

    pub fn zeros_like(&self) -> Self {
        Self { dim: self.dim, arch: self.arch.clone(), layers: self.layers.iter().map(IcnnLayer::zeros_like).collect() }
    }

    pub fn n_params(&self) -> usize {
        self.tensor_sizes().iter().sum()
    }

    fn tensor_sizes(&self) -> Vec<usize> {
        self.layers.iter().flat_map(|l| [l.w_x.len(), l.w_z.as_ref().map_or(0, |m| m.len()), l.bias.len()]).collect()
    }

    /// Flat views of every tensor, in a fixed order.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 3);
        for l in &mut self.layers {
            out.push(l.w_x.as_slice_mut().expect("standard layout"));
            out.push(l.w_z.as_mut().map_or(&mut [][..], |m| m.as_slice_mut().expect("standard layout")));
            out.push(l.bias.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 3);
        for l in &self.layers {
            out.push(l.w_x.as_slice().expect("standard layout"));
            out.push(l.w_z.as_ref().map_or(&[][..], |m| m.as_slice().expect("standard layout")));
            out.push(l.bias.as_slice().expect("standard layout"));
        }
        out
    }

    /// Clips every recurrent weight at zero.
    pub fn project(&mut self) {
        for l in &mut self.layers {
            if let Some(m) = &mut l.w_z {
                m.mapv_inplace(|x| x.max(0.0));
            }
        }
    }

    fn forward_trace(&self, x: ArrayView2<'_, f64>) -> Trace {
        let slope = self.arch.negative_slope;
        let n_hidden = self.arch.widths.len();
        let mut pre = Vec::with_capacity(n_hidden);
        let mut hidden: Vec<Array2<f64>> = Vec::with_capacity(n_hidden);
        let mut out = Array1::zeros(x.nrows());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut a = x.dot(&layer.w_x.t());
            if let (Some(wz), Some(z)) = (&layer.w_z, hidden.last()) {
                a += &z.dot(&wz.t());
            }
            a += &layer.bias;
            if l < n_hidden {
                hidden.push(a.mapv(|v| nn::leaky_relu(v, slope)));
                pre.push(a);
            } else {
                out = a.column(0).to_owned();
            }
        }
        Trace { pre, hidden, out }
    }

    /// Network output for each row of `x` (`m × d`).
    pub fn forward_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if x.ncols() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.ncols() });
        }
        Ok(self.forward_trace(x).out)
    }

    /// Accumulates `Σ_i g_out[i] ∂f(x_i)/∂θ` into `grad`.
    fn backward(&self, x: ArrayView2<'_, f64>, trace: &Trace, g_out: &Array1<f64>, grad: &mut IcnnParams) {
        let slope = self.arch.negative_slope;
        let mut g = g_out.view().insert_axis(Axis(1)).to_owned();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let gl = &mut grad.layers[l];
            gl.w_x += &g.t().dot(&x);
            gl.bias += &g.sum_axis(Axis(0));
            if l == 0 {
                break;
            }
            let wz = layer.w_z.as_ref().expect("recurrent weights past the first layer");
            let z_in = &trace.hidden[l - 1];
            *gl.w_z.as_mut().expect("same shape") += &g.t().dot(z_in);
            let mut g_in = g.dot(wz);
            g_in.zip_mut_with(&trace.pre[l - 1], |gv, &p| *gv *= nn::leaky_relu_grad(p, slope));
            g = g_in;
        }
    }
}

/// ICNN output at a single point.
pub fn icnn_forward(params: &IcnnParams, w: &SimplexPoint<f64>) -> Result<f64> {
    let x = ArrayView2::from_shape((1, w.dim()), w.as_slice()).expect("row vector");
    Ok(params.forward_batch(x)?[0])
}

/// Stacks the query points with the `d` vertices: rows `0..m` are the
/// queries, rows `m..m+d` the identity.
fn with_vertices(points: ArrayView2<'_, f64>) -> Array2<f64> {
    let (m, d) = points.dim();
    let mut x = Array2::zeros((m + d, d));
    x.slice_mut(s![..m, ..]).assign(&points);
    for k in 0..d {
        x[[m + k, k]] = 1.0;
    }
    x
}

/// Pre-clamp Pickands values `relu(f(w) - <w, f(e)> + 1)` for each row.
fn pickands_pre_clamp(
    params: &IcnnParams,
    points: ArrayView2<'_, f64>,
) -> (Array1<f64>, Array1<f64>, Array2<f64>, Trace) {
    let m = points.nrows();
    let x = with_vertices(points);
    let trace = params.forward_trace(x.view());
    let f = &trace.out;
    let vertex = f.slice(s![m..]);
    let inner: Array1<f64> = (0..m).map(|j| f[j] - points.row(j).dot(&vertex) + 1.0).collect();
    let a = inner.mapv(|v| v.max(0.0));
    (a, inner, x, trace)
}

/// Pre-clamp Pickands value of the network at `w`; exactly one at every
/// vertex.
pub fn pickands_from_icnn(params: &IcnnParams, w: &SimplexPoint<f64>) -> Result<f64> {
    if w.dim() != params.dim {
        return Err(Error::Dimension { expected: params.dim, got: w.dim() });
    }
    let x = ArrayView2::from_shape((1, w.dim()), w.as_slice()).expect("row vector");
    Ok(pickands_pre_clamp(params, x).0[0])
}

/// Negative exponential log-likelihood `A z - log A` of one observation,
/// with `A` floored at [`LOG_FLOOR`] inside the log.
pub fn mle_loss(a_value: f64, z: f64) -> f64 {
    a_value * z - a_value.max(LOG_FLOOR).ln()
}

/// Loss and gradient for a batch of simplex points, each paired with the
/// mean `Z` of the data at that point. Includes the hinge bound penalty
/// `λ[(A-1)_+² + (max w - A)_+²]`; all terms are averaged over points.
fn batch_loss_and_grad(
    params: &IcnnParams,
    points: ArrayView2<'_, f64>,
    z_mean: &[f64],
    penalty: f64,
    grad: &mut IcnnParams,
) -> f64 {
    let m = points.nrows();
    let d = points.ncols();
    let (a, inner, x, trace) = pickands_pre_clamp(params, points);
    let scale = 1.0 / m as f64;
    let mut loss = 0.0;
    let mut g_out = Array1::zeros(m + d);
    for j in 0..m {
        let aj = a[j];
        let wmax = points.row(j).fold(0.0f64, |acc, &v| acc.max(v));
        let over = (aj - 1.0).max(0.0);
        let under = (wmax - aj).max(0.0);
        loss += mle_loss(aj, z_mean[j]) + penalty * (over * over + under * under);
        if inner[j] <= 0.0 {
            continue;
        }
        let mut da = z_mean[j] + 2.0 * penalty * (over - under);
        if aj > LOG_FLOOR {
            da -= 1.0 / aj;
        }
        da *= scale;
        g_out[j] = da;
        for k in 0..d {
            g_out[m + k] -= da * points[[j, k]];
        }
    }
    params.backward(x.view(), &trace, &g_out, grad);
    loss * scale
}

/// Exact gradient of `mle_loss(pickands_from_icnn(params, w), z)` with
/// respect to every parameter, including the path through the vertex
/// outputs. Returns the loss and the gradient.
pub fn backprop(params: &IcnnParams, w: &SimplexPoint<f64>, z: f64) -> Result<(f64, IcnnParams)> {
    if w.dim() != params.dim {
        return Err(Error::Dimension { expected: params.dim, got: w.dim() });
    }
    let mut grad = params.zeros_like();
    let x = ArrayView2::from_shape((1, w.dim()), w.as_slice()).expect("row vector");
    let loss = batch_loss_and_grad(params, x, &[z], 0.0, &mut grad);
    Ok((loss, grad))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Rows per minibatch; `None` uses the full dataset.
    pub batch_size: Option<usize>,
    pub learning_rate: f64,
    /// Multiplicative learning-rate decay per epoch.
    pub lr_decay: f64,
    /// Fresh simplex points drawn per optimizer step, shared by the rows of
    /// the minibatch.
    pub simplex_samples_per_step: usize,
    pub bound_penalty_weight: f64,
    pub seed: u64,
    pub architecture: IcnnArchitecture,
    pub adam: AdamConfig,
}

impl TrainConfig {
    /// Optimizer schedule with the published hyperparameters
    /// (lr 1e-4, decay 0.9998 per epoch, 1000 epochs).
    pub fn published() -> Self {
        Self {
            epochs: 1000,
            batch_size: None,
            learning_rate: 1e-4,
            lr_decay: 0.9998,
            simplex_samples_per_step: 1000,
            bound_penalty_weight: 1.0,
            seed: 0,
            architecture: IcnnArchitecture::synthetic(),
            adam: AdamConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Parameter(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::Parameter(format!("lr decay must be in (0, 1], got {}", self.lr_decay)));
        }
        if self.simplex_samples_per_step == 0 {
            return Err(Error::Parameter("simplex_samples_per_step must be positive".into()));
        }
        if self.batch_size == Some(0) {
            return Err(Error::Parameter("batch size must be positive".into()));
        }
        if self.bound_penalty_weight < 0.0 {
            return Err(Error::Parameter("bound penalty weight must be nonnegative".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            batch_size: None,
            learning_rate: 1e-2,
            lr_decay: 0.997,
            simplex_samples_per_step: 256,
            bound_penalty_weight: 1.0,
            seed: 0,
            architecture: IcnnArchitecture::synthetic(),
            adam: AdamConfig::default(),
        }
    }
}

/// A trained (or loaded) ICNN Pickands model.
#[derive(Debug, Clone)]
pub struct IcnnModel {
    params: IcnnParams,
    vertex_values: Array1<f64>,
    provenance: Provenance,
    config: Option<TrainConfig>,
}

impl IcnnModel {
    pub fn new(params: IcnnParams, provenance: Provenance, config: Option<TrainConfig>) -> Self {
        let d = params.dim;
        let vertex_values = params.forward_trace(Array2::eye(d).view()).out;
        Self { params, vertex_values, provenance, config }
    }

    pub fn params(&self) -> &IcnnParams {
        &self.params
    }

    pub fn config(&self) -> Option<&TrainConfig> {
        self.config.as_ref()
    }

    /// Pre-clamp values at many points with a single vertex evaluation.
    pub fn raw_batch(&self, points: &[SimplexPoint<f64>]) -> Result<Vec<f64>> {
        let d = self.params.dim;
        let mut x = Array2::zeros((points.len(), d));
        for (mut row, p) in x.rows_mut().into_iter().zip(points) {
            if p.dim() != d {
                return Err(Error::Dimension { expected: d, got: p.dim() });
            }
            row.assign(&ndarray::aview1(p.as_slice()));
        }
        let f = self.params.forward_batch(x.view())?;
        Ok(points
            .iter()
            .zip(f.iter())
            .map(|(p, &fj)| {
                let lin: f64 = p.as_slice().iter().zip(self.vertex_values.iter()).map(|(a, b)| a * b).sum();
                (fj - lin + 1.0).max(0.0)
            })
            .collect())
    }

    /// Clamped values at many points.
    pub fn eval_batch(&self, points: &[SimplexPoint<f64>]) -> Result<Vec<f64>> {
        Ok(self.raw_batch(points)?.into_iter().zip(points).map(|(r, p)| crate::family::clamp_to_bounds(r, p)).collect())
    }
}

impl PickandsFunction<f64> for IcnnModel {
    fn dim(&self) -> Option<usize> {
        Some(self.params.dim)
    }
    fn raw(&self, w: &SimplexPoint<f64>) -> f64 {
        self.raw_batch(std::slice::from_ref(w)).map_or(f64::NAN, |v| v[0])
    }
    fn provenance(&self) -> Provenance {
        self.provenance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    /// Mean loss over the optimizer steps of each epoch.
    pub epoch_loss: Vec<f64>,
}

/// Mean of `Z_w` over the rows held column-major in `cols` (`d × n`),
/// using `scratch` (length `n`) as the running minimum.
fn mean_z(cols: &Array2<f64>, w: &[f64], scratch: &mut [f64]) -> f64 {
    scratch.fill(f64::INFINITY);
    for (col, &wk) in cols.rows().into_iter().zip(w) {
        if wk <= 0.0 {
            continue;
        }
        let inv = 1.0 / wk;
        let col = col.as_slice().expect("standard layout");
        for (z, &m) in scratch.iter_mut().zip(col) {
            let v = m * inv;
            *z = if v < *z { v } else { *z };
        }
    }
    scratch.iter().sum::<f64>() / scratch.len() as f64
}

/// Fits the ICNN Pickands model to uniformized block maxima by minimizing
/// the exponential negative log-likelihood of `Z_w` with Adam.
pub fn train_pickands_icnn(data: &UniformizedDataset<f64>, cfg: &TrainConfig) -> Result<(IcnnModel, TrainingLog)> {
    cfg.validate()?;
    let b = data.n_blocks();
    let d = data.d();
    let batch = cfg.batch_size.unwrap_or(b);
    if b < batch {
        return Err(Error::SampleSize { needed: batch, got: b });
    }
    let mut rng = rng::seeded(cfg.seed);
    let mut params = IcnnParams::init(d, cfg.architecture.clone(), &mut rng)?;
    let mut adam = Adam::new(cfg.adam, &params.tensor_sizes());
    let mut grad = params.zeros_like();
    let m = cfg.simplex_samples_per_step;
    let mut points = Array2::zeros((m, d));
    let mut z_mean = vec![0.0; m];
    let mut order: Vec<usize> = (0..b).collect();
    let full = batch == b;
    let all_cols = data.neg_log_u().t().as_standard_layout().into_owned();
    let mut batch_cols = Array2::zeros((d, batch));
    let mut scratch = vec![0.0; batch];
    let mut lr = cfg.learning_rate;
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        if !full {
            order.shuffle(&mut rng);
        }
        let mut total = 0.0;
        let mut steps = 0usize;
        for chunk in order.chunks(batch) {
            if !full && chunk.len() < batch {
                continue;
            }
            if !full {
                for (j, &i) in chunk.iter().enumerate() {
                    batch_cols.column_mut(j).assign(&all_cols.column(i));
                }
            }
            let cols = if full { &all_cols } else { &batch_cols };
            for (mut row, zm) in points.rows_mut().into_iter().zip(z_mean.iter_mut()) {
                let w = row.as_slice_mut().expect("contiguous row");
                fill_uniform_simplex(w, &mut rng);
                *zm = mean_z(cols, w, &mut scratch);
            }
            for t in grad.tensors_mut() {
                t.fill(0.0);
            }
            let loss = batch_loss_and_grad(&params, points.view(), &z_mean, cfg.bound_penalty_weight, &mut grad);
            if !loss.is_finite() || grad.tensors().iter().any(|t| t.iter().any(|g| !g.is_finite())) {
                return Err(Error::NonFinite { epoch, detail: format!("ICNN loss {loss}") });
            }
            adam.step(params.tensors_mut(), grad.tensors(), lr);
            params.project();
            total += loss;
            steps += 1;
        }
        epoch_loss.push(total / steps.max(1) as f64);
        lr *= cfg.lr_decay;
    }
    let model = IcnnModel::new(params, data.provenance(), Some(cfg.clone()));
    Ok((model, TrainingLog { epoch_loss }))
}

pub const MODEL_FORMAT: &str = "pickands-icnn";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LayerDoc {
    w_x: Vec<Vec<f64>>,
    w_z: Option<Vec<Vec<f64>>>,
    bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    version: u32,
    dim: usize,
    widths: Vec<usize>,
    activation: ActivationSpec,
    layers: Vec<LayerDoc>,
    provenance: Provenance,
    train_config: Option<TrainConfig>,
}

impl IcnnModel {
    pub fn to_json(&self) -> Result<String> {
        let p = &self.params;
        let doc = ModelDoc {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            dim: p.dim,
            widths: p.arch.widths.clone(),
            activation: ActivationSpec { kind: "leaky_relu".into(), negative_slope: Some(p.arch.negative_slope) },
            layers: p
                .layers
                .iter()
                .map(|l| LayerDoc {
                    w_x: nn::to_rows(&l.w_x),
                    w_z: l.w_z.as_ref().map(nn::to_rows),
                    bias: l.bias.to_vec(),
                })
                .collect(),
            provenance: self.provenance,
            train_config: self.config.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Input(format!("expected a {MODEL_FORMAT} document, got {:?}", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::Input(format!("unsupported model version {}", doc.version)));
        }
        if doc.activation.kind != "leaky_relu" {
            return Err(Error::Input(format!("unsupported activation {:?}", doc.activation.kind)));
        }
        let arch = IcnnArchitecture {
            widths: doc.widths.clone(),
            negative_slope: doc.activation.negative_slope.unwrap_or(0.0),
        };
        let mut prev = 0usize;
        let mut layers = Vec::with_capacity(doc.layers.len());
        for (l, (ld, &width)) in doc.layers.iter().zip(doc.widths.iter().chain(std::iter::once(&1))).enumerate() {
            let what = format!("layer {l}");
            layers.push(IcnnLayer {
                w_x: nn::from_rows(&ld.w_x, (width, doc.dim), &what)?,
                w_z: match &ld.w_z {
                    Some(rows) => Some(nn::from_rows(rows, (width, prev), &what)?),
                    None => None,
                },
                bias: nn::from_vec(&ld.bias, width, &what)?,
            });
            prev = width;
        }
        let params = IcnnParams::from_layers(doc.dim, arch, layers)?;
        Ok(Self::new(params, doc.provenance, doc.train_config))
    }
}
