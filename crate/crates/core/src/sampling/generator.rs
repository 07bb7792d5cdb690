//! Spectral generator: a rectifier MLP `G(z)` whose outputs `y >= 0` act as
//! the discrete spectral functions of a max-stable law, trained so that
//! `E[max_k w_k y_k]` matches a target Pickands function and `E[y] = 1`.
//! The heuristic sampler then takes `max_i ξ_i y_i` over a unit-Fréchet
//! point stream.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::PickandsFunction;
use crate::nn::{self, Adam, AdamConfig};
use crate::rng;
use crate::simplex::{fill_uniform_simplex, SimplexPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// `out × in`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    latent_dim: usize,
    dim: usize,
    layers: Vec<DenseLayer>,
}

/// Latent dimension used for an output dimension `d` when none is given.
pub fn default_latent_dim(d: usize) -> usize {
    match d {
        2 => 2,
        16 => 16,
        225 | 256 | 784 => 64,
        1024 => 256,
        _ => (d / 4).clamp(2, 256),
    }
}

struct GenTrace {
    /// Layer inputs: the latent batch followed by each hidden state.
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of every layer.
    pre: Vec<Array2<f64>>,
    out: Array2<f64>,
}

impl GeneratorParams {
    pub fn init<R: Rng + ?Sized>(latent_dim: usize, dim: usize, widths: &[usize], rng: &mut R) -> Result<Self> {
        if latent_dim == 0 || dim == 0 || widths.contains(&0) {
            return Err(Error::Parameter("generator dimensions must be positive".into()));
        }
        let mut layers = Vec::with_capacity(widths.len() + 1);
        let mut prev = latent_dim;
        for &width in widths.iter().chain(std::iter::once(&dim)) {
            layers.push(DenseLayer {
                weights: nn::gaussian_matrix(width, prev, (2.0 / prev as f64).sqrt(), rng),
                bias: Array1::zeros(width),
            });
            prev = width;
        }
        // Start from the comonotone generator y ≈ 1 so that no output unit
        // begins in the rectifier's dead zone.
        let last = layers.last_mut().expect("at least one layer");
        last.weights.mapv_inplace(|w| 0.1 * w);
        last.bias.fill(1.0);
        Ok(Self { latent_dim, dim, layers })
    }

    pub fn from_layers(latent_dim: usize, layers: Vec<DenseLayer>) -> Result<Self> {
        let mut prev = latent_dim;
        for (l, layer) in layers.iter().enumerate() {
            let (out, inp) = layer.weights.dim();
            if inp != prev || layer.bias.len() != out || out == 0 {
                return Err(Error::Input(format!("generator layer {l} has inconsistent shape")));
            }
            prev = out;
        }
        if layers.is_empty() {
            return Err(Error::Input("generator needs at least one layer".into()));
        }
        Ok(Self { latent_dim, dim: prev, layers })
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.bias.len()).collect()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            latent_dim: self.latent_dim,
            dim: self.dim,
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer { weights: Array2::zeros(l.weights.raw_dim()), bias: Array1::zeros(l.bias.len()) })
                .collect(),
        }
    }

    fn tensor_sizes(&self) -> Vec<usize> {
        self.layers.iter().flat_map(|l| [l.weights.len(), l.bias.len()]).collect()
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice().expect("standard layout"), l.bias.as_slice().expect("standard layout")])
            .collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &mut self.layers {
            out.push(l.weights.as_slice_mut().expect("standard layout"));
            out.push(l.bias.as_slice_mut().expect("standard layout"));
        }
        out
    }

    fn forward_trace(&self, z: ArrayView2<'_, f64>) -> GenTrace {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = z.to_owned();
        for layer in &self.layers {
            let mut a = h.dot(&layer.weights.t());
            a += &layer.bias;
            inputs.push(h);
            h = a.mapv(|v| v.max(0.0));
            pre.push(a);
        }
        let out = if h.is_standard_layout() { h } else { h.as_standard_layout().into_owned() };
        GenTrace { inputs, pre, out }
    }

    /// Spectral vectors `y = G(z)` for each latent row.
    pub fn forward(&self, z: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if z.ncols() != self.latent_dim {
            return Err(Error::Dimension { expected: self.latent_dim, got: z.ncols() });
        }
        Ok(self.forward_trace(z).out)
    }

    fn backward(&self, trace: &GenTrace, g_out: Array2<f64>, grad: &mut GeneratorParams) {
        let mut g = g_out;
        for l in (0..self.layers.len()).rev() {
            g.zip_mut_with(&trace.pre[l], |gv, &p| {
                if p <= 0.0 {
                    *gv = 0.0;
                }
            });
            grad.layers[l].weights += &g.t().dot(&trace.inputs[l]);
            grad.layers[l].bias += &g.sum_axis(Axis(0));
            if l > 0 {
                g = g.dot(&self.layers[l].weights);
            }
        }
    }
}

/// Standard Gaussian latent draws.
pub fn sample_latent<R: Rng + ?Sized>(n: usize, latent_dim: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, latent_dim), || StandardNormal.sample(rng))
}

/// Index of the largest `w_k y_k`, ties resolved toward the lowest index.
#[inline]
fn argmax_weighted(w: &[f64], y: &[f64]) -> (usize, f64) {
    let mut best = (0, w[0] * y[0]);
    for k in 1..w.len() {
        let v = w[k] * y[k];
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

/// Loss of generated spectral vectors `y` (`N_gen × d`) against target
/// values `a` at the simplex points `w` (`N_simplex × d`). Returns the loss
/// and its gradient with respect to `y`.
fn spectral_loss(a: &[f64], w: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> (f64, Array2<f64>) {
    let n = y.nrows() as f64;
    let d = y.ncols();
    let mut grad = Array2::zeros(y.raw_dim());
    let mut argmax = vec![0usize; y.nrows()];
    let mut loss = 0.0;
    for (j, wj) in w.rows().into_iter().enumerate() {
        let wj = wj.as_slice().expect("contiguous");
        let mut est = 0.0;
        for (i, yi) in y.rows().into_iter().enumerate() {
            let (k, v) = argmax_weighted(wj, yi.as_slice().expect("contiguous"));
            argmax[i] = k;
            est += v;
        }
        let r = est / n - a[j];
        loss += r * r;
        let c = 2.0 * r / n;
        for (i, &k) in argmax.iter().enumerate() {
            grad[[i, k]] += c * wj[k];
        }
    }
    let mean = y.mean_axis(Axis(0)).expect("nonempty batch");
    for k in 0..d {
        let s = mean[k] - 1.0;
        loss += s * s;
        grad.column_mut(k).mapv_inplace(|g| g + 2.0 * s / n);
    }
    (loss, grad)
}

/// Target values at each row of `w`.
fn target_values<M: PickandsFunction<f64> + ?Sized>(target: &M, w: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    w.rows().into_iter().map(|row| Ok(target.eval(&SimplexPoint::normalized(row.to_vec())?))).collect()
}

/// `Σ_j (A(w_j) - mean_i max_k w_jk y_ik)² + ‖mean_i y_i - 1‖²` with
/// `y_i = G(z_i)`.
pub fn generator_loss<M: PickandsFunction<f64> + ?Sized>(
    target: &M,
    gen: &GeneratorParams,
    w_batch: ArrayView2<'_, f64>,
    z_batch: ArrayView2<'_, f64>,
) -> Result<f64> {
    check_batches(gen, w_batch, z_batch)?;
    let a = target_values(target, w_batch)?;
    let y = gen.forward(z_batch)?;
    Ok(spectral_loss(&a, w_batch, y.view()).0)
}

/// Loss and exact gradient (argmax subgradient through the max).
pub fn generator_loss_gradient<M: PickandsFunction<f64> + ?Sized>(
    target: &M,
    gen: &GeneratorParams,
    w_batch: ArrayView2<'_, f64>,
    z_batch: ArrayView2<'_, f64>,
) -> Result<(f64, GeneratorParams)> {
    check_batches(gen, w_batch, z_batch)?;
    let a = target_values(target, w_batch)?;
    let mut grad = gen.zeros_like();
    let loss = loss_and_grad(gen, &a, w_batch, z_batch, &mut grad);
    Ok((loss, grad))
}

fn loss_and_grad(
    gen: &GeneratorParams,
    a: &[f64],
    w: ArrayView2<'_, f64>,
    z: ArrayView2<'_, f64>,
    grad: &mut GeneratorParams,
) -> f64 {
    let trace = gen.forward_trace(z);
    let (loss, g_out) = spectral_loss(a, w, trace.out.view());
    gen.backward(&trace, g_out, grad);
    loss
}

fn check_batches(gen: &GeneratorParams, w: ArrayView2<'_, f64>, z: ArrayView2<'_, f64>) -> Result<()> {
    if w.nrows() == 0 || z.nrows() == 0 {
        return Err(Error::SampleSize { needed: 1, got: 0 });
    }
    if w.ncols() != gen.dim {
        return Err(Error::Dimension { expected: gen.dim, got: w.ncols() });
    }
    if z.ncols() != gen.latent_dim {
        return Err(Error::Dimension { expected: gen.latent_dim, got: z.ncols() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenTrainConfig {
    pub epochs: usize,
    /// Simplex points per step.
    pub n_simplex: usize,
    /// Latent draws per step.
    pub n_gen: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    /// Stop once the step loss falls to this value.
    pub tolerance: Option<f64>,
    pub widths: Vec<usize>,
    /// `None` picks [`default_latent_dim`].
    pub latent_dim: Option<usize>,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl GenTrainConfig {
    /// The published schedule: lr 1e-4, decay 0.99998, 3000 epochs.
    pub fn published() -> Self {
        Self {
            epochs: 3000,
            n_simplex: 100,
            n_gen: 500,
            learning_rate: 1e-4,
            lr_decay: 0.99998,
            tolerance: None,
            widths: vec![256, 256],
            latent_dim: None,
            seed: 0,
            adam: AdamConfig { beta1: 0.5, beta2: 0.99, epsilon: 1e-8 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_simplex == 0 || self.n_gen == 0 {
            return Err(Error::Parameter("generator batch sizes must be positive".into()));
        }
        if !(self.learning_rate > 0.0) || !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::Parameter("generator learning rate must be positive and decay in (0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for GenTrainConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, lr_decay: 0.999, ..Self::published() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenTrainReport {
    pub step_loss: Vec<f64>,
    pub final_loss: f64,
    pub converged: bool,
}

/// Fits a generator to a target Pickands function with Adam, drawing fresh
/// simplex points and latent vectors at every step.
pub fn train_generator<M: PickandsFunction<f64> + ?Sized>(
    target: &M,
    d: usize,
    cfg: &GenTrainConfig,
) -> Result<(GeneratorParams, GenTrainReport)> {
    cfg.validate()?;
    if let Some(td) = target.dim() {
        if td != d {
            return Err(Error::Dimension { expected: td, got: d });
        }
    }
    if d < 2 {
        return Err(Error::Parameter(format!("generator target needs d >= 2, got {d}")));
    }
    let mut rng = rng::seeded(cfg.seed);
    let latent = cfg.latent_dim.unwrap_or_else(|| default_latent_dim(d));
    let mut gen = GeneratorParams::init(latent, d, &cfg.widths, &mut rng)?;
    let mut adam = Adam::new(cfg.adam, &gen.tensor_sizes());
    let mut grad = gen.zeros_like();
    let mut w = Array2::zeros((cfg.n_simplex, d));
    let mut lr = cfg.learning_rate;
    let mut step_loss = Vec::with_capacity(cfg.epochs);
    let mut converged = false;
    for epoch in 0..cfg.epochs {
        for mut row in w.rows_mut() {
            fill_uniform_simplex(row.as_slice_mut().expect("contiguous"), &mut rng);
        }
        let a = target_values(target, w.view())?;
        let z = sample_latent(cfg.n_gen, latent, &mut rng);
        for t in grad.tensors_mut() {
            t.fill(0.0);
        }
        let loss = loss_and_grad(&gen, &a, w.view(), z.view(), &mut grad);
        if !loss.is_finite() {
            return Err(Error::NonFinite { epoch, detail: format!("generator loss {loss}") });
        }
        step_loss.push(loss);
        if cfg.tolerance.is_some_and(|tol| loss <= tol) {
            converged = true;
            break;
        }
        adam.step(gen.tensors_mut(), grad.tensors(), lr);
        lr *= cfg.lr_decay;
    }
    let final_loss = *step_loss.last().unwrap_or(&f64::NAN);
    Ok((gen, GenTrainReport { step_loss, final_loss, converged }))
}

/// Latent draws pushed through the network at once by the Monte-Carlo
/// helpers, bounding their memory use.
const MC_CHUNK: usize = 16_384;

/// Calls `visit` on generator outputs for `n_draws` latent samples, in
/// chunks of at most [`MC_CHUNK`] rows.
fn for_each_output_chunk<R, F>(gen: &GeneratorParams, n_draws: usize, rng: &mut R, mut visit: F) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(&Array2<f64>),
{
    let mut left = n_draws;
    while left > 0 {
        let n = left.min(MC_CHUNK);
        visit(&gen.forward(sample_latent(n, gen.latent_dim, rng).view())?);
        left -= n;
    }
    Ok(())
}

/// Monte-Carlo Pickands function of a generator,
/// `mean_i max_k w_k y_ik` over `n_draws` latent samples, at each point.
pub fn generator_pickands<R: Rng + ?Sized>(
    gen: &GeneratorParams,
    points: &[SimplexPoint<f64>],
    n_draws: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if let Some(p) = points.iter().find(|p| p.dim() != gen.dim) {
        return Err(Error::Dimension { expected: gen.dim, got: p.dim() });
    }
    let n_draws = n_draws.max(1);
    let mut sums = vec![0.0; points.len()];
    for_each_output_chunk(gen, n_draws, rng, |y| {
        for (sum, p) in sums.iter_mut().zip(points) {
            let w = p.as_slice();
            *sum +=
                y.rows().into_iter().map(|yi| argmax_weighted(w, yi.as_slice().expect("contiguous")).1).sum::<f64>();
        }
    })?;
    Ok(sums.into_iter().map(|s| s / n_draws as f64).collect())
}

/// Componentwise Monte-Carlo mean of the generator output.
pub fn generator_mean<R: Rng + ?Sized>(gen: &GeneratorParams, n_draws: usize, rng: &mut R) -> Result<Array1<f64>> {
    let n_draws = n_draws.max(1);
    let mut sum = Array1::zeros(gen.dim);
    for_each_output_chunk(gen, n_draws, rng, |y| sum += &y.sum_axis(Axis(0)))?;
    Ok(sum / n_draws as f64)
}

/// One approximate MEV vector `M = max_i ξ_i y_i` over `n_events`
/// spectral draws with unit-Fréchet weights `ξ_i`. With `normalize` the
/// result is divided by `n_events`, which keeps the margins close to unit
/// Fréchet; ranks are unaffected either way.
pub fn sample_mev_heuristic<R: Rng + ?Sized>(
    gen: &GeneratorParams,
    n_events: usize,
    normalize: bool,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(sample_mev_heuristic_batch(gen, 1, n_events, normalize, rng)?.row(0).to_vec())
}

/// `n` independent heuristic vectors as an `n × d` matrix.
pub fn sample_mev_heuristic_batch<R: Rng + ?Sized>(
    gen: &GeneratorParams,
    n: usize,
    n_events: usize,
    normalize: bool,
    rng: &mut R,
) -> Result<Array2<f64>> {
    if n_events == 0 {
        return Err(Error::Parameter("the heuristic sampler needs at least one event".into()));
    }
    let scale = if normalize { 1.0 / n_events as f64 } else { 1.0 };
    let mut out = Array2::zeros((n, gen.dim));
    for mut row in out.rows_mut() {
        let y = gen.forward(sample_latent(n_events, gen.latent_dim, rng).view())?;
        for yi in y.rows() {
            let e: f64 = Exp1.sample(rng);
            let xi = scale / e;
            for (m, &v) in row.iter_mut().zip(yi.iter()) {
                *m = f64::max(*m, xi * v);
            }
        }
    }
    Ok(out)
}

pub const GENERATOR_FORMAT: &str = "pickands-generator";
pub const GENERATOR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DenseDoc {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GeneratorDoc {
    format: String,
    version: u32,
    latent_dim: usize,
    dim: usize,
    widths: Vec<usize>,
    activation: crate::icnn::ActivationSpec,
    layers: Vec<DenseDoc>,
    train_config: Option<GenTrainConfig>,
}

impl GeneratorParams {
    pub fn to_json(&self, config: Option<&GenTrainConfig>) -> Result<String> {
        let doc = GeneratorDoc {
            format: GENERATOR_FORMAT.into(),
            version: GENERATOR_VERSION,
            latent_dim: self.latent_dim,
            dim: self.dim,
            widths: self.widths(),
            activation: crate::icnn::ActivationSpec { kind: "relu".into(), negative_slope: None },
            layers: self
                .layers
                .iter()
                .map(|l| DenseDoc { weights: nn::to_rows(&l.weights), bias: l.bias.to_vec() })
                .collect(),
            train_config: config.cloned(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<GenTrainConfig>)> {
        let doc: GeneratorDoc = serde_json::from_str(text)?;
        if doc.format != GENERATOR_FORMAT {
            return Err(Error::Input(format!("expected a {GENERATOR_FORMAT} document, got {:?}", doc.format)));
        }
        if doc.version != GENERATOR_VERSION {
            return Err(Error::Input(format!("unsupported generator version {}", doc.version)));
        }
        let mut prev = doc.latent_dim;
        let mut layers = Vec::with_capacity(doc.layers.len());
        for (l, (ld, &width)) in doc.layers.iter().zip(doc.widths.iter().chain(std::iter::once(&doc.dim))).enumerate() {
            let what = format!("generator layer {l}");
            layers.push(DenseLayer {
                weights: nn::from_rows(&ld.weights, (width, prev), &what)?,
                bias: nn::from_vec(&ld.bias, width, &what)?,
            });
            prev = width;
        }
        if layers.len() != doc.widths.len() + 1 {
            return Err(Error::Input("generator layer count does not match its widths".into()));
        }
        Ok((Self::from_layers(doc.latent_dim, layers)?, doc.train_config))
    }
}
