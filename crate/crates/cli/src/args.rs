use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Fit, evaluate and sample multivariate extreme-value dependence models.
#[derive(Debug, Parser)]
#[command(name = "pickands", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Master random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// File of `key = value` lines; keys are long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the ICNN Pickands model on block maxima.
    Fit(FitArgs),
    /// Evaluate Pickands estimators on simplex points.
    Estimate(EstimateArgs),
    /// Joint survival probabilities above thresholds.
    Survival(SurvivalArgs),
    /// Draw samples from an exact family or a learned generator.
    Sample(SampleArgs),
    /// Synthetic benchmark sweeps.
    Benchmark(BenchmarkArgs),
}

/// Where block maxima come from: a CSV file or an exact synthetic family.
#[derive(Debug, Args, Default)]
pub struct DataArgs {
    /// Raw observations as CSV with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated column names to use (default: all).
    #[arg(long)]
    pub columns: Option<String>,
    /// Observations per block when reading raw data.
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Marginal model: ranks, gev-lmoments or gev-mle.
    #[arg(long)]
    pub marginals: Option<String>,
    /// Synthetic family: sl, asl or independence.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Logistic dependence parameter of the synthetic family.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension of the synthetic family.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of synthetic block maxima.
    #[arg(long)]
    pub blocks: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    /// Training epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Initial Adam learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Multiplicative learning-rate decay per epoch.
    #[arg(long)]
    pub lr_decay: Option<f64>,
    /// Rows per minibatch; 0 uses the full dataset.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Simplex points drawn per optimisation step.
    #[arg(long)]
    pub simplex_samples: Option<usize>,
    /// Weight of the hinge penalty on the Pickands bounds.
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Comma-separated hidden widths, e.g. 16,16,16,16.
    #[arg(long)]
    pub widths: Option<String>,
    /// Negative slope of the leaky rectifier.
    #[arg(long)]
    pub negative_slope: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Fit the reflected maxima, as needed for survival probabilities.
    #[arg(long)]
    pub reflect: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated estimators: pickands, cfg, cfg-corrected, bdv,
    /// bdv-mm, icnn.
    #[arg(long)]
    pub estimators: Option<String>,
    /// Trained ICNN model, required for the icnn estimator.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Regular grid size on the 1-simplex (d = 2 only).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Number of uniform random simplex points (used when d > 2).
    #[arg(long)]
    pub points: Option<usize>,
    /// Estimate on reflected maxima.
    #[arg(long)]
    pub reflect: bool,
}

#[derive(Debug, Args)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Trained ICNN model fitted with --reflect.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Classical estimator fitted to the reflected maxima.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Closed-form baseline: independence or comonotone.
    #[arg(long)]
    pub baseline: Option<String>,
    /// Number of random thresholds.
    #[arg(long)]
    pub thresholds: Option<usize>,
    /// Lowest marginal probability of a threshold.
    #[arg(long)]
    pub floor: Option<f64>,
    /// One explicit threshold as comma-separated marginal probabilities.
    #[arg(long)]
    pub threshold_probs: Option<String>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Exact family: sl, asl or independence.
    #[arg(long)]
    pub exact: Option<String>,
    /// Train (or load) a generator and use the heuristic sampler.
    #[arg(long)]
    pub learned: bool,
    /// ICNN model file used as the generator target.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Analytic generator target: sl, asl, independence or comonotone.
    #[arg(long)]
    pub target_family: Option<String>,
    /// Existing generator file to sample from instead of training.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// Logistic dependence parameter.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of vectors to draw.
    #[arg(long)]
    pub n: Option<usize>,
    /// Spectral events per heuristic sample.
    #[arg(long)]
    pub events: Option<usize>,
    /// Divide heuristic samples by the number of events: on or off.
    #[arg(long)]
    pub normalize: Option<String>,
    /// Generator training epochs.
    #[arg(long)]
    pub gen_epochs: Option<usize>,
    /// Generator learning rate.
    #[arg(long)]
    pub gen_lr: Option<f64>,
    /// Generator learning-rate decay per epoch.
    #[arg(long)]
    pub gen_lr_decay: Option<f64>,
    /// Comma-separated generator hidden widths.
    #[arg(long)]
    pub gen_widths: Option<String>,
    /// Latent dimension of the generator.
    #[arg(long)]
    pub latent: Option<usize>,
    /// Simplex points per generator step.
    #[arg(long)]
    pub n_simplex: Option<usize>,
    /// Latent draws per generator step.
    #[arg(long)]
    pub n_gen: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// survival-mse, pickands-mse or sampler-cfg.
    pub name: String,
    /// Seeds averaged per cell.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Comma-separated dependence parameters.
    #[arg(long)]
    pub alphas: Option<String>,
    /// Comma-separated dimensions (pickands-mse).
    #[arg(long)]
    pub dims: Option<String>,
    /// Logistic dependence parameter.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Block maxima per cell.
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Thresholds per survival cell.
    #[arg(long)]
    pub thresholds: Option<usize>,
    /// Lowest marginal probability of a threshold.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Simplex points for MSE evaluation.
    #[arg(long)]
    pub points: Option<usize>,
    /// Samples per sampler cell.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub events: Option<usize>,
    /// Generator training epochs.
    #[arg(long)]
    pub gen_epochs: Option<usize>,
    #[command(flatten)]
    pub train: TrainArgs,
}
