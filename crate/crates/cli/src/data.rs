use pickands::family::{AsymmetricLogistic, PickandsFunction, SymmetricLogistic};
use pickands::icnn::{IcnnArchitecture, TrainConfig};
use pickands::pipeline::{self, BlockMaximaDataset, ColumnSelection, MarginalMethod};
use pickands::sampling::{sample_asymmetric_logistic, sample_symmetric_logistic};
use pickands::{rng, CompleteDependence, Independence};

use crate::args::{DataArgs, TrainArgs};
use crate::config::{parse_list, Resolver};
use crate::error::CliError;

/// Fewer block maxima than this triggers a warning.
pub const FEW_BLOCKS: usize = 50;

pub struct Loaded {
    pub maxima: BlockMaximaDataset<f64>,
    /// Analytic dependence function when the data are synthetic.
    pub truth: Option<Box<dyn PickandsFunction<f64>>>,
    pub synthetic: bool,
}

impl Loaded {
    pub fn d(&self) -> usize {
        self.maxima.d()
    }
}

fn marginal_method(name: &str) -> Result<MarginalMethod, CliError> {
    match name {
        "ranks" => Ok(MarginalMethod::EmpiricalRanks),
        "gev-lmoments" => Ok(MarginalMethod::GevLMoments),
        "gev-mle" => Ok(MarginalMethod::GevMle),
        other => Err(CliError::Usage(format!("unknown marginal model {other:?} (ranks, gev-lmoments, gev-mle)"))),
    }
}

/// A boxed analytic dependence model.
pub type Family = Box<dyn PickandsFunction<f64>>;

/// Analytic family by name. `asl` draws its asymmetry weights from `rng`.
pub fn family(name: &str, d: usize, alpha: f64, rng: &mut rng::SeededRng) -> Result<Family, CliError> {
    Ok(match name {
        "sl" => Box::new(SymmetricLogistic::new(alpha)?),
        "asl" => Box::new(AsymmetricLogistic::random_default(d, alpha, rng)?),
        "independence" => Box::new(Independence),
        "comonotone" => Box::new(CompleteDependence),
        other => return Err(CliError::Usage(format!("unknown family {other:?}"))),
    })
}

/// Exact draws from a named family with unit-Fréchet margins.
pub fn exact_samples(
    name: &str,
    d: usize,
    alpha: f64,
    n: usize,
    rng: &mut rng::SeededRng,
) -> Result<(ndarray::Array2<f64>, Family), CliError> {
    match name {
        "sl" => Ok((sample_symmetric_logistic(d, alpha, n, rng)?, Box::new(SymmetricLogistic::new(alpha)?))),
        "independence" => Ok((sample_symmetric_logistic(d, 1.0, n, rng)?, Box::new(Independence))),
        "asl" => {
            let spec = AsymmetricLogistic::random_default(d, alpha, rng)?;
            Ok((sample_asymmetric_logistic(&spec, n, rng)?, Box::new(spec)))
        }
        other => Err(CliError::Usage(format!("unknown exact family {other:?} (sl, asl, independence)"))),
    }
}

pub fn load(args: &DataArgs, r: &mut Resolver, seed: u64) -> Result<Loaded, CliError> {
    let input = r.get_opt("input", args.input.as_ref().map(|p| p.display().to_string()))?;
    match input {
        Some(path) => {
            let columns = r.get_opt("columns", args.columns.clone())?;
            let block_size = r.get("block-size", args.block_size, 1usize)?;
            let method = marginal_method(&r.get("marginals", args.marginals.clone(), "gev-lmoments".to_string())?)?;
            let selection = match columns {
                Some(c) => ColumnSelection::Named(parse_list("columns", &c)?),
                None => ColumnSelection::All,
            };
            let (raw, report) = pipeline::ingest_csv::<f64>(std::path::Path::new(&path), &selection)?;
            if report.rows_dropped > 0 {
                eprintln!("note: dropped {} of {} rows with missing values", report.rows_dropped, report.rows_read);
            }
            let maxima = pipeline::block_maxima(&raw, block_size, method)?;
            warn_small(maxima.n_blocks());
            Ok(Loaded { maxima, truth: None, synthetic: false })
        }
        None => {
            let name = r.get("synthetic", args.synthetic.clone(), "sl".to_string())?;
            let alpha = r.get("alpha", args.alpha, 0.5)?;
            let d = r.get("d", args.d, 2usize)?;
            let blocks = r.get("blocks", args.blocks, 1000usize)?;
            let method = marginal_method(&r.get("marginals", args.marginals.clone(), "ranks".to_string())?)?;
            warn_small(blocks);
            let (samples, truth) = exact_samples(&name, d, alpha, blocks, &mut rng::split(seed, 0))?;
            let maxima = BlockMaximaDataset::from_maxima(samples, 1, method)?;
            Ok(Loaded { maxima, truth: Some(truth), synthetic: true })
        }
    }
}

fn warn_small(blocks: usize) {
    if blocks < FEW_BLOCKS {
        eprintln!("warning: only {blocks} block maxima; dependence estimates will be noisy");
    }
}

/// Training configuration from flags, config and defaults. Real data use
/// the wider, shallower network and minibatches of 64.
pub fn train_config(
    args: &TrainArgs,
    r: &mut Resolver,
    seed: u64,
    synthetic: bool,
    blocks: usize,
) -> Result<TrainConfig, CliError> {
    let base = TrainConfig::default();
    let arch = if synthetic { IcnnArchitecture::synthetic() } else { IcnnArchitecture::real_data() };
    let default_widths = arch.widths.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let default_batch = if synthetic { 0 } else { 64.min(blocks) };
    let batch = r.get("batch-size", args.batch_size, default_batch)?;
    Ok(TrainConfig {
        epochs: r.get("epochs", args.epochs, base.epochs)?,
        batch_size: (batch > 0).then_some(batch),
        learning_rate: r.get("lr", args.lr, base.learning_rate)?,
        lr_decay: r.get("lr-decay", args.lr_decay, base.lr_decay)?,
        simplex_samples_per_step: r.get("simplex-samples", args.simplex_samples, base.simplex_samples_per_step)?,
        bound_penalty_weight: r.get("penalty", args.penalty, base.bound_penalty_weight)?,
        seed,
        architecture: IcnnArchitecture {
            widths: r.get_list("widths", args.widths.clone(), &default_widths)?,
            negative_slope: r.get("negative-slope", args.negative_slope, arch.negative_slope)?,
        },
        adam: base.adam,
    })
}
