//! Synthetic experiment cells shared by the benchmark command and the
//! acceptance suite. Each cell draws exact symmetric logistic data from its
//! own seed, fits the models under comparison, and reports mean squared
//! errors against the analytic truth.

use ndarray::Array2;

use crate::error::Result;
use crate::estimators::{Estimator, NonparametricModel};
use crate::family::{PickandsFunction, SymmetricLogistic};
use crate::icnn::{train_pickands_icnn, TrainConfig};
use crate::pipeline::{uniformize, BlockMaximaDataset, MarginalMethod, UniformizedDataset};
use crate::rng;
use crate::sampling::{sample_mev_heuristic_batch, sample_symmetric_logistic, train_generator, GenTrainConfig};
use crate::simplex::{sample_simplex_uniform, SimplexPoint};
use crate::survival::{exact_survival_bivariate, survival_probability, threshold_grid};

/// Rank-uniformized copy of raw MEV samples treated as block maxima.
pub fn rank_uniformized(samples: Array2<f64>) -> Result<UniformizedDataset<f64>> {
    let bm = BlockMaximaDataset::from_maxima(samples, 1, MarginalMethod::EmpiricalRanks)?;
    Ok(uniformize(&bm))
}

/// Mean squared error of `values` against `truth` at `points`.
pub fn mse_against<M: PickandsFunction<f64> + ?Sized>(values: &[f64], truth: &M, points: &[SimplexPoint<f64>]) -> f64 {
    let sum: f64 = values.iter().zip(points).map(|(v, w)| (v - truth.eval(w)).powi(2)).sum();
    sum / points.len().max(1) as f64
}

/// Mean squared error of a model against `truth` at `points`.
pub fn model_mse<M, T>(model: &M, truth: &T, points: &[SimplexPoint<f64>]) -> f64
where
    M: PickandsFunction<f64> + ?Sized,
    T: PickandsFunction<f64> + ?Sized,
{
    let values: Vec<f64> = points.iter().map(|w| model.eval(w)).collect();
    mse_against(&values, truth, points)
}

/// Sample mean and (n-1) standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub icnn: f64,
    pub classical: Vec<(Estimator, f64)>,
}

impl CellResult {
    pub fn classical_mse(&self, kind: Estimator) -> Option<f64> {
        self.classical.iter().find(|(k, _)| *k == kind).map(|(_, v)| *v)
    }
}

/// Pickands-function fit: exact SL data of size `blocks` in dimension `d`,
/// ICNN and classical estimators compared over `n_points` uniform simplex
/// points.
pub fn pickands_fit_cell(
    d: usize,
    alpha: f64,
    blocks: usize,
    n_points: usize,
    estimators: &[Estimator],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<CellResult> {
    let truth = SymmetricLogistic::new(alpha)?;
    let mut data_rng = rng::split(seed, 0);
    let data = rank_uniformized(sample_symmetric_logistic(d, alpha, blocks, &mut data_rng)?)?;
    let points = sample_simplex_uniform::<f64, _>(d, n_points, &mut rng::split(seed, 1))?;
    let classical = estimators
        .iter()
        .map(|&kind| Ok((kind, model_mse(&NonparametricModel::new(data.clone(), kind)?, &truth, &points))))
        .collect::<Result<Vec<_>>>()?;
    let cfg = TrainConfig { seed, ..cfg.clone() };
    let (model, _) = train_pickands_icnn(&data, &cfg)?;
    let icnn = mse_against(&model.eval_batch(&points)?, &truth, &points);
    Ok(CellResult { icnn, classical })
}

/// Bivariate joint-survival experiment: models fitted to the reflected
/// maxima of `blocks` exact SL draws, evaluated at `n_thresholds` random
/// thresholds above `floor` against the exact survival function.
pub fn survival_cell(
    alpha: f64,
    blocks: usize,
    n_thresholds: usize,
    floor: f64,
    estimators: &[Estimator],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<CellResult> {
    let truth = SymmetricLogistic::new(alpha)?;
    let samples = sample_symmetric_logistic(2, alpha, blocks, &mut rng::split(seed, 0))?;
    let bm = BlockMaximaDataset::from_maxima(samples, 1, MarginalMethod::EmpiricalRanks)?;
    let reflected = uniformize(&bm).reflected();
    let thresholds = threshold_grid(&bm, floor, n_thresholds, &mut rng::split(seed, 1))?;
    let exact: Vec<f64> = thresholds
        .iter()
        .map(|t| exact_survival_bivariate(&truth, t.probabilities()[0], t.probabilities()[1]))
        .collect::<Result<_>>()?;
    let score = |model: &dyn PickandsFunction<f64>| -> Result<f64> {
        let mut acc = 0.0;
        for (t, e) in thresholds.iter().zip(&exact) {
            acc += (survival_probability(model, t)? - e).powi(2);
        }
        Ok(acc / thresholds.len().max(1) as f64)
    };
    let classical = estimators
        .iter()
        .map(|&kind| Ok((kind, score(&NonparametricModel::new(reflected.clone(), kind)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let cfg = TrainConfig { seed, ..cfg.clone() };
    let (model, _) = train_pickands_icnn(&reflected, &cfg)?;
    Ok(CellResult { icnn: score(&model)?, classical })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerCell {
    /// Mean rank-CFG MSE of heuristic samples from the trained generator.
    pub learned: f64,
    /// Mean rank-CFG MSE of the same number of exact draws.
    pub exact: f64,
    pub generator_final_loss: f64,
}

/// Generator trained on the analytic SL target in `d` dimensions; compares
/// rank-CFG estimates from `n_samples` heuristic vectors and from as many
/// exact draws over `n_points` simplex points. Both errors are averaged
/// over `repeats` independent sample sets drawn from the one generator.
#[allow(clippy::too_many_arguments)]
pub fn sampler_cell(
    d: usize,
    alpha: f64,
    n_samples: usize,
    n_events: usize,
    n_points: usize,
    repeats: usize,
    gen_cfg: &GenTrainConfig,
    seed: u64,
) -> Result<SamplerCell> {
    let truth = SymmetricLogistic::new(alpha)?;
    let points = sample_simplex_uniform::<f64, _>(d, n_points, &mut rng::split(seed, 1))?;
    let rank_cfg_mse = |samples: Array2<f64>| -> Result<f64> {
        let model = NonparametricModel::new(rank_uniformized(samples)?, Estimator::Cfg)?;
        Ok(model_mse(&model, &truth, &points))
    };
    let cfg = GenTrainConfig { seed, ..gen_cfg.clone() };
    let (gen, report) = train_generator(&truth, d, &cfg)?;
    let repeats = repeats.max(1);
    let (mut learned, mut exact) = (0.0, 0.0);
    for r in 0..repeats as u64 {
        exact += rank_cfg_mse(sample_symmetric_logistic(d, alpha, n_samples, &mut rng::split(seed, 2 + 2 * r))?)?;
        let heuristic = sample_mev_heuristic_batch(&gen, n_samples, n_events, true, &mut rng::split(seed, 3 + 2 * r))?;
        learned += rank_cfg_mse(heuristic)?;
    }
    let n = repeats as f64;
    Ok(SamplerCell { learned: learned / n, exact: exact / n, generator_final_loss: report.final_loss })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_hand_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
        assert!(mean_std(&[]).0.is_nan());
    }

    #[test]
    fn small_cells_run() {
        let cfg = TrainConfig { epochs: 5, ..TrainConfig::default() };
        let fit = pickands_fit_cell(2, 0.5, 200, 50, &[Estimator::Pickands], &cfg, 1).unwrap();
        assert!(fit.icnn.is_finite());
        assert!(fit.classical_mse(Estimator::Pickands).unwrap() < 0.01);
        let surv = survival_cell(0.5, 100, 10, 0.75, &[Estimator::Cfg], &cfg, 2).unwrap();
        assert!(surv.icnn.is_finite() && surv.classical[0].1 < 0.01);
        let gen = GenTrainConfig { epochs: 3, n_simplex: 8, n_gen: 16, widths: vec![8], ..GenTrainConfig::default() };
        let cell = sampler_cell(2, 0.5, 200, 20, 50, 2, &gen, 3).unwrap();
        assert!(cell.exact < 0.01 && cell.learned.is_finite());
    }
}
