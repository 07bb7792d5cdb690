//! Samplers: exact logistic families for ground truth, and a learned
//! spectral generator with the max-stable point-process heuristic.

mod exact;
mod generator;

pub use exact::{sample_asymmetric_logistic, sample_positive_stable, sample_symmetric_logistic};
pub use generator::{
    default_latent_dim, generator_loss, generator_loss_gradient, generator_mean, generator_pickands, sample_latent,
    sample_mev_heuristic, sample_mev_heuristic_batch, train_generator, DenseLayer, GenTrainConfig, GenTrainReport,
    GeneratorParams, GENERATOR_FORMAT, GENERATOR_VERSION,
};
