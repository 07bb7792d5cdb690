//! Multivariate extreme-value distributions through Pickands dependence
//! functions.
//!
//! The crate covers the full workflow: block maxima and marginal
//! uniformization ([`pipeline`]), classical nonparametric estimators
//! ([`estimators`]), an input-convex neural network estimator trained by
//! exponential maximum likelihood ([`icnn`]), joint survival probabilities
//! ([`survival`]), and exact as well as learned samplers ([`sampling`]).
//!
//! The analytic families, copula evaluation, data pipeline and estimators
//! are generic over the [`Scalar`] type; the `*F64` aliases below fix it to
//! `f64`, which is what the neural components use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod copula;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod family;
pub mod gev;
pub mod icnn;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod simplex;
pub mod special;
pub mod survival;

pub use copula::copula_from_pickands;
pub use error::{Error, Result};
pub use family::{
    check_pickands_bounds, clamp_to_bounds, AslTerm, AsymmetricLogistic, BoundsReport, CompleteDependence,
    ConstantPickands, FnPickands, Independence, PickandsFunction, Provenance, SymmetricLogistic,
};
pub use gev::{fit_gev_lmoments, fit_gev_mle, GevParams};
pub use scalar::Scalar;
pub use simplex::{sample_simplex_uniform, SimplexPoint};

pub type SimplexPointF64 = SimplexPoint<f64>;
pub type GevParamsF64 = GevParams<f64>;
pub type SymmetricLogisticF64 = SymmetricLogistic<f64>;
pub type AsymmetricLogisticF64 = AsymmetricLogistic<f64>;
pub type RawDatasetF64 = pipeline::RawDataset<f64>;
pub type BlockMaximaF64 = pipeline::BlockMaximaDataset<f64>;
pub type UniformizedF64 = pipeline::UniformizedDataset<f64>;
pub type NonparametricF64 = estimators::NonparametricModel<f64>;

pub type SimplexPointF32 = SimplexPoint<f32>;
pub type SymmetricLogisticF32 = SymmetricLogistic<f32>;
