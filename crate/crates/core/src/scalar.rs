//! Floating-point abstraction for the scalar-generic parts of the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar used by the analytic families, copula evaluation, the
/// data pipeline and the nonparametric estimators.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Absolute tolerance on the simplex normalization.
    const SIMPLEX_TOL: f64;

    /// Converts an `f64` literal. Never fails for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Scalar for f32 {
    const SIMPLEX_TOL: f64 = 1e-5;
}

impl Scalar for f64 {
    const SIMPLEX_TOL: f64 = 1e-9;
}
