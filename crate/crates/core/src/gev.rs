//! Generalized extreme-value marginals: CDF, quantile, and parameter fitting.
//!
//! Shape convention: `H(z) = exp(-(1 + shape * z)^(-1/shape))` with
//! `z = (x - location) / scale`, so positive shape is the heavy (Fréchet)
//! tail and `shape = 0` is the Gumbel law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{gamma, EULER_GAMMA};

const GUMBEL_EPS: f64 = 1e-12;

/// Minimum sample size accepted by the marginal fitters.
pub const MIN_FIT_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams<T> {
    pub location: T,
    pub scale: T,
    pub shape: T,
}

impl<T: Scalar> GevParams<T> {
    pub fn new(location: T, scale: T, shape: T) -> Result<Self> {
        if !location.is_finite() || !shape.is_finite() {
            return Err(Error::Parameter("GEV location and shape must be finite".into()));
        }
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::Parameter(format!("GEV scale must be positive, got {scale}")));
        }
        Ok(Self { location, scale, shape })
    }

    /// Unit Fréchet margin `exp(-1/x)`, i.e. GEV(1, 1, 1).
    pub fn unit_frechet() -> Self {
        Self { location: T::one(), scale: T::one(), shape: T::one() }
    }

    /// Distribution function. Points outside the support map to exactly 0 or 1.
    pub fn cdf(&self, x: T) -> Result<T> {
        if x.is_nan() {
            return Err(Error::Domain("GEV cdf evaluated at NaN".into()));
        }
        let z = (x - self.location) / self.scale;
        if self.shape.abs().as_f64() < GUMBEL_EPS {
            return Ok((-(-z).exp()).exp());
        }
        let t = T::one() + self.shape * z;
        if !(t > T::zero()) {
            // Below the lower endpoint (shape > 0) or above the upper one.
            return Ok(if self.shape > T::zero() { T::zero() } else { T::one() });
        }
        Ok((-t.powf(-T::one() / self.shape)).exp())
    }

    /// Inverse distribution function on `(0, 1)`; the endpoints map to the
    /// support limits (possibly infinite).
    pub fn quantile(&self, p: T) -> Result<T> {
        if p.is_nan() || p < T::zero() || p > T::one() {
            return Err(Error::Domain(format!("GEV quantile needs p in [0, 1], got {p}")));
        }
        let y = -p.ln();
        let z = if self.shape.abs().as_f64() < GUMBEL_EPS {
            -y.ln()
        } else {
            (y.powf(-self.shape) - T::one()) / self.shape
        };
        Ok(self.location + self.scale * z)
    }

    /// Log density, `-inf` outside the support.
    pub fn ln_pdf(&self, x: T) -> T {
        let z = (x - self.location) / self.scale;
        if self.shape.abs().as_f64() < GUMBEL_EPS {
            return -self.scale.ln() - z - (-z).exp();
        }
        let t = T::one() + self.shape * z;
        if !(t > T::zero()) {
            return T::neg_infinity();
        }
        let lt = t.ln();
        -self.scale.ln() - (T::one() + T::one() / self.shape) * lt - (-lt / self.shape).exp()
    }
}

/// Sample L-moments `(l1, l2, l3)` from probability-weighted moments.
pub fn sample_lmoments(samples: &[f64]) -> (f64, f64, f64) {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let (mut b0, mut b1, mut b2) = (0.0, 0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let i = i as f64;
        b0 += v;
        b1 += v * i / (n - 1.0);
        b2 += v * i * (i - 1.0) / ((n - 1.0) * (n - 2.0));
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    (b0, 2.0 * b1 - b0, 6.0 * b2 - 6.0 * b1 + b0)
}

fn check_fit_input<T: Scalar>(samples: &[T]) -> Result<Vec<f64>> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::SampleSize { needed: MIN_FIT_SAMPLES, got: samples.len() });
    }
    let x: Vec<f64> = samples.iter().map(|v| v.as_f64()).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("GEV fit input contains non-finite values".into()));
    }
    Ok(x)
}

/// Method-of-L-moments GEV fit with the rational L-skewness approximation
/// for the shape.
pub fn fit_gev_lmoments<T: Scalar>(samples: &[T]) -> Result<GevParams<T>> {
    let x = check_fit_input(samples)?;
    let (l1, l2, l3) = sample_lmoments(&x);
    if !(l2 > 1e-12 * (1.0 + l1.abs())) {
        return Err(Error::Degenerate("sample L-scale is zero (constant sample)".into()));
    }
    let tau3 = l3 / l2;
    let c = 2.0 / (3.0 + tau3) - std::f64::consts::LN_2 / 3f64.ln();
    // k is the shape in the opposite sign convention.
    let k = 7.8590 * c + 2.9554 * c * c;
    let (location, scale) = if k.abs() < 1e-8 {
        let scale = l2 / std::f64::consts::LN_2;
        (l1 - EULER_GAMMA * scale, scale)
    } else {
        let g = gamma(1.0 + k);
        let scale = l2 * k / ((1.0 - 2f64.powf(-k)) * g);
        (l1 - scale * (1.0 - g) / k, scale)
    };
    GevParams::new(T::lit(location), T::lit(scale), T::lit(-k))
}

/// Maximum-likelihood GEV fit: Nelder–Mead on the negative log-likelihood
/// over `(location, ln scale, shape)`, started from the L-moments fit.
pub fn fit_gev_mle<T: Scalar>(samples: &[T]) -> Result<GevParams<T>> {
    let x = check_fit_input(samples)?;
    let init = fit_gev_lmoments(&x)?;
    let nll = |p: &[f64; 3]| -> f64 {
        let params = GevParams { location: p[0], scale: p[1].exp(), shape: p[2] };
        let s: f64 = x.iter().map(|&v| params.ln_pdf(v)).sum();
        if s.is_finite() {
            -s
        } else {
            f64::INFINITY
        }
    };
    let start = [init.location, init.scale.ln(), init.shape];
    let steps = [0.1 * init.scale, 0.1, 0.05];
    let best = nelder_mead(nll, start, steps, 2000, 1e-10);
    GevParams::new(T::lit(best[0]), T::lit(best[1].exp()), T::lit(best[2]))
}

fn nelder_mead<F: Fn(&[f64; 3]) -> f64>(
    f: F,
    start: [f64; 3],
    steps: [f64; 3],
    max_iter: usize,
    ftol: f64,
) -> [f64; 3] {
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for i in 0..3 {
        let mut p = start;
        p[i] += steps[i];
        simplex.push((p, f(&p)));
    }
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[3].1 - simplex[0].1).abs() <= ftol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += p[k] / 3.0;
            }
        }
        let worst = simplex[3];
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let contracted =
                if fr < worst.1 { lerp(&centroid, &reflected, 0.5) } else { lerp(&centroid, &worst.0, 0.5) };
            let fc = f(&contracted);
            if fc < worst.1.min(fr) {
                simplex[3] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let p = lerp(&best, &entry.0, 0.5);
                    *entry = (p, f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn draws(params: GevParams<f64>, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random_range(1e-300..1.0);
                params.quantile(u).unwrap()
            })
            .collect()
    }

    #[test]
    fn cdf_hand_values() {
        let gumbel = GevParams::new(0.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(gumbel.cdf(0.0).unwrap(), (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(gumbel.cdf(f64::INFINITY).unwrap(), 1.0);
        let frechet = GevParams::new(0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(frechet.cdf(1.0).unwrap(), (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(frechet.cdf(f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn cdf_outside_support_and_nan() {
        let heavy = GevParams::new(0.0, 1.0, 0.5).unwrap();
        assert_eq!(heavy.cdf(-3.0).unwrap(), 0.0);
        let bounded = GevParams::new(0.0, 1.0, -0.5).unwrap();
        assert_eq!(bounded.cdf(3.0).unwrap(), 1.0);
        assert!(heavy.cdf(f64::NAN).is_err());
        assert!(GevParams::new(0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn unit_frechet_margin() {
        let f = GevParams::<f64>::unit_frechet();
        for x in [0.3, 1.0, 4.0] {
            assert_abs_diff_eq!(f.cdf(x).unwrap(), (-1.0 / x).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for shape in [-0.4, 0.0, 0.3] {
            let p = GevParams::new(2.0, 1.5, shape).unwrap();
            for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
                assert_abs_diff_eq!(p.cdf(p.quantile(u).unwrap()).unwrap(), u, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cdf_is_monotone() {
        let p = GevParams::new(0.0, 1.0, 0.2f64).unwrap();
        let mut prev = 0.0;
        for i in -100..200 {
            let c = p.cdf(i as f64 * 0.1).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn lmoments_recovers_gumbel() {
        let x = draws(GevParams::new(0.0, 1.0, 0.0).unwrap(), 10_000, 11);
        let fit = fit_gev_lmoments(&x).unwrap();
        assert!(fit.shape.abs() <= 0.05, "{fit:?}");
        assert!(fit.location.abs() <= 0.05, "{fit:?}");
        assert!((fit.scale - 1.0).abs() <= 0.05, "{fit:?}");
    }

    #[test]
    fn lmoments_recovers_heavy_tail() {
        let x = draws(GevParams::new(0.0, 1.0, 0.3).unwrap(), 10_000, 12);
        let fit = fit_gev_lmoments(&x).unwrap();
        assert!((0.25..=0.35).contains(&fit.shape), "{fit:?}");
    }

    #[test]
    fn fit_rejects_small_and_constant_samples() {
        assert!(matches!(fit_gev_lmoments(&[1.0f64; 5]), Err(Error::SampleSize { .. })));
        assert!(matches!(fit_gev_lmoments(&[3.0f64; 50]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn mle_improves_on_lmoments_likelihood() {
        let x = draws(GevParams::new(1.0, 2.0, 0.1).unwrap(), 2_000, 13);
        let lm = fit_gev_lmoments(&x).unwrap();
        let ml = fit_gev_mle(&x).unwrap();
        let ll = |p: &GevParams<f64>| x.iter().map(|&v| p.ln_pdf(v)).sum::<f64>();
        assert!(ll(&ml) >= ll(&lm) - 1e-9);
        assert!((ml.shape - 0.1).abs() < 0.06, "{ml:?}");
    }
}
