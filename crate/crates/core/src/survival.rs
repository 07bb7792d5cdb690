//! Joint survival probabilities `P[M >= γ]` from a Pickands model fitted to
//! reflected block maxima, exact bivariate oracles, and the squared-error
//! accuracy metric against empirical exceedance frequencies.

use rand::Rng;

use crate::copula::copula_from_pickands;
use crate::error::{Error, Result};
use crate::family::{PickandsFunction, Provenance};
use crate::pipeline::BlockMaximaDataset;
use crate::scalar::Scalar;

/// Thresholds `γ` in data units together with their marginal
/// probabilities `F_k(γ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector<T> {
    gamma: Vec<T>,
    probs: Vec<T>,
}

fn check_probs<T: Scalar>(probs: &[T]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(**p > T::zero() && **p < T::one())) {
        return Err(Error::Domain(format!("marginal probability {p} outside (0, 1)")));
    }
    Ok(())
}

impl<T: Scalar> ThresholdVector<T> {
    pub fn new(gamma: Vec<T>, probs: Vec<T>) -> Result<Self> {
        if gamma.len() != probs.len() {
            return Err(Error::Dimension { expected: probs.len(), got: gamma.len() });
        }
        check_probs(&probs)?;
        Ok(Self { gamma, probs })
    }

    /// Thresholds given directly as marginal probabilities. The data-unit
    /// values are set equal to the probabilities, which is exact for data
    /// already on the uniform scale.
    pub fn from_probabilities(probs: Vec<T>) -> Result<Self> {
        Self::new(probs.clone(), probs)
    }

    /// Converts data-unit thresholds through the fitted marginals.
    pub fn from_data(maxima: &BlockMaximaDataset<T>, gamma: Vec<T>) -> Result<Self> {
        if gamma.len() != maxima.d() {
            return Err(Error::Dimension { expected: maxima.d(), got: gamma.len() });
        }
        let probs = gamma.iter().enumerate().map(|(k, &g)| maxima.marginal_cdf(k, g)).collect::<Result<Vec<_>>>()?;
        Self::new(gamma, probs)
    }

    /// Converts marginal probabilities to data units through the fitted
    /// marginals.
    pub fn from_data_probabilities(maxima: &BlockMaximaDataset<T>, probs: Vec<T>) -> Result<Self> {
        if probs.len() != maxima.d() {
            return Err(Error::Dimension { expected: maxima.d(), got: probs.len() });
        }
        check_probs(&probs)?;
        let gamma =
            probs.iter().enumerate().map(|(k, &p)| maxima.marginal_quantile(k, p)).collect::<Result<Vec<_>>>()?;
        Self::new(gamma, probs)
    }

    pub fn gamma(&self) -> &[T] {
        &self.gamma
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }
}

/// `P[M >= γ] = C̄(1 - F_1(γ_1), ..., 1 - F_d(γ_d))`, where `C̄` is the
/// extreme-value copula of the reflected maxima described by `model`.
///
/// Models estimated from unreflected data are rejected: their copula is the
/// lower-orthant law and does not describe joint exceedances. Analytic
/// models are taken as already describing the reflected law.
pub fn survival_probability<T: Scalar, M: PickandsFunction<T> + ?Sized>(
    model: &M,
    thresholds: &ThresholdVector<T>,
) -> Result<T> {
    if model.provenance() == Provenance::Original {
        return Err(Error::Provenance(
            "survival probabilities need a model fitted to reflected maxima; refit on the reflected data".into(),
        ));
    }
    let tail: Vec<T> = thresholds.probs.iter().map(|&p| T::one() - p).collect();
    let c = copula_from_pickands(&tail, model)?;
    let cap = tail.iter().copied().fold(T::one(), T::min);
    Ok(c.max(T::zero()).min(cap))
}

/// `1 - u1 - u2 + C(u1, u2)`: the exact probability that both coordinates
/// of a bivariate MEV vector exceed their `u`-quantiles.
pub fn exact_survival_bivariate<T: Scalar, M: PickandsFunction<T> + ?Sized>(model: &M, u1: T, u2: T) -> Result<T> {
    if let Some(d) = model.dim() {
        if d != 2 {
            return Err(Error::Dimension { expected: 2, got: d });
        }
    }
    check_probs(&[u1, u2])?;
    Ok(T::one() - u1 - u2 + copula_from_pickands(&[u1, u2], model)?)
}

/// Fraction of maxima rows exceeding `γ` in every coordinate.
pub fn empirical_exceedance<T: Scalar>(maxima: &BlockMaximaDataset<T>, thresholds: &ThresholdVector<T>) -> Result<T> {
    if thresholds.dim() != maxima.d() {
        return Err(Error::Dimension { expected: maxima.d(), got: thresholds.dim() });
    }
    let hits =
        maxima.maxima().rows().into_iter().filter(|row| row.iter().zip(&thresholds.gamma).all(|(x, g)| x >= g)).count();
    Ok(T::lit(hits as f64 / maxima.n_blocks() as f64))
}

/// Mean squared gap between empirical exceedance frequencies and model
/// survival probabilities over the threshold set.
pub fn empirical_accuracy<T, F>(
    maxima: &BlockMaximaDataset<T>,
    mut model: F,
    thresholds: &[ThresholdVector<T>],
) -> Result<T>
where
    T: Scalar,
    F: FnMut(&ThresholdVector<T>) -> Result<T>,
{
    if thresholds.is_empty() {
        return Err(Error::SampleSize { needed: 1, got: 0 });
    }
    let mut acc = T::zero();
    for t in thresholds {
        let gap = empirical_exceedance(maxima, t)? - model(t)?;
        acc = acc + gap * gap;
    }
    Ok(acc / T::lit(thresholds.len() as f64))
}

/// `p`-quantile of a sample by linear interpolation between order
/// statistics.
fn empirical_quantile<T: Scalar>(sorted: &[T], p: f64) -> T {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = T::lit(h - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// `count` thresholds whose marginal probabilities are drawn independently
/// and uniformly on `[floor, B/(B+1)]`; data-unit values are the matching
/// empirical quantiles of each column.
pub fn threshold_grid<T: Scalar, R: Rng + ?Sized>(
    maxima: &BlockMaximaDataset<T>,
    floor: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<ThresholdVector<T>>> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::Parameter(format!("threshold floor must lie in (0, 1), got {floor}")));
    }
    let b = maxima.n_blocks();
    let top = b as f64 / (b as f64 + 1.0);
    if floor > top {
        return Err(Error::Parameter(format!("threshold floor {floor} exceeds the top plotting position {top}")));
    }
    let columns: Vec<Vec<T>> = maxima
        .maxima()
        .columns()
        .into_iter()
        .map(|c| {
            let mut v = c.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).expect("finite maxima"));
            v
        })
        .collect();
    (0..count)
        .map(|_| {
            let probs: Vec<f64> = columns.iter().map(|_| floor + (top - floor) * rng.random::<f64>()).collect();
            let gamma = columns.iter().zip(&probs).map(|(c, &p)| empirical_quantile(c, p)).collect();
            ThresholdVector::new(gamma, probs.into_iter().map(T::lit).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{CompleteDependence, FnPickands, Independence, SymmetricLogistic};
    use crate::pipeline::MarginalMethod;
    use crate::rng::seeded;
    use crate::simplex::SimplexPoint;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    fn probs(p: &[f64]) -> ThresholdVector<f64> {
        ThresholdVector::from_probabilities(p.to_vec()).unwrap()
    }

    #[test]
    fn survival_closed_forms() {
        let t = probs(&[0.8, 0.8]);
        assert_abs_diff_eq!(survival_probability(&Independence, &t).unwrap(), 0.04, epsilon = 1e-12);
        assert_abs_diff_eq!(survival_probability(&CompleteDependence, &t).unwrap(), 0.2, epsilon = 1e-12);
        let sl = SymmetricLogistic::new(0.5).unwrap();
        let expected = (2.0 * 0.2f64.ln() * 0.5f64.sqrt()).exp();
        assert_abs_diff_eq!(survival_probability(&sl, &t).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.102_685_03, epsilon = 1e-8);
    }

    #[test]
    fn survival_rejects_unreflected_models() {
        struct Fitted;
        impl PickandsFunction<f64> for Fitted {
            fn dim(&self) -> Option<usize> {
                Some(2)
            }
            fn raw(&self, _: &SimplexPoint<f64>) -> f64 {
                1.0
            }
            fn provenance(&self) -> Provenance {
                Provenance::Original
            }
        }
        assert!(matches!(survival_probability(&Fitted, &probs(&[0.8, 0.8])), Err(Error::Provenance(_))));
    }

    #[test]
    fn thresholds_validate_probabilities() {
        assert!(ThresholdVector::from_probabilities(vec![0.5, 1.0]).is_err());
        assert!(ThresholdVector::from_probabilities(vec![0.0, 0.5]).is_err());
        assert!(ThresholdVector::new(vec![1.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn survival_is_monotone() {
        let sl = SymmetricLogistic::new(0.4).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let p = 0.05 * i as f64;
            let s = survival_probability(&sl, &probs(&[p, 0.7])).unwrap();
            assert!(s <= prev + 1e-15);
            assert!(s <= 1.0 - p.max(0.7) + 1e-15);
            prev = s;
        }
    }

    #[test]
    fn exact_bivariate_oracles() {
        assert_abs_diff_eq!(exact_survival_bivariate(&Independence, 0.8, 0.8).unwrap(), 0.04, epsilon = 1e-12);
        assert_abs_diff_eq!(exact_survival_bivariate(&CompleteDependence, 0.8, 0.8).unwrap(), 0.2, epsilon = 1e-12);
        let sl = SymmetricLogistic::new(0.5).unwrap();
        assert_abs_diff_eq!(exact_survival_bivariate(&sl, 0.8, 0.8).unwrap(), 0.129_371_09, epsilon = 1e-8);
        let three = FnPickands::new(Some(3), |_w: &SimplexPoint<f64>| 1.0);
        assert!(exact_survival_bivariate(&three, 0.8, 0.8).is_err());
    }

    fn dataset(rows: Array2<f64>) -> BlockMaximaDataset<f64> {
        BlockMaximaDataset::from_maxima(rows, 1, MarginalMethod::EmpiricalRanks).unwrap()
    }

    #[test]
    fn accuracy_hand_values() {
        let bm = dataset(array![[1.0, 1.0], [2.0, 2.0]]);
        let t = ThresholdVector::new(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        assert_eq!(empirical_accuracy(&bm, |_| Ok(1.0), std::slice::from_ref(&t)).unwrap(), 0.0);

        let bm = dataset(array![[1.0, 1.0], [2.0, 2.0], [3.0, 0.5], [4.0, 5.0]]);
        let t = ThresholdVector::new(vec![3.5, 3.0], vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(empirical_accuracy(&bm, |_| Ok(0.5), std::slice::from_ref(&t)).unwrap(), 0.0625);
        assert!(empirical_accuracy(&bm, |_| Ok(0.5), &[]).is_err());
    }

    #[test]
    fn accuracy_against_self_is_zero() {
        let mut rng = seeded(2);
        let bm = dataset(Array2::from_shape_simple_fn((200, 2), || rng.random::<f64>()));
        let q = threshold_grid(&bm, 0.5, 30, &mut rng).unwrap();
        let acc = empirical_accuracy(&bm, |t| empirical_exceedance(&bm, t), &q).unwrap();
        assert_eq!(acc, 0.0);
    }

    #[test]
    fn grid_respects_floor() {
        let mut rng = seeded(3);
        let bm = dataset(Array2::from_shape_simple_fn((500, 2), || rng.random::<f64>()));
        assert!(threshold_grid(&bm, 0.75, 0, &mut rng).unwrap().is_empty());
        let q = threshold_grid(&bm, 0.75, 100, &mut rng).unwrap();
        let mut mean = 0.0;
        for t in &q {
            for &p in t.probabilities() {
                assert!(p >= 0.75);
                mean += p;
            }
        }
        mean /= 200.0;
        assert!((mean - 0.875).abs() < 0.03, "{mean}");
        assert!(threshold_grid(&bm, 1.0, 5, &mut rng).is_err());
    }
}
