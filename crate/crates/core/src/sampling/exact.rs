//! Exact samplers for the logistic families with unit-Fréchet margins.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::family::AsymmetricLogistic;

/// Positive `α`-stable variable with Laplace transform `exp(-t^α)`,
/// drawn by the Chambers–Mallows–Stuck (Kanter) representation.
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("positive stable index must lie in (0, 1), got {alpha}")));
    }
    Ok(positive_stable(alpha, rng))
}

fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    loop {
        // U uniform on the open interval (0, π).
        let u = PI * (1.0 - rng.random::<f64>());
        if u >= PI {
            continue;
        }
        let w: f64 = Exp1.sample(rng);
        let s = ((1.0 - alpha) * u).sin() / w;
        let value = s.powf((1.0 - alpha) / alpha) * (alpha * u).sin() / u.sin().powf(1.0 / alpha);
        if value > 0.0 && value.is_finite() {
            return value;
        }
    }
}

fn unit_frechet<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    1.0 / e
}

/// One symmetric logistic vector written into `out`.
fn fill_symmetric_logistic<R: Rng + ?Sized>(out: &mut [f64], alpha: f64, rng: &mut R) {
    if alpha >= 1.0 {
        out.iter_mut().for_each(|x| *x = unit_frechet(rng));
        return;
    }
    let s = positive_stable(alpha, rng);
    for x in out.iter_mut() {
        let w: f64 = Exp1.sample(rng);
        *x = (s / w).powf(alpha);
    }
}

/// `n × d` draws from the symmetric logistic law with unit-Fréchet margins.
/// `α = 1` gives independent columns.
pub fn sample_symmetric_logistic<R: Rng + ?Sized>(d: usize, alpha: f64, n: usize, rng: &mut R) -> Result<Array2<f64>> {
    if d < 1 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Parameter(format!("logistic dependence parameter must lie in (0, 1], got {alpha}")));
    }
    let mut out = Array2::zeros((n, d));
    for mut row in out.rows_mut() {
        fill_symmetric_logistic(row.as_slice_mut().expect("standard layout"), alpha, rng);
    }
    Ok(out)
}

/// `n × d` draws from an asymmetric logistic law by the max-mixture
/// construction `M_k = max_{b ∋ k} λ_{k,b} X_k^{(b)}`, with independent
/// symmetric logistic blocks `X^{(b)}`.
pub fn sample_asymmetric_logistic<R: Rng + ?Sized>(
    spec: &AsymmetricLogistic<f64>,
    n: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let d = spec.d();
    let widest = spec.terms().iter().map(|t| t.members.len()).max().unwrap_or(0);
    let mut block = vec![0.0; widest];
    let mut out = Array2::zeros((n, d));
    for mut row in out.rows_mut() {
        for term in spec.terms() {
            let x = &mut block[..term.members.len()];
            fill_symmetric_logistic(x, term.alpha, rng);
            for ((&k, &lambda), &xk) in term.members.iter().zip(&term.lambda).zip(x.iter()) {
                row[k] = f64::max(row[k], lambda * xk);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{Estimator, NonparametricModel};
    use crate::family::{AslTerm, PickandsFunction};
    use crate::pipeline::{uniformize, BlockMaximaDataset, MarginalMethod};
    use crate::rng::seeded;
    use crate::simplex::SimplexPoint;

    fn rank_cfg_mid(samples: Array2<f64>) -> f64 {
        let d = samples.ncols();
        let bm = BlockMaximaDataset::from_maxima(samples, 1, MarginalMethod::EmpiricalRanks).unwrap();
        let model = NonparametricModel::new(uniformize(&bm), Estimator::Cfg).unwrap();
        model.raw(&SimplexPoint::barycenter(d).unwrap())
    }

    #[test]
    fn positive_stable_laplace_transform() {
        let mut rng = seeded(11);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let s = sample_positive_stable(0.5, &mut rng).unwrap();
            assert!(s > 0.0);
            acc += (-s).exp();
        }
        assert!((acc / n as f64 - (-1.0f64).exp()).abs() < 0.005);
        assert!(sample_positive_stable(1.0, &mut rng).is_err());
        assert!(sample_positive_stable(0.0, &mut rng).is_err());
    }

    #[test]
    fn logistic_margins_are_unit_frechet() {
        let mut rng = seeded(12);
        let x = sample_symmetric_logistic(2, 0.5, 100_000, &mut rng).unwrap();
        let below = x.column(0).iter().filter(|&&v| v <= 1.0).count() as f64 / 1e5;
        assert!((below - (-1.0f64).exp()).abs() < 0.01, "{below}");
    }

    #[test]
    fn logistic_dependence_at_barycenter() {
        let mut rng = seeded(13);
        let x = sample_symmetric_logistic(2, 0.5, 100_000, &mut rng).unwrap();
        assert!((rank_cfg_mid(x) - 0.5f64.sqrt()).abs() < 0.02);
        let indep = sample_symmetric_logistic(2, 1.0, 10_000, &mut rng).unwrap();
        assert!((rank_cfg_mid(indep) - 1.0).abs() < 0.03);
    }

    #[test]
    fn asymmetric_reductions() {
        let full = AsymmetricLogistic::symmetric(3, 0.4).unwrap();
        let a = sample_asymmetric_logistic(&full, 50, &mut seeded(5)).unwrap();
        let b = sample_symmetric_logistic(3, 0.4, 50, &mut seeded(5)).unwrap();
        assert_eq!(a, b);

        let singles = AsymmetricLogistic::new(
            2,
            vec![
                AslTerm { members: vec![0], alpha: 1.0, lambda: vec![1.0] },
                AslTerm { members: vec![1], alpha: 1.0, lambda: vec![1.0] },
            ],
        )
        .unwrap();
        let x = sample_asymmetric_logistic(&singles, 10_000, &mut seeded(6)).unwrap();
        assert!((rank_cfg_mid(x) - 1.0).abs() < 0.03);
    }

    #[test]
    fn asymmetric_mixed_dependence() {
        let spec = AsymmetricLogistic::new(
            2,
            vec![
                AslTerm { members: vec![0], alpha: 1.0, lambda: vec![0.5] },
                AslTerm { members: vec![1], alpha: 1.0, lambda: vec![0.5] },
                AslTerm { members: vec![0, 1], alpha: 0.5, lambda: vec![0.5, 0.5] },
            ],
        )
        .unwrap();
        let x = sample_asymmetric_logistic(&spec, 100_000, &mut seeded(7)).unwrap();
        assert!((rank_cfg_mid(x) - 0.853_553_4).abs() < 0.02);
    }
}
