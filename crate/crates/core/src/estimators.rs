//! Classical nonparametric Pickands estimators built on the `Z_w` statistics:
//! Pickands (exponential MLE), CFG with and without endpoint correction,
//! and the d-dimensional minimum-distance estimator (BDV) with its
//! bound-respecting variant (BDV-MM).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::{PickandsFunction, Provenance};
use crate::pipeline::UniformizedDataset;
use crate::scalar::Scalar;
use crate::simplex::SimplexPoint;
use crate::special::EULER_GAMMA;

/// Positive samples `Z_{w,1..B}` for one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct ZSamples<T>(Vec<T>);

impl<T: Scalar> ZSamples<T> {
    pub fn new(z: Vec<T>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::SampleSize { needed: 1, got: 0 });
        }
        if let Some(bad) = z.iter().find(|x| !(**x > T::zero()) || x.is_nan()) {
            return Err(Error::Domain(format!("Z sample {bad} is not positive")));
        }
        Ok(Self(z))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Γ_{w,i} = exp(-Z_{w,i})`, sorted.
    pub fn to_gamma(&self) -> GammaSamples<T> {
        GammaSamples::new(self.0.iter().map(|z| (-*z).exp()).collect()).expect("exp(-z) lies in [0, 1]")
    }
}

/// Sorted `Γ_{w,1} <= ... <= Γ_{w,B}`; the sentinels `Γ_0 = 0` and
/// `Γ_{B+1} = 1` are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSamples<T>(Vec<T>);

impl<T: Scalar> GammaSamples<T> {
    pub fn new(mut g: Vec<T>) -> Result<Self> {
        if let Some(bad) = g.iter().find(|x| !(**x >= T::zero() && **x <= T::one())) {
            return Err(Error::Domain(format!("Γ sample {bad} outside [0, 1]")));
        }
        g.sort_by(|a, b| a.partial_cmp(b).expect("checked"));
        Ok(Self(g))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Γ_i` for `i = 0..=B+1`, including the sentinels.
    #[inline]
    fn at(&self, i: usize) -> T {
        if i == 0 {
            T::zero()
        } else if i > self.0.len() {
            T::one()
        } else {
            self.0[i - 1]
        }
    }
}

/// `(mean Z)^{-1}`, the exact maximizer of the exponential likelihood.
pub fn estimate_pickands<T: Scalar>(z: &ZSamples<T>) -> T {
    let n = T::from_usize(z.len()).expect("length");
    n / z.0.iter().fold(T::zero(), |a, &b| a + b)
}

/// `exp(-γ - mean log Z)`.
pub fn estimate_cfg<T: Scalar>(z: &ZSamples<T>) -> T {
    let n = T::from_usize(z.len()).expect("length");
    let mean_log = z.0.iter().fold(T::zero(), |a, &b| a + b.ln()) / n;
    (-T::lit(EULER_GAMMA) - mean_log).exp()
}

/// `Σ_{i=2}^{B} log(1 + 1/(i-1)) Γ_{w,(i)}`, the minimum-distance estimator
/// with weight `h(y) = 1/log y` (for which `g(x) = x`).
pub fn estimate_bdv<T: Scalar>(gamma: &GammaSamples<T>) -> Result<T> {
    let b = gamma.len();
    if b < 2 {
        return Err(Error::SampleSize { needed: 2, got: b });
    }
    Ok((2..=b).fold(T::zero(), |acc, i| {
        let weight = T::lit((1.0 + 1.0 / (i - 1) as f64).ln());
        acc + weight * gamma.at(i)
    }))
}

/// `g(x) = x`, the closed form of `-B_h^{-1} ∫_0^x h*(y)/log y dy` for
/// `h(y) = 1/log y`.
#[inline]
pub fn bdv_g<T: Scalar>(x: T) -> T {
    x
}

/// `η(x) = x - x log x`, the closed form of `B_h^{-1} ∫_0^x h*(y) dy` for
/// `h(y) = 1/log y`; `η(0) = 0`.
#[inline]
pub fn bdv_eta<T: Scalar>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x - x * x.ln()
    }
}

/// Minimum-distance estimator with the empirical copula clamped into the
/// Pickands bounds before integration. The result lies in
/// `[max_k w_k, 1]` without post-hoc clamping.
pub fn estimate_bdv_mm<T: Scalar>(gamma: &GammaSamples<T>, w: &SimplexPoint<T>) -> Result<T> {
    let b = gamma.len();
    if b < 1 {
        return Err(Error::SampleSize { needed: 1, got: 0 });
    }
    let wmax = w.max_weight();
    let inv_wmax = T::one() / wmax;
    let bf = b as f64;
    let mut acc = T::zero();
    for i in 0..=b {
        let lo = gamma.at(i);
        let hi = gamma.at(i + 1);
        let level = T::lit(i as f64 / bf);
        let clamp = |x: T| x.max(lo).min(hi);
        let g_lower = clamp(level.powf(inv_wmax));
        let g_upper = clamp(level);
        acc = acc + wmax * (bdv_eta(g_lower) - bdv_eta(lo));
        // log(i/B) multiplies an empty interval at i = 0 and vanishes at i = B.
        if i > 0 && i < b {
            acc = acc - level.ln() * (bdv_g(g_upper) - bdv_g(g_lower));
        }
        acc = acc + bdv_eta(hi) - bdv_eta(g_upper);
    }
    Ok(acc)
}

/// Endpoint correction `w -> exp(log Â(w) - Σ_k w_k log Â(e_k))`, which pins
/// the corrected estimator to one at every vertex.
pub struct EndpointCorrected<T, M> {
    inner: M,
    log_vertex: Vec<T>,
}

impl<T: Scalar, M: PickandsFunction<T>> EndpointCorrected<T, M> {
    pub fn new(inner: M, d: usize) -> Result<Self> {
        inner.check_dim(d)?;
        let log_vertex = (0..d)
            .map(|k| {
                let v = inner.raw(&SimplexPoint::vertex(d, k)?);
                if !(v > T::zero()) {
                    return Err(Error::Domain(format!("raw estimate {v} at vertex {k} is not positive")));
                }
                Ok(v.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { inner, log_vertex })
    }
}

impl<T: Scalar, M: PickandsFunction<T>> PickandsFunction<T> for EndpointCorrected<T, M> {
    fn dim(&self) -> Option<usize> {
        Some(self.log_vertex.len())
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        let shift = w.as_slice().iter().zip(&self.log_vertex).fold(T::zero(), |a, (&wk, &l)| a + wk * l);
        (self.inner.raw(w).ln() - shift).exp()
    }
    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Pickands,
    Cfg,
    CfgCorrected,
    Bdv,
    BdvMm,
}

impl Estimator {
    pub const ALL: [Estimator; 5] =
        [Estimator::Pickands, Estimator::Cfg, Estimator::CfgCorrected, Estimator::Bdv, Estimator::BdvMm];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Pickands => "pickands",
            Estimator::Cfg => "cfg",
            Estimator::CfgCorrected => "cfg-corrected",
            Estimator::Bdv => "bdv",
            Estimator::BdvMm => "bdv-mm",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown estimator {s:?}")))
    }
}

/// A nonparametric estimator bound to a dataset, usable wherever a Pickands
/// function is expected.
#[derive(Debug, Clone)]
pub struct NonparametricModel<T> {
    data: UniformizedDataset<T>,
    kind: Estimator,
    log_vertex: Vec<T>,
}

impl<T: Scalar> NonparametricModel<T> {
    pub fn new(data: UniformizedDataset<T>, kind: Estimator) -> Result<Self> {
        let d = data.d();
        if matches!(kind, Estimator::Bdv) && data.n_blocks() < 2 {
            return Err(Error::SampleSize { needed: 2, got: data.n_blocks() });
        }
        let mut model = Self { data, kind, log_vertex: Vec::new() };
        if kind == Estimator::CfgCorrected {
            model.log_vertex = (0..d)
                .map(|k| Ok(model.estimate(Estimator::Cfg, &SimplexPoint::vertex(d, k)?)?.ln()))
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(model)
    }

    pub fn kind(&self) -> Estimator {
        self.kind
    }

    pub fn data(&self) -> &UniformizedDataset<T> {
        &self.data
    }

    fn estimate(&self, kind: Estimator, w: &SimplexPoint<T>) -> Result<T> {
        let z = ZSamples::new(self.data.z_samples(w)?)?;
        match kind {
            Estimator::Pickands => Ok(estimate_pickands(&z)),
            Estimator::Cfg => Ok(estimate_cfg(&z)),
            Estimator::CfgCorrected => {
                let shift = w.as_slice().iter().zip(&self.log_vertex).fold(T::zero(), |a, (&wk, &l)| a + wk * l);
                Ok((estimate_cfg(&z).ln() - shift).exp())
            }
            Estimator::Bdv => estimate_bdv(&z.to_gamma()),
            Estimator::BdvMm => estimate_bdv_mm(&z.to_gamma(), w),
        }
    }
}

impl<T: Scalar> PickandsFunction<T> for NonparametricModel<T> {
    fn dim(&self) -> Option<usize> {
        Some(self.data.d())
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        self.estimate(self.kind, w).unwrap_or_else(|_| T::nan())
    }
    fn provenance(&self) -> Provenance {
        self.data.provenance()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FnPickands;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp};

    fn z(v: &[f64]) -> ZSamples<f64> {
        ZSamples::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pickands_hand_values() {
        assert_abs_diff_eq!(estimate_pickands(&z(&[0.5, 1.5])), 1.0);
        assert_abs_diff_eq!(estimate_pickands(&z(&[2.0])), 0.5);
        assert!(ZSamples::<f64>::new(vec![]).is_err());
        assert!(ZSamples::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn exponential_law_of_large_numbers() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = 0.707_106_781_186_547_5;
        let draws: Vec<f64> = Exp::new(a).unwrap().sample_iter(&mut rng).take(100_000).collect();
        assert!((estimate_pickands(&z(&draws)) - a).abs() < 0.01);
        let unit: Vec<f64> = Exp::new(1.0).unwrap().sample_iter(&mut rng).take(100_000).collect();
        assert!((estimate_cfg(&z(&unit)) - 1.0).abs() < 0.01);
    }

    #[test]
    fn cfg_hand_values() {
        assert_abs_diff_eq!(estimate_cfg(&z(&[1.0, 1.0])), 0.561_459_483_566_885_1, epsilon = 1e-12);
        assert_abs_diff_eq!(estimate_cfg(&z(&[(-EULER_GAMMA).exp()])), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn endpoint_correction() {
        let constant = FnPickands::new(Some(3), |_w: &SimplexPoint<f64>| 0.6);
        let corrected = EndpointCorrected::new(constant, 3).unwrap();
        let w = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_abs_diff_eq!(corrected.raw(&w), 1.0, epsilon = 1e-15);

        let pinned = FnPickands::new(Some(2), |w: &SimplexPoint<f64>| {
            let x = w.as_slice();
            (x[0] * x[0] + x[1] * x[1]).sqrt()
        });
        let corrected = EndpointCorrected::new(&pinned, 2).unwrap();
        let w = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(corrected.raw(&w), pinned.raw(&w), epsilon = 1e-15);

        let skewed = FnPickands::new(Some(2), |w: &SimplexPoint<f64>| 0.8 + 0.15 * w.as_slice()[0]);
        let corrected = EndpointCorrected::new(skewed, 2).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(corrected.raw(&SimplexPoint::vertex(2, k).unwrap()), 1.0, epsilon = 1e-12);
        }

        let zero = FnPickands::new(Some(2), |_w: &SimplexPoint<f64>| 0.0);
        assert!(EndpointCorrected::new(zero, 2).is_err());
    }

    #[test]
    fn bdv_hand_values() {
        let g = GammaSamples::new(vec![0.8, 0.3]).unwrap();
        assert_abs_diff_eq!(estimate_bdv(&g).unwrap(), std::f64::consts::LN_2 * 0.8, epsilon = 1e-15);
        assert!(estimate_bdv(&GammaSamples::new(vec![0.5]).unwrap()).is_err());

        // All Γ at one: the sum telescopes to log B.
        let ones = GammaSamples::new(vec![1.0; 1000]).unwrap();
        assert_abs_diff_eq!(estimate_bdv(&ones).unwrap(), 1000f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn bdv_mm_hand_values() {
        let w = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        let g = GammaSamples::new(vec![(-1.0f64).exp()]).unwrap();
        let expected = 0.5 + 0.5 * 2.0 / std::f64::consts::E;
        assert_abs_diff_eq!(estimate_bdv_mm(&g, &w).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.867_879_4, epsilon = 1e-7);
        let top = GammaSamples::new(vec![1.0]).unwrap();
        assert_abs_diff_eq!(estimate_bdv_mm(&top, &w).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn estimator_names_round_trip() {
        for e in Estimator::ALL {
            assert_eq!(e.name().parse::<Estimator>().unwrap(), e);
        }
        assert!("kde".parse::<Estimator>().is_err());
    }

    #[test]
    fn corrected_cfg_is_pinned_at_vertices() {
        let u = UniformizedDataset::new(array![[0.2, 0.3, 0.9], [0.5, 0.6, 0.1], [0.7, 0.8, 0.4], [0.9, 0.2, 0.6]])
            .unwrap();
        let m = NonparametricModel::new(u, Estimator::CfgCorrected).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(m.raw(&SimplexPoint::vertex(3, k).unwrap()), 1.0, epsilon = 1e-12);
        }
    }
}
