//! The Pickands-function abstraction and the analytic logistic families.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::SimplexPoint;

/// Where a model's dependence structure came from. Survival-probability
/// evaluation only accepts models fitted to reflected data (or analytic
/// models, which the caller vouches for).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Original,
    Reflected,
}

/// Clamps a raw value into the Pickands bounds `[max_k w_k, 1]`.
#[inline]
pub fn clamp_to_bounds<T: Scalar>(raw: T, w: &SimplexPoint<T>) -> T {
    let lo = w.max_weight();
    if raw.is_nan() {
        return T::one();
    }
    raw.max(lo).min(T::one())
}

/// Anything that evaluates a Pickands dependence function `w -> A(w)`.
pub trait PickandsFunction<T: Scalar> {
    /// Fixed input dimension, or `None` for families defined for every `d`.
    fn dim(&self) -> Option<usize>;

    /// Unclamped value, kept for diagnostics.
    fn raw(&self, w: &SimplexPoint<T>) -> T;

    /// Value clamped to the Pickands bounds.
    fn eval(&self, w: &SimplexPoint<T>) -> T {
        clamp_to_bounds(self.raw(w), w)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        match self.dim() {
            Some(expected) if expected != d => Err(Error::Dimension { expected, got: d }),
            _ => Ok(()),
        }
    }
}

impl<T: Scalar, M: PickandsFunction<T> + ?Sized> PickandsFunction<T> for &M {
    fn dim(&self) -> Option<usize> {
        (**self).dim()
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        (**self).raw(w)
    }
    fn eval(&self, w: &SimplexPoint<T>) -> T {
        (**self).eval(w)
    }
    fn provenance(&self) -> Provenance {
        (**self).provenance()
    }
}

impl<T: Scalar, M: PickandsFunction<T> + ?Sized> PickandsFunction<T> for Box<M> {
    fn dim(&self) -> Option<usize> {
        (**self).dim()
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        (**self).raw(w)
    }
    fn eval(&self, w: &SimplexPoint<T>) -> T {
        (**self).eval(w)
    }
    fn provenance(&self) -> Provenance {
        (**self).provenance()
    }
}

/// `A ≡ 1`: the independence copula.
#[derive(Debug, Clone, Copy, Default)]
pub struct Independence;

impl<T: Scalar> PickandsFunction<T> for Independence {
    fn dim(&self) -> Option<usize> {
        None
    }
    fn raw(&self, _w: &SimplexPoint<T>) -> T {
        T::one()
    }
}

/// `A(w) = max_k w_k`: complete (comonotone) dependence.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompleteDependence;

impl<T: Scalar> PickandsFunction<T> for CompleteDependence {
    fn dim(&self) -> Option<usize> {
        None
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        w.max_weight()
    }
}

/// A constant function. Not a valid Pickands function unless the constant is
/// one; useful for exercising the bound diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPickands<T>(pub T);

impl<T: Scalar> PickandsFunction<T> for ConstantPickands<T> {
    fn dim(&self) -> Option<usize> {
        None
    }
    fn raw(&self, _w: &SimplexPoint<T>) -> T {
        self.0
    }
}

/// Wraps a closure as a Pickands function of a fixed dimension.
pub struct FnPickands<F> {
    dim: Option<usize>,
    f: F,
}

impl<F> FnPickands<F> {
    pub fn new(dim: Option<usize>, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Scalar, F: Fn(&SimplexPoint<T>) -> T> PickandsFunction<T> for FnPickands<F> {
    fn dim(&self) -> Option<usize> {
        self.dim
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        (self.f)(w)
    }
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::Parameter(format!("dependence parameter alpha must be in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// `(Σ_i x_i^{1/α})^α`, factoring out the maximum so that small `α` does
/// not underflow.
fn logistic_norm<T: Scalar>(xs: impl Iterator<Item = T> + Clone, alpha: T) -> T {
    let m = xs.clone().fold(T::zero(), |a, b| a.max(b));
    if m == T::zero() {
        return T::zero();
    }
    let inv = T::one() / alpha;
    let s = xs.fold(T::zero(), |acc, x| acc + (x / m).powf(inv));
    m * s.powf(alpha)
}

/// Symmetric logistic family `A(w) = (Σ_k w_k^{1/α})^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricLogistic<T> {
    alpha: T,
}

impl<T: Scalar> SymmetricLogistic<T> {
    pub fn new(alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

impl<T: Scalar> PickandsFunction<T> for SymmetricLogistic<T> {
    fn dim(&self) -> Option<usize> {
        None
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        logistic_norm(w.as_slice().iter().copied(), self.alpha)
    }
}

/// One subset `b` of the asymmetric logistic family with its dependence
/// parameter and the asymmetry weights of its members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AslTerm<T> {
    pub members: Vec<usize>,
    /// Ignored for singletons.
    pub alpha: T,
    /// `λ_{i,b}` for each member `i`, in the order of `members`.
    pub lambda: Vec<T>,
}

/// Asymmetric logistic family
/// `A(w) = Σ_b (Σ_{i∈b} (λ_{i,b} w_i)^{1/α_b})^{α_b}` over an explicit
/// subset family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetricLogistic<T> {
    dim: usize,
    terms: Vec<AslTerm<T>>,
}

impl<T: Scalar> AsymmetricLogistic<T> {
    pub fn new(dim: usize, mut terms: Vec<AslTerm<T>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter(format!("asymmetric logistic needs d >= 2, got {dim}")));
        }
        let mut row_sums = vec![0.0f64; dim];
        let mut seen = std::collections::HashSet::new();
        for term in &mut terms {
            if term.members.is_empty() {
                return Err(Error::Parameter("empty subset in asymmetric logistic family".into()));
            }
            if term.members.len() != term.lambda.len() {
                return Err(Error::Parameter(format!(
                    "subset {:?} has {} asymmetry weights",
                    term.members,
                    term.lambda.len()
                )));
            }
            let mut key = term.members.clone();
            key.sort_unstable();
            if key.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::Parameter(format!("subset {:?} repeats a coordinate", term.members)));
            }
            if !seen.insert(key) {
                return Err(Error::Parameter(format!("subset {:?} listed twice", term.members)));
            }
            if term.members.len() == 1 {
                term.alpha = T::one();
            } else {
                check_alpha(term.alpha)?;
            }
            for (&i, &l) in term.members.iter().zip(&term.lambda) {
                if i >= dim {
                    return Err(Error::Parameter(format!("coordinate {i} out of range for d = {dim}")));
                }
                if !(l >= T::zero() && l <= T::one()) {
                    return Err(Error::Parameter(format!("asymmetry weight {l} outside [0, 1]")));
                }
                row_sums[i] += l.as_f64();
            }
        }
        for (i, s) in row_sums.iter().enumerate() {
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Parameter(format!("asymmetry weights of coordinate {i} sum to {s}, not 1")));
            }
        }
        Ok(Self { dim, terms })
    }

    /// The symmetric logistic model written as a single full-set term.
    pub fn symmetric(dim: usize, alpha: T) -> Result<Self> {
        Self::new(dim, vec![AslTerm { members: (0..dim).collect(), alpha, lambda: vec![T::one(); dim] }])
    }

    /// Default benchmark family: every singleton plus the full set, all
    /// non-singletons sharing `alpha`. Each coordinate splits its unit mass
    /// between its singleton and the full set by a flat Dirichlet draw.
    pub fn random_default<R: Rng + ?Sized>(dim: usize, alpha: T, rng: &mut R) -> Result<Self> {
        let shares: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let mut terms: Vec<AslTerm<T>> = shares
            .iter()
            .enumerate()
            .map(|(i, &s)| AslTerm { members: vec![i], alpha: T::one(), lambda: vec![T::lit(1.0 - s)] })
            .collect();
        terms.push(AslTerm { members: (0..dim).collect(), alpha, lambda: shares.iter().map(|&s| T::lit(s)).collect() });
        Self::new(dim, terms)
    }

    pub fn terms(&self) -> &[AslTerm<T>] {
        &self.terms
    }

    pub fn d(&self) -> usize {
        self.dim
    }
}

impl<T: Scalar> PickandsFunction<T> for AsymmetricLogistic<T> {
    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
    fn raw(&self, w: &SimplexPoint<T>) -> T {
        let w = w.as_slice();
        self.terms.iter().fold(T::zero(), |acc, term| {
            let xs = term.members.iter().zip(&term.lambda).map(|(&i, &l)| l * w[i]);
            acc + logistic_norm(xs, term.alpha)
        })
    }
}

/// Per-point outcome of [`check_pickands_bounds`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsEntry<T> {
    pub raw: T,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport<T> {
    pub entries: Vec<BoundsEntry<T>>,
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub convexity_violations: usize,
    pub pairs_checked: usize,
}

impl<T> BoundsReport<T> {
    pub fn is_clean(&self) -> bool {
        self.lower_violations == 0 && self.upper_violations == 0 && self.convexity_violations == 0
    }
}

/// Midpoint-convexity slack.
pub const CONVEXITY_SLACK: f64 = 1e-6;

/// Checks the Pickands bounds on the raw values at each point and
/// midpoint convexity over consecutive pairs of points.
pub fn check_pickands_bounds<T: Scalar, M: PickandsFunction<T> + ?Sized>(
    model: &M,
    points: &[SimplexPoint<T>],
) -> BoundsReport<T> {
    let tol = T::lit(T::SIMPLEX_TOL);
    let entries: Vec<BoundsEntry<T>> = points
        .iter()
        .map(|w| {
            let raw = model.raw(w);
            BoundsEntry { raw, lower_ok: raw >= w.max_weight() - tol, upper_ok: raw <= T::one() + tol }
        })
        .collect();
    let mut convexity_violations = 0;
    let mut pairs_checked = 0;
    for (i, pair) in points.windows(2).enumerate() {
        let Ok(mid) = pair[0].midpoint(&pair[1]) else { continue };
        pairs_checked += 1;
        let avg = (entries[i].raw + entries[i + 1].raw) * T::lit(0.5);
        if model.raw(&mid) > avg + T::lit(CONVEXITY_SLACK) {
            convexity_violations += 1;
        }
    }
    BoundsReport {
        lower_violations: entries.iter().filter(|e| !e.lower_ok).count(),
        upper_violations: entries.iter().filter(|e| !e.upper_ok).count(),
        entries,
        convexity_violations,
        pairs_checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::sample_simplex_uniform;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(w: &[f64]) -> SimplexPoint<f64> {
        SimplexPoint::new(w.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_logistic_hand_values() {
        let half = pt(&[0.5, 0.5]);
        assert_abs_diff_eq!(SymmetricLogistic::new(1.0).unwrap().eval(&half), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(SymmetricLogistic::new(0.5).unwrap().eval(&half), 0.5f64.sqrt(), epsilon = 1e-12);
        for alpha in [0.05, 0.3, 0.9] {
            let m = SymmetricLogistic::new(alpha).unwrap();
            assert_abs_diff_eq!(m.eval(&pt(&[1.0, 0.0])), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn symmetric_logistic_rejects_bad_alpha() {
        assert!(SymmetricLogistic::new(0.0f64).is_err());
        assert!(SymmetricLogistic::new(1.2f64).is_err());
        assert!(SymmetricLogistic::new(-0.5f64).is_err());
    }

    #[test]
    fn symmetric_logistic_generic_scalar() {
        let m = SymmetricLogistic::new(0.5f32).unwrap();
        let w = SimplexPoint::new(vec![0.5f32, 0.5]).unwrap();
        assert!((m.eval(&w) - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn asymmetric_logistic_hand_values() {
        let full = AsymmetricLogistic::symmetric(2, 0.5).unwrap();
        assert_abs_diff_eq!(full.eval(&pt(&[0.5, 0.5])), 0.707_106_781_186_547_5, epsilon = 1e-12);

        let singles = AsymmetricLogistic::new(
            3,
            (0..3).map(|i| AslTerm { members: vec![i], alpha: 1.0, lambda: vec![1.0] }).collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(singles.eval(&pt(&[0.2, 0.3, 0.5])), 1.0, epsilon = 1e-15);

        let mixed = AsymmetricLogistic::new(
            2,
            vec![
                AslTerm { members: vec![0], alpha: 1.0, lambda: vec![0.5] },
                AslTerm { members: vec![1], alpha: 1.0, lambda: vec![0.5] },
                AslTerm { members: vec![0, 1], alpha: 0.5, lambda: vec![0.5, 0.5] },
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(mixed.eval(&pt(&[0.5, 0.5])), 0.853_553_390_593_273_7, epsilon = 1e-12);
    }

    #[test]
    fn asymmetric_logistic_validation() {
        let bad_sum = AsymmetricLogistic::new(
            2,
            vec![
                AslTerm { members: vec![0], alpha: 1.0, lambda: vec![0.5] },
                AslTerm { members: vec![0, 1], alpha: 0.5, lambda: vec![0.4, 1.0] },
            ],
        );
        assert!(matches!(bad_sum, Err(Error::Parameter(_))));
        let bad_alpha =
            AsymmetricLogistic::new(2, vec![AslTerm { members: vec![0, 1], alpha: 0.0, lambda: vec![1.0, 1.0] }]);
        assert!(bad_alpha.is_err());
        let uncovered =
            AsymmetricLogistic::new(3, vec![AslTerm { members: vec![0, 1], alpha: 0.5, lambda: vec![1.0, 1.0] }]);
        assert!(uncovered.is_err());
    }

    #[test]
    fn random_default_is_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2, 5, 16] {
            let m = AsymmetricLogistic::random_default(d, 0.5, &mut rng).unwrap();
            let pts = sample_simplex_uniform(d, 10_000, &mut rng).unwrap();
            let report = check_pickands_bounds(&m, &pts);
            assert!(
                report.is_clean(),
                "d={d}: {:?}",
                (report.lower_violations, report.upper_violations, report.convexity_violations)
            );
        }
    }

    #[test]
    fn analytic_families_pass_bounds_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in [2, 5, 16] {
            let pts = sample_simplex_uniform(d, 10_000, &mut rng).unwrap();
            for alpha in [0.1, 0.5, 1.0] {
                let r = check_pickands_bounds(&SymmetricLogistic::new(alpha).unwrap(), &pts);
                assert!(r.is_clean());
                assert_eq!(r.pairs_checked, pts.len() - 1);
            }
            assert!(check_pickands_bounds(&Independence, &pts).is_clean());
            assert!(check_pickands_bounds(&CompleteDependence, &pts).is_clean());
        }
    }

    #[test]
    fn constant_below_bound_is_flagged() {
        let pts: Vec<_> =
            [[0.99, 0.01], [0.9, 0.1], [0.5, 0.5], [0.1, 0.9], [0.01, 0.99]].iter().map(|w| pt(w)).collect();
        let r = check_pickands_bounds(&ConstantPickands(0.3), &pts);
        // In two dimensions max_k w_k >= 0.5 everywhere.
        assert_eq!(r.lower_violations, 5);
        assert!(r.entries.iter().all(|e| !e.lower_ok && e.upper_ok));
        assert_eq!(ConstantPickands(0.3).eval(&pts[0]), 0.99);
    }

    #[test]
    fn clamping_applies_to_every_evaluator() {
        let over = FnPickands::new(Some(2), |_w: &SimplexPoint<f64>| 1.7);
        assert_eq!(over.eval(&pt(&[0.5, 0.5])), 1.0);
        assert_eq!(over.raw(&pt(&[0.5, 0.5])), 1.7);
    }

    #[test]
    fn dimension_check() {
        let m = AsymmetricLogistic::<f64>::symmetric(3, 0.5).unwrap();
        assert!(m.check_dim(3).is_ok());
        assert!(m.check_dim(2).is_err());
        assert!(PickandsFunction::<f64>::check_dim(&Independence, 7).is_ok());
    }
}
