//! Points of the unit simplex and uniform sampling on it.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A weight vector on the unit simplex: nonnegative entries summing to one,
/// with at least two coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint<T> {
    w: Vec<T>,
}

impl<T: Scalar> SimplexPoint<T> {
    pub fn new(w: Vec<T>) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::Parameter(format!("simplex points need d >= 2 coordinates, got {}", w.len())));
        }
        if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < T::zero()) {
            return Err(Error::Domain(format!("simplex weight {bad} is negative or not finite")));
        }
        let sum = w.iter().fold(T::zero(), |a, &b| a + b);
        if (sum.as_f64() - 1.0).abs() > T::SIMPLEX_TOL {
            return Err(Error::Domain(format!("simplex weights sum to {sum}, not 1")));
        }
        Ok(Self { w })
    }

    /// Normalizes a nonnegative vector with positive sum onto the simplex.
    pub fn normalized(mut v: Vec<T>) -> Result<Self> {
        let sum = v.iter().fold(T::zero(), |a, &b| a + b);
        if !(sum > T::zero()) || !sum.is_finite() {
            return Err(Error::Domain(format!("cannot normalize vector with sum {sum}")));
        }
        v.iter_mut().for_each(|x| *x = *x / sum);
        Self::new(v)
    }

    /// The canonical vertex `e_k` of the (d-1)-simplex.
    pub fn vertex(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::Parameter(format!("vertex index {k} out of range for d = {d}")));
        }
        let mut w = vec![T::zero(); d];
        w[k] = T::one();
        Self::new(w)
    }

    /// The barycentre `(1/d, ..., 1/d)`.
    pub fn barycenter(d: usize) -> Result<Self> {
        let v = T::one() / T::from_usize(d).unwrap_or_else(T::one);
        Self::new(vec![v; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.w
    }

    pub fn into_inner(self) -> Vec<T> {
        self.w
    }

    /// `max_k w_k`, the lower Pickands bound at this point.
    pub fn max_weight(&self) -> T {
        self.w.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    /// Midpoint of two points of equal dimension.
    pub fn midpoint(&self, other: &Self) -> Result<Self> {
        self.mix(other, T::lit(0.5))
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        let w = self.w.iter().zip(&other.w).map(|(&a, &b)| lambda * a + (T::one() - lambda) * b).collect();
        Ok(Self { w })
    }

    /// Applies a coordinate permutation: output coordinate `i` is `w[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: perm.len() });
        }
        Self::new(perm.iter().map(|&p| self.w[p]).collect())
    }
}

impl<T> AsRef<[T]> for SimplexPoint<T> {
    fn as_ref(&self) -> &[T] {
        &self.w
    }
}

/// Fills `out` with one flat-Dirichlet draw (normalized unit exponentials).
pub(crate) fn fill_uniform_simplex<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    let mut sum = 0.0;
    for x in out.iter_mut() {
        let e: f64 = Exp1.sample(rng);
        *x = e;
        sum += e;
    }
    for x in out.iter_mut() {
        *x /= sum;
    }
}

/// Draws `n` points uniformly on the (d-1)-simplex.
pub fn sample_simplex_uniform<T: Scalar, R: Rng + ?Sized>(
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SimplexPoint<T>>> {
    if d < 2 {
        return Err(Error::Parameter(format!("simplex sampling needs d >= 2, got {d}")));
    }
    let mut buf = vec![0.0f64; d];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        fill_uniform_simplex(&mut buf, rng);
        let w: Vec<T> = buf.iter().map(|&x| T::lit(x)).collect();
        // Renormalize in T so narrow scalars still satisfy the tolerance.
        out.push(SimplexPoint::normalized(w)?);
    }
    Ok(out)
}

/// Regular grid on the 1-simplex: `(i/(n-1), 1 - i/(n-1))` for `i = 0..n`.
pub fn simplex_grid_2d<T: Scalar>(n: usize) -> Vec<SimplexPoint<T>> {
    match n {
        0 => Vec::new(),
        1 => vec![SimplexPoint { w: vec![T::lit(0.5), T::lit(0.5)] }],
        _ => (0..n)
            .map(|i| {
                let t = T::lit(i as f64 / (n - 1) as f64);
                SimplexPoint { w: vec![t, T::one() - t] }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_invalid_points() {
        assert!(SimplexPoint::new(vec![1.0f64]).is_err());
        assert!(SimplexPoint::new(vec![0.6f64, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5f64, -0.5]).is_err());
        assert!(SimplexPoint::new(vec![f64::NAN, 1.0]).is_err());
        assert!(SimplexPoint::new(vec![0.25f64, 0.75]).is_ok());
    }

    #[test]
    fn sampling_rejects_small_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_simplex_uniform::<f64, _>(1, 3, &mut rng).is_err());
    }

    #[test]
    fn samples_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in sample_simplex_uniform::<f64, _>(3, 1000, &mut rng).unwrap() {
            let s: f64 = p.as_slice().iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        for p in sample_simplex_uniform::<f32, _>(5, 100, &mut rng).unwrap() {
            let s: f32 = p.as_slice().iter().sum();
            assert!((s - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn two_dimensional_mean_is_one_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = sample_simplex_uniform::<f64, _>(2, 100_000, &mut rng).unwrap();
        let m = pts.iter().map(|p| p.as_slice()[0]).sum::<f64>() / pts.len() as f64;
        assert!((m - 0.5).abs() < 0.005, "mean {m}");
    }

    #[test]
    fn marginal_tail_matches_dirichlet_formula() {
        // Rejection-sampling oracle: uniform on the cube restricted to
        // sum <= 1 gives the first d-1 coordinates of a uniform simplex point.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut hits = 0usize;
        let mut accepted = 0usize;
        while accepted < n {
            let x: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            if x.iter().sum::<f64>() <= 1.0 {
                accepted += 1;
                if x[0] > 0.5 {
                    hits += 1;
                }
            }
        }
        let oracle = hits as f64 / n as f64;
        assert!((oracle - 0.125).abs() < 0.01, "oracle {oracle}");

        let pts = sample_simplex_uniform::<f64, _>(4, n, &mut rng).unwrap();
        let p = pts.iter().filter(|p| p.as_slice()[0] > 0.5).count() as f64 / n as f64;
        assert!((p - 0.125).abs() < 0.01, "sampler {p}");
        assert!((p - oracle).abs() < 0.01);
    }

    #[test]
    fn grid_spans_vertices() {
        let g = simplex_grid_2d::<f64>(21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0].as_slice(), &[0.0, 1.0]);
        assert_eq!(g[20].as_slice(), &[1.0, 0.0]);
        assert!(simplex_grid_2d::<f64>(0).is_empty());
    }
}
