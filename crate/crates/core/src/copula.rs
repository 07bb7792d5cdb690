//! Extreme-value copula evaluation through a Pickands function.

use crate::error::{Error, Result};
use crate::family::PickandsFunction;
use crate::scalar::Scalar;
use crate::simplex::SimplexPoint;

/// `C(u) = exp((Σ_k log u_k) · A(log u / Σ_k log u_k))`.
///
/// Coordinates with `u_k = 1` get zero weight in the simplex argument, so the
/// model is evaluated on the face of the remaining coordinates, which is the
/// Pickands function of that marginal sub-vector. All ones give `C = 1`.
pub fn copula_from_pickands<T: Scalar, M: PickandsFunction<T> + ?Sized>(u: &[T], model: &M) -> Result<T> {
    model.check_dim(u.len())?;
    if u.len() < 2 {
        return Err(Error::Parameter(format!("copula needs d >= 2, got {}", u.len())));
    }
    if let Some(bad) = u.iter().find(|x| !(**x > T::zero() && **x <= T::one())) {
        return Err(Error::Domain(format!("copula argument {bad} outside (0, 1]")));
    }
    let logs: Vec<T> = u.iter().map(|x| x.ln()).collect();
    let total = logs.iter().fold(T::zero(), |a, &b| a + b);
    if total == T::zero() {
        return Ok(T::one());
    }
    let w = SimplexPoint::normalized(logs.iter().map(|&l| (l / total).max(T::zero())).collect())?;
    Ok((total * model.eval(&w)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{CompleteDependence, Independence, SymmetricLogistic};
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_values() {
        let u = [0.5, 0.5];
        assert_abs_diff_eq!(copula_from_pickands(&u, &Independence).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(copula_from_pickands(&u, &CompleteDependence).unwrap(), 0.5, epsilon = 1e-15);
        let sl = SymmetricLogistic::new(0.5).unwrap();
        assert_abs_diff_eq!(copula_from_pickands(&u, &sl).unwrap(), 0.375_214_2, epsilon = 1e-7);
    }

    #[test]
    fn unit_coordinates_drop_out() {
        let sl = SymmetricLogistic::new(0.3).unwrap();
        assert_eq!(copula_from_pickands(&[1.0, 1.0, 1.0], &sl).unwrap(), 1.0);
        // C(u, 1) is the margin u.
        assert_abs_diff_eq!(copula_from_pickands(&[0.37, 1.0], &sl).unwrap(), 0.37, epsilon = 1e-14);
        let c3 = copula_from_pickands(&[0.4, 0.6, 1.0], &sl).unwrap();
        let c2 = copula_from_pickands(&[0.4, 0.6], &sl).unwrap();
        assert_abs_diff_eq!(c3, c2, epsilon = 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(copula_from_pickands(&[0.0, 0.5], &Independence).is_err());
        assert!(copula_from_pickands(&[-0.1, 0.5], &Independence).is_err());
        assert!(copula_from_pickands(&[1.1, 0.5], &Independence).is_err());
        assert!(copula_from_pickands(&[0.5], &Independence).is_err());
    }
}
