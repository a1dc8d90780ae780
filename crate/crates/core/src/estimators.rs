//! Mean estimators for collected slot data and their analytic variances.

use nalgebra::{DVector, RealField};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fisher::SamplingPolicy;
use crate::model::{MultivariateModel, Observation, ObservationKind, ObservationModel};
use crate::scalar::{count, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stratum {
    MarginalX,
    MarginalY,
    Joint,
    /// Any observation carrying an x coordinate.
    AnyX,
    /// Any observation carrying a y coordinate.
    AnyY,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("no observations in stratum {0:?}")]
    MissingStratum(Stratum),
    #[error("policy leaves the estimator undefined (needs p_y > 0 and p_xy > 0)")]
    DegeneratePolicy,
    #[error("covariance is singular")]
    SingularCovariance,
    #[error("sample dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorKind {
    Delta1,
    Delta2,
    SampleMean,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Delta1 => "delta1",
            EstimatorKind::Delta2 => "delta2",
            EstimatorKind::SampleMean => "sample_mean",
        }
    }
}

/// Observations grouped by kind. Idle slots contribute nothing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollectedData<T> {
    pub marginal_x: Vec<T>,
    pub marginal_y: Vec<T>,
    pub joint: Vec<(T, T)>,
}

fn mean_of<T: Scalar>(values: impl Iterator<Item = T>) -> Option<T> {
    let (sum, n) = values.fold((T::zero(), 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / count::<T>(n))
}

impl<T: Scalar> CollectedData<T> {
    pub fn new() -> Self {
        Self { marginal_x: Vec::new(), marginal_y: Vec::new(), joint: Vec::new() }
    }

    pub fn from_observations<'a>(obs: impl IntoIterator<Item = &'a Observation<T>>) -> Self {
        let mut data = Self::new();
        for o in obs {
            data.push(o);
        }
        data
    }

    pub fn push(&mut self, o: &Observation<T>) {
        match (o.kind(), o.x(), o.y()) {
            (ObservationKind::MarginalX, Some(x), _) => self.marginal_x.push(x),
            (ObservationKind::MarginalY, _, Some(y)) => self.marginal_y.push(y),
            (ObservationKind::Joint, Some(x), Some(y)) => self.joint.push((x, y)),
            _ => {}
        }
    }

    pub fn n_marginal_x(&self) -> usize {
        self.marginal_x.len()
    }
    pub fn n_marginal_y(&self) -> usize {
        self.marginal_y.len()
    }
    pub fn n_joint(&self) -> usize {
        self.joint.len()
    }

    /// ȳ₁, mean of stand-alone Y observations.
    pub fn mean_marginal_y(&self) -> Option<T> {
        mean_of(self.marginal_y.iter().copied())
    }
    pub fn mean_marginal_x(&self) -> Option<T> {
        mean_of(self.marginal_x.iter().copied())
    }
    /// (x̄, ȳ) over joint observations.
    pub fn joint_means(&self) -> Option<(T, T)> {
        let x = mean_of(self.joint.iter().map(|p| p.0))?;
        let y = mean_of(self.joint.iter().map(|p| p.1))?;
        Some((x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub estimator: EstimatorKind,
    pub n_marginal_x: usize,
    pub n_marginal_y: usize,
    pub n_joint: usize,
}

impl<T: Scalar> Estimate<T> {
    fn from_data(value: T, estimator: EstimatorKind, data: &CollectedData<T>) -> Self {
        Self {
            value,
            estimator,
            n_marginal_x: data.n_marginal_x(),
            n_marginal_y: data.n_marginal_y(),
            n_joint: data.n_joint(),
        }
    }
}

/// δ₁ = ((1-ρ²) ȳ₁ + ȳ - β (x̄ - μ_x)) / (2 - ρ²), β = ρ σ_y / σ_x.
///
/// x̄ is centered on the known `mu_x` so the estimator is unbiased for any
/// `mu_x`; with `mu_x = 0` this is the textbook form verbatim.
pub fn delta1<T: Scalar>(data: &CollectedData<T>, model: &ObservationModel<T>) -> Result<Estimate<T>, EstimatorError> {
    let y1 = data.mean_marginal_y().ok_or(EstimatorError::MissingStratum(Stratum::MarginalY))?;
    let (x_bar, y_bar) = data.joint_means().ok_or(EstimatorError::MissingStratum(Stratum::Joint))?;
    let r = model.one_minus_rho2();
    let value = (r * y1 + y_bar - model.beta() * (x_bar - model.mu_x())) / (r + T::one());
    Ok(Estimate::from_data(value, EstimatorKind::Delta1, data))
}

/// Per-sample variance of δ₁ (i.e. `Var(δ₁)·K`):
/// `(1-ρ²)σ_y²/(2-ρ²)² · ((1-ρ²)/p_y + 1/p_xy) · (p_y + p_xy)`.
pub fn var_delta1<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Result<T, EstimatorError> {
    let per_slot = var_delta1_per_slot(policy, model)?;
    Ok(per_slot * (policy.p_y() + policy.p_xy()))
}

/// `Var(δ₁)` times the number of calendar slots, idle ones included. Equals
/// [`var_delta1`] when `p_y + p_xy = 1`.
pub fn var_delta1_per_slot<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Result<T, EstimatorError> {
    let (p_y, p_xy) = (policy.p_y(), policy.p_xy());
    if p_y <= T::zero() || p_xy <= T::zero() {
        return Err(EstimatorError::DegeneratePolicy);
    }
    let r = model.one_minus_rho2();
    let two_m = r + T::one();
    Ok(r * model.var_y() / (two_m * two_m) * (r / p_y + T::one() / p_xy))
}

/// δ₂ = ȳ - β (x̄ - μ_x), the UMVUE of `mu_y` from joint samples alone.
pub fn delta2<T: Scalar>(data: &CollectedData<T>, model: &ObservationModel<T>) -> Result<Estimate<T>, EstimatorError> {
    let (x_bar, y_bar) = data.joint_means().ok_or(EstimatorError::MissingStratum(Stratum::Joint))?;
    let value = y_bar - model.beta() * (x_bar - model.mu_x());
    Ok(Estimate::from_data(value, EstimatorKind::Delta2, data))
}

/// `Var(δ₂)` per slot: `(1-ρ²) σ_y² / p_xy`.
pub fn var_delta2_per_slot<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Result<T, EstimatorError> {
    if policy.p_xy() <= T::zero() {
        return Err(EstimatorError::DegeneratePolicy);
    }
    Ok(model.one_minus_rho2() * model.var_y() / policy.p_xy())
}

/// Sample means of every x value and every y value (marginal and joint pooled).
pub fn sample_mean_estimates<T: Scalar>(
    data: &CollectedData<T>,
) -> (Result<Estimate<T>, EstimatorError>, Result<Estimate<T>, EstimatorError>) {
    let mx = mean_of(data.marginal_x.iter().copied().chain(data.joint.iter().map(|p| p.0)))
        .map(|v| Estimate::from_data(v, EstimatorKind::SampleMean, data))
        .ok_or(EstimatorError::MissingStratum(Stratum::AnyX));
    let my = mean_of(data.marginal_y.iter().copied().chain(data.joint.iter().map(|p| p.1)))
        .map(|v| Estimate::from_data(v, EstimatorKind::SampleMean, data))
        .ok_or(EstimatorError::MissingStratum(Stratum::AnyY));
    (mx, my)
}

/// Norm of the log-likelihood gradient in the mean, `‖Σ⁻¹ Σᵢ (xᵢ - μ̂)‖₂`,
/// evaluated at the model's mean. Zero exactly at the sample mean.
pub fn mle_gradient_check<T: Scalar + RealField>(
    data: &[DVector<T>],
    model: &MultivariateModel<T>,
) -> Result<T, EstimatorError> {
    let k = model.dim();
    if data.is_empty() {
        return Err(EstimatorError::MissingStratum(Stratum::Joint));
    }
    let mut residual = DVector::<T>::zeros(k);
    for x in data {
        if x.len() != k {
            return Err(EstimatorError::DimensionMismatch { expected: k, got: x.len() });
        }
        residual += x - model.mean();
    }
    let chol = model.covariance().clone().cholesky().ok_or(EstimatorError::SingularCovariance)?;
    let grad = chol.solve(&residual);
    Ok(grad.norm())
}

/// Tolerance for [`mle_gradient_check`] at the sample mean: `1e-8 · n`.
pub fn mle_gradient_tolerance<T: Scalar>(n: usize) -> T {
    lit::<T>(1e-8) * count::<T>(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::fisher::crb_t1;

    fn model(mu_x: f64, rho: f64) -> ObservationModel<f64> {
        ObservationModel::new(mu_x, 0.0, 1.0, 1.0, rho).unwrap()
    }

    fn data(my: &[f64], joint: &[(f64, f64)]) -> CollectedData<f64> {
        CollectedData { marginal_x: vec![], marginal_y: my.to_vec(), joint: joint.to_vec() }
    }

    #[test]
    fn delta1_examples() {
        let d = data(&[2.0], &[(7.0, 4.0)]);
        assert_relative_eq!(delta1(&d, &model(0.0, 0.0)).unwrap().value, 3.0);
        let d = data(&[1.0], &[(0.0, 1.0)]);
        assert_relative_eq!(delta1(&d, &model(0.0, 0.5)).unwrap().value, 1.0, max_relative = 1e-15);
        assert_eq!(
            delta1(&data(&[1.0], &[]), &model(0.0, 0.5)).unwrap_err(),
            EstimatorError::MissingStratum(Stratum::Joint)
        );
        assert_eq!(
            delta1(&data(&[], &[(0.0, 1.0)]), &model(0.0, 0.5)).unwrap_err(),
            EstimatorError::MissingStratum(Stratum::MarginalY)
        );
    }

    #[test]
    fn delta1_with_zero_mu_x_is_the_printed_formula() {
        let d = data(&[0.3, -0.1, 0.8], &[(0.4, 1.1), (-0.2, 0.6)]);
        let m = ObservationModel::new(0.0, 0.0, 2.0, 0.5, 0.7).unwrap();
        let rho2 = 0.49;
        let beta = 0.7 * 0.5f64.sqrt() / 2.0f64.sqrt();
        let y1 = (0.3 - 0.1 + 0.8) / 3.0;
        let (xb, yb) = (0.1, 0.85);
        let printed = ((1.0 - rho2) * y1 + yb - beta * xb) / (2.0 - rho2);
        assert_relative_eq!(delta1(&d, &m).unwrap().value, printed, max_relative = 1e-14);
    }

    #[test]
    fn var_delta1_examples() {
        let p = SamplingPolicy::new(0.0, 0.5, 0.5).unwrap();
        assert_relative_eq!(var_delta1(&p, &model(0.0, 0.5)).unwrap(), 6.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(var_delta1(&p, &model(0.0, 0.0)).unwrap(), 1.0, max_relative = 1e-14);
        let q = SamplingPolicy::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(var_delta1(&q, &model(0.0, 0.5)).unwrap_err(), EstimatorError::DegeneratePolicy);
    }

    #[test]
    fn delta1_meets_bound_at_even_split() {
        let p = SamplingPolicy::new(0.0, 0.5, 0.5).unwrap();
        for i in 0..10 {
            let m = model(0.0, i as f64 / 10.0);
            let v = var_delta1(&p, &m).unwrap();
            let c = crb_t1(&p, &m).unwrap();
            assert!((v / c - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn delta2_examples() {
        let d = data(&[], &[(0.4, 1.2)]);
        assert_relative_eq!(delta2(&d, &model(0.5, 0.5)).unwrap().value, 1.25, max_relative = 1e-14);
        assert_relative_eq!(delta2(&d, &model(0.5, 0.0)).unwrap().value, 1.2);
        assert_eq!(delta2(&data(&[1.0], &[]), &model(0.0, 0.5)).unwrap_err(), EstimatorError::MissingStratum(Stratum::Joint));
    }

    #[test]
    fn sample_means() {
        let d = data(&[], &[(1.0, 2.0), (3.0, 4.0)]);
        let (mx, my) = sample_mean_estimates(&d);
        assert_eq!((mx.unwrap().value, my.unwrap().value), (2.0, 3.0));
        let d = CollectedData { marginal_x: vec![5.0], marginal_y: vec![], joint: vec![(1.0, 0.0)] };
        assert_eq!(sample_mean_estimates(&d).0.unwrap().value, 3.0);
        let d = CollectedData { marginal_x: vec![5.0], marginal_y: vec![], joint: vec![] };
        assert_eq!(sample_mean_estimates(&d).1.unwrap_err(), EstimatorError::MissingStratum(Stratum::AnyY));
    }

    #[test]
    fn collected_data_from_observations_skips_idle() {
        let obs = [
            Observation::marginal_x(0, 1.0),
            Observation::idle(1),
            Observation::joint(2, 2.0, 3.0),
            Observation::marginal_y(3, 4.0),
        ];
        let d = CollectedData::from_observations(obs.iter());
        assert_eq!((d.n_marginal_x(), d.n_marginal_y(), d.n_joint()), (1, 1, 1));
    }

    #[test]
    fn gradient_check_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = MultivariateModel::new(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        let xs: Vec<_> = (0..10).map(|_| base.sample(&mut rng)).collect();
        let mean = xs.iter().fold(DVector::zeros(2), |a, x| a + x) / 10.0;
        let at_mean = base.with_mean(mean.clone()).unwrap();
        assert!(mle_gradient_check(&xs, &at_mean).unwrap() <= 1e-8 * 10.0);
        let shifted = base.with_mean(mean + DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(mle_gradient_check(&xs, &shifted).unwrap(), 10.0, max_relative = 1e-12);
        let wrong: Vec<DVector<f64>> = vec![DVector::zeros(3)];
        assert!(matches!(mle_gradient_check(&wrong, &base), Err(EstimatorError::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn gradient_vanishes_at_sample_mean(seed in any::<u64>(), k in 2usize..=8, n in 1usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(k, k, |_, _| <f64 as Scalar>::standard_normal(&mut rng));
            let cov = &a * a.transpose() + DMatrix::identity(k, k) * 0.5;
            let cov = (&cov + cov.transpose()) * 0.5;
            let mvn = MultivariateModel::new(DVector::zeros(k), cov).unwrap();
            let xs: Vec<_> = (0..n).map(|_| mvn.sample(&mut rng)).collect();
            let mean = xs.iter().fold(DVector::zeros(k), |acc, x| acc + x) / n as f64;
            let g = mle_gradient_check(&xs, &mvn.with_mean(mean).unwrap()).unwrap();
            prop_assert!(g <= mle_gradient_tolerance::<f64>(n));
        }
    }
}
