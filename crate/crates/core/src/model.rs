//! Bivariate Gaussian observation model, slot observations, and the small-k
//! multivariate model used by the maximum-likelihood gradient check.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, rho_limit, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variance `{name}` must be positive, got {value}")]
    NonPositiveVariance { name: &'static str, value: f64 },
    #[error("correlation must satisfy |rho| <= 1 - 1e-9, got {0}")]
    CorrelationOutOfRange(f64),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("covariance is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("mean has length {mean} but covariance is {rows}x{cols}")]
    DimensionMismatch { mean: usize, rows: usize, cols: usize },
}

/// Unvalidated five-parameter record, as read from a config file.
///
/// Keys are exactly `mu_x`, `mu_y`, `var_x`, `var_y`, `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams<T> {
    pub mu_x: T,
    pub mu_y: T,
    pub var_x: T,
    pub var_y: T,
    pub rho: T,
}

/// Validated bivariate Gaussian over (X, Y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationModel<T> {
    mu_x: T,
    mu_y: T,
    var_x: T,
    var_y: T,
    rho: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl<T: Scalar> ObservationModel<T> {
    pub fn new(mu_x: T, mu_y: T, var_x: T, var_y: T, rho: T) -> Result<Self, ModelError> {
        Self::validate(RawParams { mu_x, mu_y, var_x, var_y, rho })
    }

    /// Checks every parameter; never clamps.
    pub fn validate(raw: RawParams<T>) -> Result<Self, ModelError> {
        let fields = [
            ("mu_x", raw.mu_x),
            ("mu_y", raw.mu_y),
            ("var_x", raw.var_x),
            ("var_y", raw.var_y),
            ("rho", raw.rho),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        for (name, v) in [("var_x", raw.var_x), ("var_y", raw.var_y)] {
            if v <= T::zero() {
                return Err(ModelError::NonPositiveVariance {
                    name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if raw.rho.abs() > rho_limit::<T>() {
            return Err(ModelError::CorrelationOutOfRange(raw.rho.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            mu_x: raw.mu_x,
            mu_y: raw.mu_y,
            var_x: raw.var_x,
            var_y: raw.var_y,
            rho: raw.rho,
        })
    }

    pub fn raw(&self) -> RawParams<T> {
        RawParams {
            mu_x: self.mu_x,
            mu_y: self.mu_y,
            var_x: self.var_x,
            var_y: self.var_y,
            rho: self.rho,
        }
    }

    pub fn mu_x(&self) -> T {
        self.mu_x
    }
    pub fn mu_y(&self) -> T {
        self.mu_y
    }
    pub fn var_x(&self) -> T {
        self.var_x
    }
    pub fn var_y(&self) -> T {
        self.var_y
    }
    pub fn rho(&self) -> T {
        self.rho
    }
    pub fn sigma_x(&self) -> T {
        self.var_x.sqrt()
    }
    pub fn sigma_y(&self) -> T {
        self.var_y.sqrt()
    }
    /// `rho * sigma_x * sigma_y`.
    pub fn cov_xy(&self) -> T {
        self.rho * self.sigma_x() * self.sigma_y()
    }
    /// `1 - rho^2`, strictly positive for a validated model.
    pub fn one_minus_rho2(&self) -> T {
        T::one() - self.rho * self.rho
    }
    /// Regression slope of Y on X, `rho * sigma_y / sigma_x`.
    pub fn beta(&self) -> T {
        self.rho * self.sigma_y() / self.sigma_x()
    }

    pub fn with_rho(&self, rho: T) -> Result<Self, ModelError> {
        Self::validate(RawParams { rho, ..self.raw() })
    }

    pub fn with_means(&self, mu_x: T, mu_y: T) -> Result<Self, ModelError> {
        Self::validate(RawParams { mu_x, mu_y, ..self.raw() })
    }

    /// Draws a joint observation (x, y) by the conditional construction
    /// `y = mu_y + sigma_y (rho z1 + sqrt(1 - rho^2) z2)`.
    pub fn sample_joint<R: Rng + ?Sized>(&self, rng: &mut R) -> (T, T) {
        let z1 = T::standard_normal(rng);
        let z2 = T::standard_normal(rng);
        let x = self.mu_x + self.sigma_x() * z1;
        let y = self.mu_y + self.sigma_y() * (self.rho * z1 + self.one_minus_rho2().sqrt() * z2);
        (x, y)
    }

    pub fn sample_marginal<R: Rng + ?Sized>(&self, axis: Axis, rng: &mut R) -> T {
        let z = T::standard_normal(rng);
        match axis {
            Axis::X => self.mu_x + self.sigma_x() * z,
            Axis::Y => self.mu_y + self.sigma_y() * z,
        }
    }

    /// Log-density of a marginal observation with explicit means (used by the
    /// score oracle, which perturbs parameters).
    pub(crate) fn log_density_marginal(value: T, mean: T, var: T) -> T {
        let two_pi = lit::<T>(std::f64::consts::TAU);
        let d = value - mean;
        -lit::<T>(0.5) * ((two_pi * var).ln() + d * d / var)
    }

    /// Bivariate log-density with explicit means and correlation.
    pub(crate) fn log_density_joint(x: T, y: T, mu_x: T, mu_y: T, var_x: T, var_y: T, rho: T) -> T {
        let two_pi = lit::<T>(std::f64::consts::TAU);
        let one_m = T::one() - rho * rho;
        let zx = (x - mu_x) / var_x.sqrt();
        let zy = (y - mu_y) / var_y.sqrt();
        let q = (zx * zx - lit::<T>(2.0) * rho * zx * zy + zy * zy) / one_m;
        -(two_pi * (var_x * var_y * one_m).sqrt()).ln() - lit::<T>(0.5) * q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservationKind {
    MarginalX,
    MarginalY,
    Joint,
    Idle,
}

impl ObservationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObservationKind::MarginalX => "marginal_x",
            ObservationKind::MarginalY => "marginal_y",
            ObservationKind::Joint => "joint",
            ObservationKind::Idle => "idle",
        }
    }
}

/// What one time slot produced. The constructors keep `kind` consistent with
/// which coordinates are present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<T> {
    kind: ObservationKind,
    x: Option<T>,
    y: Option<T>,
    slot: u64,
}

impl<T: Scalar> Observation<T> {
    pub fn marginal_x(slot: u64, x: T) -> Self {
        Self { kind: ObservationKind::MarginalX, x: Some(x), y: None, slot }
    }
    pub fn marginal_y(slot: u64, y: T) -> Self {
        Self { kind: ObservationKind::MarginalY, x: None, y: Some(y), slot }
    }
    pub fn joint(slot: u64, x: T, y: T) -> Self {
        Self { kind: ObservationKind::Joint, x: Some(x), y: Some(y), slot }
    }
    pub fn idle(slot: u64) -> Self {
        Self { kind: ObservationKind::Idle, x: None, y: None, slot }
    }

    /// Builds an observation from whichever coordinates are present.
    pub fn from_parts(slot: u64, x: Option<T>, y: Option<T>) -> Self {
        match (x, y) {
            (Some(x), Some(y)) => Self::joint(slot, x, y),
            (Some(x), None) => Self::marginal_x(slot, x),
            (None, Some(y)) => Self::marginal_y(slot, y),
            (None, None) => Self::idle(slot),
        }
    }

    pub fn kind(&self) -> ObservationKind {
        self.kind
    }
    pub fn x(&self) -> Option<T> {
        self.x
    }
    pub fn y(&self) -> Option<T> {
        self.y
    }
    pub fn slot(&self) -> u64 {
        self.slot
    }
}

/// k-variate Gaussian with a symmetric positive definite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateModel<T: Scalar + RealField> {
    mean: DVector<T>,
    covariance: DMatrix<T>,
    cholesky_lower: DMatrix<T>,
}

impl<T: Scalar + RealField> MultivariateModel<T> {
    pub fn new(mean: DVector<T>, covariance: DMatrix<T>) -> Result<Self, ModelError> {
        let k = mean.len();
        if covariance.nrows() != k || covariance.ncols() != k {
            return Err(ModelError::DimensionMismatch {
                mean: k,
                rows: covariance.nrows(),
                cols: covariance.ncols(),
            });
        }
        if mean.iter().chain(covariance.iter()).any(|v| !Float::is_finite(*v)) {
            return Err(ModelError::NonFinite("multivariate parameters"));
        }
        let sym_tol = lit::<T>(1e-12);
        for i in 0..k {
            for j in 0..i {
                let d = covariance[(i, j)] - covariance[(j, i)];
                if Float::abs(d) > sym_tol {
                    return Err(ModelError::NotPositiveDefinite);
                }
            }
        }
        let chol = covariance
            .clone()
            .cholesky()
            .ok_or(ModelError::NotPositiveDefinite)?;
        let cholesky_lower = chol.l();
        Ok(Self { mean, covariance, cholesky_lower })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }
    pub fn covariance(&self) -> &DMatrix<T> {
        &self.covariance
    }

    pub fn with_mean(&self, mean: DVector<T>) -> Result<Self, ModelError> {
        if mean.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                mean: mean.len(),
                rows: self.dim(),
                cols: self.dim(),
            });
        }
        Ok(Self { mean, ..self.clone() })
    }

    /// `mean + L z` with `L` the lower Cholesky factor and `z` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        let z = DVector::from_fn(self.dim(), |_, _| T::standard_normal(rng));
        &self.mean + &self.cholesky_lower * z
    }
}
