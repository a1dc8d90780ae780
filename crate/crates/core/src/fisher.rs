//! Fisher information and Cramér-Rao bounds for the three estimation tasks,
//! plus a Monte Carlo score oracle that checks every closed form.
//!
//! All bounds here are per slot. Multiply by `1/K` for K slots.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ObservationKind, ObservationModel};
use crate::scalar::{count, lit, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FisherError {
    #[error("policy carries no information about the target parameter")]
    DegeneratePolicy,
    #[error("matrix is singular (|det| <= 1e-14)")]
    SingularMatrix,
    #[error("empirical FIM needs at least {min} samples, got {got}")]
    InsufficientSamples { min: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("probability `{name}` = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("p_x + p_y + p_xy = {0} exceeds 1")]
    SimplexViolated(f64),
}

/// What is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// `mu_y` unknown; everything else (including rho and `mu_x`) known.
    T1,
    /// `mu_y` and rho unknown.
    T2,
    /// `mu_x` and `mu_y` unknown.
    T3,
}

/// Which mean a learner cares about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    MuX,
    MuY,
}

/// Symmetric 2x2 matrix, stored with both off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

impl<T: Scalar> Matrix2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn symmetric(a11: T, a12: T, a22: T) -> Self {
        Self::new(a11, a12, a12, a22)
    }

    pub fn diag(a11: T, a22: T) -> Self {
        Self::symmetric(a11, T::zero(), a22)
    }

    pub fn zeros() -> Self {
        Self::diag(T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn det(&self) -> T {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> T {
        self.a11 + self.a22
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn entries(&self) -> [T; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        self.entries()
            .iter()
            .zip(o.entries().iter())
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (self.a12 - self.a21).abs() <= tol
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> (T, T) {
        let half = lit::<T>(0.5);
        let off = half * (self.a12 + self.a21);
        let mean = half * self.trace();
        let spread = (half * (self.a11 - self.a22)).hypot(off);
        (mean - spread, mean + spread)
    }
}

/// Per-slot probabilities of a marginal-X, marginal-Y or joint observation.
/// The remainder `1 - p_x - p_y - p_xy` is the idle probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPolicy<T> {
    p_x: T,
    p_y: T,
    p_xy: T,
}

impl<T: Scalar> SamplingPolicy<T> {
    pub fn new(p_x: T, p_y: T, p_xy: T) -> Result<Self, PolicyError> {
        for (name, v) in [("p_x", p_x), ("p_y", p_y), ("p_xy", p_xy)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(PolicyError::OutOfRange { name, value: v.to_f64().unwrap_or(f64::NAN) });
            }
        }
        let total = p_x + p_y + p_xy;
        if total > T::one() + lit::<T>(1e-12).max(T::epsilon()) {
            return Err(PolicyError::SimplexViolated(total.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { p_x, p_y, p_xy })
    }

    pub fn idle() -> Self {
        Self { p_x: T::zero(), p_y: T::zero(), p_xy: T::zero() }
    }

    pub fn p_x(&self) -> T {
        self.p_x
    }
    pub fn p_y(&self) -> T {
        self.p_y
    }
    pub fn p_xy(&self) -> T {
        self.p_xy
    }
    pub fn p_idle(&self) -> T {
        (T::one() - self.p_x - self.p_y - self.p_xy).max(T::zero())
    }
    pub fn as_array(&self) -> [T; 3] {
        [self.p_x, self.p_y, self.p_xy]
    }

    /// Draws a slot type from Categorical(p_x, p_y, p_xy, idle).
    pub fn draw_kind<R: Rng + ?Sized>(&self, rng: &mut R) -> ObservationKind {
        let u = T::unit_uniform(rng);
        if u < self.p_x {
            ObservationKind::MarginalX
        } else if u < self.p_x + self.p_y {
            ObservationKind::MarginalY
        } else if u < self.p_x + self.p_y + self.p_xy {
            ObservationKind::Joint
        } else {
            ObservationKind::Idle
        }
    }
}

/// Fisher information about `mu_y` per slot when rho is known:
/// `p_y / var_y + p_xy / ((1 - rho^2) var_y)`. Marginal X samples add nothing.
pub fn info_t1<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> T {
    policy.p_y() / model.var_y() + policy.p_xy() / (model.one_minus_rho2() * model.var_y())
}

/// Cramér-Rao bound on `mu_y` per slot, `(1-rho^2) var_y / ((1-rho^2) p_y + p_xy)`.
pub fn crb_t1<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Result<T, FisherError> {
    let r = model.one_minus_rho2();
    let denom = r * policy.p_y() + policy.p_xy();
    if denom <= T::zero() {
        return Err(FisherError::DegeneratePolicy);
    }
    Ok(r * model.var_y() / denom)
}

/// FIM for (`mu_y`, rho). Diagonal: mean and correlation are orthogonal here.
pub fn fim_t2<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Matrix2<T> {
    let rho = model.rho();
    let r = model.one_minus_rho2();
    Matrix2::diag(info_t1(policy, model), policy.p_xy() * (T::one() + rho * rho) / (r * r))
}

/// Bound on `mu_y` with rho unknown. Because the FIM is diagonal this is
/// `1 / I_11` whether or not rho itself is identifiable.
pub fn crb_t2<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Result<T, FisherError> {
    let fim = fim_t2(policy, model);
    if fim.a11 <= T::zero() {
        return Err(FisherError::DegeneratePolicy);
    }
    Ok(T::one() / fim.a11)
}

/// FIM for (`mu_x`, `mu_y`).
pub fn fim_t3<T: Scalar>(policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Matrix2<T> {
    let r = model.one_minus_rho2();
    let joint = policy.p_xy() / r;
    let i11 = policy.p_x() / model.var_x() + joint / model.var_x();
    let i22 = policy.p_y() / model.var_y() + joint / model.var_y();
    let i12 = -model.rho() * joint / (model.sigma_x() * model.sigma_y());
    Matrix2::symmetric(i11, i12, i22)
}

/// Adjugate over determinant; refuses when `|det| <= 1e-14`.
pub fn invert_2x2<T: Scalar>(m: &Matrix2<T>) -> Result<Matrix2<T>, FisherError> {
    let det = m.det();
    if det.is_nan() || det.abs() <= lit::<T>(1e-14) {
        return Err(FisherError::SingularMatrix);
    }
    Ok(Matrix2::new(m.a22 / det, -m.a12 / det, -m.a21 / det, m.a11 / det))
}

/// Bound on the target mean with both means unknown, the matching diagonal
/// entry of the inverse FIM.
///
/// When the cross term vanishes (`rho * p_xy = 0`) the two means decouple and
/// the bound is `1 / I_tt`, which stays finite even if the other mean is
/// unidentifiable (e.g. `p_x = 1`).
pub fn crb_t3<T: Scalar>(
    policy: &SamplingPolicy<T>,
    model: &ObservationModel<T>,
    target: Target,
) -> Result<T, FisherError> {
    let fim = fim_t3(policy, model);
    if fim.a12 == T::zero() {
        let own = match target {
            Target::MuX => fim.a11,
            Target::MuY => fim.a22,
        };
        return if own > T::zero() { Ok(T::one() / own) } else { Err(FisherError::SingularMatrix) };
    }
    let inv = invert_2x2(&fim)?;
    Ok(match target {
        Target::MuX => inv.a11,
        Target::MuY => inv.a22,
    })
}

/// Per-slot bound on the parameter a task is after.
pub fn crb_for<T: Scalar>(
    task: Task,
    policy: &SamplingPolicy<T>,
    model: &ObservationModel<T>,
    target: Target,
) -> Result<T, FisherError> {
    match task {
        Task::T1 => crb_t1(policy, model),
        Task::T2 => crb_t2(policy, model),
        Task::T3 => crb_t3(policy, model, target),
    }
}

/// Closed-form FIM for the task's unknowns. T1 has a single unknown, reported
/// in `a11` with zeros elsewhere.
pub fn fim_for<T: Scalar>(task: Task, policy: &SamplingPolicy<T>, model: &ObservationModel<T>) -> Matrix2<T> {
    match task {
        Task::T1 => Matrix2::diag(info_t1(policy, model), T::zero()),
        Task::T2 => fim_t2(policy, model),
        Task::T3 => fim_t3(policy, model),
    }
}

/// Monte Carlo FIM estimate together with the standard error of each entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalFim<T> {
    pub mean: Matrix2<T>,
    pub std_error: Matrix2<T>,
    pub samples: usize,
}

pub const MIN_EMPIRICAL_SAMPLES: usize = 10_000;

/// Monte Carlo FIM: the average outer product of the per-slot score.
///
/// Scores come from central finite differences (step 1e-5) of the log-density,
/// so nothing here shares algebra with the closed forms above.
pub fn empirical_fim<T: Scalar, R: Rng + ?Sized>(
    model: &ObservationModel<T>,
    policy: &SamplingPolicy<T>,
    task: Task,
    n: usize,
    rng: &mut R,
) -> Result<Matrix2<T>, FisherError> {
    empirical_fim_with_error(model, policy, task, n, rng).map(|e| e.mean)
}

pub fn empirical_fim_with_error<T: Scalar, R: Rng + ?Sized>(
    model: &ObservationModel<T>,
    policy: &SamplingPolicy<T>,
    task: Task,
    n: usize,
    rng: &mut R,
) -> Result<EmpiricalFim<T>, FisherError> {
    if n < MIN_EMPIRICAL_SAMPLES {
        return Err(FisherError::InsufficientSamples { min: MIN_EMPIRICAL_SAMPLES, got: n });
    }
    let step = lit::<T>(1e-5).max(T::epsilon().cbrt());
    let rho_step = step.min((T::one() - model.rho().abs()) * lit::<T>(0.5));

    // Free parameters as (mu_x, mu_y, rho) index pairs.
    let (first, second): (usize, Option<usize>) = match task {
        Task::T1 => (1, None),
        Task::T2 => (1, Some(2)),
        Task::T3 => (0, Some(1)),
    };
    let base = [model.mu_x(), model.mu_y(), model.rho()];
    let (var_x, var_y) = (model.var_x(), model.var_y());

    let log_lik = |kind: ObservationKind, x: T, y: T, theta: &[T; 3]| -> T {
        match kind {
            ObservationKind::MarginalX => ObservationModel::log_density_marginal(x, theta[0], var_x),
            ObservationKind::MarginalY => ObservationModel::log_density_marginal(y, theta[1], var_y),
            ObservationKind::Joint => {
                ObservationModel::log_density_joint(x, y, theta[0], theta[1], var_x, var_y, theta[2])
            }
            ObservationKind::Idle => T::zero(),
        }
    };
    let score = |kind: ObservationKind, x: T, y: T, idx: usize| -> T {
        let h = if idx == 2 { rho_step } else { step };
        let mut up = base;
        let mut down = base;
        up[idx] = up[idx] + h;
        down[idx] = down[idx] - h;
        (log_lik(kind, x, y, &up) - log_lik(kind, x, y, &down)) / (h + h)
    };

    let mut sum = [T::zero(); 3];
    let mut sum_sq = [T::zero(); 3];
    for _ in 0..n {
        let kind = policy.draw_kind(rng);
        let (x, y) = match kind {
            ObservationKind::Idle => continue,
            ObservationKind::MarginalX => (model.sample_marginal(crate::model::Axis::X, rng), T::zero()),
            ObservationKind::MarginalY => (T::zero(), model.sample_marginal(crate::model::Axis::Y, rng)),
            ObservationKind::Joint => model.sample_joint(rng),
        };
        let s1 = score(kind, x, y, first);
        let s2 = second.map(|i| score(kind, x, y, i)).unwrap_or_else(T::zero);
        for (k, v) in [s1 * s1, s1 * s2, s2 * s2].into_iter().enumerate() {
            sum[k] = sum[k] + v;
            sum_sq[k] = sum_sq[k] + v * v;
        }
    }

    let nn = count::<T>(n);
    let mean: Vec<T> = sum.iter().map(|s| *s / nn).collect();
    let se: Vec<T> = (0..3)
        .map(|k| {
            let var = (sum_sq[k] / nn - mean[k] * mean[k]).max(T::zero()) * nn / (nn - T::one());
            (var / nn).sqrt()
        })
        .collect();
    Ok(EmpiricalFim {
        mean: Matrix2::symmetric(mean[0], mean[1], mean[2]),
        std_error: Matrix2::symmetric(se[0], se[1], se[2]),
        samples: n,
    })
}
