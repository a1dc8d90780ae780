//! Fisher information, Cramér-Rao bounds and optimal data-collection
//! policies for two sensors observing a bivariate Gaussian, with a seeded
//! Monte Carlo simulator to check the analytic results.
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix `f64`, which is what the CLI and the tests use.
//!
//! ```
//! use colest_core::strategy::plan;
//! use colest_core::{ObservationModel, ResourceBudget, Scenario, Setting, Target, Task};
//!
//! let model = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
//! let budget = ResourceBudget::new(2.0, 2.0, None).unwrap();
//! let scenario = Scenario::new(Task::T1, Setting::Decentralized, budget, Target::MuY).unwrap();
//! let best = plan(&scenario, &model).unwrap();
//! assert_eq!(best.policy.as_array(), [0.0, 0.5, 0.5]);
//! assert!((best.objective_value - 6.0 / 7.0).abs() < 1e-12);
//! ```

pub mod estimators;
pub mod fisher;
pub mod model;
pub mod scalar;
pub mod simulator;
pub mod strategy;

pub use estimators::{CollectedData as CollectedDataOf, Estimate as EstimateOf, EstimatorError, EstimatorKind, Stratum};
pub use fisher::{FisherError, Matrix2 as Matrix2Of, PolicyError, SamplingPolicy as SamplingPolicyOf, Target, Task};
pub use model::{Axis, ModelError, ObservationKind, ObservationModel as ObservationModelOf, RawParams as RawParamsOf};
pub use scalar::Scalar;
pub use simulator::{Actor, SimulationError};
pub use strategy::{ConstraintRole, PlanMethod, Setting, StrategyError};

pub type ObservationModel = model::ObservationModel<f64>;
pub type RawParams = model::RawParams<f64>;
pub type Observation = model::Observation<f64>;
pub type MultivariateModel = model::MultivariateModel<f64>;
pub type Matrix2 = fisher::Matrix2<f64>;
pub type SamplingPolicy = fisher::SamplingPolicy<f64>;
pub type EmpiricalFim = fisher::EmpiricalFim<f64>;
pub type ResourceBudget = strategy::ResourceBudget<f64>;
pub type Scenario = strategy::Scenario<f64>;
pub type LinearConstraint = strategy::LinearConstraint<f64>;
pub type LinearConstraintSet = strategy::LinearConstraintSet<f64>;
pub type PlanResult = strategy::PlanResult<f64>;
pub type CollectedData = estimators::CollectedData<f64>;
pub type Estimate = estimators::Estimate<f64>;
pub type SimulationConfig = simulator::SimulationConfig<f64>;
pub type SimulationReport = simulator::SimulationReport<f64>;
pub type ResourceLedger = simulator::ResourceLedger<f64>;
pub type AuditReport = simulator::AuditReport<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type ObservationModel = crate::model::ObservationModel<f32>;
    pub type Matrix2 = crate::fisher::Matrix2<f32>;
    pub type SamplingPolicy = crate::fisher::SamplingPolicy<f32>;
    pub type Scenario = crate::strategy::Scenario<f32>;
    pub type PlanResult = crate::strategy::PlanResult<f32>;
    pub type SimulationConfig = crate::simulator::SimulationConfig<f32>;
    pub type SimulationReport = crate::simulator::SimulationReport<f32>;
}
