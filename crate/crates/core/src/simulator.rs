//! Time-slotted Monte Carlo engine.
//!
//! Each replication runs `K` slots. A slot's kind is drawn from the policy,
//! the observation comes from the model, and every actor is charged according
//! to the scenario's accounting table:
//!
//! | setting / task        | marginal X      | marginal Y      | joint                          |
//! |-----------------------|-----------------|-----------------|--------------------------------|
//! | decentralized T1, T2  | S_x: 1          | S_y: 1          | S_x: 1 + α (tx), S_y: 1 + α (rx) |
//! | decentralized T3      | S_x: 1          | S_y: 1          | each: 1 + 2α (tx + rx)         |
//! | centralized           | S_x: 1 + α, DC: α | S_y: 1 + α, DC: α | each sensor: 1 + α, DC: 2α  |
//!
//! The expected per-slot charge of each actor is the left-hand side of its
//! budget constraint. Idle slots cost nothing.
//!
//! Replication `r` draws slot types from `ChaCha8Rng::seed_from_u64(master_seed)`
//! on stream `2r` and observations on stream `2r + 1`, so results do not depend
//! on how replications are scheduled. Keeping the schedule on its own stream
//! also means two policies run with the same seed see the same uniforms for
//! their slot-type draws.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::{
    delta1, delta2, sample_mean_estimates, var_delta1_per_slot, var_delta2_per_slot, CollectedData, EstimatorError,
    EstimatorKind,
};
use crate::fisher::{crb_for, SamplingPolicy, Target, Task};
use crate::model::{Axis, Observation, ObservationKind, ObservationModel};
use crate::strategy::{constraints_for, ConstraintRole, Scenario, Setting};
use crate::scalar::{count, lit, Scalar};

pub const GENERATOR_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("policy violates constraints {0:?}")]
    InfeasiblePolicy(Vec<ConstraintRole>),
    #[error("estimator {estimator:?} does not apply to task {task:?}")]
    EstimatorMismatch { estimator: EstimatorKind, task: Task },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("every replication lacked a required stratum ({0})")]
    AllReplicationsExcluded(EstimatorError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig<T> {
    pub scenario: Scenario<T>,
    pub model: ObservationModel<T>,
    pub policy: SamplingPolicy<T>,
    pub estimator: EstimatorKind,
    /// Slots per replication (K).
    pub slots: usize,
    pub replications: usize,
    pub master_seed: u64,
}

impl<T: Scalar> SimulationConfig<T> {
    /// Which mean the configured estimator targets.
    pub fn estimand(&self) -> Target {
        match self.estimator {
            EstimatorKind::Delta1 | EstimatorKind::Delta2 => Target::MuY,
            EstimatorKind::SampleMean => self.scenario.target(),
        }
    }

    pub fn true_value(&self) -> T {
        match self.estimand() {
            Target::MuX => self.model.mu_x(),
            Target::MuY => self.model.mu_y(),
        }
    }

    fn check(&self) -> Result<(), SimulationError> {
        if self.slots == 0 || self.replications == 0 {
            return Err(SimulationError::InvalidConfig("slots and replications must be >= 1".into()));
        }
        let task = self.scenario.task();
        if matches!(self.estimator, EstimatorKind::Delta1 | EstimatorKind::Delta2) && task != Task::T1 {
            return Err(SimulationError::EstimatorMismatch { estimator: self.estimator, task });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Actor {
    SensorX,
    SensorY,
    DataCenter,
}

impl Actor {
    pub const ALL: [Actor; 3] = [Actor::SensorX, Actor::SensorY, Actor::DataCenter];

    pub fn index(self) -> usize {
        match self {
            Actor::SensorX => 0,
            Actor::SensorY => 1,
            Actor::DataCenter => 2,
        }
    }

    pub fn for_constraint(role: ConstraintRole) -> Option<Actor> {
        match role {
            ConstraintRole::SensorX => Some(Actor::SensorX),
            ConstraintRole::SensorY => Some(Actor::SensorY),
            ConstraintRole::DataCenter => Some(Actor::DataCenter),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActorCosts<T> {
    pub observation_cost: T,
    pub transmit_cost: T,
    pub receive_cost: T,
}

impl<T: Scalar> ActorCosts<T> {
    pub fn total(&self) -> T {
        self.observation_cost + self.transmit_cost + self.receive_cost
    }

    fn add(&mut self, o: &Self) {
        self.observation_cost = self.observation_cost + o.observation_cost;
        self.transmit_cost = self.transmit_cost + o.transmit_cost;
        self.receive_cost = self.receive_cost + o.receive_cost;
    }

    fn scaled(&self, f: T) -> Self {
        Self {
            observation_cost: self.observation_cost * f,
            transmit_cost: self.transmit_cost * f,
            receive_cost: self.receive_cost * f,
        }
    }
}

/// Resource totals per actor. In a [`SimulationReport`] these are averages per slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceLedger<T> {
    pub actors: [ActorCosts<T>; 3],
    /// Sum over slots of the squared per-slot total, per actor.
    total_sq: [T; 3],
    pub slots: u64,
}

impl<T: Scalar> ResourceLedger<T> {
    pub fn actor(&self, a: Actor) -> &ActorCosts<T> {
        &self.actors[a.index()]
    }

    fn charge(&mut self, costs: &[ActorCosts<T>; 3]) {
        for (i, c) in costs.iter().enumerate() {
            self.actors[i].add(c);
            let t = c.total();
            self.total_sq[i] = self.total_sq[i] + t * t;
        }
        self.slots += 1;
    }

    fn merge(&mut self, o: &Self) {
        for i in 0..3 {
            self.actors[i].add(&o.actors[i]);
            self.total_sq[i] = self.total_sq[i] + o.total_sq[i];
        }
        self.slots += o.slots;
    }

    /// Per-slot means of the totals and the standard error of each actor's mean.
    fn per_slot(&self) -> (Self, [T; 3]) {
        let n = T::from_u64(self.slots.max(1)).expect("slot count");
        let mut avg = *self;
        let mut se = [T::zero(); 3];
        for (i, se) in se.iter_mut().enumerate() {
            avg.actors[i] = self.actors[i].scaled(T::one() / n);
            avg.total_sq[i] = self.total_sq[i] / n;
            let mean = avg.actors[i].total();
            let var = (avg.total_sq[i] - mean * mean).max(T::zero());
            *se = if self.slots > 1 { (var / (n - T::one())).sqrt() } else { T::zero() };
        }
        (avg, se)
    }
}

/// Charges for one slot of the given kind, indexed by [`Actor::index`].
pub fn slot_costs<T: Scalar>(scenario: &Scenario<T>, kind: ObservationKind) -> [ActorCosts<T>; 3] {
    let alpha = scenario.budget().alpha();
    let z = T::zero();
    let obs = |transmit: T, receive: T| ActorCosts { observation_cost: T::one(), transmit_cost: transmit, receive_cost: receive };
    let none = ActorCosts::default();
    let recv = |r: T| ActorCosts { observation_cost: z, transmit_cost: z, receive_cost: r };
    match (scenario.setting(), scenario.task(), kind) {
        (_, _, ObservationKind::Idle) => [none; 3],
        (Setting::Decentralized, _, ObservationKind::MarginalX) => [obs(z, z), none, none],
        (Setting::Decentralized, _, ObservationKind::MarginalY) => [none, obs(z, z), none],
        (Setting::Decentralized, Task::T1 | Task::T2, ObservationKind::Joint) => [obs(alpha, z), obs(z, alpha), none],
        (Setting::Decentralized, Task::T3, ObservationKind::Joint) => [obs(alpha, alpha), obs(alpha, alpha), none],
        (Setting::Centralized, _, ObservationKind::MarginalX) => [obs(alpha, z), none, recv(alpha)],
        (Setting::Centralized, _, ObservationKind::MarginalY) => [none, obs(alpha, z), recv(alpha)],
        (Setting::Centralized, _, ObservationKind::Joint) => [obs(alpha, z), obs(alpha, z), recv(alpha + alpha)],
    }
}

/// Expected charge per slot for each actor under a policy.
pub fn expected_slot_cost<T: Scalar>(scenario: &Scenario<T>, policy: &SamplingPolicy<T>) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (kind, p) in [
        (ObservationKind::MarginalX, policy.p_x()),
        (ObservationKind::MarginalY, policy.p_y()),
        (ObservationKind::Joint, policy.p_xy()),
    ] {
        for (i, c) in slot_costs(scenario, kind).iter().enumerate() {
            out[i] = out[i] + p * c.total();
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SlotCounts {
    pub marginal_x: u64,
    pub marginal_y: u64,
    pub joint: u64,
    pub idle: u64,
}

impl SlotCounts {
    fn bump(&mut self, kind: ObservationKind) {
        match kind {
            ObservationKind::MarginalX => self.marginal_x += 1,
            ObservationKind::MarginalY => self.marginal_y += 1,
            ObservationKind::Joint => self.joint += 1,
            ObservationKind::Idle => self.idle += 1,
        }
    }

    fn merge(&mut self, o: &Self) {
        self.marginal_x += o.marginal_x;
        self.marginal_y += o.marginal_y;
        self.joint += o.joint;
        self.idle += o.idle;
    }

    pub fn total(&self) -> u64 {
        self.marginal_x + self.marginal_y + self.joint + self.idle
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport<T> {
    pub estimator: EstimatorKind,
    pub estimand: Target,
    pub true_value: T,
    pub mean_estimate: T,
    /// Standard error of `mean_estimate` across replications.
    pub estimate_std_error: T,
    /// K times the sample variance of the per-replication estimates.
    pub empirical_variance_per_slot: T,
    /// Standard error of `empirical_variance_per_slot`.
    pub variance_std_error: T,
    /// Per-slot CRB of the estimand (`+inf` if unidentifiable).
    pub analytic_crb: T,
    /// Per-slot analytic variance of the estimator, when known.
    pub analytic_estimator_variance: Option<T>,
    /// Average charge per slot.
    pub ledger: ResourceLedger<T>,
    /// Standard error of each actor's average per-slot charge.
    pub cost_std_error: [T; 3],
    pub slot_counts: SlotCounts,
    pub slots: usize,
    pub replications_used: usize,
    pub replications_excluded: usize,
    pub seed: u64,
    pub generator: &'static str,
}

struct Replication<T> {
    estimate: Result<T, EstimatorError>,
    counts: SlotCounts,
    ledger: ResourceLedger<T>,
}

fn replication_rngs(master_seed: u64, index: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let stream = |s: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(s);
        rng
    };
    let base = 2 * index as u64;
    (stream(base), stream(base + 1))
}

fn estimate<T: Scalar>(config: &SimulationConfig<T>, data: &CollectedData<T>) -> Result<T, EstimatorError> {
    match config.estimator {
        EstimatorKind::Delta1 => delta1(data, &config.model).map(|e| e.value),
        EstimatorKind::Delta2 => delta2(data, &config.model).map(|e| e.value),
        EstimatorKind::SampleMean => {
            let (mx, my) = sample_mean_estimates(data);
            match config.estimand() {
                Target::MuX => mx.map(|e| e.value),
                Target::MuY => my.map(|e| e.value),
            }
        }
    }
}

type TraceSink<'a, T> = &'a mut dyn FnMut(&Observation<T>, &[ActorCosts<T>; 3]);

fn run_replication<T: Scalar>(
    config: &SimulationConfig<T>,
    index: usize,
    mut trace: Option<TraceSink<'_, T>>,
) -> Replication<T> {
    let (mut schedule, mut rng) = replication_rngs(config.master_seed, index);
    let mut data = CollectedData::new();
    let mut counts = SlotCounts::default();
    let mut ledger = ResourceLedger::default();
    let model = &config.model;
    for slot in 0..config.slots as u64 {
        let kind = config.policy.draw_kind(&mut schedule);
        let obs = match kind {
            ObservationKind::MarginalX => Observation::marginal_x(slot, model.sample_marginal(Axis::X, &mut rng)),
            ObservationKind::MarginalY => Observation::marginal_y(slot, model.sample_marginal(Axis::Y, &mut rng)),
            ObservationKind::Joint => {
                let (x, y) = model.sample_joint(&mut rng);
                Observation::joint(slot, x, y)
            }
            ObservationKind::Idle => Observation::idle(slot),
        };
        let costs = slot_costs(&config.scenario, kind);
        ledger.charge(&costs);
        counts.bump(kind);
        data.push(&obs);
        if let Some(f) = trace.as_mut() {
            f(&obs, &costs);
        }
    }
    Replication { estimate: estimate(config, &data), counts, ledger }
}

/// Runs the configured simulation after checking the policy against the
/// scenario's constraints.
pub fn run<T: Scalar>(config: &SimulationConfig<T>) -> Result<SimulationReport<T>, SimulationError> {
    let set = constraints_for(&config.scenario);
    let violated = set.violations(&config.policy.as_array(), lit(crate::strategy::FEASIBILITY_TOL));
    if !violated.is_empty() {
        return Err(SimulationError::InfeasiblePolicy(violated));
    }
    run_unchecked(config)
}

/// [`run`] without the feasibility gate, for auditing deliberately
/// over-budget policies.
pub fn run_unchecked<T: Scalar>(config: &SimulationConfig<T>) -> Result<SimulationReport<T>, SimulationError> {
    config.check()?;
    let reps: Vec<Replication<T>> =
        (0..config.replications).into_par_iter().map(|i| run_replication(config, i, None)).collect();

    let mut counts = SlotCounts::default();
    let mut ledger = ResourceLedger::default();
    let mut values = Vec::with_capacity(reps.len());
    let mut first_error = None;
    for r in &reps {
        counts.merge(&r.counts);
        ledger.merge(&r.ledger);
        match &r.estimate {
            Ok(v) => values.push(*v),
            Err(e) => {
                first_error.get_or_insert_with(|| e.clone());
            }
        }
    }
    if values.is_empty() {
        return Err(SimulationError::AllReplicationsExcluded(first_error.expect("at least one replication")));
    }

    let n = count::<T>(values.len());
    let k = count::<T>(config.slots);
    let mean = values.iter().copied().sum::<T>() / n;
    let m2 = values.iter().map(|v| (*v - mean).powi(2)).sum::<T>() / n;
    let m4 = values.iter().map(|v| (*v - mean).powi(4)).sum::<T>() / n;
    let (sample_var, var_se) = if values.len() > 1 {
        let s2 = m2 * n / (n - T::one());
        (s2, ((m4 - m2 * m2).max(T::zero()) / n).sqrt())
    } else {
        (T::zero(), T::zero())
    };

    let analytic_crb =
        crb_for(config.scenario.task(), &config.policy, &config.model, config.estimand()).unwrap_or_else(|_| T::infinity());
    let p = &config.policy;
    let analytic_estimator_variance = match (config.estimator, config.estimand()) {
        (EstimatorKind::Delta1, _) => var_delta1_per_slot(p, &config.model).ok(),
        (EstimatorKind::Delta2, _) => var_delta2_per_slot(p, &config.model).ok(),
        (EstimatorKind::SampleMean, Target::MuY) => {
            let share = p.p_y() + p.p_xy();
            (share > T::zero()).then(|| config.model.var_y() / share)
        }
        (EstimatorKind::SampleMean, Target::MuX) => {
            let share = p.p_x() + p.p_xy();
            (share > T::zero()).then(|| config.model.var_x() / share)
        }
    };
    let (avg_ledger, cost_std_error) = ledger.per_slot();

    Ok(SimulationReport {
        estimator: config.estimator,
        estimand: config.estimand(),
        true_value: config.true_value(),
        mean_estimate: mean,
        estimate_std_error: (sample_var / n).sqrt(),
        empirical_variance_per_slot: k * sample_var,
        variance_std_error: k * var_se,
        analytic_crb,
        analytic_estimator_variance,
        ledger: avg_ledger,
        cost_std_error,
        slot_counts: counts,
        slots: config.slots,
        replications_used: values.len(),
        replications_excluded: reps.len() - values.len(),
        seed: config.master_seed,
        generator: GENERATOR_NAME,
    })
}

/// Writes one replication's slots as CSV: `slot,kind,x,y,cost_sx,cost_sy,cost_dc`.
/// Missing coordinates are left empty.
pub fn write_trace<T: Scalar, W: Write>(config: &SimulationConfig<T>, replication: usize, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "slot,kind,x,y,cost_sx,cost_sy,cost_dc")?;
    let mut result = Ok(());
    let mut sink = |o: &Observation<T>, c: &[ActorCosts<T>; 3]| {
        if result.is_err() {
            return;
        }
        let opt = |v: Option<T>| v.map(|v| format!("{v}")).unwrap_or_default();
        result = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            o.slot(),
            o.kind().as_str(),
            opt(o.x()),
            opt(o.y()),
            c[0].total(),
            c[1].total(),
            c[2].total()
        );
    };
    run_replication(config, replication, Some(&mut sink));
    result
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditEntry<T> {
    pub actor: Actor,
    pub role: ConstraintRole,
    pub budget: T,
    pub empirical_cost: T,
    pub std_error: T,
    /// `budget - empirical_cost`; negative when over budget.
    pub slack: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport<T> {
    pub passed: bool,
    pub entries: Vec<AuditEntry<T>>,
}

impl<T: Scalar> AuditReport<T> {
    pub fn entry(&self, actor: Actor) -> Option<&AuditEntry<T>> {
        self.entries.iter().find(|e| e.actor == actor)
    }
}

/// Checks each actor's average per-slot charge against its budget, allowing
/// three standard errors of slot-mixture noise.
pub fn audit_resources<T: Scalar>(report: &SimulationReport<T>, scenario: &Scenario<T>) -> AuditReport<T> {
    let three = lit::<T>(3.0);
    let entries: Vec<AuditEntry<T>> = constraints_for(scenario)
        .budget_constraints()
        .filter_map(|c| {
            let actor = Actor::for_constraint(c.role)?;
            let empirical_cost = report.ledger.actor(actor).total();
            let std_error = report.cost_std_error[actor.index()];
            Some(AuditEntry {
                actor,
                role: c.role,
                budget: c.bound,
                empirical_cost,
                std_error,
                slack: c.bound - empirical_cost,
                passed: empirical_cost <= c.bound + three * std_error,
            })
        })
        .collect();
    AuditReport { passed: entries.iter().all(|e| e.passed), entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::ResourceBudget;

    fn scenario(task: Task, setting: Setting, alpha: f64, e1: f64, e2: Option<f64>) -> Scenario<f64> {
        Scenario::new(task, setting, ResourceBudget::new(alpha, e1, e2).unwrap(), Target::MuX).unwrap()
    }

    fn config(scenario: Scenario<f64>, policy: [f64; 3], estimator: EstimatorKind, slots: usize, reps: usize) -> SimulationConfig<f64> {
        SimulationConfig {
            scenario,
            model: ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap(),
            policy: SamplingPolicy::new(policy[0], policy[1], policy[2]).unwrap(),
            estimator,
            slots,
            replications: reps,
            master_seed: 17,
        }
    }

    #[test]
    fn expected_cost_equals_constraint_lhs() {
        let policy = SamplingPolicy::new(0.1, 0.3, 0.4).unwrap();
        for s in [
            scenario(Task::T1, Setting::Decentralized, 2.0, 10.0, None),
            scenario(Task::T3, Setting::Decentralized, 1.5, 10.0, None),
            scenario(Task::T1, Setting::Centralized, 0.7, 10.0, Some(10.0)),
            scenario(Task::T3, Setting::Centralized, 3.0, 10.0, Some(10.0)),
        ] {
            let expected = expected_slot_cost(&s, &policy);
            for c in constraints_for(&s).budget_constraints() {
                let a = Actor::for_constraint(c.role).unwrap();
                assert!((expected[a.index()] - c.lhs(&policy.as_array())).abs() < 1e-12, "{:?} {:?}", s, c.role);
            }
        }
    }

    #[test]
    fn infeasible_policy_rejected() {
        let s = scenario(Task::T1, Setting::Decentralized, 2.0, 1.0, None);
        let cfg = config(s, [0.0, 0.0, 1.0], EstimatorKind::Delta2, 10, 2);
        assert!(matches!(run(&cfg), Err(SimulationError::InfeasiblePolicy(_))));
    }

    #[test]
    fn estimator_must_match_task() {
        let s = scenario(Task::T3, Setting::Decentralized, 2.0, f64::INFINITY, None);
        let cfg = config(s, [0.0, 0.0, 1.0], EstimatorKind::Delta2, 10, 2);
        assert!(matches!(run(&cfg), Err(SimulationError::EstimatorMismatch { .. })));
    }

    #[test]
    fn missing_strata_are_excluded_and_counted() {
        let s = scenario(Task::T1, Setting::Decentralized, 0.0, f64::INFINITY, None);
        let cfg = config(s, [0.0, 0.02, 0.02], EstimatorKind::Delta1, 20, 400);
        let r = run(&cfg).unwrap();
        assert!(r.replications_excluded > 0);
        assert_eq!(r.replications_excluded + r.replications_used, 400);
        let none = config(s, [0.0, 0.0, 0.0], EstimatorKind::Delta1, 5, 3);
        assert!(matches!(run(&none), Err(SimulationError::AllReplicationsExcluded(_))));
    }

    #[test]
    fn deterministic_and_schedule_independent() {
        let s = scenario(Task::T1, Setting::Decentralized, 2.0, 2.0, None);
        let cfg = config(s, [0.0, 0.5, 0.5], EstimatorKind::Delta1, 200, 64);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = single.install(|| run(&cfg).unwrap());
        assert_eq!(a, c);
        let mut other = cfg;
        other.master_seed = 18;
        assert_ne!(run(&other).unwrap().mean_estimate, a.mean_estimate);
    }

    #[test]
    fn schedule_is_shared_across_policies() {
        let s = scenario(Task::T1, Setting::Decentralized, 0.0, f64::INFINITY, None);
        let a = run(&config(s, [0.0, 0.5, 0.5], EstimatorKind::Delta1, 300, 20)).unwrap();
        let b = run(&config(s, [0.0, 0.5, 0.2], EstimatorKind::Delta1, 300, 20)).unwrap();
        assert_eq!(a.slot_counts.marginal_y, b.slot_counts.marginal_y);
        assert!(b.slot_counts.joint < a.slot_counts.joint);
    }

    #[test]
    fn trace_has_documented_columns() {
        let s = scenario(Task::T1, Setting::Decentralized, 2.0, 2.0, None);
        let cfg = config(s, [0.0, 0.5, 0.5], EstimatorKind::Delta1, 50, 1);
        let mut buf = Vec::new();
        write_trace(&cfg, 0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("slot,kind,x,y,cost_sx,cost_sy,cost_dc"));
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r.split(',').count() == 7));
        // joint rows charge both sensors 1 + alpha
        assert!(rows.iter().filter(|r| r.contains(",joint,")).all(|r| r.ends_with(",3,3,0")));
    }

    #[test]
    fn audit_flags_overspend() {
        let s = scenario(Task::T1, Setting::Decentralized, 2.0, 1.0, None);
        let cfg = config(s, [0.0, 0.0, 1.0], EstimatorKind::Delta2, 100, 20);
        let report = run_unchecked(&cfg).unwrap();
        let audit = audit_resources(&report, &s);
        assert!(!audit.passed);
        let sy = audit.entry(Actor::SensorY).unwrap();
        assert!((sy.slack + 2.0).abs() < 1e-12);
        assert_eq!(sy.std_error, 0.0);
    }
}
