use colest_core::estimators::EstimatorKind;
use colest_core::fisher::{SamplingPolicy, Target, Task};
use colest_core::model::ObservationModel;
use colest_core::simulator::{audit_resources, expected_slot_cost, run, run_unchecked, Actor, SimulationConfig};
use colest_core::strategy::{plan, plan_t1_closed_form, ResourceBudget, Scenario, Setting};

fn scenario(task: Task, setting: Setting, alpha: f64, e1: f64, e2: Option<f64>, target: Target) -> Scenario<f64> {
    Scenario::new(task, setting, ResourceBudget::new(alpha, e1, e2).unwrap(), target).unwrap()
}

fn config(
    scenario: Scenario<f64>,
    model: ObservationModel<f64>,
    policy: SamplingPolicy<f64>,
    estimator: EstimatorKind,
    slots: usize,
    reps: usize,
    seed: u64,
) -> SimulationConfig<f64> {
    SimulationConfig { scenario, model, policy, estimator, slots, replications: reps, master_seed: seed }
}

#[test]
fn delta1_attains_bound() {
    let s = scenario(Task::T1, Setting::Decentralized, 2.0, 2.0, None, Target::MuY);
    let m = ObservationModel::new(0.0, 1.0, 1.0, 1.0, 0.5).unwrap();
    let p = SamplingPolicy::new(0.0, 0.5, 0.5).unwrap();
    let r = run(&config(s, m, p, EstimatorKind::Delta1, 1000, 10_000, 31)).unwrap();
    let target = 6.0 / 7.0;
    assert!((r.empirical_variance_per_slot / target - 1.0).abs() < 0.05, "{}", r.empirical_variance_per_slot);
    assert!((r.analytic_crb - target).abs() < 1e-12);
    assert!((r.analytic_estimator_variance.unwrap() - target).abs() < 1e-12);
    assert_eq!(r.replications_excluded, 0);
}

#[test]
fn delta2_joint_only() {
    let s = scenario(Task::T1, Setting::Decentralized, 0.0, f64::INFINITY, None, Target::MuY);
    let p = SamplingPolicy::new(0.0, 0.0, 1.0).unwrap();
    for (rho, expected) in [(0.0, 2.0), (0.9, 0.19 * 2.0)] {
        let m = ObservationModel::new(0.0, 0.0, 1.0, 2.0, rho).unwrap();
        let r = run(&config(s, m, p, EstimatorKind::Delta2, 1000, 10_000, 32)).unwrap();
        assert!((r.empirical_variance_per_slot / expected - 1.0).abs() < 0.05, "rho {rho}: {}", r.empirical_variance_per_slot);
        // Dominance over the plain mean of y.
        assert!(r.empirical_variance_per_slot <= 2.0 * 1.05);
    }
}

#[test]
fn slot_frequencies_match_policy() {
    let s = scenario(Task::T3, Setting::Decentralized, 1.0, f64::INFINITY, None, Target::MuX);
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.3).unwrap();
    let p = SamplingPolicy::new(0.15, 0.25, 0.35).unwrap();
    let r = run(&config(s, m, p, EstimatorKind::SampleMean, 1000, 1000, 33)).unwrap();
    let n = r.slot_counts.total() as f64;
    assert_eq!(n, 1e6);
    for (count, prob) in [
        (r.slot_counts.marginal_x, 0.15),
        (r.slot_counts.marginal_y, 0.25),
        (r.slot_counts.joint, 0.35),
        (r.slot_counts.idle, 0.25),
    ] {
        let se = (prob * (1.0 - prob) / n).sqrt();
        assert!((count as f64 / n - prob).abs() <= 3.0 * se, "{count} vs {prob}");
    }
}

#[test]
fn ledger_tracks_constraint_lhs() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.6).unwrap();
    let p = SamplingPolicy::new(0.1, 0.2, 0.3).unwrap();
    for (i, s) in [
        scenario(Task::T1, Setting::Decentralized, 2.0, 10.0, None, Target::MuY),
        scenario(Task::T3, Setting::Decentralized, 1.5, 10.0, None, Target::MuX),
        scenario(Task::T2, Setting::Centralized, 0.5, 10.0, Some(10.0), Target::MuY),
        scenario(Task::T3, Setting::Centralized, 3.0, 10.0, Some(10.0), Target::MuY),
    ]
    .into_iter()
    .enumerate()
    {
        let r = run_unchecked(&config(s, m, p, EstimatorKind::SampleMean, 500, 400, 40 + i as u64)).unwrap();
        let expected = expected_slot_cost(&s, &p);
        for a in Actor::ALL {
            let got = r.ledger.actor(a).total();
            let se = r.cost_std_error[a.index()];
            assert!((got - expected[a.index()]).abs() <= 3.0 * se + 1e-12, "{s:?} {a:?}: {got} vs {}", expected[a.index()]);
            let c = r.ledger.actor(a);
            assert!(c.observation_cost >= 0.0 && c.transmit_cost >= 0.0 && c.receive_cost >= 0.0);
        }
    }
}

#[test]
fn variance_never_beats_bound_beyond_noise() {
    let m = ObservationModel::new(1.0, 2.0, 1.5, 0.8, 0.75).unwrap();
    let cases = [
        (scenario(Task::T1, Setting::Decentralized, 2.0, 2.0, None, Target::MuY), EstimatorKind::Delta1),
        (scenario(Task::T1, Setting::Decentralized, 1.0, 1.5, None, Target::MuY), EstimatorKind::Delta1),
        (scenario(Task::T2, Setting::Decentralized, 2.0, 2.0, None, Target::MuY), EstimatorKind::SampleMean),
        (scenario(Task::T3, Setting::Centralized, 2.0, 2.0, Some(2.0), Target::MuX), EstimatorKind::SampleMean),
    ];
    for (i, (s, est)) in cases.into_iter().enumerate() {
        let plan = plan(&s, &m).unwrap();
        // Joint-only plans are matched by the UMVUE instead.
        let est = if est == EstimatorKind::Delta1 && plan.policy.p_y() == 0.0 { EstimatorKind::Delta2 } else { est };
        let r = run(&config(s, m, plan.policy, est, 400, 4000, 50 + i as u64)).unwrap();
        assert!(
            r.empirical_variance_per_slot >= r.analytic_crb - 3.0 * r.variance_std_error,
            "{s:?}: {} < {}",
            r.empirical_variance_per_slot,
            r.analytic_crb
        );
        assert!(audit_resources(&r, &s).passed);
    }
}

#[test]
fn audit_of_saturating_plan() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.9).unwrap();
    let planned = plan_t1_closed_form(2.0f64, 2.0, &m).unwrap();
    assert!((planned.policy.p_xy() - 2.0 / 3.0).abs() < 1e-12);
    let s = scenario(Task::T1, Setting::Decentralized, 2.0, 2.0, None, Target::MuY);
    let r = run(&config(s, m, planned.policy, EstimatorKind::Delta2, 1000, 1000, 60)).unwrap();
    let audit = audit_resources(&r, &s);
    assert!(audit.passed);
    let sy = audit.entry(Actor::SensorY).unwrap();
    assert!((sy.empirical_cost - 2.0).abs() <= 3.0 * sy.std_error);
    assert!(sy.slack.abs() <= 3.0 * sy.std_error);
}

#[test]
fn audit_of_marginal_only_policy() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.2).unwrap();
    let p = SamplingPolicy::new(0.0, 1.0, 0.0).unwrap();
    for e1 in [1.0, 1.5, 4.0] {
        let s = scenario(Task::T1, Setting::Decentralized, 2.0, e1, None, Target::MuY);
        let r = run(&config(s, m, p, EstimatorKind::SampleMean, 100, 10, 61)).unwrap();
        let sy = *audit_resources(&r, &s).entry(Actor::SensorY).unwrap();
        assert_eq!(sy.empirical_cost, 1.0);
        assert!(sy.passed);
    }
}
