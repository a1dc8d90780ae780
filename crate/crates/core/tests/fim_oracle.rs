use colest_core::fisher::{empirical_fim, empirical_fim_with_error, fim_for, FisherError, Matrix2, SamplingPolicy, Task};
use colest_core::model::ObservationModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn within_3se(task: Task, model: &ObservationModel<f64>, policy: &SamplingPolicy<f64>, expected: Matrix2<f64>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emp = empirical_fim_with_error(model, policy, task, 300_000, &mut rng).unwrap();
    let dims = if task == Task::T1 { 1 } else { 4 };
    for (i, ((m, s), e)) in emp.mean.entries().iter().zip(emp.std_error.entries()).zip(expected.entries()).enumerate().take(dims) {
        assert!((m - e).abs() <= 3.0 * s + 1e-9, "{task:?} entry {i}: empirical {m} ± {s}, expected {e}");
    }
}

#[test]
fn worked_t1_value() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
    let p = SamplingPolicy::new(0.0, 0.5, 0.5).unwrap();
    within_3se(Task::T1, &m, &p, Matrix2::diag(7.0 / 6.0, 0.0), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = empirical_fim(&m, &p, Task::T1, 300_000, &mut rng).unwrap().a11;
    assert!((v / (7.0 / 6.0) - 1.0).abs() < 0.02);
}

#[test]
fn worked_t2_value() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
    let p = SamplingPolicy::new(0.0, 0.0, 1.0).unwrap();
    within_3se(Task::T2, &m, &p, Matrix2::diag(4.0 / 3.0, 20.0 / 9.0), 3);
}

#[test]
fn worked_t3_values() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
    let p = SamplingPolicy::new(0.0, 0.0, 1.0).unwrap();
    within_3se(Task::T3, &m, &p, Matrix2::symmetric(4.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0), 4);
    let independent = m.with_rho(0.0).unwrap();
    within_3se(Task::T3, &independent, &p, Matrix2::identity(), 5);
}

#[test]
fn closed_forms_agree_with_oracle_off_unit_scale() {
    let m = ObservationModel::new(2.0, -1.0, 3.0, 0.5, -0.6).unwrap();
    let p = SamplingPolicy::new(0.2, 0.3, 0.4).unwrap();
    for (task, seed) in [(Task::T1, 10), (Task::T2, 11), (Task::T3, 12)] {
        within_3se(task, &m, &p, fim_for(task, &p, &m), seed);
    }
}

#[test]
fn too_few_samples_is_an_error() {
    let m = ObservationModel::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
    let p = SamplingPolicy::new(0.0, 0.5, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(matches!(
        empirical_fim(&m, &p, Task::T1, 999, &mut rng),
        Err(FisherError::InsufficientSamples { got: 999, .. })
    ));
}
