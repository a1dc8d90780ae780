use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use colest_core::estimators::EstimatorKind;
use colest_core::fisher::{SamplingPolicy, Task};
use colest_core::simulator::{
    audit_resources, expected_slot_cost, run as simulate, write_trace, Actor, AuditReport, SimulationConfig,
    SimulationReport,
};

use crate::commands::plan;
use crate::config::{EstimatorArg, PolicyArgs, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const HEADER: [&str; 4] = ["metric", "analytic", "empirical", "std_error"];
pub const DEFAULT_SLOTS: usize = 1000;
pub const DEFAULT_REPS: usize = 1000;

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Defaults to delta1 (t1 with both strata), delta2 (t1 joint only), else sample-mean.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    /// Also dump the slots of replication 0 as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

pub fn default_estimator(task: Task, policy: &SamplingPolicy<f64>) -> EstimatorKind {
    match task {
        Task::T1 if policy.p_xy() > 0.0 && policy.p_y() > 0.0 => EstimatorKind::Delta1,
        Task::T1 if policy.p_xy() > 0.0 => EstimatorKind::Delta2,
        _ => EstimatorKind::SampleMean,
    }
}

/// Builds the simulation from flags, planning the policy when none is given.
pub fn build(cfg: &RunConfig, args: &SimulateArgs, seed: u64) -> Result<SimulationConfig<f64>, CliError> {
    let scenario = cfg.scenario()?;
    let model = cfg.model()?;
    let policy = match args.policy.policy()? {
        Some(p) => p,
        None => plan::solve(cfg)?.policy,
    };
    let estimator = args.estimator.map(EstimatorKind::from).unwrap_or_else(|| default_estimator(scenario.task(), &policy));
    let slots = cfg.slots.unwrap_or(DEFAULT_SLOTS);
    let replications = cfg.reps.unwrap_or(DEFAULT_REPS);
    if slots == 0 || replications == 0 {
        return Err(CliError::Config("slots and reps must be at least 1".into()));
    }
    Ok(SimulationConfig { scenario, model, policy, estimator, slots, replications, master_seed: seed })
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b.is_finite() && b > 0.0).then(|| a / b)
}

pub fn table(config: &SimulationConfig<f64>, report: &SimulationReport<f64>, audit: &AuditReport<f64>) -> Table {
    let mut t = Table::new(&HEADER);
    let row = |t: &mut Table, m: &str, a: Cell, e: Cell, s: Cell| t.push(vec![m.into(), a, e, s]);

    row(&mut t, "seed", Cell::Empty, report.seed.into(), Cell::Empty);
    row(&mut t, "generator", Cell::Empty, report.generator.into(), Cell::Empty);
    row(&mut t, "estimator", Cell::Empty, report.estimator.as_str().into(), Cell::Empty);
    row(&mut t, "slots", Cell::Empty, report.slots.into(), Cell::Empty);
    row(&mut t, "replications_used", Cell::Empty, report.replications_used.into(), Cell::Empty);
    row(&mut t, "replications_excluded", Cell::Empty, report.replications_excluded.into(), Cell::Empty);
    let p = config.policy;
    row(&mut t, "p_x", p.p_x().into(), Cell::Empty, Cell::Empty);
    row(&mut t, "p_y", p.p_y().into(), Cell::Empty, Cell::Empty);
    row(&mut t, "p_xy", p.p_xy().into(), Cell::Empty, Cell::Empty);

    row(&mut t, "mean_estimate", report.true_value.into(), report.mean_estimate.into(), report.estimate_std_error.into());
    row(
        &mut t,
        "variance_per_slot",
        report.analytic_estimator_variance.into(),
        report.empirical_variance_per_slot.into(),
        report.variance_std_error.into(),
    );
    row(&mut t, "crb_per_slot", report.analytic_crb.into(), Cell::Empty, Cell::Empty);
    row(
        &mut t,
        "ratio_to_crb",
        Cell::Empty,
        ratio(report.empirical_variance_per_slot, report.analytic_crb).into(),
        ratio(report.variance_std_error, report.analytic_crb).into(),
    );

    let total = report.slot_counts.total() as f64;
    for (name, prob, n) in [
        ("freq_marginal_x", p.p_x(), report.slot_counts.marginal_x),
        ("freq_marginal_y", p.p_y(), report.slot_counts.marginal_y),
        ("freq_joint", p.p_xy(), report.slot_counts.joint),
    ] {
        let se = (prob * (1.0 - prob) / total).sqrt();
        row(&mut t, name, prob.into(), (n as f64 / total).into(), se.into());
    }

    let expected = expected_slot_cost(&config.scenario, &p);
    for (name, a) in [("cost_sx", Actor::SensorX), ("cost_sy", Actor::SensorY), ("cost_dc", Actor::DataCenter)] {
        let i = a.index();
        row(&mut t, name, expected[i].into(), report.ledger.actor(a).total().into(), report.cost_std_error[i].into());
    }
    for e in &audit.entries {
        let name = format!("slack_{}", e.role.label());
        let planned = e.budget - expected[e.actor.index()];
        row(&mut t, &name, planned.into(), e.slack.into(), e.std_error.into());
    }
    row(&mut t, "audit_passed", Cell::Empty, audit.passed.into(), Cell::Empty);
    t
}

pub fn run(cfg: &RunConfig, args: &SimulateArgs) -> Result<(), CliError> {
    let seed = match cfg.seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            s
        }
    };
    let config = build(cfg, args, seed)?;
    let report = simulate(&config)?;
    let audit = audit_resources(&report, &config.scenario);
    if let Some(path) = &args.trace {
        let mut w = BufWriter::new(File::create(path)?);
        write_trace(&config, 0, &mut w)?;
    }
    table(&config, &report, &audit).emit(cfg.format(), cfg.out.as_deref())
}
