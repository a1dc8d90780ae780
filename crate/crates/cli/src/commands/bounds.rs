use clap::{Args, ValueEnum};
use colest_core::fisher::{crb_for, SamplingPolicy};
use colest_core::model::ObservationModel;
use colest_core::strategy::{constraints_for, plan, Component, Scenario, StrategyError};

use crate::config::{Range, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const HEADER: [&str; 4] = ["sweep_var", "value", "crb", "feasible"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    #[value(name = "p_x")]
    Px,
    #[value(name = "p_y")]
    Py,
    #[value(name = "p_xy")]
    Pxy,
    #[value(name = "rho")]
    Rho,
    #[value(name = "e1")]
    E1,
    #[value(name = "e2")]
    E2,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Px => "p_x",
            SweepVar::Py => "p_y",
            SweepVar::Pxy => "p_xy",
            SweepVar::Rho => "rho",
            SweepVar::E1 => "e1",
            SweepVar::E2 => "e2",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub sweep: Option<SweepVar>,
    /// START:STOP:STEP, both ends included.
    #[arg(long)]
    pub range: Option<Range>,
}

/// The probability that absorbs the remaining budget when `swept` is fixed.
pub fn dependent(swept: Component) -> Component {
    match swept {
        Component::Pxy => Component::Py,
        Component::Px | Component::Py => Component::Pxy,
    }
}

/// Policy with `swept = value`, the dependent probability pushed to its
/// largest feasible value, and the third at zero. `None` when `value` alone
/// is infeasible.
pub fn constrained_policy(scenario: &Scenario<f64>, swept: Component, value: f64) -> Option<SamplingPolicy<f64>> {
    let set = constraints_for(scenario);
    let mut p = [0.0; 3];
    p[swept.index()] = value;
    let dep = dependent(swept);
    let room = set.max_feasible(&p, dep)?;
    p[dep.index()] = room;
    SamplingPolicy::new(p[0], p[1], p[2]).ok()
}

fn crb_or_inf(scenario: &Scenario<f64>, policy: &SamplingPolicy<f64>, model: &ObservationModel<f64>) -> f64 {
    crb_for(scenario.task(), policy, model, scenario.target()).unwrap_or(f64::INFINITY)
}

fn planned(scenario: &Scenario<f64>, model: &ObservationModel<f64>) -> Result<f64, CliError> {
    match plan(scenario, model) {
        Ok(r) => Ok(r.objective_value),
        Err(StrategyError::SingularEverywhere) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

pub fn table(cfg: &RunConfig, args: &BoundsArgs) -> Result<Table, CliError> {
    let var = args.sweep.ok_or(CliError::Missing("sweep"))?;
    let range = args.range.ok_or(CliError::Missing("range"))?;
    let mut t = Table::new(&HEADER);
    for value in range.points() {
        let (crb, feasible) = match var {
            SweepVar::Px | SweepVar::Py | SweepVar::Pxy => {
                let swept = match var {
                    SweepVar::Px => Component::Px,
                    SweepVar::Py => Component::Py,
                    _ => Component::Pxy,
                };
                let scenario = cfg.scenario()?;
                let model = cfg.model()?;
                match (0.0..=1.0).contains(&value).then(|| constrained_policy(&scenario, swept, value)).flatten() {
                    Some(p) => (crb_or_inf(&scenario, &p, &model), true),
                    None => (f64::NAN, false),
                }
            }
            SweepVar::Rho => (planned(&cfg.scenario()?, &cfg.model_with_rho(value)?)?, true),
            SweepVar::E1 => (planned(&cfg.scenario_with(value, cfg.e2)?, &cfg.model()?)?, true),
            SweepVar::E2 => {
                let e1 = cfg.e1.ok_or(CliError::Missing("e1"))?;
                (planned(&cfg.scenario_with(e1, Some(value))?, &cfg.model()?)?, true)
            }
        };
        t.push(vec![var.name().into(), value.into(), Cell::Float(crb), feasible.into()]);
    }
    Ok(t)
}

pub fn run(cfg: &RunConfig, args: &BoundsArgs) -> Result<(), CliError> {
    table(cfg, args)?.emit(cfg.format(), cfg.out.as_deref())
}
