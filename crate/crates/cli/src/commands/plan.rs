use colest_core::strategy::{plan, PlanResult};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Table;

pub const HEADER: [&str; 6] = ["p_x", "p_y", "p_xy", "objective", "method", "tie"];

/// Solves the configured scenario. A budget that admits no information at
/// all is reported as degenerate.
pub fn solve(cfg: &RunConfig) -> Result<PlanResult<f64>, CliError> {
    let scenario = cfg.scenario()?;
    let model = cfg.model()?;
    Ok(plan(&scenario, &model)?)
}

pub fn table(result: &PlanResult<f64>) -> Table {
    let mut t = Table::new(&HEADER);
    let p = result.policy;
    t.push(vec![
        p.p_x().into(),
        p.p_y().into(),
        p.p_xy().into(),
        result.objective_value.into(),
        result.method.as_str().into(),
        result.tie.into(),
    ]);
    t
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let result = solve(cfg)?;
    table(&result).emit(cfg.format(), cfg.out.as_deref())
}
