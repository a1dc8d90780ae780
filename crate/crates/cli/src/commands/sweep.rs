//! Plot-ready data for each figure. Parameters default to the figure's own
//! and can be overridden with the common flags (`--alpha`, `--rho`, `--e1`,
//! `--e2`, `--var-x`, `--var-y`); an override replaces the whole list of
//! curves for that parameter.

use clap::{Args, ValueEnum};
use colest_core::fisher::{crb_for, SamplingPolicy, Target, Task};
use colest_core::model::ObservationModel;
use colest_core::strategy::{
    constraints_for, joint_priority_threshold, plan, plan_t1_closed_form, Component, PlanMethod, PlanResult,
    ResourceBudget, Scenario, Setting, StrategyError,
};

use crate::commands::bounds::constrained_policy;
use crate::config::{grid_point, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub figure: Figure,
}

const RHO_STEP: f64 = 0.01;
const BUDGET_STEP: f64 = 0.05;
const PROB_STEP: f64 = 0.01;
const SURFACE_STEP: f64 = 0.02;

fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| grid_point(start, step, i)).collect()
}

struct Params<'a> {
    cfg: &'a RunConfig,
}

impl Params<'_> {
    fn alpha(&self) -> f64 {
        self.cfg.alpha.unwrap_or(2.0)
    }

    fn list(over: Option<f64>, defaults: &[f64]) -> Vec<f64> {
        over.map_or_else(|| defaults.to_vec(), |v| vec![v])
    }

    fn rhos(&self, defaults: &[f64]) -> Vec<f64> {
        Self::list(self.cfg.rho, defaults)
    }

    fn e1s(&self, defaults: &[f64]) -> Vec<f64> {
        Self::list(self.cfg.e1, defaults)
    }

    fn model(&self, rho: f64) -> Result<ObservationModel<f64>, CliError> {
        self.cfg.model_with_rho(rho)
    }

    fn scenario(&self, task: Task, setting: Setting, e1: f64, e2: Option<f64>, target: Target) -> Result<Scenario<f64>, CliError> {
        let budget = ResourceBudget::new(self.alpha(), e1, e2)?;
        Ok(Scenario::new(task, setting, budget, target)?)
    }
}

fn crb_or_inf(s: &Scenario<f64>, p: &SamplingPolicy<f64>, m: &ObservationModel<f64>) -> f64 {
    crb_for(s.task(), p, m, s.target()).unwrap_or(f64::INFINITY)
}

/// Plans, mapping "no information at any feasible policy" to the idle policy with an infinite bound.
fn plan_or_idle(s: &Scenario<f64>, m: &ObservationModel<f64>) -> Result<PlanResult<f64>, CliError> {
    match plan(s, m) {
        Ok(r) => Ok(r),
        Err(StrategyError::SingularEverywhere) => Ok(PlanResult {
            policy: SamplingPolicy::idle(),
            objective_value: f64::INFINITY,
            method: PlanMethod::VertexEnum,
            tie: false,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Critical correlation against alpha.
fn fig1a() -> Table {
    let mut t = Table::new(&["alpha", "rho_star", "rho_star_centralized"]);
    for alpha in steps(0.0, 10.0, BUDGET_STEP) {
        t.push(vec![
            alpha.into(),
            joint_priority_threshold(alpha, Setting::Decentralized).into(),
            joint_priority_threshold(alpha, Setting::Centralized).into(),
        ]);
    }
    t
}

/// T1 bound against p_y, with p_xy set by the S_y budget.
fn fig1b(p: &Params) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "p_y", "p_xy", "crb", "feasible"]);
    for rho in p.rhos(&[0.5]) {
        let m = p.model(rho)?;
        for e1 in p.e1s(&[f64::INFINITY, 2.0, 0.8]) {
            let s = p.scenario(Task::T1, Setting::Decentralized, e1, None, Target::MuY)?;
            for py in steps(0.0, 1.0, PROB_STEP) {
                let row = match constrained_policy(&s, Component::Py, py) {
                    Some(pol) => vec![rho.into(), e1.into(), py.into(), pol.p_xy().into(), crb_or_inf(&s, &pol, &m).into(), true.into()],
                    None => vec![rho.into(), e1.into(), py.into(), Cell::Empty, Cell::Empty, false.into()],
                };
                t.push(row);
            }
        }
    }
    Ok(t)
}

/// Optimal T1 policy against E1 for correlations below, at and above the threshold.
fn fig1c(p: &Params) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "p_y", "p_xy", "crb", "strategy", "tie"]);
    let alpha = p.alpha();
    let star = joint_priority_threshold(alpha, Setting::Decentralized);
    for rho in p.rhos(&[0.5, star, 0.9]) {
        let m = p.model(rho)?;
        for e1 in steps(0.0, 4.0, BUDGET_STEP) {
            let r = plan_t1_closed_form(alpha, e1, &m)?;
            let strategy: u64 = if rho * rho > star * star && !r.tie { 2 } else { 1 };
            t.push(vec![
                rho.into(),
                e1.into(),
                r.policy.p_y().into(),
                r.policy.p_xy().into(),
                r.objective_value.into(),
                strategy.into(),
                r.tie.into(),
            ]);
        }
    }
    Ok(t)
}

/// Decentralized T3 bound on mu_x against p_x, with p_xy set by the budgets.
fn fig2a(p: &Params) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "p_x", "p_xy", "crb", "feasible"]);
    for rho in p.rhos(&[0.5]) {
        let m = p.model(rho)?;
        for e1 in p.e1s(&[f64::INFINITY, 4.0, 2.0, 1.0]) {
            let s = p.scenario(Task::T3, Setting::Decentralized, e1, None, Target::MuX)?;
            for px in steps(0.0, 1.0, PROB_STEP) {
                let row = match constrained_policy(&s, Component::Px, px) {
                    Some(pol) => vec![rho.into(), e1.into(), px.into(), pol.p_xy().into(), crb_or_inf(&s, &pol, &m).into(), true.into()],
                    None => vec![rho.into(), e1.into(), px.into(), Cell::Empty, Cell::Empty, false.into()],
                };
                t.push(row);
            }
        }
    }
    Ok(t)
}

/// Centralized T1 optimal policy against the data-center budget.
fn fig2(p: &Params, default_e1: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "e2", "p_y", "p_xy", "crb", "tie"]);
    for rho in p.rhos(&[0.5, 0.9]) {
        let m = p.model(rho)?;
        for e1 in p.e1s(&[default_e1]) {
            for e2 in steps(0.0, 8.0, BUDGET_STEP) {
                let s = p.scenario(Task::T1, Setting::Centralized, e1, Some(e2), Target::MuY)?;
                let r = plan_or_idle(&s, &m)?;
                t.push(vec![
                    rho.into(),
                    e1.into(),
                    e2.into(),
                    r.policy.p_y().into(),
                    r.policy.p_xy().into(),
                    r.objective_value.into(),
                    r.tie.into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// Centralized T3 bound on mu_x over (p_x, p_y), with p_xy set by the budgets.
fn fig3(p: &Params) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "e2", "p_x", "p_y", "p_xy", "crb", "feasible"]);
    for rho in p.rhos(&[0.8]) {
        let m = p.model(rho)?;
        for (e1, e2) in budget_pairs(p, &[f64::INFINITY, 4.0, 2.0]) {
            let s = p.scenario(Task::T3, Setting::Centralized, e1, Some(e2), Target::MuX)?;
            let set = constraints_for(&s);
            let grid = steps(0.0, 1.0, SURFACE_STEP);
            for &px in &grid {
                for &py in grid.iter().filter(|&&py| px + py <= 1.0 + 1e-12) {
                    let row = match set.max_feasible(&[px, py, 0.0], Component::Pxy) {
                        Some(pxy) => {
                            let pol = SamplingPolicy::new(px, py, pxy)?;
                            vec![rho.into(), e1.into(), e2.into(), px.into(), py.into(), pxy.into(), crb_or_inf(&s, &pol, &m).into(), true.into()]
                        }
                        None => vec![rho.into(), e1.into(), e2.into(), px.into(), py.into(), Cell::Empty, Cell::Empty, false.into()],
                    };
                    t.push(row);
                }
            }
        }
    }
    Ok(t)
}

/// `(e1, e2)` pairs: both overridden, one overridden (the other follows), or the defaults with e1 = e2.
fn budget_pairs(p: &Params, defaults: &[f64]) -> Vec<(f64, f64)> {
    match (p.cfg.e1, p.cfg.e2) {
        (Some(a), Some(b)) => vec![(a, b)],
        (Some(a), None) => vec![(a, a)],
        (None, Some(b)) => vec![(b, b)],
        (None, None) => defaults.iter().map(|&e| (e, e)).collect(),
    }
}

/// Centralized T3 bound on mu_x against p_x = p_y for several correlations.
fn fig4_marginal(p: &Params, default_budget: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "e2", "p_marginal", "p_xy", "crb", "feasible"]);
    for (e1, e2) in budget_pairs(p, &[default_budget]) {
        let s = p.scenario(Task::T3, Setting::Centralized, e1, Some(e2), Target::MuX)?;
        let set = constraints_for(&s);
        for rho in p.rhos(&[0.2, 0.5, 0.8, 0.95]) {
            let m = p.model(rho)?;
            for v in steps(0.0, 0.5, PROB_STEP) {
                let row = match set.max_feasible(&[v, v, 0.0], Component::Pxy) {
                    Some(pxy) => {
                        let pol = SamplingPolicy::new(v, v, pxy)?;
                        vec![rho.into(), e1.into(), e2.into(), v.into(), pxy.into(), crb_or_inf(&s, &pol, &m).into(), true.into()]
                    }
                    None => vec![rho.into(), e1.into(), e2.into(), v.into(), Cell::Empty, Cell::Empty, false.into()],
                };
                t.push(row);
            }
        }
    }
    Ok(t)
}

/// Centralized T3 optimal policy against rho.
fn fig4b(p: &Params) -> Result<Table, CliError> {
    let mut t = Table::new(&["rho", "e1", "e2", "p_x", "p_y", "p_xy", "crb", "tie"]);
    for (e1, e2) in budget_pairs(p, &[2.0]) {
        let s = p.scenario(Task::T3, Setting::Centralized, e1, Some(e2), Target::MuX)?;
        for rho in steps(0.0, 0.99, RHO_STEP) {
            let r = plan_or_idle(&s, &p.model(rho)?)?;
            let q = r.policy;
            t.push(vec![
                rho.into(),
                e1.into(),
                e2.into(),
                q.p_x().into(),
                q.p_y().into(),
                q.p_xy().into(),
                r.objective_value.into(),
                r.tie.into(),
            ]);
        }
    }
    Ok(t)
}

pub const RELAXED_BUDGET: f64 = 4.0;

pub fn table(cfg: &RunConfig, figure: Figure) -> Result<Table, CliError> {
    let p = Params { cfg };
    match figure {
        Figure::Fig1a => Ok(fig1a()),
        Figure::Fig1b => fig1b(&p),
        Figure::Fig1c => fig1c(&p),
        Figure::Fig2a => fig2a(&p),
        Figure::Fig2b => fig2(&p, 2.0),
        Figure::Fig2c => fig2(&p, 10.0),
        Figure::Fig3 => fig3(&p),
        Figure::Fig4a => fig4_marginal(&p, 2.0),
        Figure::Fig4b => fig4b(&p),
        Figure::Fig4c => fig4_marginal(&p, RELAXED_BUDGET),
    }
}

pub fn run(cfg: &RunConfig, args: &SweepArgs) -> Result<(), CliError> {
    table(cfg, args.figure)?.emit(cfg.format(), cfg.out.as_deref())
}
