//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use colest_core::estimators::EstimatorKind;
use colest_core::fisher::{SamplingPolicy, Target, Task};
use colest_core::model::ObservationModel;
use colest_core::strategy::{ResourceBudget, Scenario, Setting};
use serde::Deserialize;

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    T1,
    T2,
    T3,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::T1 => Task::T1,
            TaskArg::T2 => Task::T2,
            TaskArg::T3 => Task::T3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingArg {
    Decentralized,
    Centralized,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::Decentralized => Setting::Decentralized,
            SettingArg::Centralized => Setting::Centralized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    MuX,
    MuY,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::MuX => Target::MuX,
            TargetArg::MuY => Target::MuY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    Delta1,
    Delta2,
    SampleMean,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Delta1 => EstimatorKind::Delta1,
            EstimatorArg::Delta2 => EstimatorKind::Delta2,
            EstimatorArg::SampleMean => EstimatorKind::SampleMean,
        }
    }
}

/// Flags shared by every subcommand. The same keys (snake_case) are accepted
/// in the `--config` TOML file; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    #[arg(long, value_enum)]
    pub setting: Option<SettingArg>,
    /// Cost of one transmission or reception relative to one observation.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Per-sensor budget per slot (`inf` for none).
    #[arg(long)]
    pub e1: Option<f64>,
    /// Data-center budget per slot (`inf` for none); centralized only.
    #[arg(long)]
    pub e2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_y: Option<f64>,
    #[arg(long)]
    pub var_x: Option<f64>,
    #[arg(long)]
    pub var_y: Option<f64>,
    /// Mean of interest; defaults to mu-y for t1/t2 and mu-x for t3.
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Slots per replication.
    #[arg(long)]
    pub slots: Option<usize>,
    /// Number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with any of the keys above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($flags:ident, $file:ident, $($field:ident),*) => {
        RunConfig { $($field: $flags.$field.or($file.$field),)* config: None }
    };
}

impl RunConfig {
    /// Applies the `--config` file, if any, underneath the flags.
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = Self::from_file(&path)?;
        let flags = self;
        Ok(overlay!(
            flags, file, task, setting, alpha, e1, e2, rho, mu_x, mu_y, var_x, var_y, target, seed, slots, reps, out,
            format
        ))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn task(&self) -> Result<Task, CliError> {
        self.task.map(Task::from).ok_or(CliError::Missing("task"))
    }

    pub fn setting(&self) -> Result<Setting, CliError> {
        self.setting.map(Setting::from).ok_or(CliError::Missing("setting"))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn target_for(&self, task: Task) -> Target {
        match (self.target, task) {
            (Some(t), Task::T3) => t.into(),
            (_, Task::T3) => Target::MuX,
            _ => Target::MuY,
        }
    }

    pub fn model(&self) -> Result<ObservationModel<f64>, CliError> {
        let rho = self.rho.ok_or(CliError::Missing("rho"))?;
        self.model_with_rho(rho)
    }

    pub fn model_with_rho(&self, rho: f64) -> Result<ObservationModel<f64>, CliError> {
        ObservationModel::new(
            self.mu_x.unwrap_or(0.0),
            self.mu_y.unwrap_or(0.0),
            self.var_x.unwrap_or(1.0),
            self.var_y.unwrap_or(1.0),
            rho,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn scenario(&self) -> Result<Scenario<f64>, CliError> {
        let e1 = self.e1.ok_or(CliError::Missing("e1"))?;
        self.scenario_with(e1, self.e2)
    }

    /// Scenario with the budgets replaced; `e2` is required exactly when centralized.
    pub fn scenario_with(&self, e1: f64, e2: Option<f64>) -> Result<Scenario<f64>, CliError> {
        let task = self.task()?;
        let setting = self.setting()?;
        let alpha = self.alpha.ok_or(CliError::Missing("alpha"))?;
        let e2 = match setting {
            Setting::Centralized => Some(e2.ok_or(CliError::Missing("e2"))?),
            Setting::Decentralized if e2.is_some() => {
                return Err(CliError::Config("e2 applies only to the centralized setting".into()))
            }
            Setting::Decentralized => None,
        };
        let budget = ResourceBudget::new(alpha, e1, e2)?;
        Ok(Scenario::new(task, setting, budget, self.target_for(task))?)
    }
}

/// Explicit policy flags for `simulate`.
#[derive(Debug, Clone, Copy, Default, Args)]
pub struct PolicyArgs {
    #[arg(long)]
    pub p_x: Option<f64>,
    #[arg(long)]
    pub p_y: Option<f64>,
    #[arg(long)]
    pub p_xy: Option<f64>,
}

impl PolicyArgs {
    /// The explicit policy, if any component was given; missing ones are 0.
    pub fn policy(&self) -> Result<Option<SamplingPolicy<f64>>, CliError> {
        if self.p_x.is_none() && self.p_y.is_none() && self.p_xy.is_none() {
            return Ok(None);
        }
        SamplingPolicy::new(self.p_x.unwrap_or(0.0), self.p_y.unwrap_or(0.0), self.p_xy.unwrap_or(0.0))
            .map(Some)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// `START:STOP:STEP`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

pub const MAX_RANGE_POINTS: usize = 10_000_000;

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("range must be START:STOP:STEP, got `{s}`"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}` in range `{s}`"));
        let r = Range { start: num(a)?, stop: num(b)?, step: num(c)? };
        if !(r.start.is_finite() && r.stop.is_finite() && r.step.is_finite()) {
            return Err(format!("range `{s}` must be finite"));
        }
        if r.step <= 0.0 || r.stop < r.start {
            return Err(format!("range `{s}` needs STEP > 0 and STOP >= START"));
        }
        if (r.stop - r.start) / r.step >= MAX_RANGE_POINTS as f64 {
            return Err(format!("range `{s}` has too many points"));
        }
        Ok(r)
    }
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| grid_point(self.start, self.step, i)).collect()
    }
}

/// `start + i·step`, snapped to 12 decimals so grids print cleanly.
pub fn grid_point(start: f64, step: f64, i: usize) -> f64 {
    let v = start + step * i as f64;
    (v * 1e12).round() / 1e12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: Range = "0:1:0.25".parse().unwrap();
        assert_eq!(r.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let r: Range = "0:1:0.01".parse().unwrap();
        assert_eq!(r.points().len(), 101);
        assert_eq!(r.points()[7], 0.07);
        assert!("0:1".parse::<Range>().is_err());
        assert!("1:0:0.1".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
        assert!("0:x:0.1".parse::<Range>().is_err());
    }

    #[test]
    fn file_values_sit_under_flags() {
        let dir = std::env::temp_dir().join(format!("colest-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "task = \"t1\"\nsetting = \"decentralized\"\nalpha = 2.0\ne1 = inf\nrho = 0.3\n").unwrap();
        let flags = RunConfig { rho: Some(0.5), config: Some(path), ..Default::default() };
        let c = flags.resolve().unwrap();
        assert_eq!(c.rho, Some(0.5));
        assert_eq!(c.alpha, Some(2.0));
        assert_eq!(c.e1, Some(f64::INFINITY));
        assert_eq!(c.task, Some(TaskArg::T1));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("rhoo = 0.5").is_err());
    }

    #[test]
    fn missing_fields_are_named() {
        let c = RunConfig { task: Some(TaskArg::T1), setting: Some(SettingArg::Decentralized), ..Default::default() };
        assert_eq!(c.model().unwrap_err().to_string(), "missing required field `rho`");
        assert_eq!(c.scenario().unwrap_err().to_string(), "missing required field `e1`");
    }
}
