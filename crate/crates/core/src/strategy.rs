//! Resource constraints per scenario and the planners that pick a
//! CRB-minimizing sampling policy inside them.
//!
//! Three solvers:
//! - the piecewise closed form for one unknown mean in the decentralized setting,
//! - exact vertex enumeration whenever the objective is linear in the policy
//!   (Fisher information about `mu_y`),
//! - coarse grid plus local refinement for the two-means bound, which is a
//!   ratio of polynomials in the policy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fisher::{crb_for, crb_t1, PolicyError, SamplingPolicy, Target, Task};
use crate::model::ObservationModel;
use crate::scalar::{count, lit, Scalar};

/// Feasibility tolerance for constraint checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Relative tolerance for `rho^2 == alpha / (alpha + 1)`.
pub const THRESHOLD_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("no feasible policy exists")]
    InfeasibleScenario,
    #[error("the target parameter is unidentifiable everywhere in the feasible region")]
    SingularEverywhere,
    #[error("planner `{planner}` does not handle task {task:?}")]
    WrongTask { planner: &'static str, task: Task },
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Decentralized,
    Centralized,
}

/// Communication cost ratio and per-actor budgets (expected spend per slot).
/// Budgets may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceBudget<T> {
    alpha: T,
    e1: T,
    e2: Option<T>,
}

impl<T: Scalar> ResourceBudget<T> {
    pub fn new(alpha: T, e1: T, e2: Option<T>) -> Result<Self, StrategyError> {
        if !alpha.is_finite() || alpha < T::zero() {
            return Err(StrategyError::InvalidBudget(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if e1.is_nan() || e1 < T::zero() {
            return Err(StrategyError::InvalidBudget(format!("e1 must be >= 0, got {e1}")));
        }
        if let Some(e2) = e2 {
            if e2.is_nan() || e2 < T::zero() {
                return Err(StrategyError::InvalidBudget(format!("e2 must be >= 0, got {e2}")));
            }
        }
        Ok(Self { alpha, e1, e2 })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn e1(&self) -> T {
        self.e1
    }
    pub fn e2(&self) -> Option<T> {
        self.e2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T> {
    task: Task,
    setting: Setting,
    budget: ResourceBudget<T>,
    target: Target,
}

impl<T: Scalar> Scenario<T> {
    /// `e2` must be present exactly when the setting is centralized. For T1 and
    /// T2 the target is always `mu_y`.
    pub fn new(task: Task, setting: Setting, budget: ResourceBudget<T>, target: Target) -> Result<Self, StrategyError> {
        match (setting, budget.e2) {
            (Setting::Centralized, None) => {
                return Err(StrategyError::InvalidBudget("centralized setting needs a data-center budget e2".into()))
            }
            (Setting::Decentralized, Some(_)) => {
                return Err(StrategyError::InvalidBudget("e2 only applies to the centralized setting".into()))
            }
            _ => {}
        }
        let target = match task {
            Task::T1 | Task::T2 => Target::MuY,
            Task::T3 => target,
        };
        Ok(Self { task, setting, budget, target })
    }

    pub fn task(&self) -> Task {
        self.task
    }
    pub fn setting(&self) -> Setting {
        self.setting
    }
    pub fn budget(&self) -> &ResourceBudget<T> {
        &self.budget
    }
    pub fn target(&self) -> Target {
        self.target
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Px,
    Py,
    Pxy,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::Px => 0,
            Component::Py => 1,
            Component::Pxy => 2,
        }
    }
}

/// Why a constraint exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintRole {
    SensorX,
    SensorY,
    DataCenter,
    Simplex,
    NonNegative(Component),
    /// `p_x <= 0`: stand-alone X samples carry no information about `mu_y`.
    ExcludeMarginalX,
}

impl ConstraintRole {
    pub fn is_budget(self) -> bool {
        matches!(self, ConstraintRole::SensorX | ConstraintRole::SensorY | ConstraintRole::DataCenter)
    }

    pub fn label(self) -> &'static str {
        match self {
            ConstraintRole::SensorX => "sensor_x",
            ConstraintRole::SensorY => "sensor_y",
            ConstraintRole::DataCenter => "data_center",
            ConstraintRole::Simplex => "simplex",
            ConstraintRole::NonNegative(Component::Px) => "p_x_nonneg",
            ConstraintRole::NonNegative(Component::Py) => "p_y_nonneg",
            ConstraintRole::NonNegative(Component::Pxy) => "p_xy_nonneg",
            ConstraintRole::ExcludeMarginalX => "p_x_zero",
        }
    }
}

/// `coeffs . (p_x, p_y, p_xy) <= bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: [T; 3],
    pub bound: T,
    pub role: ConstraintRole,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn lhs(&self, p: &[T; 3]) -> T {
        self.coeffs[0] * p[0] + self.coeffs[1] * p[1] + self.coeffs[2] * p[2]
    }

    pub fn slack(&self, p: &[T; 3]) -> T {
        self.bound - self.lhs(p)
    }

    pub fn holds(&self, p: &[T; 3], tol: T) -> bool {
        self.lhs(p) <= self.bound + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraintSet<T> {
    constraints: Vec<LinearConstraint<T>>,
}

impl<T: Scalar> LinearConstraintSet<T> {
    /// Nonnegativity and the simplex bound.
    pub fn simplex() -> Self {
        let (o, z) = (T::one(), T::zero());
        let neg = -T::one();
        Self {
            constraints: vec![
                LinearConstraint { coeffs: [neg, z, z], bound: z, role: ConstraintRole::NonNegative(Component::Px) },
                LinearConstraint { coeffs: [z, neg, z], bound: z, role: ConstraintRole::NonNegative(Component::Py) },
                LinearConstraint { coeffs: [z, z, neg], bound: z, role: ConstraintRole::NonNegative(Component::Pxy) },
                LinearConstraint { coeffs: [o, o, o], bound: o, role: ConstraintRole::Simplex },
            ],
        }
    }

    pub fn push(&mut self, c: LinearConstraint<T>) {
        self.constraints.push(c);
    }

    pub fn constraints(&self) -> &[LinearConstraint<T>] {
        &self.constraints
    }

    pub fn get(&self, role: ConstraintRole) -> Option<&LinearConstraint<T>> {
        self.constraints.iter().find(|c| c.role == role)
    }

    pub fn without(&self, role: ConstraintRole) -> Self {
        Self { constraints: self.constraints.iter().copied().filter(|c| c.role != role).collect() }
    }

    pub fn budget_constraints(&self) -> impl Iterator<Item = &LinearConstraint<T>> {
        self.constraints.iter().filter(|c| c.role.is_budget())
    }

    pub fn is_feasible(&self, p: &[T; 3], tol: T) -> bool {
        self.constraints.iter().all(|c| c.holds(p, tol))
    }

    pub fn contains(&self, policy: &SamplingPolicy<T>) -> bool {
        self.is_feasible(&policy.as_array(), lit(FEASIBILITY_TOL))
    }

    pub fn violations(&self, p: &[T; 3], tol: T) -> Vec<ConstraintRole> {
        self.constraints.iter().filter(|c| !c.holds(p, tol)).map(|c| c.role).collect()
    }

    /// Largest value of `component` with the other two fixed at `p`, or `None`
    /// if even zero is infeasible.
    pub fn max_feasible(&self, p: &[T; 3], component: Component) -> Option<T> {
        let i = component.index();
        let mut base = *p;
        base[i] = T::zero();
        if !self.is_feasible(&base, lit(FEASIBILITY_TOL)) {
            return None;
        }
        let mut best = T::infinity();
        for c in &self.constraints {
            if c.coeffs[i] > T::zero() && c.bound.is_finite() {
                best = best.min((c.bound - c.lhs(&base)) / c.coeffs[i]);
            }
        }
        Some(best.max(T::zero()))
    }
}

/// The exact constraint system for a scenario.
pub fn constraints_for<T: Scalar>(scenario: &Scenario<T>) -> LinearConstraintSet<T> {
    let b = scenario.budget();
    let (alpha, e1) = (b.alpha(), b.e1());
    let (o, z) = (T::one(), T::zero());
    let mut set = LinearConstraintSet::simplex();
    match (scenario.setting(), scenario.task()) {
        (Setting::Decentralized, Task::T1 | Task::T2) => {
            let joint = alpha + o;
            set.push(LinearConstraint { coeffs: [o, z, joint], bound: e1, role: ConstraintRole::SensorX });
            set.push(LinearConstraint { coeffs: [z, o, joint], bound: e1, role: ConstraintRole::SensorY });
            set.push(LinearConstraint { coeffs: [o, z, z], bound: z, role: ConstraintRole::ExcludeMarginalX });
        }
        (Setting::Decentralized, Task::T3) => {
            let joint = alpha + alpha + o;
            set.push(LinearConstraint { coeffs: [o, z, joint], bound: e1, role: ConstraintRole::SensorX });
            set.push(LinearConstraint { coeffs: [z, o, joint], bound: e1, role: ConstraintRole::SensorY });
        }
        (Setting::Centralized, _) => {
            let per_obs = alpha + o;
            let e2 = b.e2().unwrap_or_else(T::infinity);
            set.push(LinearConstraint { coeffs: [per_obs, z, per_obs], bound: e1, role: ConstraintRole::SensorX });
            set.push(LinearConstraint { coeffs: [z, per_obs, per_obs], bound: e1, role: ConstraintRole::SensorY });
            set.push(LinearConstraint {
                coeffs: [alpha, alpha, alpha + alpha],
                bound: e2,
                role: ConstraintRole::DataCenter,
            });
        }
    }
    set
}

/// Critical |rho| above which joint observations should be prioritized.
///
/// Decentralized: `sqrt(alpha / (alpha + 1))`. Centralized: the data center
/// pays twice for a joint sample what it pays for a marginal one, which is the
/// decentralized rule at `alpha = 1`, i.e. `sqrt(2)/2`.
pub fn joint_priority_threshold<T: Scalar>(alpha: T, setting: Setting) -> T {
    let a = match setting {
        Setting::Decentralized => alpha,
        Setting::Centralized => T::one(),
    };
    (a / (a + T::one())).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlanMethod {
    ClosedForm,
    VertexEnum,
    GridRefine,
}

impl PlanMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanMethod::ClosedForm => "ClosedForm",
            PlanMethod::VertexEnum => "VertexEnum",
            PlanMethod::GridRefine => "GridRefine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanResult<T> {
    pub policy: SamplingPolicy<T>,
    /// Minimized per-slot CRB of the target parameter (`+inf` if unidentifiable).
    pub objective_value: T,
    pub method: PlanMethod,
    /// The optimum is not unique; `policy` is the one with the fewest joint samples.
    pub tie: bool,
}

fn policy_from<T: Scalar>(p: [T; 3]) -> Result<SamplingPolicy<T>, PolicyError> {
    let clean = |v: T| if v.abs() < lit::<T>(1e-13) { T::zero() } else { v.min(T::one()) };
    let mut q = [clean(p[0]), clean(p[1]), clean(p[2])];
    let total = q[0] + q[1] + q[2];
    if total > T::one() && total <= T::one() + lit::<T>(1e-9) {
        let excess = total - T::one();
        // Shave the rounding excess off the largest component.
        let i = (0..3).fold(0, |best, i| if q[i] > q[best] { i } else { best });
        q[i] = q[i] - excess;
    }
    SamplingPolicy::new(q[0], q[1], q[2])
}

/// Piecewise optimal policy for one unknown mean, decentralized setting.
///
/// Below the threshold (Strategy 1) marginal Y samples come first and any
/// leftover budget buys joint samples; above it (Strategy 2) the whole budget
/// goes to joint samples. Exactly at the threshold both are optimal and the
/// one with fewer joint samples is returned with `tie = true`.
pub fn plan_t1_closed_form<T: Scalar>(alpha: T, e1: T, model: &ObservationModel<T>) -> Result<PlanResult<T>, StrategyError> {
    ResourceBudget::new(alpha, e1, None)?;
    let o = T::one();
    let threshold = alpha / (alpha + o);
    let rho2 = model.rho() * model.rho();
    let at_threshold = (rho2 - threshold).abs() <= lit(THRESHOLD_TIE_TOL);

    let (p_y, p_xy) = if e1 >= alpha + o {
        (T::zero(), o)
    } else if rho2 > threshold && !at_threshold {
        (T::zero(), e1 / (alpha + o))
    } else if e1 < o {
        (e1, T::zero())
    } else {
        let p_xy = (e1 - o) / alpha;
        (o - p_xy, p_xy)
    };
    let policy = policy_from([T::zero(), p_y, p_xy])?;
    let objective_value = crb_t1(&policy, model).unwrap_or_else(|_| T::infinity());
    Ok(PlanResult {
        policy,
        objective_value,
        method: PlanMethod::ClosedForm,
        tie: at_threshold && e1 < alpha + o && e1 > T::zero(),
    })
}

/// Result of maximizing a linear objective over a constraint polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearOptimum<T> {
    pub point: [T; 3],
    pub value: T,
    pub tie: bool,
}

fn solve3<T: Scalar>(a: [[T; 3]; 3], b: [T; 3]) -> Option<[T; 3]> {
    let det3 = |m: [[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(a);
    let scale = a.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
    if d.abs() <= lit::<T>(1e-12) * scale * scale * scale {
        return None;
    }
    let mut x = [T::zero(); 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xi = det3(m) / d;
    }
    Some(x)
}

/// Maximizes `objective . p` over the polytope by enumerating every vertex
/// (intersection of three constraint planes). Co-optimal vertices set `tie`;
/// the winner is the one with the smallest `p_xy`, then `p_x`, then `p_y`.
pub fn maximize_linear<T: Scalar>(set: &LinearConstraintSet<T>, objective: [T; 3]) -> Result<LinearOptimum<T>, StrategyError> {
    let planes: Vec<_> = set.constraints().iter().filter(|c| c.bound.is_finite()).collect();
    let tol = lit::<T>(FEASIBILITY_TOL);
    let mut vertices: Vec<[T; 3]> = Vec::new();
    for i in 0..planes.len() {
        for j in (i + 1)..planes.len() {
            for k in (j + 1)..planes.len() {
                let a = [planes[i].coeffs, planes[j].coeffs, planes[k].coeffs];
                let b = [planes[i].bound, planes[j].bound, planes[k].bound];
                let Some(v) = solve3(a, b) else { continue };
                if !set.is_feasible(&v, tol) {
                    continue;
                }
                let dup = vertices.iter().any(|w| (0..3).all(|d| (w[d] - v[d]).abs() <= tol));
                if !dup {
                    vertices.push(v);
                }
            }
        }
    }
    if vertices.is_empty() {
        return Err(StrategyError::InfeasibleScenario);
    }
    let value = |v: &[T; 3]| objective[0] * v[0] + objective[1] * v[1] + objective[2] * v[2];
    let best = vertices.iter().map(value).fold(T::neg_infinity(), T::max);
    let band = lit::<T>(1e-12) * best.abs().max(T::one());
    let co_optimal: Vec<&[T; 3]> = vertices.iter().filter(|v| value(v) >= best - band).collect();
    let point = **co_optimal
        .iter()
        .min_by(|a, b| {
            (a[2], a[0], a[1])
                .partial_cmp(&(b[2], b[0], b[1]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("at least one co-optimal vertex");
    Ok(LinearOptimum { point, value: value(&point), tie: co_optimal.len() > 1 })
}

/// Objective coefficients of `info_t1` over (p_x, p_y, p_xy).
pub fn info_t1_coefficients<T: Scalar>(model: &ObservationModel<T>) -> [T; 3] {
    [T::zero(), T::one() / model.var_y(), T::one() / (model.one_minus_rho2() * model.var_y())]
}

/// Maximizes Fisher information about `mu_y` (T1/T2) by vertex enumeration.
/// `p_x = 0` is enforced in every setting.
pub fn plan_linear<T: Scalar>(scenario: &Scenario<T>, model: &ObservationModel<T>) -> Result<PlanResult<T>, StrategyError> {
    if scenario.task() == Task::T3 {
        return Err(StrategyError::WrongTask { planner: "plan_linear", task: Task::T3 });
    }
    let mut set = constraints_for(scenario);
    if set.get(ConstraintRole::ExcludeMarginalX).is_none() {
        let (o, z) = (T::one(), T::zero());
        set.push(LinearConstraint { coeffs: [o, z, z], bound: z, role: ConstraintRole::ExcludeMarginalX });
    }
    let opt = maximize_linear(&set, info_t1_coefficients(model))?;
    let policy = policy_from(opt.point)?;
    let objective_value = if opt.value > T::zero() { T::one() / opt.value } else { T::infinity() };
    Ok(PlanResult { policy, objective_value, method: PlanMethod::VertexEnum, tie: opt.tie })
}

/// Coarse grid step and refinement schedule for [`plan_t3`].
pub const GRID_COARSE_STEPS: usize = 100;
pub const GRID_REFINE_ROUNDS: usize = 3;
const GRID_REFINE_HALF_WIDTH: i64 = 10;
const GRID_RECENTER_LIMIT: usize = 64;

#[derive(Clone, Copy)]
struct Candidate<T> {
    p: [T; 3],
    value: T,
}

/// Deterministic winner: minimum value within a relative band, then the
/// smallest `p_xy`, then `p_x`, then `p_y`. Returns the winner and how many
/// candidates fell inside the band.
fn select<T: Scalar>(cands: &[Candidate<T>], rel_band: T) -> Option<(Candidate<T>, usize)> {
    let best = cands.iter().map(|c| c.value).fold(T::infinity(), T::min);
    if !best.is_finite() {
        return None;
    }
    let cutoff = best + rel_band * best.abs().max(T::min_positive_value());
    let mut n = 0;
    let mut winner: Option<Candidate<T>> = None;
    for c in cands.iter().filter(|c| c.value <= cutoff) {
        n += 1;
        let better = match &winner {
            None => true,
            Some(w) => (c.p[2], c.p[0], c.p[1]) < (w.p[2], w.p[0], w.p[1]),
        };
        if better {
            winner = Some(*c);
        }
    }
    winner.map(|w| (w, n))
}

/// Minimizes the two-means bound on the scenario's target over the feasible
/// polytope: a 0.01 grid over the simplex, then three refinement levels
/// (0.001, 1e-4, 1e-5), each re-centering its ±10-step window until the
/// incumbent stops moving.
pub fn plan_t3<T: Scalar>(scenario: &Scenario<T>, model: &ObservationModel<T>) -> Result<PlanResult<T>, StrategyError> {
    if scenario.task() != Task::T3 {
        return Err(StrategyError::WrongTask { planner: "plan_t3", task: scenario.task() });
    }
    let set = constraints_for(scenario);
    let target = scenario.target();
    let tol = lit::<T>(FEASIBILITY_TOL);
    let eval = |p: [T; 3]| -> Candidate<T> {
        let value = if set.is_feasible(&p, tol) {
            SamplingPolicy::new(p[0], p[1], p[2])
                .ok()
                .and_then(|pol| crb_for(Task::T3, &pol, model, target).ok())
                .unwrap_or_else(T::infinity)
        } else {
            T::infinity()
        };
        Candidate { p, value }
    };

    let n = GRID_COARSE_STEPS;
    let coarse_step = T::one() / count::<T>(n);
    let coarse: Vec<Candidate<T>> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..=(n - i)).flat_map(move |j| (0..=(n - i - j)).map(move |k| (i, j, k)))
        })
        .map(|(i, j, k)| eval([count::<T>(i) * coarse_step, count::<T>(j) * coarse_step, count::<T>(k) * coarse_step]))
        .collect();
    let (mut incumbent, co_optimal) =
        select(&coarse, lit::<T>(1e-9)).ok_or(StrategyError::SingularEverywhere)?;
    let tie = co_optimal > 1;

    let mut step = coarse_step;
    for _ in 0..GRID_REFINE_ROUNDS {
        step = step / lit::<T>(10.0);
        for _ in 0..GRID_RECENTER_LIMIT {
            let center = incumbent.p;
            let w = GRID_REFINE_HALF_WIDTH;
            let offsets: Vec<(i64, i64, i64)> = (-w..=w)
                .flat_map(|a| (-w..=w).flat_map(move |b| (-w..=w).map(move |c| (a, b, c))))
                .collect();
            let mut local: Vec<Candidate<T>> = offsets
                .par_iter()
                .filter_map(|&(a, b, c)| {
                    let shift = |v: T, o: i64| v + T::from_i64(o).expect("small offset") * step;
                    let p = [shift(center[0], a), shift(center[1], b), shift(center[2], c)];
                    if p.iter().any(|v| *v < -tol || *v > T::one() + tol) {
                        return None;
                    }
                    let p = [p[0].max(T::zero()), p[1].max(T::zero()), p[2].max(T::zero())];
                    Some(eval(p))
                })
                .collect();
            local.push(incumbent);
            let (next, _) = select(&local, lit::<T>(1e-12)).expect("incumbent is finite");
            let moved = next.p != incumbent.p;
            incumbent = next;
            if !moved {
                break;
            }
        }
    }

    let policy = policy_from(incumbent.p)?;
    let objective_value = crb_for(Task::T3, &policy, model, target).unwrap_or(incumbent.value);
    Ok(PlanResult { policy, objective_value, method: PlanMethod::GridRefine, tie })
}

/// Picks the planner for a scenario: closed form for decentralized T1/T2,
/// vertex enumeration for centralized T1/T2, grid refinement for T3.
pub fn plan<T: Scalar>(scenario: &Scenario<T>, model: &ObservationModel<T>) -> Result<PlanResult<T>, StrategyError> {
    let result = match (scenario.task(), scenario.setting()) {
        (Task::T1 | Task::T2, Setting::Decentralized) => {
            plan_t1_closed_form(scenario.budget().alpha(), scenario.budget().e1(), model)?
        }
        (Task::T1 | Task::T2, Setting::Centralized) => plan_linear(scenario, model)?,
        (Task::T3, _) => plan_t3(scenario, model)?,
    };
    if !result.objective_value.is_finite() {
        return Err(StrategyError::SingularEverywhere);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(rho: f64) -> ObservationModel<f64> {
        ObservationModel::new(0.0, 0.0, 1.0, 1.0, rho).unwrap()
    }

    fn dec(task: Task, alpha: f64, e1: f64) -> Scenario<f64> {
        Scenario::new(task, Setting::Decentralized, ResourceBudget::new(alpha, e1, None).unwrap(), Target::MuX).unwrap()
    }

    fn cen(task: Task, alpha: f64, e1: f64, e2: f64) -> Scenario<f64> {
        Scenario::new(task, Setting::Centralized, ResourceBudget::new(alpha, e1, Some(e2)).unwrap(), Target::MuX).unwrap()
    }

    fn coeffs(set: &LinearConstraintSet<f64>, role: ConstraintRole) -> ([f64; 3], f64) {
        let c = set.get(role).unwrap();
        (c.coeffs, c.bound)
    }

    #[test]
    fn scenario_requires_e2_iff_centralized() {
        let b = ResourceBudget::new(1.0, 1.0, None).unwrap();
        assert!(Scenario::new(Task::T1, Setting::Centralized, b, Target::MuY).is_err());
        let b2 = ResourceBudget::new(1.0, 1.0, Some(1.0)).unwrap();
        assert!(Scenario::new(Task::T1, Setting::Decentralized, b2, Target::MuY).is_err());
        assert!(ResourceBudget::new(-1.0, 1.0, None).is_err());
        assert!(ResourceBudget::new(1.0, -0.5, None).is_err());
        assert!(ResourceBudget::new(1.0, f64::INFINITY, None).is_ok());
        // T1 always targets mu_y
        assert_eq!(dec(Task::T1, 1.0, 1.0).target(), Target::MuY);
    }

    #[test]
    fn decentralized_t1_constraints() {
        let set = constraints_for(&dec(Task::T1, 2.0, 2.0));
        assert_eq!(coeffs(&set, ConstraintRole::SensorY), ([0.0, 1.0, 3.0], 2.0));
        assert_eq!(coeffs(&set, ConstraintRole::SensorX), ([1.0, 0.0, 3.0], 2.0));
        assert_eq!(coeffs(&set, ConstraintRole::ExcludeMarginalX), ([1.0, 0.0, 0.0], 0.0));
        assert_eq!(coeffs(&set, ConstraintRole::Simplex), ([1.0, 1.0, 1.0], 1.0));
        assert!(set.get(ConstraintRole::DataCenter).is_none());
        assert_eq!(set.constraints().len(), 7);
    }

    #[test]
    fn decentralized_t3_constraints() {
        let set = constraints_for(&dec(Task::T3, 2.0, 2.0));
        assert_eq!(coeffs(&set, ConstraintRole::SensorX), ([1.0, 0.0, 5.0], 2.0));
        assert_eq!(coeffs(&set, ConstraintRole::SensorY), ([0.0, 1.0, 5.0], 2.0));
        assert!(set.get(ConstraintRole::ExcludeMarginalX).is_none());
    }

    #[test]
    fn centralized_constraints() {
        let set = constraints_for(&cen(Task::T1, 1.0, 10.0, 1.0));
        assert_eq!(coeffs(&set, ConstraintRole::SensorX), ([2.0, 0.0, 2.0], 10.0));
        assert_eq!(coeffs(&set, ConstraintRole::SensorY), ([0.0, 2.0, 2.0], 10.0));
        // alpha (p_x + p_y + 2 p_xy) <= E2 with alpha = 1
        assert_eq!(coeffs(&set, ConstraintRole::DataCenter), ([1.0, 1.0, 2.0], 1.0));
    }

    #[test]
    fn origin_always_feasible() {
        for s in [dec(Task::T1, 3.0, 0.0), dec(Task::T3, 0.0, 0.0), cen(Task::T2, 5.0, 0.0, 0.0)] {
            assert!(constraints_for(&s).is_feasible(&[0.0; 3], 0.0));
        }
    }

    #[test]
    fn thresholds() {
        assert_relative_eq!(joint_priority_threshold(2.0, Setting::Decentralized), (2.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        assert_eq!(joint_priority_threshold(0.0, Setting::Decentralized), 0.0);
        assert_relative_eq!(joint_priority_threshold(7.0, Setting::Centralized), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_eq!(
            joint_priority_threshold(1.0, Setting::Decentralized),
            joint_priority_threshold(3.0, Setting::Centralized)
        );
    }

    fn assert_policy(p: &SamplingPolicy<f64>, expected: [f64; 3]) {
        let a = p.as_array();
        for i in 0..3 {
            assert!((a[i] - expected[i]).abs() < 1e-12, "{a:?} vs {expected:?}");
        }
    }

    #[test]
    fn closed_form_cases() {
        let r = plan_t1_closed_form(2.0, 2.0, &model(0.5)).unwrap();
        assert_policy(&r.policy, [0.0, 0.5, 0.5]);
        assert!(!r.tie);
        assert_policy(&plan_t1_closed_form(2.0, 0.8, &model(0.5)).unwrap().policy, [0.0, 0.8, 0.0]);
        assert_policy(&plan_t1_closed_form(2.0, 2.0, &model(0.9)).unwrap().policy, [0.0, 0.0, 2.0 / 3.0]);
        for rho in [0.0, 0.5, 0.99] {
            assert_policy(&plan_t1_closed_form(2.0, 3.5, &model(rho)).unwrap().policy, [0.0, 0.0, 1.0]);
        }
        let star = (2.0f64 / 3.0).sqrt();
        let t = plan_t1_closed_form(2.0, 2.0, &model(star)).unwrap();
        assert!(t.tie);
        assert_policy(&t.policy, [0.0, 0.5, 0.5]);
        // both strategies give the same bound at the threshold
        let s2 = SamplingPolicy::new(0.0, 0.0, 2.0 / 3.0).unwrap();
        assert_relative_eq!(t.objective_value, crb_t1(&s2, &model(star)).unwrap(), max_relative = 1e-9);
        let none = plan_t1_closed_form(2.0, 0.0, &model(0.5)).unwrap();
        assert!(none.objective_value.is_infinite());
    }

    #[test]
    fn plan_linear_matches_closed_form_example() {
        let r = plan_linear(&dec(Task::T1, 2.0, 2.0), &model(0.5)).unwrap();
        assert_policy(&r.policy, [0.0, 0.5, 0.5]);
        assert_relative_eq!(r.objective_value, 6.0 / 7.0, max_relative = 1e-12);
        assert_eq!(r.method, PlanMethod::VertexEnum);
    }

    #[test]
    fn plan_linear_centralized() {
        let big = plan_linear(&cen(Task::T1, 2.0, 3.0, 1e6), &model(0.9)).unwrap();
        assert_policy(&big.policy, [0.0, 0.0, 1.0]);
        let tight = plan_linear(&cen(Task::T1, 2.0, 10.0, 1.0), &model(0.9)).unwrap();
        assert_policy(&tight.policy, [0.0, 0.0, 0.25]);
        let inf = plan_linear(&cen(Task::T2, 2.0, f64::INFINITY, f64::INFINITY), &model(0.3)).unwrap();
        assert_policy(&inf.policy, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn plan_linear_rejects_t3() {
        assert!(matches!(plan_linear(&dec(Task::T3, 1.0, 1.0), &model(0.5)), Err(StrategyError::WrongTask { .. })));
        assert!(matches!(plan_t3(&dec(Task::T1, 1.0, 1.0), &model(0.5)), Err(StrategyError::WrongTask { .. })));
    }

    #[test]
    fn dropping_exclusion_still_yields_zero_marginal_x() {
        let s = dec(Task::T1, 2.0, 2.0);
        for rho in [0.1, 0.5, 0.85, 0.95] {
            let m = model(rho);
            let free = constraints_for(&s).without(ConstraintRole::ExcludeMarginalX);
            let opt = maximize_linear(&free, info_t1_coefficients(&m)).unwrap();
            let pinned = plan_linear(&s, &m).unwrap();
            assert_eq!(opt.point[0], 0.0);
            assert_relative_eq!(1.0 / opt.value, pinned.objective_value, max_relative = 1e-12);
        }
    }

    #[test]
    fn t3_unconstrained_does_not_use_correlation() {
        let s = dec(Task::T3, 2.0, f64::INFINITY);
        let r = plan_t3(&s, &model(0.5)).unwrap();
        assert!((r.objective_value - 1.0).abs() < 1e-12);
        assert!(r.tie);
        assert_policy(&r.policy, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn t3_centralized_interior() {
        let s = cen(Task::T3, 2.0, 2.0, 2.0);
        let r = plan_t3(&s, &model(0.8)).unwrap();
        let p = r.policy;
        assert!(p.p_x() > 0.0 && p.p_y() > 0.0 && p.p_xy() > 0.0, "{p:?}");
        assert!(constraints_for(&s).contains(&p));
        assert!(!r.tie);
    }

    #[test]
    fn zero_budget_is_singular_everywhere() {
        assert_eq!(plan_t3(&dec(Task::T3, 2.0, 0.0), &model(0.5)).unwrap_err(), StrategyError::SingularEverywhere);
        assert_eq!(plan(&dec(Task::T1, 2.0, 0.0), &model(0.5)).unwrap_err(), StrategyError::SingularEverywhere);
    }

    #[test]
    fn max_feasible_follows_active_constraint() {
        let set = constraints_for(&dec(Task::T1, 2.0, 2.0));
        let m = set.max_feasible(&[0.0, 0.2, 0.0], Component::Pxy).unwrap();
        assert_relative_eq!(m, 0.6, max_relative = 1e-12);
        let m = set.max_feasible(&[0.0, 0.8, 0.0], Component::Pxy).unwrap();
        assert_relative_eq!(m, 0.2, max_relative = 1e-12);
        let tight = constraints_for(&dec(Task::T1, 2.0, 0.5));
        assert!(tight.max_feasible(&[0.0, 0.8, 0.0], Component::Pxy).is_none());
    }
}
