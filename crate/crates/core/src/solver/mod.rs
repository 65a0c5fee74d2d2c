//! Interior-point (log-barrier) minimization of the total cost over the
//! design box and the two nonlinear constraints, with Latin-hypercube
//! multi-start.

mod barrier;
mod grid;
mod inner;
mod multistart;

use serde::{Deserialize, Serialize};

use crate::domain::{DesignBounds, DesignVector, Variable, WeightVector, DIM};
use crate::error::{Error, Result};
use crate::objective::{evaluate_unchecked, ObjectiveCoefficients, ObjectiveValues, ScaledCost};

pub(crate) use barrier::BarrierModel;
pub use grid::{grid_search, GridSearchResult};
pub use inner::InnerMethod;
pub use multistart::{latin_hypercube_starts, multi_start_solve, repair_to_interior};

/// Default seed when neither the configuration nor the environment sets one.
pub const DEFAULT_SEED: u64 = 20_210_527;

/// Slack (in scaled units) below which a bound or constraint is reported
/// as binding.
pub const ACTIVE_SLACK: f64 = 1e-6;

/// Nonlinear inequality constraints `A·l ≥ volume_min` and
/// `η/A ≥ tolerance_ratio_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    /// m³
    pub volume_min: f64,
    /// 1/m²
    pub tolerance_ratio_min: f64,
}

impl Default for ConstraintSet {
    fn default() -> Self {
        Self { volume_min: 0.025, tolerance_ratio_min: 1.5 }
    }
}

impl ConstraintSet {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("volume_min", self.volume_min), ("tolerance_ratio_min", self.tolerance_ratio_min)]
        {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// `[A·l − volume_min, η/A − tolerance_ratio_min]`.
    pub fn evaluate(&self, x: &DesignVector) -> [f64; 2] {
        [
            x.frontal_area * x.length - self.volume_min,
            x.docking_tolerance / x.frontal_area - self.tolerance_ratio_min,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub barrier_initial: f64,
    pub barrier_shrink: f64,
    pub barrier_floor: f64,
    pub kkt_tolerance: f64,
    pub max_outer_iterations: usize,
    pub max_inner_iterations: usize,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub multistart_count: usize,
    pub seed: u64,
    pub inner_method: InnerMethod,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            barrier_initial: 1.0,
            barrier_shrink: 0.1,
            barrier_floor: 1e-10,
            kkt_tolerance: 1e-8,
            max_outer_iterations: 50,
            max_inner_iterations: 200,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            multistart_count: 16,
            seed: DEFAULT_SEED,
            inner_method: InnerMethod::default(),
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("barrier_initial", self.barrier_initial),
            ("barrier_shrink", self.barrier_shrink),
            ("barrier_floor", self.barrier_floor),
            ("kkt_tolerance", self.kkt_tolerance),
            ("armijo_c", self.armijo_c),
            ("backtrack_factor", self.backtrack_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("solver.{name} must be > 0")));
            }
        }
        if self.barrier_shrink >= 1.0 {
            return Err(Error::InvalidArgument("solver.barrier_shrink must be < 1".into()));
        }
        if self.backtrack_factor >= 1.0 {
            return Err(Error::InvalidArgument("solver.backtrack_factor must be < 1".into()));
        }
        if self.armijo_c >= 1.0 {
            return Err(Error::InvalidArgument("solver.armijo_c must be < 1".into()));
        }
        if self.max_outer_iterations == 0 || self.max_inner_iterations == 0 {
            return Err(Error::InvalidArgument("solver iteration caps must be >= 1".into()));
        }
        if self.multistart_count == 0 {
            return Err(Error::InvalidArgument("solver.multistart_count must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    IterationLimit,
    LineSearchFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::IterationLimit => "IterationLimit",
            Status::LineSearchFailure => "LineSearchFailure",
        }
    }
}

/// A bound or constraint whose scaled slack is below [`ACTIVE_SLACK`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveConstraint {
    Lower(Variable),
    Upper(Variable),
    Volume,
    ToleranceRatio,
}

impl std::fmt::Display for ActiveConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActiveConstraint::Lower(v) => write!(f, "{v} at lower bound"),
            ActiveConstraint::Upper(v) => write!(f, "{v} at upper bound"),
            ActiveConstraint::Volume => f.write_str("volume constraint A·l"),
            ActiveConstraint::ToleranceRatio => f.write_str("tolerance-ratio constraint eta/A"),
        }
    }
}

/// One barrier level of the continuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub mu: f64,
    /// `J` at the end of the level.
    pub objective: f64,
    pub kkt_residual: f64,
    pub inner_iterations: usize,
}

/// Agreement statistics across multi-start runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiStartSummary {
    pub starts: usize,
    pub converged: usize,
    /// Converged runs within `1e-4` (∞-norm) of the returned optimum.
    pub agreeing: usize,
    /// Fewer than 80% of converged runs agree with the returned optimum.
    pub multimodal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub x_star: DesignVector,
    pub objective: ObjectiveValues,
    pub kkt_residual: f64,
    /// `[g1 (m³), g2 (1/m²)]`
    pub constraint_values: [f64; 2],
    pub active_set: Vec<ActiveConstraint>,
    pub iterations: usize,
    pub status: Status,
    pub start_index: usize,
    pub trace: Vec<OuterRecord>,
    pub multistart: Option<MultiStartSummary>,
}

/// The solver minimizes `J / max(p, q, r, s)`: the argmin is unchanged and
/// every tolerance and barrier level becomes invariant to uniform scaling
/// of the weights.
pub(crate) fn normalized_cost(w: &WeightVector, coeff: &ObjectiveCoefficients) -> ScaledCost {
    let scale = w.to_array().into_iter().fold(0.0, f64::max);
    ScaledCost::new(&w.scaled(1.0 / scale), coeff)
}

fn validate_problem(
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    bounds: &DesignBounds,
    cons: &ConstraintSet,
) -> Result<()> {
    w.validate()?;
    coeff.validate()?;
    bounds.validate()?;
    cons.validate()
}

/// Barrier objective `J(x) − μ Σ ln(scaled slack)` over all ten bound slacks
/// and both nonlinear constraints.
pub fn barrier_objective(
    x: &DesignVector,
    mu: f64,
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    cons: &ConstraintSet,
    bounds: &DesignBounds,
) -> Result<f64> {
    validate_problem(w, coeff, bounds, cons)?;
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument("barrier parameter must be finite and >= 0".into()));
    }
    let model = BarrierModel::new(ScaledCost::new(w, coeff), bounds, cons);
    model.value_checked(&model.to_z(&x.to_array()), mu)
}

/// Scaled KKT residual, in units of the weight-normalized cost: stationarity of the barrier Lagrangian with
/// `λ_i = μ / slack_i`, combined with complementarity `λ_i·slack_i = μ`
/// measured against the zero target of the original problem.
fn kkt_residual(gradient: &[f64; DIM], mu: f64) -> f64 {
    gradient.iter().fold(mu, |m, g| m.max(g.abs()))
}

/// Barrier continuation from one start point.
///
/// A start outside the interior is clipped into the box with a `1e-3`
/// range margin and, if a nonlinear constraint is still violated, pulled
/// toward a strictly feasible anchor by a feasibility line search.
pub fn solve(
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    bounds: &DesignBounds,
    cons: &ConstraintSet,
    x_init: &DesignVector,
    settings: &SolverSettings,
) -> Result<SolveResult> {
    validate_problem(w, coeff, bounds, cons)?;
    settings.validate()?;
    let model = BarrierModel::new(normalized_cost(w, coeff), bounds, cons);
    let start = multistart::interior_start(&model, x_init)?;
    Ok(run_barrier(&model, start, w, coeff, cons, settings, 0))
}

pub(crate) fn run_barrier(
    model: &BarrierModel,
    start_z: [f64; DIM],
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    cons: &ConstraintSet,
    settings: &SolverSettings,
    start_index: usize,
) -> SolveResult {
    let mut z = start_z;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let inverse_shrink = 1.0 / settings.barrier_shrink;
    let mut level = 0i32;
    let mut mu = settings.barrier_initial;

    let status = loop {
        if trace.len() >= settings.max_outer_iterations {
            break Status::IterationLimit;
        }
        let inner = inner::minimize(model, z, mu, settings);
        z = inner.z;
        iterations += inner.iterations;
        residual = kkt_residual(&inner.gradient, mu);
        trace.push(OuterRecord {
            mu,
            objective: evaluate_unchecked(&model.design(&z), w, coeff).total,
            kkt_residual: residual,
            inner_iterations: inner.iterations,
        });
        if residual <= settings.kkt_tolerance {
            break Status::Converged;
        }
        if inner.outcome == inner::InnerOutcome::Stalled {
            break Status::LineSearchFailure;
        }
        if mu <= settings.barrier_floor {
            break Status::IterationLimit;
        }
        level += 1;
        // Dividing by an exact power keeps decimal schedules exact.
        mu = (settings.barrier_initial / inverse_shrink.powi(level)).max(settings.barrier_floor);
    };

    let x_star = model.design(&z);
    let slacks = model.slacks(&z);
    let mut active_set = Vec::new();
    for var in Variable::ALL {
        if slacks.lower[var.index()] < ACTIVE_SLACK {
            active_set.push(ActiveConstraint::Lower(var));
        }
        if slacks.upper[var.index()] < ACTIVE_SLACK {
            active_set.push(ActiveConstraint::Upper(var));
        }
    }
    if slacks.volume < ACTIVE_SLACK {
        active_set.push(ActiveConstraint::Volume);
    }
    if slacks.ratio < ACTIVE_SLACK {
        active_set.push(ActiveConstraint::ToleranceRatio);
    }

    SolveResult {
        x_star,
        objective: evaluate_unchecked(&x_star, w, coeff),
        kkt_residual: residual,
        constraint_values: cons.evaluate(&x_star),
        active_set,
        iterations,
        status,
        start_index,
        trace,
        multistart: None,
    }
}
