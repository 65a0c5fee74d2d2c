//! The three built-in design intents and coefficient calibration.

use serde::{Deserialize, Serialize};

use crate::domain::{DesignBounds, DesignVector, WeightVector, DIM};
use crate::error::{Error, Result};
use crate::objective::ObjectiveCoefficients;
use crate::solver::{multi_start_solve, ConstraintSet, SolveResult, SolverSettings};

/// Relative per-component tolerance for calibrated-match checks.
pub const DEFAULT_EXPECTED_TOLERANCE: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub weights: WeightVector,
    #[serde(default)]
    pub bounds: DesignBounds,
    #[serde(default)]
    pub constraints: ConstraintSet,
    #[serde(default = "DesignVector::initial_guess")]
    pub x_init: DesignVector,
    #[serde(default)]
    pub expected_x_star: Option<DesignVector>,
    #[serde(default = "default_tolerance")]
    pub expected_tolerance: f64,
}

fn default_name() -> String {
    "custom".into()
}

fn default_tolerance() -> f64 {
    DEFAULT_EXPECTED_TOLERANCE
}

impl Scenario {
    fn builtin(name: &str, weights: WeightVector, expected: DesignVector) -> Self {
        Self {
            name: name.to_string(),
            weights,
            bounds: DesignBounds::default(),
            constraints: ConstraintSet::default(),
            x_init: DesignVector::initial_guess(),
            expected_x_star: Some(expected),
            expected_tolerance: DEFAULT_EXPECTED_TOLERANCE,
        }
    }

    pub fn solve(&self, coeff: &ObjectiveCoefficients, settings: &SolverSettings) -> Result<SolveResult> {
        multi_start_solve(&self.weights, coeff, &self.bounds, &self.constraints, settings)
    }
}

/// General, low-cost and survey intents, in that order.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        Scenario::builtin(
            "general",
            WeightVector::new(1.0, 1.0, 1.0, 1.0),
            DesignVector::new(0.506, 2.1, 0.55, 0.61, 0.76),
        ),
        Scenario::builtin(
            "low-cost",
            WeightVector::new(1.0, 2.0, 1.0, 1.0),
            DesignVector::new(0.38, 2.11, 0.275, 0.30, 0.57),
        ),
        Scenario::builtin(
            "survey",
            WeightVector::new(2.0, 1.0, 1.2, 2.0),
            DesignVector::new(0.604, 2.09, 0.70, 0.73, 0.91),
        ),
    ]
}

pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Output of [`calibrate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub coefficients: ObjectiveCoefficients,
    /// Sum of squared relative deviations of `x*` from the target.
    pub residual: f64,
    pub x_star: DesignVector,
    pub evaluations: usize,
}

/// Solve budget that reproduces [`calibrated_coefficients`].
pub const CALIBRATION_BUDGET: usize = 3000;

/// Starting coefficients for calibration: all ones with both length terms
/// switched off, so the cost starts neutral in `l`.
pub fn calibration_start() -> ObjectiveCoefficients {
    ObjectiveCoefficients { h_skin: 0.0, v_reg: [1.0, 0.0, 1.0], ..Default::default() }
}

/// Output of `calibrate(general, calibration_start(), CALIBRATION_BUDGET)`
/// with default solver settings, frozen as a golden.
pub fn calibrated_coefficients() -> ObjectiveCoefficients {
    ObjectiveCoefficients {
        h_form: 1.0,
        h_skin: 0.0,
        c_quad: [1.0, 0.010011167398867014, 0.015349709270921637],
        d_lin: [1.0, 0.012319298666931386, 0.023552038541388806],
        v_reg: [1.0, 0.0, 0.04804436926519229],
        area_max: 1.0,
        length_max: 3.0,
    }
}

/// Free coefficients: `[kl, ke, kη, ae, aη, bl, bu]`. One coefficient per
/// surrogate (`kA, ku, au, bA`) is pinned to 1.
const FREE: usize = 7;

fn pin(coeff: &ObjectiveCoefficients) -> ObjectiveCoefficients {
    let div = |v: f64, by: f64| if by > 0.0 { v / by } else { v };
    let mut k = *coeff;
    k.h_skin = div(k.h_skin, coeff.h_form);
    k.c_quad = [1.0, div(k.c_quad[1], coeff.c_quad[0]), div(k.c_quad[2], coeff.c_quad[0])];
    k.d_lin = [1.0, div(k.d_lin[1], coeff.d_lin[0]), div(k.d_lin[2], coeff.d_lin[0])];
    k.v_reg = [1.0, div(k.v_reg[1], coeff.v_reg[0]), div(k.v_reg[2], coeff.v_reg[0])];
    k.h_form = 1.0;
    k
}

/// Range each free coefficient may take relative to the pinned coefficient
/// of its surrogate. A term whose share collapses toward zero leaves the
/// optimum to barrier artifacts instead of the model.
pub const COEFFICIENT_RANGE: (f64, f64) = (1e-2, 1e2);

/// Search coordinates. The two length coefficients are searched linearly
/// and map negative values to zero, so the search can reach an exactly
/// length-neutral cost; the other five are searched as logarithms and
/// clamped to [`COEFFICIENT_RANGE`].
fn pack(k: &ObjectiveCoefficients) -> [f64; FREE] {
    let (lo, hi) = COEFFICIENT_RANGE;
    let ln = |v: f64| v.clamp(lo, hi).ln();
    [k.h_skin, ln(k.c_quad[1]), ln(k.c_quad[2]), ln(k.d_lin[1]), ln(k.d_lin[2]), k.v_reg[1], ln(k.v_reg[2])]
}

fn unpack(theta: &[f64; FREE], base: &ObjectiveCoefficients) -> ObjectiveCoefficients {
    let (lo, hi) = COEFFICIENT_RANGE;
    let share = |t: f64| t.exp().clamp(lo, hi);
    let linear = |t: f64| t.clamp(0.0, hi);
    ObjectiveCoefficients {
        h_form: 1.0,
        h_skin: linear(theta[0]),
        c_quad: [1.0, share(theta[1]), share(theta[2])],
        d_lin: [1.0, share(theta[3]), share(theta[4])],
        v_reg: [1.0, linear(theta[5]), share(theta[6])],
        ..*base
    }
}

fn relative_residual(x: &DesignVector, target: &DesignVector) -> f64 {
    let x = x.to_array();
    let t = target.to_array();
    (0..DIM).map(|i| ((x[i] - t[i]) / t[i]).powi(2)).sum()
}

/// Fits surrogate coefficients so the scenario's solved optimum matches its
/// `expected_x_star`, by Nelder-Mead over the free coefficients with at most
/// `budget` solves. Returns the best point seen when the budget runs out.
pub fn calibrate(
    target: &Scenario,
    initial_coeff: &ObjectiveCoefficients,
    budget: usize,
    settings: &SolverSettings,
) -> Result<CalibrationResult> {
    let expected = target
        .expected_x_star
        .ok_or_else(|| Error::InvalidArgument(format!("scenario {} has no expected_x_star", target.name)))?;
    if budget == 0 {
        return Err(Error::InvalidArgument("calibration budget must be >= 1".into()));
    }
    initial_coeff.validate()?;
    let base = pin(initial_coeff);

    let mut evaluations = 0usize;
    let mut best: Option<CalibrationResult> = None;
    let mut eval = |theta: &[f64; FREE]| -> f64 {
        evaluations += 1;
        let coeff = unpack(theta, &base);
        let outcome = target.solve(&coeff, settings);
        let (residual, x_star) = match outcome {
            Ok(r) => (relative_residual(&r.x_star, &expected), r.x_star),
            Err(_) => (f64::INFINITY, target.x_init),
        };
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(CalibrationResult { coefficients: coeff, residual, x_star, evaluations: 0 });
        }
        residual
    };

    nelder_mead(&mut eval, pack(&base), budget);

    let mut result = best.expect("budget >= 1 guarantees one evaluation");
    result.evaluations = evaluations;
    Ok(result)
}

/// Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
/// limited to `budget` function evaluations. When a simplex collapses the
/// search restarts around the best vertex until the budget is spent.
fn nelder_mead<F: FnMut(&[f64; FREE]) -> f64>(f: &mut F, x0: [f64; FREE], budget: usize) {
    let mut used = 0usize;
    let mut start = x0;
    let mut start_value: Option<f64> = None;
    while used < budget {
        match nelder_mead_run(f, start, start_value, budget, &mut used) {
            Some((x, fx)) => {
                start = x;
                start_value = Some(fx);
            }
            None => return,
        }
    }
}

/// One simplex run; returns the best vertex once the simplex has collapsed,
/// or `None` when the budget ran out.
fn nelder_mead_run<F: FnMut(&[f64; FREE]) -> f64>(
    f: &mut F,
    x0: [f64; FREE],
    f0: Option<f64>,
    budget: usize,
    used: &mut usize,
) -> Option<([f64; FREE], f64)> {
    let mut call = |x: &[f64; FREE], used: &mut usize| -> Option<f64> {
        if *used >= budget {
            return None;
        }
        *used += 1;
        Some(f(x))
    };

    let mut simplex: Vec<([f64; FREE], f64)> = Vec::with_capacity(FREE + 1);
    let f0 = match f0 {
        Some(v) => v,
        None => call(&x0, used)?,
    };
    simplex.push((x0, f0));
    for i in 0..FREE {
        let mut x = x0;
        x[i] += if x0[i] != 0.0 { 0.5 * x0[i] } else { 0.25 };
        let fx = call(&x, used)?;
        simplex.push((x, fx));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[FREE].1 - simplex[0].1;
        let diameter = simplex
            .iter()
            .map(|(x, _)| {
                x.iter().zip(&simplex[0].0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / (1.0 + b.abs())))
            })
            .fold(0.0, f64::max);
        if simplex[0].1.is_finite() && (diameter < 1e-6 || spread.abs() <= 1e-14 * simplex[0].1.abs()) {
            return Some(simplex[0]);
        }
        let centroid: [f64; FREE] =
            std::array::from_fn(|j| simplex[..FREE].iter().map(|(x, _)| x[j]).sum::<f64>() / FREE as f64);
        let worst = simplex[FREE];
        let along =
            |t: f64| -> [f64; FREE] { std::array::from_fn(|j| centroid[j] + t * (worst.0[j] - centroid[j])) };

        let xr = along(-1.0);
        let fr = call(&xr, used)?;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = call(&xe, used)?;
            simplex[FREE] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[FREE - 1].1 {
            simplex[FREE] = (xr, fr);
            continue;
        }
        let xc = if fr < worst.1 { along(-0.5) } else { along(0.5) };
        let fc = call(&xc, used)?;
        if fc < worst.1.min(fr) {
            simplex[FREE] = (xc, fc);
            continue;
        }
        let best = simplex[0].0;
        for vertex in simplex.iter_mut().skip(1) {
            let x: [f64; FREE] = std::array::from_fn(|j| best[j] + 0.5 * (vertex.0[j] - best[j]));
            let fx = call(&x, used)?;
            *vertex = (x, fx);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_builtin_cases() {
        let s = builtin_scenarios();
        assert_eq!(s.len(), 3);
        let names: Vec<&str> = s.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["general", "low-cost", "survey"]);
        assert_eq!(s[1].weights.to_array(), [1.0, 2.0, 1.0, 1.0]);
        assert_eq!(s[2].weights.to_array(), [2.0, 1.0, 1.2, 2.0]);
        assert_eq!(s[2].expected_x_star.unwrap().to_array(), [0.604, 2.09, 0.70, 0.73, 0.91]);
        for sc in &s {
            assert_eq!(sc.bounds, DesignBounds::default());
            assert_eq!(sc.constraints, ConstraintSet::default());
            assert_eq!(sc.x_init, DesignVector::initial_guess());
            assert_eq!(sc.expected_tolerance, 0.15);
        }
    }

    #[test]
    fn pinning_preserves_the_model() {
        let k = ObjectiveCoefficients {
            h_form: 2.0,
            h_skin: 1.0,
            c_quad: [4.0, 2.0, 1.0],
            d_lin: [0.5, 1.0, 1.5],
            v_reg: [3.0, 0.0, 3.0],
            ..Default::default()
        };
        let p = pin(&k);
        assert_eq!((p.h_form, p.c_quad[0], p.d_lin[0], p.v_reg[0]), (1.0, 1.0, 1.0, 1.0));
        let x = DesignVector::new(0.3, 2.0, 0.4, 0.5, 0.6);
        let w = WeightVector::new(1.0, 2.0, 1.0, 1.0);
        let a = crate::objective::total_cost(&x, &w, &k).unwrap();
        let b = crate::objective::total_cost(&x, &w, &p).unwrap();
        assert!((a.total - b.total).abs() < 1e-14);
    }

    #[test]
    fn nelder_mead_minimizes_a_quadratic() {
        let target = [0.3, 1.0, 2.0, 0.1, 0.5, 0.7, 1.5];
        let mut calls = 0;
        let mut best = f64::INFINITY;
        let mut f = |x: &[f64; FREE]| {
            calls += 1;
            let v: f64 = x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum();
            best = best.min(v);
            v
        };
        nelder_mead(&mut f, [1.0; FREE], 4000);
        assert!(calls <= 4000);
        assert!(best < 1e-8, "best {best}");
    }

    #[test]
    fn calibration_requires_a_target() {
        let mut s = builtin_scenarios().remove(0);
        s.expected_x_star = None;
        assert!(calibrate(&s, &Default::default(), 5, &Default::default()).is_err());
    }

    #[test]
    fn self_consistent_target_is_a_fixed_point() {
        let settings = SolverSettings::default();
        let mut s = builtin_scenarios().remove(0);
        let k = ObjectiveCoefficients::default();
        s.expected_x_star = Some(s.solve(&k, &settings).unwrap().x_star);
        let cal = calibrate(&s, &k, 20, &settings).unwrap();
        assert!(cal.residual < 1e-12, "residual {}", cal.residual);
        assert_eq!(cal.coefficients, pin(&k));
    }

    #[test]
    fn calibration_is_deterministic() {
        let settings = SolverSettings::default();
        let s = builtin_scenarios().remove(0);
        let a = calibrate(&s, &calibration_start(), 60, &settings).unwrap();
        let b = calibrate(&s, &calibration_start(), 60, &settings).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 60);
    }

    #[test]
    fn frozen_coefficients_order_the_cases() {
        let k = calibrated_coefficients();
        let settings = SolverSettings::default();
        let x: Vec<DesignVector> =
            builtin_scenarios().iter().map(|s| s.solve(&k, &settings).unwrap().x_star).collect();
        let [general, low, survey] = [x[0], x[1], x[2]];
        for i in 2..DIM {
            assert!(low.to_array()[i] < general.to_array()[i]);
            assert!(general.to_array()[i] < survey.to_array()[i]);
        }
        let expected = builtin_scenario("general").unwrap().expected_x_star.unwrap();
        assert!(general.max_rel_diff(&expected) <= DEFAULT_EXPECTED_TOLERANCE);
    }
}
