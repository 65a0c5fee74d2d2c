use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{DesignBounds, DesignVector, WeightVector, DIM};
use crate::error::{Error, Result};
use crate::objective::{ObjectiveCoefficients, ScaledCost};

use super::barrier::BarrierModel;
use super::{
    normalized_cost, run_barrier, validate_problem, ConstraintSet, MultiStartSummary, SolveResult,
    SolverSettings, Status,
};

const CLIP_MARGIN: f64 = 1e-3;
const FEASIBILITY_MARGIN: f64 = 1e-3;
const AGREEMENT_TOL: f64 = 1e-4;
const TIE_TOL: f64 = 1e-12;

/// Stratified start points over the bound box, deterministic in `seed`.
pub fn latin_hypercube_starts(bounds: &DesignBounds, count: usize, seed: u64) -> Vec<DesignVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = bounds.lower.to_array();
    let range = bounds.range();
    let mut columns = [(); DIM].map(|_| Vec::with_capacity(count));
    for col in columns.iter_mut() {
        for k in 0..count {
            let jitter: f64 = rng.random();
            col.push((k as f64 + jitter) / count as f64);
        }
        col.shuffle(&mut rng);
    }
    (0..count)
        .map(|k| DesignVector::from_array(std::array::from_fn(|i| lo[i] + columns[i][k] * range[i])))
        .collect()
}

/// Pulls `x` strictly inside the bounds and both nonlinear constraints.
pub fn repair_to_interior(
    x: &DesignVector,
    bounds: &DesignBounds,
    cons: &ConstraintSet,
) -> Result<DesignVector> {
    bounds.validate()?;
    cons.validate()?;
    // The cost plays no part in feasibility.
    let cost = ScaledCost::new(&WeightVector::new(1.0, 0.0, 0.0, 0.0), &ObjectiveCoefficients::default());
    let model = BarrierModel::new(cost, bounds, cons);
    Ok(model.design(&interior_start(&model, x)?))
}

pub(crate) fn interior_start(model: &BarrierModel, x: &DesignVector) -> Result<[f64; DIM]> {
    let z0 = model.to_z(&x.to_array());
    if !z0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument(format!("start point has non-finite entries: {x}")));
    }
    let s = model.slacks(&z0);
    if s.strictly_positive() {
        return Ok(z0);
    }
    let clipped = z0.map(|v| v.clamp(CLIP_MARGIN, 1.0 - CLIP_MARGIN));
    let s = model.slacks(&clipped);
    if s.volume > 0.0 && s.ratio > 0.0 {
        return Ok(clipped);
    }

    let anchor = feasible_anchor(model)?;
    let mut t = 1.0;
    while t > 1e-6 {
        let trial: [f64; DIM] = std::array::from_fn(|i| anchor[i] + t * (clipped[i] - anchor[i]));
        let s = model.slacks(&trial);
        if s.volume >= FEASIBILITY_MARGIN && s.ratio >= FEASIBILITY_MARGIN {
            return Ok(trial);
        }
        t *= 0.9;
    }
    Ok(anchor)
}

/// Grid point with the largest smallest scaled slack.
fn feasible_anchor(model: &BarrierModel) -> Result<[f64; DIM]> {
    const LEVELS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut best: Option<([f64; DIM], f64)> = None;
    for flat in 0..LEVELS.len().pow(DIM as u32) {
        let mut rem = flat;
        let z: [f64; DIM] = std::array::from_fn(|_| {
            let v = LEVELS[rem % LEVELS.len()];
            rem /= LEVELS.len();
            v
        });
        let m = model.slacks(&z).min();
        if m > 0.0 && best.is_none_or(|(_, b)| m > b) {
            best = Some((z, m));
        }
    }
    best.map(|(z, _)| z)
        .ok_or_else(|| Error::Infeasible("no grid point satisfies both nonlinear constraints".into()))
}

/// Runs the barrier solve from `settings.multistart_count` Latin-hypercube
/// starts and keeps the best converged result by `J`.
///
/// Ties within `1e-12` go to the lowest start index. When no start
/// converges, the best non-converged result is returned with its status.
pub fn multi_start_solve(
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    bounds: &DesignBounds,
    cons: &ConstraintSet,
    settings: &SolverSettings,
) -> Result<SolveResult> {
    validate_problem(w, coeff, bounds, cons)?;
    settings.validate()?;
    let model = BarrierModel::new(normalized_cost(w, coeff), bounds, cons);
    let starts = latin_hypercube_starts(bounds, settings.multistart_count, settings.seed);
    let repaired = starts.iter().map(|x| interior_start(&model, x)).collect::<Result<Vec<_>>>()?;

    let runs: Vec<SolveResult> = repaired
        .into_par_iter()
        .enumerate()
        .map(|(k, z)| run_barrier(&model, z, w, coeff, cons, settings, k))
        .collect();

    let pick = |only_converged: bool| {
        let mut best: Option<&SolveResult> = None;
        for r in runs.iter().filter(|r| !only_converged || r.status == Status::Converged) {
            match best {
                Some(b) if r.objective.total >= b.objective.total - TIE_TOL => {}
                _ => best = Some(r),
            }
        }
        best
    };
    let best = pick(true).or_else(|| pick(false)).expect("at least one start");

    let converged: Vec<&SolveResult> = runs.iter().filter(|r| r.status == Status::Converged).collect();
    let agreeing = converged.iter().filter(|r| r.x_star.max_abs_diff(&best.x_star) <= AGREEMENT_TOL).count();
    let summary = MultiStartSummary {
        starts: runs.len(),
        converged: converged.len(),
        agreeing,
        multimodal: (agreeing as f64) < 0.8 * converged.len() as f64,
    };
    let mut result = best.clone();
    result.multistart = Some(summary);
    Ok(result)
}
