//! Exhaustive grid search, used as an independent oracle for the solver.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DesignBounds, DesignVector, WeightVector, DIM};
use crate::error::{Error, Result};
use crate::objective::{ObjectiveCoefficients, ScaledCost};

use super::{validate_problem, ConstraintSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub points_per_axis: usize,
    pub feasible_points: u64,
    /// Lowest-`J` feasible node; ties go to the lowest flat index.
    pub best: DesignVector,
    pub best_objective: f64,
    /// `Σ L_i·h_i/2` with `L_i` bounding `|∂J/∂x_i|` on the box and `h_i`
    /// the grid spacing: the most `J` can drop between a point and its
    /// nearest node.
    pub resolution_slack: f64,
}

/// Evaluates `J` on every node of an `n^5` grid spanning the bounds,
/// keeping nodes with `g1, g2 ≥ 0`.
pub fn grid_search(
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    bounds: &DesignBounds,
    cons: &ConstraintSet,
    points_per_axis: usize,
) -> Result<GridSearchResult> {
    validate_problem(w, coeff, bounds, cons)?;
    let n = points_per_axis;
    if n < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
    }
    let cost = ScaledCost::new(w, coeff);
    let lo = bounds.lower.to_array();
    let hi = bounds.upper.to_array();
    let h: [f64; DIM] = std::array::from_fn(|i| (hi[i] - lo[i]) / (n - 1) as f64);
    let axis: Vec<Vec<f64>> = (0..DIM)
        .map(|i| (0..n).map(|k| if k + 1 == n { hi[i] } else { lo[i] + k as f64 * h[i] }).collect())
        .collect();

    let total = (n as u64).pow(DIM as u32);
    let per_first = total / n as u64;
    let (count, best) = (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut count = 0u64;
            let mut best: Option<(f64, u64)> = None;
            for rest in 0..per_first {
                let flat = i0 as u64 * per_first + rest;
                let mut r = rest;
                let mut x = [0.0; DIM];
                x[0] = axis[0][i0];
                for (d, xd) in x.iter_mut().enumerate().skip(1).rev() {
                    *xd = axis[d][(r % n as u64) as usize];
                    r /= n as u64;
                }
                if x[0] * x[1] < cons.volume_min || x[4] / x[0] < cons.tolerance_ratio_min {
                    continue;
                }
                count += 1;
                let j = cost.value(&x);
                if best.is_none_or(|(b, _)| j < b) {
                    best = Some((j, flat));
                }
            }
            (count, best)
        })
        .reduce(
            || (0, None),
            |(ca, ba), (cb, bb)| {
                let best = match (ba, bb) {
                    (Some(a), Some(b)) => Some(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
                    (a, b) => a.or(b),
                };
                (ca + cb, best)
            },
        );
    let (best_objective, flat) =
        best.ok_or_else(|| Error::Infeasible(format!("no feasible node on the {n}^5 grid")))?;

    let mut r = flat;
    let mut x = [0.0; DIM];
    for d in (0..DIM).rev() {
        x[d] = axis[d][(r % n as u64) as usize];
        r /= n as u64;
    }
    let lipschitz = cost.lipschitz(&lo, &hi);
    Ok(GridSearchResult {
        points_per_axis: n,
        feasible_points: count,
        best: DesignVector::from_array(x),
        best_objective,
        resolution_slack: (0..DIM).map(|i| lipschitz[i] * h[i] / 2.0).sum(),
    })
}
