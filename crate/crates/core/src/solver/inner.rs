//! Inner minimization of the barrier objective at fixed `mu`.

use serde::{Deserialize, Serialize};

use crate::domain::DIM;

use super::barrier::BarrierModel;
use super::SolverSettings;

/// Search-direction rule used by the inner loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMethod {
    /// Quasi-Newton with an inverse-Hessian BFGS update, reset per barrier level.
    #[default]
    Bfgs,
    /// Newton steps on the analytic barrier Hessian.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum InnerOutcome {
    Stationary,
    IterationLimit,
    Stalled,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct InnerResult {
    pub z: [f64; DIM],
    pub gradient: [f64; DIM],
    pub iterations: usize,
    pub outcome: InnerOutcome,
}

fn dot(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64; DIM]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Solves `(H + shift·I) d = -g` by Cholesky, raising the shift until the
/// factorization succeeds.
fn newton_direction(h: &[[f64; DIM]; DIM], g: &[f64; DIM]) -> [f64; DIM] {
    let scale = (0..DIM).fold(0.0f64, |m, i| m.max(h[i][i].abs())).max(1e-300);
    let mut shift = 0.0;
    loop {
        if let Some(l) = cholesky(h, shift) {
            let mut y = [0.0; DIM];
            for i in 0..DIM {
                let mut acc = -g[i];
                for k in 0..i {
                    acc -= l[i][k] * y[k];
                }
                y[i] = acc / l[i][i];
            }
            let mut d = [0.0; DIM];
            for i in (0..DIM).rev() {
                let mut acc = y[i];
                for k in i + 1..DIM {
                    acc -= l[k][i] * d[k];
                }
                d[i] = acc / l[i][i];
            }
            return d;
        }
        shift = if shift == 0.0 { 1e-10 * scale } else { shift * 10.0 };
    }
}

fn cholesky(h: &[[f64; DIM]; DIM], shift: f64) -> Option<[[f64; DIM]; DIM]> {
    let mut l = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..=i {
            let mut acc = h[i][j] + if i == j { shift } else { 0.0 };
            for k in 0..j {
                acc -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(acc > 0.0) || !acc.is_finite() {
                    return None;
                }
                l[i][i] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    Some(l)
}

/// Minimizes the barrier at fixed `mu` from the strictly interior `z0`.
///
/// Every accepted point keeps all slacks positive.
pub(crate) fn minimize(
    model: &BarrierModel,
    z0: [f64; DIM],
    mu: f64,
    settings: &SolverSettings,
) -> InnerResult {
    let mut z = z0;
    let mut f = model.value(&z, mu).expect("inner loop starts strictly interior");
    let mut g = model.gradient(&z, mu);
    let mut inv_h: Option<[[f64; DIM]; DIM]> = None;
    let mut iterations = 0;

    let outcome = loop {
        if inf_norm(&g) <= settings.kkt_tolerance {
            break InnerOutcome::Stationary;
        }
        if iterations >= settings.max_inner_iterations {
            break InnerOutcome::IterationLimit;
        }

        let mut d = match settings.inner_method {
            InnerMethod::Newton => newton_direction(&model.hessian(&z, mu), &g),
            InnerMethod::Bfgs => match &inv_h {
                Some(b) => std::array::from_fn(|i| -dot(&b[i], &g)),
                None => {
                    // First step of a level: steepest descent scaled so the
                    // largest move is a tenth of the box distance available.
                    let room = model.max_box_step(&z, &g.map(|v| -v));
                    let t = (0.1 * room).min(1.0 / inf_norm(&g));
                    g.map(|v| -t * v)
                }
            },
        };
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            inv_h = None;
            let t = (0.1 * model.max_box_step(&z, &g.map(|v| -v))).min(1.0 / inf_norm(&g));
            d = g.map(|v| -t * v);
            slope = dot(&g, &d);
        }

        let mut alpha = (0.995 * model.max_box_step(&z, &d)).min(1.0);
        let d_norm = inf_norm(&d);
        let noise = 4.0 * f64::EPSILON * f.abs().max(1.0);
        let accepted = loop {
            if alpha * d_norm < 1e-16 {
                break None;
            }
            let trial: [f64; DIM] = std::array::from_fn(|i| z[i] + alpha * d[i]);
            if let Some(ft) = model.value(&trial, mu) {
                if ft <= f + settings.armijo_c * alpha * slope + noise {
                    break Some((trial, ft));
                }
            }
            alpha *= settings.backtrack_factor;
        };
        let Some((z_new, f_new)) = accepted else {
            break InnerOutcome::Stalled;
        };
        debug_assert!(model.slacks(&z_new).strictly_positive());
        let g_new = model.gradient(&z_new, mu);
        iterations += 1;

        if settings.inner_method == InnerMethod::Bfgs {
            let s: [f64; DIM] = std::array::from_fn(|i| z_new[i] - z[i]);
            let y: [f64; DIM] = std::array::from_fn(|i| g_new[i] - g[i]);
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                let b = inv_h.unwrap_or_else(|| {
                    let gamma = sy / dot(&y, &y);
                    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { gamma } else { 0.0 }))
                });
                inv_h = Some(bfgs_update(&b, &s, &y, sy));
            }
        }

        if f_new == f && inf_norm(&g_new) >= inf_norm(&g) && z_new == z {
            z = z_new;
            break InnerOutcome::Stalled;
        }
        z = z_new;
        f = f_new;
        g = g_new;
    };

    InnerResult { z, gradient: g, iterations, outcome }
}

fn bfgs_update(b: &[[f64; DIM]; DIM], s: &[f64; DIM], y: &[f64; DIM], sy: f64) -> [[f64; DIM]; DIM] {
    // B+ = (I - ρ s yᵀ) B (I - ρ y sᵀ) + ρ s sᵀ
    let rho = 1.0 / sy;
    let by: [f64; DIM] = std::array::from_fn(|i| dot(&b[i], y));
    let yby = dot(y, &by);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            b[i][j] - rho * (s[i] * by[j] + by[i] * s[j]) + (rho * rho * yby + rho) * s[i] * s[j]
        })
    })
}
