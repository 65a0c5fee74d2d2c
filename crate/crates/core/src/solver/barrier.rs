//! Log-barrier model of the constrained problem in box-scaled coordinates.
//!
//! The solver works in `z ∈ (0, 1)^5` with `x = lower + z ⊙ range`, so every
//! bound slack is `z_i` or `1 - z_i` and the two nonlinear slacks are divided
//! by their characteristic values before entering the logarithm.

use crate::domain::{DesignBounds, DesignVector, DIM};
use crate::error::{Error, Result};
use crate::objective::ScaledCost;

use super::ConstraintSet;

/// Everything the barrier needs, with inputs already validated.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BarrierModel {
    cost: ScaledCost,
    lower: [f64; DIM],
    range: [f64; DIM],
    volume_min: f64,
    volume_scale: f64,
    ratio_min: f64,
    ratio_scale: f64,
}

/// Scaled slacks at a point: two per variable, then volume and tolerance ratio.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Slacks {
    pub lower: [f64; DIM],
    pub upper: [f64; DIM],
    pub volume: f64,
    pub ratio: f64,
}

impl Slacks {
    pub fn min(&self) -> f64 {
        self.lower.iter().chain(self.upper.iter()).copied().fold(self.volume.min(self.ratio), f64::min)
    }

    pub fn strictly_positive(&self) -> bool {
        self.min() > 0.0
    }
}

impl BarrierModel {
    pub fn new(cost: ScaledCost, bounds: &DesignBounds, cons: &ConstraintSet) -> Self {
        let characteristic = |v: f64| if v > 0.0 { v } else { 1.0 };
        Self {
            cost,
            lower: bounds.lower.to_array(),
            range: bounds.range(),
            volume_min: cons.volume_min,
            volume_scale: characteristic(cons.volume_min),
            ratio_min: cons.tolerance_ratio_min,
            ratio_scale: characteristic(cons.tolerance_ratio_min),
        }
    }

    pub fn to_x(self, z: &[f64; DIM]) -> [f64; DIM] {
        std::array::from_fn(|i| self.lower[i] + z[i] * self.range[i])
    }

    pub fn to_z(self, x: &[f64; DIM]) -> [f64; DIM] {
        std::array::from_fn(|i| (x[i] - self.lower[i]) / self.range[i])
    }

    /// Raw constraint values `[A·l − V, η/A − R]`.
    pub fn constraints(&self, x: &[f64; DIM]) -> [f64; 2] {
        [x[0] * x[1] - self.volume_min, x[4] / x[0] - self.ratio_min]
    }

    pub fn slacks(&self, z: &[f64; DIM]) -> Slacks {
        let x = self.to_x(z);
        let [g1, g2] = self.constraints(&x);
        Slacks {
            lower: *z,
            upper: std::array::from_fn(|i| 1.0 - z[i]),
            volume: g1 / self.volume_scale,
            ratio: g2 / self.ratio_scale,
        }
    }

    pub fn cost(&self, z: &[f64; DIM]) -> f64 {
        self.cost.value(&self.to_x(z))
    }

    /// Barrier value, or `None` when `z` is not strictly interior.
    pub fn value(&self, z: &[f64; DIM], mu: f64) -> Option<f64> {
        let s = self.slacks(z);
        if !s.strictly_positive() {
            return None;
        }
        let j = self.cost(z);
        if mu == 0.0 {
            return Some(j);
        }
        let logs: f64 =
            s.lower.iter().chain(s.upper.iter()).map(|v| v.ln()).sum::<f64>() + s.volume.ln() + s.ratio.ln();
        Some(j - mu * logs)
    }

    /// Like [`value`](Self::value) but names the violated slack.
    pub fn value_checked(&self, z: &[f64; DIM], mu: f64) -> Result<f64> {
        let s = self.slacks(z);
        for (i, (&lo, &hi)) in s.lower.iter().zip(s.upper.iter()).enumerate() {
            let var = crate::domain::Variable::ALL[i];
            if lo <= 0.0 {
                return Err(Error::Domain { slack: format!("lower bound on {var}"), value: lo });
            }
            if hi <= 0.0 {
                return Err(Error::Domain { slack: format!("upper bound on {var}"), value: hi });
            }
        }
        if s.volume <= 0.0 {
            return Err(Error::Domain { slack: "volume constraint".into(), value: s.volume });
        }
        if s.ratio <= 0.0 {
            return Err(Error::Domain { slack: "tolerance-ratio constraint".into(), value: s.ratio });
        }
        Ok(self.value(z, mu).expect("slacks checked above"))
    }

    fn constraint_gradients(&self, x: &[f64; DIM]) -> ([f64; DIM], [f64; DIM]) {
        let mut g1 = [0.0; DIM];
        g1[0] = x[1] / self.volume_scale;
        g1[1] = x[0] / self.volume_scale;
        let mut g2 = [0.0; DIM];
        g2[0] = -x[4] / (x[0] * x[0]) / self.ratio_scale;
        g2[4] = 1.0 / x[0] / self.ratio_scale;
        (g1, g2)
    }

    /// `∇_z` of the barrier objective at an interior point.
    pub fn gradient(&self, z: &[f64; DIM], mu: f64) -> [f64; DIM] {
        let x = self.to_x(z);
        let s = self.slacks(z);
        let gj = self.cost.gradient(&x);
        let (dg1, dg2) = self.constraint_gradients(&x);
        std::array::from_fn(|i| {
            let gx = gj[i] - mu * dg1[i] / s.volume - mu * dg2[i] / s.ratio;
            self.range[i] * gx - mu * (1.0 / s.lower[i] - 1.0 / s.upper[i])
        })
    }

    /// `∇²_z` of the barrier objective at an interior point.
    pub fn hessian(&self, z: &[f64; DIM], mu: f64) -> [[f64; DIM]; DIM] {
        let x = self.to_x(z);
        let s = self.slacks(z);
        let (dg1, dg2) = self.constraint_gradients(&x);
        let hj = self.cost.hessian_diag();

        let mut hx = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            hx[i][i] = hj[i];
            for j in 0..DIM {
                hx[i][j] +=
                    mu * dg1[i] * dg1[j] / (s.volume * s.volume) + mu * dg2[i] * dg2[j] / (s.ratio * s.ratio);
            }
        }
        // Second derivatives of the constraints themselves.
        let d2_g1 = 1.0 / self.volume_scale;
        hx[0][1] -= mu * d2_g1 / s.volume;
        hx[1][0] -= mu * d2_g1 / s.volume;
        let a = x[0];
        let d2_aa = 2.0 * x[4] / (a * a * a) / self.ratio_scale;
        let d2_an = -1.0 / (a * a) / self.ratio_scale;
        hx[0][0] -= mu * d2_aa / s.ratio;
        hx[0][4] -= mu * d2_an / s.ratio;
        hx[4][0] -= mu * d2_an / s.ratio;

        let mut hz = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                hz[i][j] = self.range[i] * hx[i][j] * self.range[j];
            }
            hz[i][i] += mu * (1.0 / (s.lower[i] * s.lower[i]) + 1.0 / (s.upper[i] * s.upper[i]));
        }
        hz
    }

    /// Largest `t ≤ 1` keeping `z + t d` inside the open unit box.
    pub fn max_box_step(&self, z: &[f64; DIM], d: &[f64; DIM]) -> f64 {
        let mut t = f64::INFINITY;
        for i in 0..DIM {
            if d[i] < 0.0 {
                t = t.min(-z[i] / d[i]);
            } else if d[i] > 0.0 {
                t = t.min((1.0 - z[i]) / d[i]);
            }
        }
        t
    }

    pub fn design(&self, z: &[f64; DIM]) -> DesignVector {
        DesignVector::from_array(self.to_x(z))
    }
}
