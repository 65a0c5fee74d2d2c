//! Objective surrogates and the weighted-sum scalarizer.
//!
//! Every surrogate is a normalized convex combination of polynomial terms,
//! so each objective lands in `[0, 1]` on the design box:
//!
//! ```text
//! h = [kA (A/Amax)² + kl (l/lmax)]          / (kA + kl)
//! c = [ku u² + ke e² + kη η²]               / (ku + ke + kη)
//! d = [au u + ae e + aη η]                  / (au + ae + aη)
//! v = [bA (A/Amax) + bl (l/lmax) + bu u]    / (bA + bl + bu)
//! J = p h + q c − r d − s v
//! ```

use serde::{Deserialize, Serialize};

use crate::domain::{DesignVector, WeightVector, DIM};
use crate::error::{Error, Result};

/// Surrogate-polynomial coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveCoefficients {
    /// Quadratic frontal-area (form drag) weight kA.
    pub h_form: f64,
    /// Linear length (skin friction) weight kl.
    pub h_skin: f64,
    /// `[ku, ke, kη]`.
    pub c_quad: [f64; 3],
    /// `[au, ae, aη]`.
    pub d_lin: [f64; 3],
    /// `[bA, bl, bu]`.
    pub v_reg: [f64; 3],
    #[serde(rename = "A_max")]
    pub area_max: f64,
    #[serde(rename = "l_max")]
    pub length_max: f64,
}

impl Default for ObjectiveCoefficients {
    fn default() -> Self {
        Self {
            h_form: 1.0,
            h_skin: 1.0,
            c_quad: [1.0; 3],
            d_lin: [1.0; 3],
            v_reg: [1.0; 3],
            area_max: 1.0,
            length_max: 3.0,
        }
    }
}

impl ObjectiveCoefficients {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.h_form,
            self.h_skin,
            self.c_quad[0],
            self.c_quad[1],
            self.c_quad[2],
            self.d_lin[0],
            self.d_lin[1],
            self.d_lin[2],
            self.v_reg[0],
            self.v_reg[1],
            self.v_reg[2],
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidCoefficients(
                "all surrogate coefficients must be finite and >= 0".into(),
            ));
        }
        let groups = [
            ("h_form + h_skin", self.h_form + self.h_skin),
            ("c_quad", self.c_quad.iter().sum()),
            ("d_lin", self.d_lin.iter().sum()),
            ("v_reg", self.v_reg.iter().sum()),
        ];
        for (name, sum) in groups {
            if sum <= 0.0 {
                return Err(Error::InvalidCoefficients(format!("{name} must have a positive sum")));
            }
        }
        if !(self.area_max > 0.0 && self.area_max.is_finite())
            || !(self.length_max > 0.0 && self.length_max.is_finite())
        {
            return Err(Error::InvalidCoefficients("A_max and l_max must be > 0".into()));
        }
        Ok(())
    }
}

/// The four objectives and the scalarized total at one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValues {
    pub h: f64,
    pub c: f64,
    pub d: f64,
    pub v: f64,
    #[serde(rename = "J")]
    pub total: f64,
}

fn hydro(x: &DesignVector, k: &ObjectiveCoefficients) -> f64 {
    let a = x.frontal_area / k.area_max;
    let l = x.length / k.length_max;
    (k.h_form * a * a + k.h_skin * l) / (k.h_form + k.h_skin)
}

fn cost(x: &DesignVector, k: &ObjectiveCoefficients) -> f64 {
    let [ku, ke, kn] = k.c_quad;
    let (u, e, n) = (x.control_fidelity, x.entry_area_fraction, x.docking_tolerance);
    (ku * u * u + ke * e * e + kn * n * n) / (ku + ke + kn)
}

fn reliability(x: &DesignVector, k: &ObjectiveCoefficients) -> f64 {
    let [au, ae, an] = k.d_lin;
    (au * x.control_fidelity + ae * x.entry_area_fraction + an * x.docking_tolerance) / (au + ae + an)
}

fn versatile(x: &DesignVector, k: &ObjectiveCoefficients) -> f64 {
    let [ba, bl, bu] = k.v_reg;
    (ba * x.frontal_area / k.area_max + bl * x.length / k.length_max + bu * x.control_fidelity)
        / (ba + bl + bu)
}

/// Hydrodynamic loss: quadratic in frontal area, linear in length.
pub fn hydro_loss(x: &DesignVector, coeff: &ObjectiveCoefficients) -> Result<f64> {
    coeff.validate()?;
    Ok(hydro(x, coeff))
}

/// Build cost of vehicle plus dock, quadratic in `u`, `e`, `eta`.
pub fn monetary_cost(x: &DesignVector, coeff: &ObjectiveCoefficients) -> Result<f64> {
    coeff.validate()?;
    Ok(cost(x, coeff))
}

pub fn docking_reliability(x: &DesignVector, coeff: &ObjectiveCoefficients) -> Result<f64> {
    coeff.validate()?;
    Ok(reliability(x, coeff))
}

/// Rewards larger vehicles and better control; counters the shrink pressure
/// of `h` and `c`.
pub fn versatility(x: &DesignVector, coeff: &ObjectiveCoefficients) -> Result<f64> {
    coeff.validate()?;
    Ok(versatile(x, coeff))
}

pub fn total_cost(
    x: &DesignVector,
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
) -> Result<ObjectiveValues> {
    coeff.validate()?;
    Ok(evaluate_unchecked(x, w, coeff))
}

pub(crate) fn evaluate_unchecked(
    x: &DesignVector,
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
) -> ObjectiveValues {
    let h = hydro(x, coeff);
    let c = cost(x, coeff);
    let d = reliability(x, coeff);
    let v = versatile(x, coeff);
    ObjectiveValues { h, c, d, v, total: w.p * h + w.q * c - w.r * d - w.s * v }
}

/// Analytic `∂J/∂[A, l, u, e, eta]`.
pub fn gradient(x: &DesignVector, w: &WeightVector, coeff: &ObjectiveCoefficients) -> Result<[f64; DIM]> {
    coeff.validate()?;
    Ok(ScaledCost::new(w, coeff).gradient(&x.to_array()))
}

/// `J` with every coefficient pre-divided by its surrogate's normalizer.
///
/// `J` is separable: a quadratic in each of `A, u, e, eta` plus a linear
/// term in `l`, so its Hessian is diagonal.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledCost {
    quad: [f64; DIM],
    lin: [f64; DIM],
}

impl ScaledCost {
    pub(crate) fn new(w: &WeightVector, k: &ObjectiveCoefficients) -> Self {
        let sh = k.h_form + k.h_skin;
        let sc: f64 = k.c_quad.iter().sum();
        let sd: f64 = k.d_lin.iter().sum();
        let sv: f64 = k.v_reg.iter().sum();
        let (amax, lmax) = (k.area_max, k.length_max);
        let quad = [
            w.p * k.h_form / (sh * amax * amax),
            0.0,
            w.q * k.c_quad[0] / sc,
            w.q * k.c_quad[1] / sc,
            w.q * k.c_quad[2] / sc,
        ];
        let lin = [
            -w.s * k.v_reg[0] / (sv * amax),
            w.p * k.h_skin / (sh * lmax) - w.s * k.v_reg[1] / (sv * lmax),
            -w.r * k.d_lin[0] / sd - w.s * k.v_reg[2] / sv,
            -w.r * k.d_lin[1] / sd,
            -w.r * k.d_lin[2] / sd,
        ];
        Self { quad, lin }
    }

    pub(crate) fn value(&self, x: &[f64; DIM]) -> f64 {
        (0..DIM).map(|i| (self.quad[i] * x[i] + self.lin[i]) * x[i]).sum()
    }

    pub(crate) fn gradient(&self, x: &[f64; DIM]) -> [f64; DIM] {
        std::array::from_fn(|i| 2.0 * self.quad[i] * x[i] + self.lin[i])
    }

    pub(crate) fn hessian_diag(&self) -> [f64; DIM] {
        std::array::from_fn(|i| 2.0 * self.quad[i])
    }

    /// Per-coordinate bound on `|∂J/∂x_i|` over the box `[lower, upper]`.
    pub(crate) fn lipschitz(&self, lower: &[f64; DIM], upper: &[f64; DIM]) -> [f64; DIM] {
        std::array::from_fn(|i| {
            let g_lo = (2.0 * self.quad[i] * lower[i] + self.lin[i]).abs();
            let g_hi = (2.0 * self.quad[i] * upper[i] + self.lin[i]).abs();
            g_lo.max(g_hi)
        })
    }
}

/// Analytic-versus-central-difference comparison at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientCheck {
    pub analytic: [f64; DIM],
    pub numeric: [f64; DIM],
    /// `|analytic - numeric| / max(|analytic|, |numeric|, 1e-4)` per component.
    pub relative_error: [f64; DIM],
    pub max_relative_error: f64,
}

/// Central differences with step `1e-6 · scale_i` in each coordinate.
pub fn check_gradient(
    x: &DesignVector,
    w: &WeightVector,
    coeff: &ObjectiveCoefficients,
    scale: &[f64; DIM],
) -> Result<GradientCheck> {
    let analytic = gradient(x, w, coeff)?;
    let base = x.to_array();
    let numeric: [f64; DIM] = std::array::from_fn(|i| {
        let h = 1e-6 * scale[i];
        let mut plus = base;
        let mut minus = base;
        plus[i] += h;
        minus[i] -= h;
        let jp = evaluate_unchecked(&DesignVector::from_array(plus), w, coeff).total;
        let jm = evaluate_unchecked(&DesignVector::from_array(minus), w, coeff).total;
        (jp - jm) / (plus[i] - minus[i])
    });
    let relative_error: [f64; DIM] = std::array::from_fn(|i| {
        let denom = analytic[i].abs().max(numeric[i].abs()).max(1e-4);
        (analytic[i] - numeric[i]).abs() / denom
    });
    let max_relative_error = relative_error.iter().copied().fold(0.0, f64::max);
    Ok(GradientCheck { analytic, numeric, relative_error, max_relative_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones() -> ObjectiveCoefficients {
        ObjectiveCoefficients::default()
    }

    #[test]
    fn hydro_examples() {
        let k = ones();
        let x = DesignVector::new(k.area_max, k.length_max, 0.5, 0.5, 0.5);
        assert_eq!(hydro_loss(&x, &k).unwrap(), 1.0);
        let x = DesignVector::new(0.5 * k.area_max, 0.0, 0.5, 0.5, 0.5);
        assert_eq!(hydro_loss(&x, &k).unwrap(), 0.125);
        let k2 = ObjectiveCoefficients { h_skin: 0.0, ..k };
        let x = DesignVector::new(0.1 * k.area_max, 2.0, 0.5, 0.5, 0.5);
        assert!((hydro_loss(&x, &k2).unwrap() - 0.01).abs() < 1e-15);

        let k3 = ObjectiveCoefficients { h_form: 3.0, h_skin: 0.7, ..k };
        let x = DesignVector::new(k.area_max, k.length_max, 0.5, 0.5, 0.5);
        assert!((hydro_loss(&x, &k3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cost_examples() {
        let k = ones();
        assert_eq!(monetary_cost(&DesignVector::new(0.1, 1.0, 1.0, 1.0, 1.0), &k).unwrap(), 1.0);
        assert_eq!(monetary_cost(&DesignVector::new(0.1, 1.0, 0.5, 0.5, 0.5), &k).unwrap(), 0.25);
        let k0 = ObjectiveCoefficients { c_quad: [1.0, 0.0, 2.0], ..k };
        let a = monetary_cost(&DesignVector::new(0.1, 1.0, 0.4, 0.2, 0.3), &k0).unwrap();
        let b = monetary_cost(&DesignVector::new(0.1, 1.0, 0.4, 0.8, 0.3), &k0).unwrap();
        assert_eq!(a, b);
        let w = WeightVector::new(0.0, 1.0, 0.0, 0.0);
        let g = gradient(&DesignVector::new(0.1, 1.0, 0.4, 0.8, 0.3), &w, &k0).unwrap();
        assert_eq!(g[3], 0.0);
    }

    #[test]
    fn reliability_examples() {
        let k = ones();
        let one = DesignVector::new(0.1, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(docking_reliability(&one, &k).unwrap(), 1.0);
        let only_u = DesignVector::new(0.1, 1.0, 1.0, 0.0, 0.0);
        assert!((docking_reliability(&only_u, &k).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let zero = DesignVector::new(0.1, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(docking_reliability(&zero, &k).unwrap(), 0.0);
    }

    #[test]
    fn versatility_examples() {
        let k = ones();
        let full = DesignVector::new(k.area_max, k.length_max, 1.0, 0.3, 0.3);
        assert_eq!(versatility(&full, &k).unwrap(), 1.0);
        let half = DesignVector::new(0.5 * k.area_max, 0.5 * k.length_max, 0.5, 0.3, 0.3);
        assert!((versatility(&half, &k).unwrap() - 0.5).abs() < 1e-15);
        let k0 = ObjectiveCoefficients { v_reg: [1.0, 1.0, 0.0], ..k };
        let a = versatility(&DesignVector::new(0.2, 1.0, 0.1, 0.3, 0.3), &k0).unwrap();
        let b = versatility(&DesignVector::new(0.2, 1.0, 0.9, 0.3, 0.3), &k0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_sum_groups_are_rejected() {
        let x = DesignVector::initial_guess();
        let bad_h = ObjectiveCoefficients { h_form: 0.0, h_skin: 0.0, ..ones() };
        assert!(matches!(hydro_loss(&x, &bad_h), Err(Error::InvalidCoefficients(_))));
        let bad_c = ObjectiveCoefficients { c_quad: [0.0; 3], ..ones() };
        assert!(monetary_cost(&x, &bad_c).is_err());
        let bad_d = ObjectiveCoefficients { d_lin: [0.0; 3], ..ones() };
        assert!(docking_reliability(&x, &bad_d).is_err());
        let bad_v = ObjectiveCoefficients { v_reg: [0.0; 3], ..ones() };
        assert!(versatility(&x, &bad_v).is_err());
        let neg = ObjectiveCoefficients { d_lin: [1.0, -0.1, 1.0], ..ones() };
        assert!(total_cost(&x, &WeightVector::new(1.0, 1.0, 1.0, 1.0), &neg).is_err());
    }

    #[test]
    fn total_cost_selection_and_cancellation() {
        let k = ones();
        let x = DesignVector::new(0.3, 1.2, 0.4, 0.6, 0.2);
        let only_h = total_cost(&x, &WeightVector::new(1.0, 0.0, 0.0, 0.0), &k).unwrap();
        assert_eq!(only_h.total, only_h.h);

        // A design with h = c = d = v: A = l/lmax = u = e = eta = t with
        // h = (t² + t)/2 and c = t², equal at t = 1.
        let t = 1.0;
        let x = DesignVector::new(t * k.area_max, t * k.length_max, t, t, t);
        let vals = total_cost(&x, &WeightVector::new(1.0, 1.0, 1.0, 1.0), &k).unwrap();
        assert_eq!((vals.h, vals.c, vals.d, vals.v), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(vals.total, 0.0);
    }

    #[test]
    fn total_cost_at_initial_guess() {
        // Hand evaluation with all-ones coefficients at [0.03, 1.5, 0.5, 0.5, 0.5]:
        // h = (0.0009 + 0.5) / 2 = 0.25045
        // c = 0.75 / 3 = 0.25
        // d = 1.5 / 3 = 0.5
        // v = (0.03 + 0.5 + 0.5) / 3 = 1.03 / 3
        let vals =
            total_cost(&DesignVector::initial_guess(), &WeightVector::new(1.0, 1.0, 1.0, 1.0), &ones())
                .unwrap();
        assert!((vals.h - 0.25045).abs() < 1e-15);
        assert!((vals.c - 0.25).abs() < 1e-15);
        assert!((vals.d - 0.5).abs() < 1e-15);
        assert!((vals.v - 1.03 / 3.0).abs() < 1e-15);
        let expected = 0.25045 + 0.25 - 0.5 - 1.03 / 3.0;
        assert!((vals.total - expected).abs() < 1e-15);
        assert!((vals.total - (-0.342_883_333_333_333_3)).abs() < 1e-15);
    }

    #[test]
    fn zero_weights_give_zero_gradient() {
        let g = gradient(&DesignVector::initial_guess(), &WeightVector::new(0.0, 0.0, 0.0, 0.0), &ones())
            .unwrap();
        assert_eq!(g, [0.0; DIM]);
    }

    #[test]
    fn pure_form_drag_gradient() {
        let k = ObjectiveCoefficients { h_form: 2.0, h_skin: 0.0, area_max: 0.8, ..ones() };
        let w = WeightVector::new(1.0, 0.0, 0.0, 0.0);
        for a in [0.01, 0.2, 0.77] {
            let x = DesignVector::new(a, 1.0, 0.5, 0.5, 0.5);
            let g = gradient(&x, &w, &k).unwrap();
            let expected = 2.0 * k.h_form * a / (k.area_max * k.area_max) / (k.h_form + k.h_skin);
            assert!((g[0] - expected).abs() < 1e-14);
            let fd = check_gradient(&x, &w, &k, &[1.0; DIM]).unwrap();
            assert!(fd.max_relative_error < 1e-5);
        }
    }

    #[test]
    fn gradient_sign_reliability_only() {
        // With q = 0, raising eta only raises d, so dJ/deta < 0.
        let w = WeightVector::new(1.0, 0.0, 1.0, 1.0);
        let g = gradient(&DesignVector::new(0.2, 1.0, 0.5, 0.5, 0.9), &w, &ones()).unwrap();
        assert!(g[4] < 0.0);
    }

    #[test]
    fn scaled_cost_matches_evaluation() {
        let k = ObjectiveCoefficients {
            h_form: 1.3,
            h_skin: 0.2,
            c_quad: [0.5, 2.0, 1.0],
            d_lin: [0.1, 0.0, 3.0],
            v_reg: [2.0, 0.4, 0.0],
            area_max: 1.0,
            length_max: 3.0,
        };
        let w = WeightVector::new(2.0, 1.0, 1.2, 2.0);
        let x = DesignVector::new(0.41, 2.2, 0.3, 0.7, 0.6);
        let direct = evaluate_unchecked(&x, &w, &k).total;
        let scaled = ScaledCost::new(&w, &k).value(&x.to_array());
        assert!((direct - scaled).abs() < 1e-14);
    }
}
