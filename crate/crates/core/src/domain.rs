//! Design variables, design intent, and the formulas that tie the abstract
//! variables (control fidelity, relative entry area, docking tolerance) to
//! physical vehicle and dock parameters.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of optimization variables.
pub const DIM: usize = 5;

/// Index of each optimization variable inside `[A, l, u, e, eta]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    FrontalArea,
    Length,
    ControlFidelity,
    EntryAreaFraction,
    DockingTolerance,
}

impl Variable {
    pub const ALL: [Variable; DIM] = [
        Variable::FrontalArea,
        Variable::Length,
        Variable::ControlFidelity,
        Variable::EntryAreaFraction,
        Variable::DockingTolerance,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Variable::FrontalArea => "A",
            Variable::Length => "l",
            Variable::ControlFidelity => "u",
            Variable::EntryAreaFraction => "e",
            Variable::DockingTolerance => "eta",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The co-design vector `[A, l, u, e, eta]`.
///
/// `frontal_area` is in m², `length` in m; the other three are
/// dimensionless scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignVector {
    #[serde(alias = "A")]
    pub frontal_area: f64,
    #[serde(alias = "l")]
    pub length: f64,
    #[serde(alias = "u")]
    pub control_fidelity: f64,
    #[serde(alias = "e")]
    pub entry_area_fraction: f64,
    #[serde(alias = "eta")]
    pub docking_tolerance: f64,
}

impl DesignVector {
    pub fn new(
        frontal_area: f64,
        length: f64,
        control_fidelity: f64,
        entry_area_fraction: f64,
        docking_tolerance: f64,
    ) -> Self {
        Self { frontal_area, length, control_fidelity, entry_area_fraction, docking_tolerance }
    }

    /// Starting point shared by the built-in cases.
    pub fn initial_guess() -> Self {
        Self::new(0.03, 1.5, 0.5, 0.5, 0.5)
    }

    pub fn from_array(x: [f64; DIM]) -> Self {
        Self::new(x[0], x[1], x[2], x[3], x[4])
    }

    pub fn to_array(&self) -> [f64; DIM] {
        [
            self.frontal_area,
            self.length,
            self.control_fidelity,
            self.entry_area_fraction,
            self.docking_tolerance,
        ]
    }

    pub fn get(&self, var: Variable) -> f64 {
        self.to_array()[var.index()]
    }

    /// Checks the physical-range invariants: `A, l > 0`, `u ∈ (0, 1]`,
    /// `e, eta ∈ [0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let x = self.to_array();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("design vector has non-finite entries: {x:?}")));
        }
        if self.frontal_area <= 0.0 {
            return Err(Error::InvalidArgument("frontal_area must be > 0".into()));
        }
        if self.length <= 0.0 {
            return Err(Error::InvalidArgument("length must be > 0".into()));
        }
        if !(self.control_fidelity > 0.0 && self.control_fidelity <= 1.0) {
            return Err(Error::InvalidArgument("control_fidelity must lie in (0, 1]".into()));
        }
        for (name, v) in
            [("entry_area_fraction", self.entry_area_fraction), ("docking_tolerance", self.docking_tolerance)]
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &DesignVector) -> f64 {
        self.to_array().iter().zip(other.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Largest componentwise relative difference, relative to `reference`.
    pub fn max_rel_diff(&self, reference: &DesignVector) -> f64 {
        self.to_array()
            .iter()
            .zip(reference.to_array())
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for DesignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[A={:.4} m², l={:.4} m, u={:.4}, e={:.4}, eta={:.4}]",
            self.frontal_area,
            self.length,
            self.control_fidelity,
            self.entry_area_fraction,
            self.docking_tolerance
        )
    }
}

/// Design-intent weights, stored as nonnegative magnitudes.
///
/// The reliability and versatility terms enter the total cost with a
/// negative sign; that sign is applied by the scalarizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightVector {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl WeightVector {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Self {
        Self { p, q, r, s }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.p * factor, self.q * factor, self.r * factor, self.s * factor)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.p, self.q, self.r, self.s]
    }

    /// Weights as they enter the cost, `[p, q, -r, -s]`.
    pub fn signed(&self) -> [f64; 4] {
        [self.p, self.q, -self.r, -self.s]
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.to_array();
        for (name, v) in ["p", "q", "r", "s"].iter().zip(w) {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if w.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidArgument("at least one weight must be strictly positive".into()));
        }
        Ok(())
    }
}

/// Box bounds on the design vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBounds {
    pub lower: DesignVector,
    pub upper: DesignVector,
}

impl Default for DesignBounds {
    fn default() -> Self {
        Self {
            lower: DesignVector::new(0.01, 0.5, 0.083, 0.177, 0.0),
            upper: DesignVector::new(1.0, 3.0, 1.0, 0.855, 1.0),
        }
    }
}

impl DesignBounds {
    pub fn validate(&self) -> Result<()> {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        for var in Variable::ALL {
            let (l, u) = (lo[var.index()], hi[var.index()]);
            if !l.is_finite() || !u.is_finite() || l >= u {
                return Err(Error::InvalidArgument(format!(
                    "bounds for {var} must satisfy lower < upper, got [{l}, {u}]"
                )));
            }
        }
        if lo[0] <= 0.0 || lo[1] <= 0.0 {
            return Err(Error::InvalidArgument("frontal_area and length lower bounds must be > 0".into()));
        }
        Ok(())
    }

    pub fn range(&self) -> [f64; DIM] {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        std::array::from_fn(|i| hi[i] - lo[i])
    }

    pub fn contains(&self, x: &DesignVector, tol: f64) -> bool {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        x.to_array().iter().enumerate().all(|(i, &v)| v >= lo[i] - tol && v <= hi[i] + tol)
    }

    pub fn clip(&self, x: &DesignVector, margin_fraction: f64) -> DesignVector {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        let x = x.to_array();
        DesignVector::from_array(std::array::from_fn(|i| {
            let m = margin_fraction * (hi[i] - lo[i]);
            x[i].clamp(lo[i] + m, hi[i] - m)
        }))
    }
}

/// Control capabilities of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinematicProfile {
    /// Independently controlled degrees of freedom, 1..=6.
    pub dof_count: u8,
    /// Standard deviation of the linear motion control error, m.
    pub control_error_sigma: f64,
    pub authority_weight: f64,
    pub accuracy_weight: f64,
}

impl KinematicProfile {
    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.dof_count) {
            return Err(Error::InvalidArgument(format!(
                "dof_count must be in 1..=6, got {}",
                self.dof_count
            )));
        }
        if !(self.control_error_sigma > 0.0 && self.control_error_sigma.is_finite()) {
            return Err(Error::InvalidArgument("control_error_sigma must be finite and > 0".into()));
        }
        let (w1, w2) = (self.authority_weight, self.accuracy_weight);
        if !(w1 >= 0.0 && w2 >= 0.0 && w1.is_finite() && w2.is_finite()) {
            return Err(Error::InvalidArgument(
                "authority_weight and accuracy_weight must be finite and >= 0".into(),
            ));
        }
        if w1 + w2 <= 0.0 {
            return Err(Error::InvalidArgument("authority_weight + accuracy_weight must be > 0".into()));
        }
        Ok(())
    }

    /// Fraction of the six rigid-body degrees of freedom under control.
    pub fn control_authority(&self) -> f64 {
        f64::from(self.dof_count) / 6.0
    }
}

/// Dock entry spans on the unit sphere centred at the entrance, plus the
/// single-side clearance of the entrance.
///
/// `phi` is the polar angle measured from the +z pole, `theta` the azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DockGeometry {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Single-side clearance, m.
    pub clearance: f64,
}

impl DockGeometry {
    /// Spans only; the clearance is left at zero.
    pub fn spans(theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> Self {
        Self { theta1, theta2, phi1, phi2, clearance: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.theta1, self.theta2, self.phi1, self.phi2, self.clearance];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dock geometry has non-finite entries".into()));
        }
        let tau = 2.0 * PI;
        if !(0.0 <= self.theta1 && self.theta1 <= self.theta2 && self.theta2 <= tau) {
            return Err(Error::InvalidArgument(format!(
                "azimuth span must satisfy 0 <= theta1 <= theta2 <= 2π, got [{}, {}]",
                self.theta1, self.theta2
            )));
        }
        if !(0.0 <= self.phi1 && self.phi1 <= self.phi2 && self.phi2 <= PI) {
            return Err(Error::InvalidArgument(format!(
                "polar span must satisfy 0 <= phi1 <= phi2 <= π, got [{}, {}]",
                self.phi1, self.phi2
            )));
        }
        if self.clearance < 0.0 {
            return Err(Error::InvalidArgument("clearance must be >= 0".into()));
        }
        Ok(())
    }
}

/// Clamps `x` to `[0, 1]`.
pub fn saturate(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("saturate of non-finite value {x}")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Control accuracy `sat(√A / σc)`.
pub fn control_accuracy(control_error_sigma: f64, frontal_area: f64) -> Result<f64> {
    if !(control_error_sigma > 0.0) {
        return Err(Error::InvalidArgument("control_error_sigma must be > 0".into()));
    }
    if !(frontal_area > 0.0) {
        return Err(Error::InvalidArgument("frontal_area must be > 0".into()));
    }
    saturate(frontal_area.sqrt() / control_error_sigma)
}

/// Weighted blend of control authority and control accuracy.
pub fn control_fidelity(profile: &KinematicProfile, frontal_area: f64) -> Result<f64> {
    profile.validate()?;
    let authority = profile.control_authority();
    let accuracy = control_accuracy(profile.control_error_sigma, frontal_area)?;
    let (w1, w2) = (profile.authority_weight, profile.accuracy_weight);
    Ok((w1 * authority + w2 * accuracy) / (w1 + w2))
}

/// Fraction of the unit sphere covered by the entry spans.
pub fn entry_area_fraction(geom: &DockGeometry) -> Result<f64> {
    geom.validate()?;
    // cos φ written as sin(π/2 − φ) is exact at the poles and the equator.
    let cos = |phi: f64| (FRAC_PI_2 - phi).sin();
    let area = (cos(geom.phi1) - cos(geom.phi2)).abs() * (geom.theta2 - geom.theta1);
    Ok((area / (4.0 * PI)).clamp(0.0, 1.0))
}

/// Normalized clearance left after one standard deviation of control error.
pub fn docking_tolerance(clearance: f64, control_error_sigma: f64) -> Result<f64> {
    if !(control_error_sigma > 0.0 && control_error_sigma.is_finite()) {
        return Err(Error::InvalidArgument("control_error_sigma must be finite and > 0".into()));
    }
    if !clearance.is_finite() {
        return Err(Error::InvalidArgument("clearance must be finite".into()));
    }
    saturate((clearance - control_error_sigma) / control_error_sigma)
}

/// Physical parameters that reproduce an abstract design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub profile: KinematicProfile,
    pub geometry: DockGeometry,
}

/// Maps an optimized design back onto a kinematic profile and dock geometry.
///
/// The DOF count is the rounded authority that remains once the accuracy
/// term is evaluated at `sigma_target`; the reported σc is then refit so the
/// blended fidelity matches `x.u`. Entry spans fix `theta1 = phi1 = 0`,
/// open the azimuth over a hemisphere first and spill into the polar span
/// once the full azimuth is used. The clearance is `(1 + eta)·σc`.
pub fn realize_design(
    x: &DesignVector,
    sigma_target: f64,
    authority_weight: f64,
    accuracy_weight: f64,
) -> Result<Realization> {
    x.validate()?;
    if !(sigma_target > 0.0 && sigma_target.is_finite()) {
        return Err(Error::InvalidArgument("sigma_target must be finite and > 0".into()));
    }
    let (w1, w2) = (authority_weight, accuracy_weight);
    if !(w1 >= 0.0 && w2 >= 0.0) || w1 + w2 <= 0.0 {
        return Err(Error::InvalidArgument("fidelity weights must be >= 0 with a positive sum".into()));
    }
    let total = w1 + w2;
    let u = x.control_fidelity;
    let area = x.frontal_area;

    let floor_u = w1 / (6.0 * total);
    if w2 > 0.0 && u <= floor_u {
        return Err(Error::InfeasibleRealization {
            reason: format!("control_fidelity {u} is at or below the one-DOF, zero-accuracy floor"),
            closest_u: floor_u,
        });
    }

    let (dof_count, sigma) = if w1 == 0.0 {
        // Authority carries no weight; any DOF count works.
        (6, sigma_for_accuracy(u, area, sigma_target))
    } else if w2 == 0.0 {
        ((6.0 * u).round().clamp(1.0, 6.0) as u8, sigma_target)
    } else {
        let accuracy_at_target = control_accuracy(sigma_target, area)?;
        let authority = (total * u - w2 * accuracy_at_target) / w1;
        let needed = |d: u8| ((total * u - w1 * f64::from(d) / 6.0) / w2).clamp(f64::MIN_POSITIVE, 1.0);
        let miss = |d: u8| (total * u - w1 * f64::from(d) / 6.0 - w2 * needed(d)).abs();
        // Nearest achievable u; ties go to the count nearest the authority estimate.
        let preferred = (6.0 * authority).round().clamp(1.0, 6.0);
        let dof = (1..=6u8)
            .min_by_key(|&d| ((miss(d) * 1e12).round() as u64, (f64::from(d) - preferred).abs() as u8))
            .unwrap_or(1);
        (dof, sigma_for_accuracy(needed(dof), area, sigma_target))
    };

    let profile =
        KinematicProfile { dof_count, control_error_sigma: sigma, authority_weight: w1, accuracy_weight: w2 };

    let e = x.entry_area_fraction;
    let tau = 2.0 * PI;
    let (theta2, phi2) =
        if e <= 0.5 { (4.0 * PI * e, PI / 2.0) } else { (tau, (1.0 - 2.0 * e).clamp(-1.0, 1.0).acos()) };
    let geometry = DockGeometry {
        theta1: 0.0,
        theta2: theta2.min(tau),
        phi1: 0.0,
        phi2,
        clearance: (1.0 + x.docking_tolerance) * sigma,
    };

    Ok(Realization { profile, geometry })
}

/// σc that produces the given accuracy at frontal area `area`; keeps the
/// target when it already saturates.
fn sigma_for_accuracy(accuracy: f64, area: f64, sigma_target: f64) -> f64 {
    let root = area.sqrt();
    // Rounding in the caller's subtraction must not leave saturation.
    if accuracy >= 1.0 - 1e-12 {
        sigma_target.min(root)
    } else {
        root / accuracy
    }
}
