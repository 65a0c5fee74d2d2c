//! Co-design optimization of an autonomous underwater vehicle and its
//! docking station.
//!
//! The crate covers the pipeline from physical parameters to an optimal
//! design:
//!
//! - [`domain`]: the design vector `[A, l, u, e, eta]`, design-intent
//!   weights, bounds, and the formulas deriving control fidelity, entry
//!   area and docking tolerance from vehicle and dock parameters.
//! - [`objective`]: hydrodynamic loss, cost, docking reliability and
//!   versatility surrogates and the weighted total `J = ph + qc − rd − sv`.
//! - [`solver`]: a log-barrier interior-point solver with multi-start.
//! - [`scenarios`]: the general, low-cost and survey design intents, and
//!   coefficient calibration against a reference optimum.
//! - [`oracle`]: a Monte Carlo docking simulator.
//! - [`cli`]: configuration files, sweeps and reports behind the
//!   `dockopt` binary.

// Negated comparisons reject NaN together with out-of-range values, and
// index loops mirror the dense 5×5 linear algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod domain;
pub mod error;
pub mod objective;
pub mod oracle;
pub mod scenarios;
pub mod solver;

pub use domain::{DesignBounds, DesignVector, DockGeometry, KinematicProfile, Variable, WeightVector};
pub use error::{Error, Result};
pub use objective::{ObjectiveCoefficients, ObjectiveValues};
pub use solver::{ConstraintSet, SolveResult, SolverSettings, Status};
