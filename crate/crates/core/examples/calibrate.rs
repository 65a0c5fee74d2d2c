//! Fit the surrogate coefficients so the general case reproduces its
//! reference optimum, then check the low-cost and survey cases.
//!
//! `cargo run --release --example calibrate -- [budget]`

use dockopt::scenarios::{builtin_scenarios, calibrate, calibration_start, CALIBRATION_BUDGET};
use dockopt::solver::SolverSettings;

fn main() -> dockopt::Result<()> {
    let budget = std::env::args().nth(1).and_then(|b| b.parse().ok()).unwrap_or(CALIBRATION_BUDGET);
    let settings = SolverSettings::default();
    let cases = builtin_scenarios();
    let fit = calibrate(&cases[0], &calibration_start(), budget, &settings)?;
    println!("{} solves, residual {:.3e}", fit.evaluations, fit.residual);
    println!("{:#?}", fit.coefficients);

    for s in &cases {
        let r = s.solve(&fit.coefficients, &settings)?;
        let expected = s.expected_x_star.expect("built-in cases carry a reference");
        println!("{:<9} {}  deviation {:.3}", s.name, r.x_star, r.x_star.max_rel_diff(&expected));
    }
    Ok(())
}
