//! Solve one built-in case from its initial guess and print the barrier path.
//!
//! `cargo run --example solve_case -- survey`

use dockopt::scenarios::{builtin_scenario, calibrated_coefficients};
use dockopt::solver::{solve, SolverSettings};

fn main() -> dockopt::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "general".into());
    let s = builtin_scenario(&name)
        .ok_or_else(|| dockopt::Error::InvalidArgument(format!("unknown case {name}")))?;
    let r = solve(
        &s.weights,
        &calibrated_coefficients(),
        &s.bounds,
        &s.constraints,
        &s.x_init,
        &SolverSettings::default(),
    )?;

    println!("{:>10} {:>14} {:>10} {:>6}", "mu", "J", "KKT", "inner");
    for step in &r.trace {
        println!(
            "{:>10.1e} {:>14.9} {:>10.1e} {:>6}",
            step.mu, step.objective, step.kkt_residual, step.inner_iterations
        );
    }
    println!("\n{}: {:?} at {}", s.name, r.status, r.x_star);
    if let Some(expected) = s.expected_x_star {
        println!("reference {expected}  max relative deviation {:.4}", r.x_star.max_rel_diff(&expected));
    }
    println!("g = {:?}, active {:?}", r.constraint_values, r.active_set);
    Ok(())
}
