//! Exhaustive grid search as an independent check on the barrier solver.

use dockopt::scenarios::{builtin_scenarios, calibrated_coefficients};
use dockopt::solver::{grid_search, SolverSettings};

fn main() -> dockopt::Result<()> {
    let k = calibrated_coefficients();
    for s in builtin_scenarios() {
        let r = s.solve(&k, &SolverSettings::default())?;
        let g = grid_search(&s.weights, &k, &s.bounds, &s.constraints, 20)?;
        println!(
            "{:<9} solver J {:.9}  grid J {:.9} ({} feasible nodes, resolution slack {:.2e})",
            s.name, r.objective.total, g.best_objective, g.feasible_points, g.resolution_slack
        );
        println!("          solver {}\n          grid   {}", r.x_star, g.best);
    }
    Ok(())
}
