//! Latin-hypercube multi-start: every start converges to the same optimum
//! because the surrogate problem is convex.

use dockopt::domain::DesignBounds;
use dockopt::scenarios::{builtin_scenario, calibrated_coefficients};
use dockopt::solver::{latin_hypercube_starts, multi_start_solve, solve, SolverSettings};

fn main() -> dockopt::Result<()> {
    let s = builtin_scenario("general").expect("built-in");
    let k = calibrated_coefficients();
    let settings = SolverSettings { multistart_count: 8, ..SolverSettings::default() };

    for (i, start) in
        latin_hypercube_starts(&DesignBounds::default(), settings.multistart_count, settings.seed)
            .iter()
            .enumerate()
    {
        let r = solve(&s.weights, &k, &s.bounds, &s.constraints, start, &settings)?;
        println!(
            "start {i}: {start}\n      -> J {:.12} ({:?}, {} inner iterations)",
            r.objective.total, r.status, r.iterations
        );
    }
    let best = multi_start_solve(&s.weights, &k, &s.bounds, &s.constraints, &settings)?;
    println!("\nbest {}  summary {:?}", best.x_star, best.multistart);
    Ok(())
}
