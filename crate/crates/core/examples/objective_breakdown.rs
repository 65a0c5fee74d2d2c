//! The four surrogate objectives, their weighted total and its gradient.

use dockopt::domain::{DesignBounds, DesignVector};
use dockopt::objective::{check_gradient, gradient, total_cost};
use dockopt::scenarios::{builtin_scenarios, calibrated_coefficients};

fn main() -> dockopt::Result<()> {
    let k = calibrated_coefficients();
    let x = DesignVector::initial_guess();
    println!("design {x}\n");
    for s in builtin_scenarios() {
        let o = total_cost(&x, &s.weights, &k)?;
        let g = gradient(&x, &s.weights, &k)?;
        println!("{:<9} h {:.4}  c {:.4}  d {:.4}  v {:.4}  J {:+.6}", s.name, o.h, o.c, o.d, o.v, o.total);
        println!("          dJ/dx = {:?}", g.map(|v| (v * 1e4).round() / 1e4));
        let check = check_gradient(&x, &s.weights, &k, &DesignBounds::default().range())?;
        println!("          finite-difference relative error {:.2e}", check.max_relative_error);
    }
    Ok(())
}
