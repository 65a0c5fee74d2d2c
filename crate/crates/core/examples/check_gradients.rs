//! Analytic gradient against central differences at random feasible designs.

use dockopt::domain::{DesignBounds, DesignVector, WeightVector};
use dockopt::objective::check_gradient;
use dockopt::scenarios::calibrated_coefficients;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dockopt::Result<()> {
    let bounds = DesignBounds::default();
    let (lo, hi) = (bounds.lower.to_array(), bounds.upper.to_array());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = WeightVector::new(1.0, 1.0, 1.0, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x: [f64; 5] = std::array::from_fn(|i| rng.random_range(lo[i]..=hi[i]));
        let c =
            check_gradient(&DesignVector::from_array(x), &w, &calibrated_coefficients(), &bounds.range())?;
        worst = worst.max(c.max_relative_error);
    }
    println!("worst relative error over 1000 designs: {worst:.3e}");
    Ok(())
}
