//! Monte Carlo docking-attempt simulator.
//!
//! Each attempt draws a lateral error `ε ~ N(0, σc² I₂)` and succeeds when
//! `‖ε‖ ≤ D`, the single-side clearance. The exact success probability is
//! the Rayleigh CDF `1 − exp(−D²/2σc²)`, which makes the simulator its own
//! reference. Only the docking-tolerance channel of the reliability
//! surrogate is exercised: entry direction and control fidelity do not
//! enter the success condition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{DesignVector, DockGeometry};
use crate::error::{Error, Result};
use crate::objective::{docking_reliability, ObjectiveCoefficients};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;

fn default_samples() -> u64 {
    DEFAULT_SAMPLES
}

fn default_seed() -> u64 {
    crate::solver::DEFAULT_SEED
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Only `clearance` affects the outcome.
    pub geometry: DockGeometry,
    /// Standard deviation of each lateral error component, m.
    #[serde(alias = "σc")]
    pub sigma_c: f64,
}

impl SimulationConfig {
    /// Config with the default sample count and seed and only the clearance set.
    pub fn with_clearance(clearance: f64, sigma_c: f64) -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: default_seed(),
            geometry: DockGeometry {
                clearance,
                ..DockGeometry::spans(0.0, 2.0 * std::f64::consts::PI, 0.0, std::f64::consts::PI)
            },
            sigma_c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("simulation.samples must be >= 1".into()));
        }
        self.geometry.validate()?;
        if self.geometry.clearance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "simulation.geometry.clearance must be >= 0, got {}",
                self.geometry.clearance
            )));
        }
        if !(self.sigma_c > 0.0 && self.sigma_c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "simulation.sigma_c must be finite and > 0, got {}",
                self.sigma_c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub success_rate: f64,
    /// `1.96·√(p̂(1−p̂)/n)`.
    pub ci_halfwidth_95: f64,
    pub samples: u64,
    /// Rayleigh CDF at the configured clearance.
    pub closed_form: f64,
}

impl SimulationReport {
    /// Distance to the closed form in units of the CI halfwidth. Infinite
    /// when the halfwidth is zero and the estimate is off.
    pub fn deviation_in_halfwidths(&self) -> f64 {
        let gap = (self.success_rate - self.closed_form).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.ci_halfwidth_95
        }
    }
}

/// Probability that a 2-D isotropic Gaussian error with component
/// deviation `sigma` has magnitude at most `radius`.
pub fn rayleigh_cdf(radius: f64, sigma: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    -(-(radius * radius) / (2.0 * sigma * sigma)).exp_m1()
}

pub fn simulate_docking(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r2 = (cfg.geometry.clearance / cfg.sigma_c).powi(2);
    let mut hits = 0u64;
    for _ in 0..cfg.samples {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        if a * a + b * b <= r2 {
            hits += 1;
        }
    }
    let n = cfg.samples as f64;
    let p = hits as f64 / n;
    Ok(SimulationReport {
        success_rate: p,
        ci_halfwidth_95: 1.96 * (p * (1.0 - p) / n).sqrt(),
        samples: cfg.samples,
        closed_form: rayleigh_cdf(cfg.geometry.clearance, cfg.sigma_c),
    })
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs two samples of equal length >= 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::InvalidArgument(
            "correlation is undefined for a sample with zero variance".into(),
        ));
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Simulated success rates and surrogate reliabilities of `designs`, with
/// clearance `D = (1 + η)·σc`. Every design uses the same random stream.
pub fn reliability_pairs(
    designs: &[DesignVector],
    coeff: &ObjectiveCoefficients,
    sigma_c: f64,
    samples: u64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rates = Vec::with_capacity(designs.len());
    let mut surrogate = Vec::with_capacity(designs.len());
    for x in designs {
        let cfg = SimulationConfig {
            samples,
            seed,
            ..SimulationConfig::with_clearance((1.0 + x.docking_tolerance) * sigma_c, sigma_c)
        };
        rates.push(simulate_docking(&cfg)?.success_rate);
        surrogate.push(docking_reliability(x, coeff)?);
    }
    Ok((rates, surrogate))
}

/// Pearson correlation between simulated success rates and the surrogate
/// `d` across `designs`.
pub fn reliability_correlation(
    designs: &[DesignVector],
    coeff: &ObjectiveCoefficients,
    sigma_c: f64,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    let (rates, surrogate) = reliability_pairs(designs, coeff, sigma_c, samples, seed)?;
    pearson(&rates, &surrogate)
}

/// Designs at the initial guess with `η` on an even grid over `[0, 1]`.
pub fn tolerance_grid(points: usize) -> Vec<DesignVector> {
    let steps = points.saturating_sub(1).max(1) as f64;
    (0..points)
        .map(|k| DesignVector { docking_tolerance: k as f64 / steps, ..DesignVector::initial_guess() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(d: f64, sigma: f64, n: u64) -> SimulationReport {
        simulate_docking(&SimulationConfig { samples: n, ..SimulationConfig::with_clearance(d, sigma) })
            .unwrap()
    }

    #[test]
    fn rayleigh_reference_values() {
        assert!((rayleigh_cdf(1.0, 1.0) - 0.393_469_340_287_366_6).abs() < 1e-15);
        assert!((rayleigh_cdf(0.2, 0.1) - 0.864_664_716_763_387_3).abs() < 1e-15);
        assert_eq!(rayleigh_cdf(0.0, 0.3), 0.0);
    }

    #[test]
    fn simulation_matches_closed_form() {
        for (d, s) in [(0.1, 0.1), (0.2, 0.1), (0.05, 0.2)] {
            let r = run(d, s, 200_000);
            assert!(r.deviation_in_halfwidths() < 3.0, "{r:?}");
            let expect = 1.96 * (r.success_rate * (1.0 - r.success_rate) / 200_000.0).sqrt();
            assert_eq!(r.ci_halfwidth_95, expect);
        }
    }

    #[test]
    fn zero_clearance_never_docks() {
        let r = run(0.0, 0.1, 10_000);
        assert_eq!(r.success_rate, 0.0);
        assert_eq!(r.ci_halfwidth_95, 0.0);
        assert_eq!(r.deviation_in_halfwidths(), 0.0);
    }

    #[test]
    fn simulation_is_deterministic() {
        assert_eq!(run(0.15, 0.1, 50_000), run(0.15, 0.1, 50_000));
        let other = simulate_docking(&SimulationConfig {
            samples: 50_000,
            seed: 1,
            ..SimulationConfig::with_clearance(0.15, 0.1)
        })
        .unwrap();
        assert_ne!(other.success_rate, run(0.15, 0.1, 50_000).success_rate);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = SimulationConfig::with_clearance(0.1, 0.1);
        c.samples = 0;
        assert!(simulate_docking(&c).is_err());
        let c = SimulationConfig::with_clearance(-0.1, 0.1);
        assert!(simulate_docking(&c).is_err());
        let c = SimulationConfig::with_clearance(0.1, 0.0);
        assert!(simulate_docking(&c).is_err());
    }

    #[test]
    fn tolerance_only_surrogate_tracks_simulation() {
        let k = ObjectiveCoefficients { d_lin: [0.0, 0.0, 1.0], ..Default::default() };
        let designs = tolerance_grid(11);
        let (rates, d) = reliability_pairs(&designs, &k, 0.05, 100_000, 3).unwrap();
        let matched = pearson(&rates, &d).unwrap();
        assert!(matched > 0.97, "correlation {matched}");
        // Reversing one side destroys the alignment.
        let mut shuffled = d.clone();
        shuffled.reverse();
        assert!(pearson(&rates, &shuffled).unwrap() < matched - 0.5);
    }

    #[test]
    fn identical_designs_have_no_correlation() {
        let x = DesignVector::initial_guess();
        let k = ObjectiveCoefficients::default();
        assert!(reliability_correlation(&[x, x], &k, 0.05, 1000, 1).is_err());
    }
}
