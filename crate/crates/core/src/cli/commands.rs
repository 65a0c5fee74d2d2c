use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{realize_design, DesignVector, Realization, WeightVector, DIM};
use crate::objective::{check_gradient, ObjectiveCoefficients};
use crate::oracle::{simulate_docking, SimulationReport};
use crate::scenarios::{calibrate, CalibrationResult};
use crate::solver::{SolveResult, SolverSettings, Status};

use super::config::{CoefficientConfig, CoefficientPreset, RunConfig};
use super::{write_file, CliError, ExitStatus};

/// Largest accepted relative error between analytic and numeric gradients.
pub const GRADIENT_TOLERANCE: f64 = 1e-5;

const GRADIENT_POINTS: usize = 100;

#[derive(Serialize)]
struct SolveRecord<'a> {
    scenario: &'a str,
    weights: WeightVector,
    coefficients: ObjectiveCoefficients,
    settings: SolverSettings,
    result: &'a SolveResult,
    realization: Option<Realization>,
    realization_error: Option<String>,
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("records serialize");
    bytes.push(b'\n');
    bytes
}

/// Solves the configured problem and prints a report. Exit 2 when the
/// solver stopped without convergence; the best iterate is still reported.
pub fn cmd_solve(config_path: &Path, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    solve_with(&RunConfig::load(config_path)?, out)
}

pub fn solve_with(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    let scenario = cfg.scenario();
    let coeff = cfg.coefficients(CoefficientPreset::Calibrated);
    let r = scenario.solve(&coeff, &cfg.solver)?;
    let rz = &cfg.realization;
    let realization = realize_design(&r.x_star, rz.sigma_c, rz.authority_weight, rz.accuracy_weight);

    let w = scenario.weights;
    writeln!(out, "scenario   {}  (p={} q={} r={} s={})", scenario.name, w.p, w.q, w.r, w.s)?;
    write!(out, "status     {}", r.status.as_str())?;
    if let Some(m) = r.multistart {
        write!(
            out,
            "  (start {} of {}; {} converged, {} agree{})",
            r.start_index,
            m.starts,
            m.converged,
            m.agreeing,
            if m.multimodal { "; multimodal" } else { "" }
        )?;
    }
    writeln!(out)?;
    let x = r.x_star;
    writeln!(out, "x*         A   = {:.6} m²", x.frontal_area)?;
    writeln!(out, "           l   = {:.6} m", x.length)?;
    writeln!(out, "           u   = {:.6}", x.control_fidelity)?;
    writeln!(out, "           e   = {:.6}", x.entry_area_fraction)?;
    writeln!(out, "           eta = {:.6}", x.docking_tolerance)?;
    if let Some(expected) = scenario.expected_x_star {
        writeln!(out, "reference  {expected}  (max relative deviation {:.4})", x.max_rel_diff(&expected))?;
    }
    let o = r.objective;
    writeln!(out, "objectives h = {:.6}  c = {:.6}  d = {:.6}  v = {:.6}", o.h, o.c, o.d, o.v)?;
    writeln!(out, "total      J = {:.9}", o.total)?;
    writeln!(
        out,
        "constraint g1 = A·l − V = {:.6e} m³   g2 = eta/A − R = {:.6e} 1/m²",
        r.constraint_values[0], r.constraint_values[1]
    )?;
    if r.active_set.is_empty() {
        writeln!(out, "active     none")?;
    } else {
        let names: Vec<String> = r.active_set.iter().map(|a| a.to_string()).collect();
        writeln!(out, "active     {}", names.join(", "))?;
    }
    writeln!(out, "KKT        {:.3e} after {} inner iterations", r.kkt_residual, r.iterations)?;
    match &realization {
        Ok(real) => {
            let p = &real.profile;
            let g = &real.geometry;
            writeln!(
                out,
                "realized   {} controlled DOF, sigma_c = {:.6} m",
                p.dof_count, p.control_error_sigma
            )?;
            writeln!(
                out,
                "           theta ∈ [{:.6}, {:.6}] rad, phi ∈ [{:.6}, {:.6}] rad, D = {:.6} m",
                g.theta1, g.theta2, g.phi1, g.phi2, g.clearance
            )?;
        }
        Err(e) => writeln!(out, "realized   not realizable: {e}")?,
    }

    if let Some(path) = &cfg.output.result {
        let record = SolveRecord {
            scenario: &scenario.name,
            weights: w,
            coefficients: coeff,
            settings: cfg.solver,
            result: &r,
            realization: realization.as_ref().ok().copied(),
            realization_error: realization.as_ref().err().map(|e| e.to_string()),
        };
        write_file(path, &json(&record))?;
        writeln!(out, "record     {}", path.display())?;
    }
    Ok(if r.status == Status::Converged { ExitStatus::Success } else { ExitStatus::NotConverged })
}

/// Calibrates coefficients against the configured scenario's reference
/// optimum, starting from `[coefficients]` (or the calibration start).
pub fn cmd_calibrate(config_path: &Path, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    calibrate_with(&RunConfig::load(config_path)?, out).map(|_| ExitStatus::Success)
}

/// Runs the calibration, prints the report and returns the result.
pub fn calibrate_with(cfg: &RunConfig, out: &mut dyn Write) -> Result<CalibrationResult, CliError> {
    let scenario = cfg.scenario();
    let start = cfg.coefficients(CoefficientPreset::CalibrationStart);
    let cal = calibrate(&scenario, &start, cfg.calibration.budget, &cfg.solver)?;
    let expected = scenario.expected_x_star.expect("calibrate checks the target");
    let deviation = cal.x_star.max_rel_diff(&expected);
    writeln!(out, "target     {} {expected}", scenario.name)?;
    writeln!(out, "fitted     {}", cal.x_star)?;
    writeln!(
        out,
        "residual   {:.6e} after {} solves; max relative deviation {:.4} ({} {})",
        cal.residual,
        cal.evaluations,
        deviation,
        if deviation <= scenario.expected_tolerance { "within" } else { "outside" },
        scenario.expected_tolerance
    )?;
    #[derive(Serialize)]
    struct Snippet {
        coefficients: CoefficientConfig,
    }
    let snippet = toml::to_string(&Snippet { coefficients: CoefficientConfig::explicit(&cal.coefficients) })
        .expect("coefficients serialize");
    writeln!(out, "\n{snippet}")?;
    if let Some(path) = &cfg.output.result {
        write_file(path, &json(&cal))?;
        writeln!(out, "record     {}", path.display())?;
    }
    Ok(cal)
}

/// Simulates docking attempts for the `[simulation]` section.
pub fn cmd_simulate(config_path: &Path, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    simulate_with(&RunConfig::load(config_path)?, out).map(|_| ExitStatus::Success)
}

pub fn simulate_with(cfg: &RunConfig, out: &mut dyn Write) -> Result<SimulationReport, CliError> {
    let sim = cfg.simulation.ok_or_else(|| CliError::Config {
        origin: "config".into(),
        message: "the simulate command needs a [simulation] section".into(),
    })?;
    let report = simulate_docking(&sim)?;
    writeln!(
        out,
        "clearance  D = {} m, sigma_c = {} m (D/sigma_c = {:.6})",
        sim.geometry.clearance,
        sim.sigma_c,
        sim.geometry.clearance / sim.sigma_c
    )?;
    writeln!(out, "samples    {} (seed {})", report.samples, sim.seed)?;
    writeln!(out, "success    {:.6} ± {:.6} (95% CI)", report.success_rate, report.ci_halfwidth_95)?;
    writeln!(
        out,
        "reference  {:.6} (Rayleigh), deviation {:.2} halfwidths",
        report.closed_form,
        report.deviation_in_halfwidths()
    )?;
    if let Some(path) = &cfg.output.result {
        write_file(path, &json(&report))?;
        writeln!(out, "record     {}", path.display())?;
    }
    Ok(report)
}

/// Compares analytic and central-difference gradients of `J` at the
/// initial guess and at 100 random in-bounds points. Exit 2 when any
/// relative error reaches [`GRADIENT_TOLERANCE`].
pub fn cmd_check_gradients(config_path: &Path, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    check_gradients_with(&RunConfig::load(config_path)?, out)
}

pub fn check_gradients_with(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    let scenario = cfg.scenario();
    let coeff = cfg.coefficients(CoefficientPreset::Calibrated);
    let bounds = scenario.bounds;
    let lo = bounds.lower.to_array();
    let range = bounds.range();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.solver.seed);
    let mut points = vec![scenario.x_init];
    points.extend(
        (0..GRADIENT_POINTS).map(|_| {
            DesignVector::from_array(std::array::from_fn(|i| lo[i] + rng.random::<f64>() * range[i]))
        }),
    );

    let mut worst = (0.0f64, 0usize, 0usize);
    let mut failures = 0usize;
    for (k, x) in points.iter().enumerate() {
        let check = check_gradient(x, &scenario.weights, &coeff, &range)?;
        if check.max_relative_error >= GRADIENT_TOLERANCE {
            failures += 1;
        }
        if check.max_relative_error >= worst.0 {
            let i = (0..DIM)
                .max_by(|&a, &b| check.relative_error[a].total_cmp(&check.relative_error[b]))
                .unwrap_or(0);
            worst = (check.max_relative_error, k, i);
        }
    }
    let var = crate::domain::Variable::ALL[worst.2];
    writeln!(out, "points     {} (initial guess and {} random)", points.len(), GRADIENT_POINTS)?;
    writeln!(
        out,
        "worst      relative error {:.3e} in d/d{var} at point {} {}",
        worst.0, worst.1, points[worst.1]
    )?;
    writeln!(out, "tolerance  {GRADIENT_TOLERANCE:e}: {failures} point(s) failed")?;
    Ok(if failures == 0 { ExitStatus::Success } else { ExitStatus::NotConverged })
}
