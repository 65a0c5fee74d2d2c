//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dockopt::cli::{self, RunConfig};
use dockopt::domain::{
    control_fidelity, docking_tolerance, entry_area_fraction, realize_design, saturate, DesignBounds,
    DesignVector, DockGeometry, KinematicProfile, WeightVector,
};
use dockopt::objective::{check_gradient, ObjectiveCoefficients};
use dockopt::oracle::{
    rayleigh_cdf, reliability_correlation, simulate_docking, tolerance_grid, SimulationConfig,
};
use dockopt::scenarios::{builtin_scenarios, calibrated_coefficients, Scenario};
use dockopt::solver::{grid_search, multi_start_solve, ConstraintSet, SolverSettings, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Composite Simpson rule with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn entry_area_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (mut t1, mut t2) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        let (mut p1, mut p2) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        if p1 > p2 {
            std::mem::swap(&mut p1, &mut p2);
        }
        let e = entry_area_fraction(&DockGeometry::spans(t1, t2, p1, p2)).unwrap();
        let quad = simpson(|_| simpson(f64::sin, p1, p2, 400), t1, t2, 2) / (4.0 * PI);
        worst = worst.max((e - quad).abs());
    }
    let hemi = entry_area_fraction(&DockGeometry::spans(0.0, 2.0 * PI, 0.0, FRAC_PI_2)).unwrap();
    let low = entry_area_fraction(&DockGeometry::spans(0.0, PI, FRAC_PI_4, FRAC_PI_2)).unwrap();
    let high = entry_area_fraction(&DockGeometry::spans(0.0, 2.0 * PI, 0.0, 3.0 * FRAC_PI_4)).unwrap();
    let pass = worst <= 1e-9 && hemi == 0.5 && (low - 0.177).abs() <= 5e-3 && (high - 0.855).abs() <= 5e-3;
    Outcome::new(
        pass,
        format!(
            "max |formula - quadrature| = {worst:.1e} over 1000 spans; hemisphere = {hemi}; \
             theta∈[0,π], phi∈[π/4,π/2] -> {low:.4}; theta∈[0,2π], phi∈[0,3π/4] -> {high:.4}"
        ),
    )
}

fn derived_goldens() -> Outcome {
    let profile = |dof, sigma, w1, w2| KinematicProfile {
        dof_count: dof,
        control_error_sigma: sigma,
        authority_weight: w1,
        accuracy_weight: w2,
    };
    let mut cases: Vec<(&str, f64, f64)> = Vec::new();
    let mut failed: Vec<String> = Vec::new();
    cases.push(("saturate(0.5)", saturate(0.5).unwrap(), 0.5));
    cases.push(("saturate(3.7)", saturate(3.7).unwrap(), 1.0));
    cases.push(("saturate(-0.2)", saturate(-0.2).unwrap(), 0.0));
    cases.push(("u(6, 0.1, 1, 1, 0.04)", control_fidelity(&profile(6, 0.1, 1.0, 1.0), 0.04).unwrap(), 1.0));
    let u = control_fidelity(&profile(1, 10.0, 1.0, 1.0), 0.01).unwrap();
    cases.push(("u(1, 10, 1, 1, 0.01)", u, (1.0 / 6.0 + 0.1 / 10.0) / 2.0));
    cases.push(("u(1, 10, 1, 1, 0.01) to 4 places", (u * 1e4).round() / 1e4, 0.0883));
    cases.push((
        "u(3, 0.5, 2, 1, 0.0625)",
        control_fidelity(&profile(3, 0.5, 2.0, 1.0), 0.0625).unwrap(),
        0.5,
    ));
    for sigma in [0.25, 0.5, 2.0] {
        cases.push(("eta(2σ, σ)", docking_tolerance(2.0 * sigma, sigma).unwrap(), 1.0));
        cases.push(("eta(σ, σ)", docking_tolerance(sigma, sigma).unwrap(), 0.0));
        cases.push(("eta(1.5σ, σ)", docking_tolerance(1.5 * sigma, sigma).unwrap(), 0.5));
    }
    if !saturate(f64::NAN).is_err() || !docking_tolerance(0.1, 0.0).is_err() {
        failed.push("invalid inputs were accepted".into());
    }
    match realize_design(&DesignVector::new(0.04, 1.5, 1.0, 0.5, 1.0), 0.1, 1.0, 1.0) {
        Ok(r) => {
            cases.push(("realized DOF", f64::from(r.profile.dof_count), 6.0));
            cases.push(("realized D", r.geometry.clearance, 0.2));
            cases.push(("realized e", entry_area_fraction(&r.geometry).unwrap(), 0.5));
        }
        Err(e) => failed.push(format!("realize_design: {e}")),
    }
    match realize_design(&DesignVector::new(0.04, 1.5, 1.0, 1.0, 0.0), 0.05, 1.0, 1.0) {
        Ok(r) => {
            cases.push(("e = 1 spans theta2", r.geometry.theta2, 2.0 * PI));
            cases.push(("e = 1 spans phi2", r.geometry.phi2, PI));
            cases.push(("eta = 0 clearance", r.geometry.clearance, 0.05));
        }
        Err(e) => failed.push(format!("realize_design: {e}")),
    }
    failed.extend(
        cases
            .iter()
            .filter(|(_, got, want)| got != want)
            .map(|(name, got, want)| format!("{name}: {got} != {want}")),
    );
    Outcome::new(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} closed-form examples reproduced exactly", cases.len())
        } else {
            failed.join("; ")
        },
    )
}

fn random_coefficients(rng: &mut ChaCha8Rng) -> ObjectiveCoefficients {
    let mut c = || rng.random_range(0.05..3.0);
    ObjectiveCoefficients {
        h_form: c(),
        h_skin: c(),
        c_quad: [c(), c(), c()],
        d_lin: [c(), c(), c()],
        v_reg: [c(), c(), c()],
        area_max: c(),
        length_max: 1.0 + c(),
    }
}

fn random_weights(rng: &mut ChaCha8Rng) -> WeightVector {
    WeightVector::new(
        rng.random_range(0.1..3.0),
        rng.random_range(0.1..3.0),
        rng.random_range(0.1..3.0),
        rng.random_range(0.1..3.0),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bounds = DesignBounds::default();
    let lo = bounds.lower.to_array();
    let range = bounds.range();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let w = random_weights(&mut rng);
        let k = random_coefficients(&mut rng);
        for _ in 0..100 {
            let x = DesignVector::from_array(std::array::from_fn(|i| lo[i] + rng.random::<f64>() * range[i]));
            worst = worst.max(check_gradient(&x, &w, &k, &range).unwrap().max_relative_error);
        }
    }
    Outcome::new(worst < 1e-5, format!("max relative error {worst:.2e} over 10 sets x 100 points"))
}

fn solver_vs_grid() -> Outcome {
    let k = calibrated_coefficients();
    let b = DesignBounds::default();
    let c = ConstraintSet::default();
    let s = SolverSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut weights: Vec<WeightVector> = builtin_scenarios().iter().map(|s| s.weights).collect();
    weights.extend((0..10).map(|_| random_weights(&mut rng)));
    let mut problems = Vec::new();
    let (mut worst_gap, mut worst_violation, mut worst_kkt) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for w in &weights {
        let r = multi_start_solve(w, &k, &b, &c, &s).unwrap();
        let g = grid_search(w, &k, &b, &c, 20).unwrap();
        let gap = r.objective.total - (g.best_objective + g.resolution_slack);
        worst_gap = worst_gap.max(r.objective.total - g.best_objective);
        let [g1, g2] = c.evaluate(&r.x_star);
        worst_violation = worst_violation.max(-g1).max(-g2);
        if r.status == Status::Converged {
            worst_kkt = worst_kkt.max(r.kkt_residual);
        } else {
            problems.push(format!("{:?} did not converge", w.to_array()));
        }
        if gap > 0.0 || !b.contains(&r.x_star, 0.0) || g1 < -1e-9 || g2 < -1e-9 || r.kkt_residual > 1e-8 {
            problems.push(format!("{:?}: J*={} grid={}", w.to_array(), r.objective.total, g.best_objective));
        }
    }
    Outcome::new(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "13 problems: max J(x*) - grid min = {worst_gap:.2e} (negative: solver below grid); \
                 worst constraint violation {worst_violation:.1e}; max KKT {worst_kkt:.1e}"
            )
        } else {
            problems.join("; ")
        },
    )
}

thread_local! {
    static CALIBRATED: RefCell<Option<ObjectiveCoefficients>> = const { RefCell::new(None) };
}

fn case1_calibration() -> Outcome {
    let cfg = RunConfig::parse_with_seed_env("[scenario]\nname = \"general\"\n", "acceptance", None).unwrap();
    let mut sink = Vec::new();
    let cal = cli::calibrate_with(&cfg, &mut sink).unwrap();
    CALIBRATED.with(|c| *c.borrow_mut() = Some(cal.coefficients));
    let expected = cfg.scenario().expected_x_star.unwrap();
    let dev = cal.x_star.max_rel_diff(&expected);
    Outcome::new(
        dev <= 0.15,
        format!(
            "x* = {} vs reference {expected}: max relative deviation {dev:.4} (<= 0.15); \
             matches frozen golden: {}",
            cal.x_star,
            cal.coefficients == calibrated_coefficients()
        ),
    )
}

fn case23_transfer() -> Outcome {
    let k = CALIBRATED.with(|c| *c.borrow()).unwrap_or_else(calibrated_coefficients);
    let s = SolverSettings::default();
    let x: Vec<[f64; 5]> =
        builtin_scenarios().iter().map(|sc| sc.solve(&k, &s).unwrap().x_star.to_array()).collect();
    let (general, low, survey) = (x[0], x[1], x[2]);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, name) in [(2, "u"), (3, "e"), (4, "eta")] {
        pass &= low[i] < general[i] && general[i] < survey[i];
        parts.push(format!("{name}: {:.3} < {:.3} < {:.3}", low[i], general[i], survey[i]));
    }
    Outcome::new(pass, format!("low-cost < general < survey: {}", parts.join(", ")))
}

fn weight_scaling() -> Outcome {
    let k = calibrated_coefficients();
    let s = SolverSettings::default();
    let mut worst = 0.0f64;
    for sc in builtin_scenarios() {
        let a = sc.solve(&k, &s).unwrap();
        let scaled = Scenario { weights: sc.weights.scaled(10.0), ..sc.clone() };
        let b = scaled.solve(&k, &s).unwrap();
        worst = worst.max(a.x_star.max_abs_diff(&b.x_star));
    }
    Outcome::new(worst <= 1e-6, format!("max ||x*(w) - x*(10w)||_inf = {worst:.2e} over 3 scenarios"))
}

fn monte_carlo() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let sigma = rng.random_range(0.01..0.5);
        let d = sigma * rng.random_range(0.0..3.0);
        let cfg = SimulationConfig {
            samples: 100_000,
            seed: 1000 + k,
            ..SimulationConfig::with_clearance(d, sigma)
        };
        let r = simulate_docking(&cfg).unwrap();
        debug_assert_eq!(r.closed_form, rayleigh_cdf(d, sigma));
        worst = worst.max(r.deviation_in_halfwidths());
    }
    let k = ObjectiveCoefficients { d_lin: [0.0, 0.0, 1.0], ..Default::default() };
    let rho = reliability_correlation(&tolerance_grid(11), &k, 0.05, 100_000, 9).unwrap();
    Outcome::new(
        worst < 3.0 && rho > 0.97,
        format!("worst deviation {worst:.2} CI halfwidths over 50 pairs; eta-grid correlation {rho:.5}"),
    )
}

fn sweep_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, "[scenario]\nname = \"general\"\n\n[solver]\nseed = 11\n").unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_dockopt"))
            .args(["sweep", "--axis", "q:1:2:5", "--axis", "s:0.5:1.5:3", "--output"])
            .arg(&csv)
            .arg(&config)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        (status.code(), std::fs::read(csv).unwrap_or_default())
    };
    let (code_a, a) = run("a.csv");
    let (code_b, b) = run("b.csv");
    let rows = a.iter().filter(|&&c| c == b'\n').count().saturating_sub(1);
    Outcome::new(
        code_a == Some(0) && code_b == Some(0) && !a.is_empty() && a == b,
        format!("two processes, {rows} rows, {} bytes each, identical: {}", a.len(), a == b),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("entry-area formula", entry_area_formula, Duration::from_secs(1)),
        ("derived-variable goldens", derived_goldens, Duration::from_secs(1)),
        ("gradient check", gradient_check, Duration::from_secs(1)),
        ("solver vs grid oracle", solver_vs_grid, Duration::from_secs(120)),
        ("case 1 calibrated reproduction", case1_calibration, Duration::from_secs(300)),
        ("cases 2-3 directional transfer", case23_transfer, Duration::from_secs(60)),
        ("weight-scaling invariance", weight_scaling, Duration::from_secs(60)),
        ("Monte Carlo oracle", monte_carlo, Duration::from_secs(30)),
        ("sweep determinism", sweep_determinism, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} {}. {name} [{:.2} s of {} s]: {}{}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            outcome.detail,
            if in_time { "" } else { " (over time limit)" }
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
