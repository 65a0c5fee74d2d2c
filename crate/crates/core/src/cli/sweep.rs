//! Weight sweeps over one or two weight components.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::domain::WeightVector;
use crate::objective::ObjectiveValues;
use crate::solver::{multi_start_solve, Status};

use super::config::{CoefficientPreset, RunConfig};
use super::{write_file, CliError, ExitStatus};

pub const CSV_HEADER: &str = "p,q,r,s,A,l,u,e,eta,h,c,d,v,J,status";

/// One swept weight component: `name:start:end:steps`, e.g. `q:1:2:5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    /// 0..4 for p, q, r, s.
    pub component: usize,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.end
                } else {
                    self.start + (self.end - self.start) * k as f64 / last
                }
            })
            .collect()
    }

    pub fn name(&self) -> &'static str {
        ["p", "q", "r", "s"][self.component]
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let usage = |why: &str| {
            CliError::Usage(format!("invalid axis {text:?}: {why}; expected name:start:end:steps"))
        };
        let parts: Vec<&str> = text.split(':').collect();
        let [name, start, end, steps] = parts[..] else {
            return Err(usage("wrong number of fields"));
        };
        let component = ["p", "q", "r", "s"]
            .iter()
            .position(|c| *c == name.trim())
            .ok_or_else(|| usage("component must be one of p, q, r, s"))?;
        let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0);
        let start = num(start).ok_or_else(|| usage("start must be a finite number >= 0"))?;
        let end = num(end).ok_or_else(|| usage("end must be a finite number >= 0"))?;
        let steps: usize = steps
            .trim()
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| usage("steps must be an integer >= 1"))?;
        Ok(Axis { component, start, end, steps })
    }
}

/// One sweep grid point and its solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub weights: WeightVector,
    pub x_star: [f64; 5],
    pub objective: ObjectiveValues,
    pub status: Status,
}

/// `%.9g`: 9 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-4, 1e9)`.
pub fn format_g9(x: f64) -> String {
    const P: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (P - 1 - exp) as usize, x))
    }
}

/// Solves every grid point, in parallel, returning rows in grid order
/// with the first axis outermost.
pub fn sweep_rows(cfg: &RunConfig, axes: &[Axis]) -> Result<Vec<SweepRow>, CliError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Usage("a sweep takes one or two axes".into()));
    }
    if axes.len() == 2 && axes[0].component == axes[1].component {
        return Err(CliError::Usage(format!("both axes sweep {}", axes[0].name())));
    }
    let scenario = cfg.scenario();
    let coeff = cfg.coefficients(CoefficientPreset::Calibrated);
    let mut points: Vec<WeightVector> = Vec::new();
    let outer = axes[0].values();
    let inner = axes.get(1).map(|a| a.values());
    for &a in &outer {
        let mut w = scenario.weights.to_array();
        w[axes[0].component] = a;
        match (&inner, axes.get(1)) {
            (Some(values), Some(axis)) => {
                for &b in values {
                    w[axis.component] = b;
                    points.push(WeightVector::new(w[0], w[1], w[2], w[3]));
                }
            }
            _ => points.push(WeightVector::new(w[0], w[1], w[2], w[3])),
        }
    }
    for w in &points {
        w.validate()?;
    }
    points
        .par_iter()
        .map(|w| {
            let r = multi_start_solve(w, &coeff, &scenario.bounds, &scenario.constraints, &cfg.solver)?;
            Ok(SweepRow {
                weights: *w,
                x_star: r.x_star.to_array(),
                objective: r.objective,
                status: r.status,
            })
        })
        .collect()
}

/// Renders rows as CSV with LF line endings.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let o = &row.objective;
        let fields: Vec<String> = row
            .weights
            .to_array()
            .iter()
            .chain(row.x_star.iter())
            .chain([o.h, o.c, o.d, o.v, o.total].iter())
            .map(|v| format_g9(*v))
            .collect();
        out.push_str(&fields.join(","));
        out.push(',');
        out.push_str(row.status.as_str());
        out.push('\n');
    }
    out
}

/// Runs the sweep and writes the table to `output.csv` when configured,
/// otherwise to `out`. Exits with 2 when any grid point did not converge.
pub fn cmd_sweep(config_path: &Path, axes: &[Axis], out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    let cfg = RunConfig::load(config_path)?;
    sweep_with(&cfg, axes, out)
}

pub fn sweep_with(cfg: &RunConfig, axes: &[Axis], out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    let rows = sweep_rows(cfg, axes)?;
    let csv = sweep_csv(&rows);
    match &cfg.output.csv {
        Some(path) => {
            write_file(path, csv.as_bytes())?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(if rows.iter().all(|r| r.status == Status::Converged) {
        ExitStatus::Success
    } else {
        ExitStatus::NotConverged
    })
}
