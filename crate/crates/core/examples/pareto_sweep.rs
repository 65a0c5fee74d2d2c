//! Trade-off between cost and docking reliability as the cost weight grows,
//! written as CSV to stdout.

use dockopt::cli::{sweep_with, Axis, RunConfig};

fn main() -> Result<(), dockopt::cli::CliError> {
    let cfg = RunConfig::parse("[scenario]\nname = \"general\"\n", "inline")?;
    let axis: Axis = "q:0.5:3:11".parse()?;
    let status = sweep_with(&cfg, &[axis], &mut std::io::stdout().lock())?;
    eprintln!("sweep finished: {status:?}");
    Ok(())
}
