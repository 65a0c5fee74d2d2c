//! Physical parameters to the normalized design variables and back.

use std::f64::consts::PI;

use dockopt::domain::{
    control_fidelity, docking_tolerance, entry_area_fraction, realize_design, DesignVector, DockGeometry,
    KinematicProfile,
};

fn main() -> dockopt::Result<()> {
    // A dock open over the front hemisphere with 0.1 m clearance.
    let geometry = DockGeometry { clearance: 0.1, ..DockGeometry::spans(0.0, 2.0 * PI, 0.0, PI / 2.0) };
    let profile = KinematicProfile {
        dof_count: 4,
        control_error_sigma: 0.05,
        authority_weight: 1.0,
        accuracy_weight: 1.0,
    };
    let area = 0.5;

    let u = control_fidelity(&profile, area)?;
    let e = entry_area_fraction(&geometry)?;
    let eta = docking_tolerance(geometry.clearance, profile.control_error_sigma)?;
    println!(
        "{} DOF, sigma_c {} m, A {area} m²  ->  u = {u:.6}",
        profile.dof_count, profile.control_error_sigma
    );
    println!("entry spans {:?}  ->  e = {e:.6}", (geometry.theta2, geometry.phi2));
    println!("clearance {} m  ->  eta = {eta:.6}", geometry.clearance);

    // Inverse map: one physical realization of an optimizer output.
    let x = DesignVector::new(area, 2.1, u, e, eta);
    let real = realize_design(&x, 0.05, 1.0, 1.0)?;
    println!("\nrealize {x}");
    println!("  profile  {:?}", real.profile);
    println!("  geometry {:?}", real.geometry);
    Ok(())
}
