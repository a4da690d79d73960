//! Compare the analytic reduced Jacobian with a finite-difference estimate.

use exosynth::config::reference_geometry;
use exosynth::diffkin::{fd_jacobian_oracle, jacobian_at, max_entry_relative_error};
use exosynth::geometry::FingerPose;
use exosynth::solver::SolverSettings;

fn main() -> exosynth::Result<()> {
    let geom = reference_geometry();
    let settings = SolverSettings::default();
    for (mcp, pip) in [(10.0, 20.0), (40.0, 45.0), (70.0, 80.0)] {
        let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, mcp, pip);
        let (_, j) = jacobian_at(&pose, &geom, None, &settings)?;
        let fd = fd_jacobian_oracle(&pose, &geom, 1e-6, None, &settings)?;
        println!("pose ({mcp}, {pip})  cond {:.2}", j.condition);
        println!("  J_A      = {:.6?}", j.j_a.as_slice());
        println!("  joint    = {:.6?}", j.joint_space().as_slice());
        println!("  rel. err = {:.2e}", max_entry_relative_error(&j.j_a, &fd));
    }
    Ok(())
}
