//! Joint torques and their ratio over the workspace for a 40 N actuator force.

use exosynth::config::reference_geometry;
use exosynth::diffkin::{assemble_blocks, reduced_jacobian};
use exosynth::geometry::FingerPose;
use exosynth::optimizer::WorkspaceSweepSpec;
use exosynth::solver::{solve_grid, SolverSettings};
use exosynth::statics::{grasp_stability, joint_torques, torque_ratio, ActuatorWrench};

fn main() -> exosynth::Result<()> {
    let geom = reference_geometry();
    let sweep = WorkspaceSweepSpec::default();
    let (mcp, pip) = (sweep.mcp(), sweep.pip());
    let states = solve_grid(&geom, &mcp, &pip, &SolverSettings::default())?;
    let wrench = ActuatorWrench::new(40.0);

    let (mut max1, mut max2) = (0.0f64, 0.0f64);
    println!("  mcp   pip      tau1      tau2  ratio");
    for (k, s) in states.iter().enumerate() {
        let (m, p) = (mcp[k / pip.len()], pip[k % pip.len()]);
        let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, m, p);
        let t = joint_torques(&reduced_jacobian(&assemble_blocks(s, &pose, &geom))?, &wrench)?;
        max1 = max1.max(t.tau1.abs());
        max2 = max2.max(t.tau2.abs());
        if k % 7 == 0 {
            println!(
                "{m:5.0} {p:5.0} {:9.2} {:9.2} {:6.3}  {:?}",
                t.tau1,
                t.tau2,
                torque_ratio(&t)?,
                grasp_stability(&t)?
            );
        }
    }
    println!("max |tau1| = {max1:.1} N·mm, max |tau2| = {max2:.1} N·mm");
    Ok(())
}
