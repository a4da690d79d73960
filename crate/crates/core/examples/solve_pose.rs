//! Solve the closure equations across the workspace.
//!
//! ```text
//! cargo run --example solve_pose -- [mcp_deg pip_deg]
//! ```

use exosynth::config::reference_geometry;
use exosynth::geometry::{FingerPose, MechanismState};
use exosynth::loops::loop_residuals;
use exosynth::optimizer::WorkspaceSweepSpec;
use exosynth::solver::{solve_grid, solve_pose, SolverSettings};

fn main() -> exosynth::Result<()> {
    let geom = reference_geometry();
    let settings = SolverSettings::default();
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();

    if let [mcp, pip] = args[..] {
        let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, mcp, pip);
        let state = solve_pose(&pose, &geom, None, &settings)?;
        for (name, v) in MechanismState::NAMES.iter().zip(state.to_array()) {
            println!("{name:>4} = {v:.6}");
        }
        println!("residual = {:.3e} mm", loop_residuals(&state, &pose, &geom).amax());
        return Ok(());
    }

    let sweep = WorkspaceSweepSpec::default();
    let (mcp, pip) = (sweep.mcp(), sweep.pip());
    let states = solve_grid(&geom, &mcp, &pip, &settings)?;
    println!("  mcp   pip     l_x     c_1     c_2");
    for (k, s) in states.iter().enumerate() {
        let (m, p) = (mcp[k / pip.len()], pip[k % pip.len()]);
        if p == 0.0 || p == 90.0 {
            println!("{m:5.0} {p:5.0} {:7.3} {:7.3} {:7.3}", s.l_x, s.c1, s.c2);
        }
    }
    Ok(())
}
