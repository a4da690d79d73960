//! Rank the link lengths by how strongly they move the phalanx sliders.

use exosynth::config::reference_geometry;
use exosynth::geometry::FingerPose;
use exosynth::sensitivity::{rank_parameters, DEFAULT_POSE_DEG};
use exosynth::solver::SolverSettings;

fn main() -> exosynth::Result<()> {
    let geom = reference_geometry();
    let (mcp, pip) = DEFAULT_POSE_DEG;
    let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, mcp, pip);
    let report = rank_parameters(&geom, &pose, 0.1, &SolverSettings::default())?;

    println!("{:<6} {:>9} {:>9} {:>9}", "param", "SI_c1", "SI_c2", "SI_g");
    for r in &report.records {
        let mark = if r.retained() { "keep" } else { "" };
        println!("{:<6} {:9.4} {:9.4} {:9.4} {mark}", r.parameter, r.si_c1, r.si_c2, r.si_g);
    }
    for (name, why) in &report.failures {
        println!("{name:<6} not evaluated: {why}");
    }
    Ok(())
}
