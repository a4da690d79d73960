//! Close the finger on a disc, then back the stroke out again.
//!
//! ```text
//! cargo run --example grasp_sim -- [radius_mm]
//! ```

use exosynth::config::reference_geometry;
use exosynth::geometry::Anthropometry;
use exosynth::grasp::{simulate_grasp, there_and_back, FingerImpedance, ObjectShape, Phalanx, SimSettings};

fn main() -> exosynth::Result<()> {
    let radius: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20.0);
    let geom = reference_geometry();
    let disc = ObjectShape::disc((-30.0, radius + 3.0), radius)?;
    let start = geom.seed.expect("reference geometry has a seed").l_x;
    let travel = if radius < 30.0 { 1.7 } else { 0.7 };
    let schedule = there_and_back(start, start - travel, 40);

    let trace = simulate_grasp(
        &geom,
        &Anthropometry::MEDIUM,
        &FingerImpedance::default(),
        Some(&disc),
        &schedule,
        &SimSettings::default(),
    )?;
    for s in trace.samples.iter().step_by(4) {
        println!(
            "{:3}  l_x {:7.3}  mcp {:6.2}  pip {:6.2}  F {:8.2} {:8.2}",
            s.step, s.l_x, s.theta_mcp, s.theta_pip, s.f_proximal, s.f_intermediate
        );
    }
    println!(
        "proximal contact at step {:?}, intermediate at {:?}, final {:?}",
        trace.first_contact(Phalanx::Proximal, 0.0),
        trace.first_contact(Phalanx::Intermediate, 0.0),
        trace.final_stability
    );
    Ok(())
}
