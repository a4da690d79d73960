#![allow(dead_code)]

use exosynth::config::reference_geometry;
use exosynth::geometry::{Anthropometry, Geometry};
use exosynth::grasp::{simulate_grasp, there_and_back, FingerImpedance, GraspTrace, ObjectShape, Phalanx, SimSettings};

pub const STROKE_STEP: f64 = 0.02;

/// Disc 3 mm clear of the extended proximal phalanx, 30 mm out from the MCP.
pub fn disc(radius: f64) -> ObjectShape {
    ObjectShape::disc((-30.0, radius + 3.0), radius).unwrap()
}

/// Stroke travel that takes each disc a little past intermediate contact.
pub fn travel(radius: f64) -> f64 {
    if radius < 30.0 {
        1.7
    } else {
        0.7
    }
}

pub fn run_disc(radius: f64) -> (Geometry, Vec<f64>, GraspTrace) {
    let geom = reference_geometry();
    let start = geom.seed.unwrap().l_x;
    let steps = (travel(radius) / STROKE_STEP).round() as usize;
    let schedule = there_and_back(start, start - STROKE_STEP * steps as f64, steps);
    let trace = simulate_grasp(
        &geom,
        &Anthropometry::MEDIUM,
        &FingerImpedance::default(),
        Some(&disc(radius)),
        &schedule,
        &SimSettings::default(),
    )
    .unwrap();
    (geom, schedule, trace)
}

pub fn forces_non_negative(trace: &GraspTrace) -> bool {
    trace.samples.iter().all(|s| s.f_proximal >= 0.0 && s.f_intermediate >= 0.0)
}

pub fn proximal_first(trace: &GraspTrace) -> bool {
    match (trace.first_contact(Phalanx::Proximal, 0.0), trace.first_contact(Phalanx::Intermediate, 0.0)) {
        (Some(p), Some(i)) => p < i,
        _ => false,
    }
}

/// While only the proximal phalanx is loaded above 0.5 N, each step moves the
/// MCP by at most a tenth of the PIP motion.
pub fn mcp_freezes(trace: &GraspTrace) -> bool {
    let turn = trace.samples.len() / 2;
    let s = &trace.samples[..=turn];
    s.windows(2)
        .filter(|w| w[0].f_proximal > 0.5 && w[1].f_intermediate == 0.0 && w[0].f_intermediate == 0.0)
        .all(|w| (w[1].theta_mcp - w[0].theta_mcp).abs() <= 0.1 * (w[1].theta_pip - w[0].theta_pip).abs())
}

/// Backing the stroke out unloads both phalanges again.
pub fn forces_release(trace: &GraspTrace) -> bool {
    let turn = trace.samples.len() / 2;
    let peak = trace.samples[turn].f_proximal + trace.samples[turn].f_intermediate;
    let last = trace.samples.last().unwrap();
    peak > 0.0 && last.f_proximal == 0.0 && last.f_intermediate == 0.0
}
