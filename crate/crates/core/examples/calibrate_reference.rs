//! Rebuild the reference geometry from its frame constants.
//!
//! The base pivot K and the actuator base offset K→N are searched in a small
//! window around the committed values. Each frame is assembled at full
//! extension, swept over the 9×10 workspace grid and scored by how far its
//! torque ratio stays inside `[1, 7.5]`. The stroke is then centred in its
//! 0–50 mm range as far as a non-negative actuator body length allows.
//!
//! ```text
//! cargo run --release --example calibrate_reference -- [out.cfg] [--window]
//! ```

use std::f64::consts::PI;
use std::path::Path;

use exosynth::calibration::{calibrate_stroke, extension_states};
use exosynth::config::{geometry_to_string, write_geometry};
use exosynth::geometry::Geometry;
use exosynth::optimizer::{prefilter_linear, prefilter_static, EvalContext, STROKE_MAX};
use exosynth::solver::solve_grid;

const LENGTHS: [f64; 11] = [20.0, 42.0, 10.0, 16.0, 32.0, 30.0, 37.0, 35.0, 72.0, 86.0, 36.0];
const K: (f64, f64) = (-1.0, 9.0);
const KN_LEN: f64 = 9.5;
const KN_DEG: f64 = 156.5;

struct Frame {
    geom: Geometry,
    margin: f64,
}

fn build(k: (f64, f64), kn_len: f64, kn_deg: f64, ctx: &EvalContext) -> Option<Frame> {
    let base = Geometry::new(
        LENGTHS,
        0.0,
        kn_len,
        kn_deg.to_radians(),
        k.0.hypot(k.1),
        k.1.atan2(k.0),
        ctx.anthro.l_ml,
        PI,
    );
    let mut best: Option<Frame> = None;
    for seed in extension_states(&base).ok()? {
        let mut g = base.clone();
        g.seed = Some(seed);
        // Sliders first; the stroke is placed afterwards.
        let wide = EvalContext {
            stroke_max: f64::INFINITY,
            ..ctx.clone()
        };
        g.l_act = seed.l_x - 1e6;
        g.seed = Some(exosynth::geometry::MechanismState { l_x: 1e6, ..seed });
        if !prefilter_linear(&g, &wide).map(|o| o.pass).unwrap_or(false) {
            continue;
        }
        let stat = match prefilter_static(&g, ctx) {
            Ok(o) if o.pass => o,
            _ => continue,
        };
        let e = stat.extrema;
        let margin = (e.min_ratio - 1.0).min((7.5 - e.max_ratio) / 7.5);
        if best.as_ref().is_none_or(|b| margin > b.margin) {
            best = Some(Frame { geom: g, margin });
        }
    }
    best
}

fn centre_stroke(g: &Geometry, ctx: &EvalContext) -> Geometry {
    let (mcp, pip) = (ctx.sweep.mcp(), ctx.sweep.pip());
    let states = solve_grid(g, &mcp, &pip, &ctx.settings).expect("frame was swept already");
    let lo = states.iter().map(|s| s.l_x).fold(f64::INFINITY, f64::min);
    let hi = states.iter().map(|s| s.l_x).fold(f64::NEG_INFINITY, f64::max);
    // Centre the stroke, but never make the actuator body shorter than zero.
    let floor = (0.5 * (STROKE_MAX - (hi - lo))).min(lo + g.l_act);
    calibrate_stroke(g, &mcp, &pip, floor, &ctx.settings).expect("frame was swept already")
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let window = args.iter().any(|a| a == "--window");
    let out = args.iter().find(|a| !a.starts_with("--"));
    let ctx = EvalContext::default();

    let mut best = build(K, KN_LEN, KN_DEG, &ctx).map(|f| (f, K, KN_LEN, KN_DEG));
    if window {
        for i in -4..=4 {
            for j in -4..=4 {
                for a in -2..=2 {
                    for b in -4..=4 {
                        let k = (K.0 + 0.25 * i as f64, K.1 + 0.25 * j as f64);
                        let (len, deg) = (KN_LEN + 0.25 * a as f64, KN_DEG + 0.5 * b as f64);
                        if let Some(f) = build(k, len, deg, &ctx) {
                            if best.as_ref().is_none_or(|b| f.margin > b.0.margin) {
                                best = Some((f, k, len, deg));
                            }
                        }
                    }
                }
            }
        }
    }
    let Some((frame, k, len, deg)) = best else {
        eprintln!("no frame in the window closes over the workspace with a feasible torque ratio");
        std::process::exit(1);
    };
    eprintln!(
        "K = ({}, {}) mm, K->N = {len} mm at {deg} deg, ratio margin {:.4}",
        k.0, k.1, frame.margin
    );
    let geom = centre_stroke(&frame.geom, &ctx);
    match out {
        Some(path) => write_geometry(Path::new(path), &geom).unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(2);
        }),
        None => print!("{}", geometry_to_string(&geom)),
    }
}
