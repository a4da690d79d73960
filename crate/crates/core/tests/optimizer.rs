#![allow(clippy::excessive_precision)]

use exosynth::config::reference_geometry;
use exosynth::diffkin::{assemble_blocks, reduced_jacobian};
use exosynth::geometry::FingerPose;
use exosynth::optimizer::{
    compose, cost, evaluate_candidate, optimize, prefilter_linear, prefilter_static, EvalContext, ParamRange, SearchSpace,
    DESIGN_LINKS, STROKE_MAX,
};
use exosynth::solver::solve_grid;
use exosynth::statics::{joint_torques, ActuatorWrench};
use exosynth::Error;
use proptest::prelude::*;

/// Mean torque norm of the reference design at 1 N over the 9 × 10 grid,
/// computed at 40 digits by an independent implementation of the loops.
const REFERENCE_P: f64 = 6.1874698370374389;

const REFERENCE_LENGTHS: [f64; 6] = [37.0, 16.0, 10.0, 32.0, 30.0, 42.0];

fn small_space() -> SearchSpace {
    SearchSpace {
        ranges: [
            ParamRange::new(36.0, 38.0),
            ParamRange::new(16.0, 17.0),
            ParamRange::new(10.0, 11.0),
            ParamRange::new(31.0, 33.0),
            ParamRange::new(29.0, 31.0),
            ParamRange::new(41.0, 42.0),
        ],
        step: 1.0,
    }
}

#[test]
fn default_space_cardinality() {
    let space = SearchSpace::default();
    assert_eq!(space.counts(), [11, 5, 11, 11, 16, 11]);
    assert_eq!(space.cardinality(), 1_171_280);
    assert_eq!(space.lengths_at(0), [30.0, 16.0, 10.0, 30.0, 20.0, 36.0]);
    assert_eq!(space.lengths_at(space.cardinality() - 1), [40.0, 20.0, 20.0, 40.0, 35.0, 46.0]);
}

#[test]
fn reference_design_is_feasible_with_known_cost() {
    let base = reference_geometry();
    let ctx = EvalContext::default();
    let space = SearchSpace::single(REFERENCE_LENGTHS);
    let r = evaluate_candidate(&space, 0, &base, &ctx).unwrap();
    assert!(r.phase1 && r.phase2 == Some(true), "{:?}", r.failure);
    let p = r.p.unwrap();
    assert!((p - REFERENCE_P).abs() < 1e-6 * REFERENCE_P, "p = {p}");
    assert!((cost(&base, &ctx).unwrap() - p).abs() < 1e-9);
}

#[test]
fn filters_agree_with_the_candidate_report() {
    let base = reference_geometry();
    let ctx = EvalContext::default();
    let space = small_space();
    for i in 0..space.cardinality() {
        let r = evaluate_candidate(&space, i, &base, &ctx).unwrap();
        let mut cand = compose(&base, &r.lengths);
        cand.seed = base.seed;
        let lin = prefilter_linear(&cand, &ctx).unwrap();
        assert_eq!(lin.pass, r.phase1, "candidate {i}");
        if r.phase1 {
            let st = prefilter_static(&cand, &ctx).unwrap();
            assert_eq!(Some(st.pass), r.phase2, "candidate {i}");
        }
    }
}

#[test]
fn small_space_ranking_invariants() {
    let base = reference_geometry();
    let ctx = EvalContext::default();
    let space = small_space();
    let opt = optimize(&space, &base, &ctx, 2).unwrap();
    assert_eq!(opt.total, 216);
    assert!(opt.phase2_passed <= opt.phase1_passed && opt.phase1_passed <= opt.total);
    assert_eq!(opt.ranked.len(), opt.phase2_passed);
    for w in opt.ranked.windows(2) {
        let (a, b) = (w[0].p.unwrap(), w[1].p.unwrap());
        assert!(a > b || (a == b && w[0].index < w[1].index));
    }
    for r in &opt.ranked {
        let e = &r.extrema;
        assert!(e.min_ratio >= 1.0 && e.max_ratio <= 7.5, "{r:?}");
        assert!(e.min_lx >= 0.0 && e.max_lx <= STROKE_MAX);
        assert!(e.min_c1 >= 0.0 && e.max_c1 <= ctx.anthro.c1_max);
        assert!(e.min_c2 >= 0.0 && e.max_c2 <= ctx.anthro.c2_max);
        assert!(r.failure.is_none());
    }
    assert!(opt.ranked.iter().any(|r| r.lengths == REFERENCE_LENGTHS));
}

#[test]
fn best_candidate_rechecks_independently() {
    let base = reference_geometry();
    let ctx = EvalContext::default();
    let opt = optimize(&small_space(), &base, &ctx, 1).unwrap();
    let best = opt.best();
    let mut cand = compose(&base, &best.lengths);
    cand.seed = Some(exosynth::optimizer::candidate_seed(&cand, &base.seed.unwrap(), &ctx.settings).unwrap());
    let (mcp, pip) = (ctx.sweep.mcp(), ctx.sweep.pip());
    let states = solve_grid(&cand, &mcp, &pip, &ctx.settings).unwrap();
    let wrench = ActuatorWrench::new(1.0);
    let mut total = 0.0;
    for ((m, p), s) in ctx.sweep.poses().into_iter().zip(&states) {
        let pose = FingerPose::from_anatomical_deg(cand.q_o1_ref, m, p);
        let j = reduced_jacobian(&assemble_blocks(s, &pose, &cand)).unwrap();
        let t = joint_torques(&j, &wrench).unwrap();
        assert!(t.tau1 * t.tau2 > 0.0);
        total += t.norm();
    }
    let p = total / states.len() as f64;
    assert!((p - best.p.unwrap()).abs() < 1e-6 * p);
}

#[test]
fn empty_feasible_set_is_reported() {
    let base = reference_geometry();
    let space = SearchSpace::single([30.0, 20.0, 20.0, 30.0, 20.0, 36.0]);
    let err = optimize(&space, &base, &EvalContext::default(), 1).unwrap_err();
    assert!(matches!(err, Error::NoFeasibleCandidate { total: 1 }));
}

#[test]
fn invalid_space_is_rejected() {
    let base = reference_geometry();
    let mut space = small_space();
    space.ranges[2] = ParamRange::new(12.0, 11.0);
    assert!(optimize(&space, &base, &EvalContext::default(), 1).is_err());
    space = small_space();
    space.step = 0.0;
    assert!(optimize(&space, &base, &EvalContext::default(), 1).is_err());
}

proptest! {
    #[test]
    fn candidate_lengths_stay_on_the_grid(i in 0usize..1_171_280) {
        let space = SearchSpace::default();
        let l = space.lengths_at(i);
        for ((v, r), link) in l.iter().zip(&space.ranges).zip(DESIGN_LINKS) {
            prop_assert!(*v >= r.lo && *v <= r.hi, "{link} = {v}");
            prop_assert_eq!(v.fract(), 0.0);
        }
        if i + 1 < space.cardinality() {
            prop_assert_ne!(l, space.lengths_at(i + 1));
        }
    }
}
