//! Exhaustive grid search over the six design lengths.
//!
//! Each candidate is swept over an MCP×PIP pose grid. The linear filter
//! rejects candidates whose stroke or sliders leave their ranges, the static
//! filter rejects candidates whose torque ratio leaves `[1, 7.5]` or whose
//! torques disagree in sign, and the survivors are ranked by the mean torque
//! norm `p` under a unit actuator force.

use std::fmt;

use rayon::prelude::*;

use crate::calibration::extension_states_near;
use crate::diffkin::{blocks_from, reduced_jacobian};
use crate::error::{Error, Result};
use crate::geometry::{Anthropometry, FingerPose, Geometry, Link, MechanismState};
use crate::loops::Closure;
use crate::report::{fmt_f64, Record};
use crate::solver::{check_limits, solve_grid_with, SolverSettings};
use crate::statics::{grasp_stability, joint_torques, ratio_feasible, ActuatorWrench, JointTorques, Stability};

/// The six searched lengths, in enumeration and report order.
pub const DESIGN_LINKS: [Link; 6] = [Link::EJ, Link::CI, Link::CD, Link::ED, Link::EF, Link::BC];

/// Lengths that stay at their reference values during the search.
pub const FROZEN_LINKS: [(Link, f64); 5] = [
    (Link::KH, 72.0),
    (Link::KB, 35.0),
    (Link::GH, 86.0),
    (Link::AB, 20.0),
    (Link::GF, 36.0),
];

/// Maximum actuator stroke (mm).
pub const STROKE_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        ParamRange { lo, hi }
    }

    pub const fn point(v: f64) -> Self {
        ParamRange { lo: v, hi: v }
    }

    fn count(&self, step: f64) -> usize {
        ((self.hi - self.lo) / step + 1e-9).floor() as usize + 1
    }
}

/// Closed per-length ranges stepped uniformly, in [`DESIGN_LINKS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub ranges: [ParamRange; 6],
    pub step: f64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            ranges: [
                ParamRange::new(30.0, 40.0),
                ParamRange::new(16.0, 20.0),
                ParamRange::new(10.0, 20.0),
                ParamRange::new(30.0, 40.0),
                ParamRange::new(20.0, 35.0),
                ParamRange::new(36.0, 46.0),
            ],
            step: 1.0,
        }
    }
}

impl SearchSpace {
    /// A space containing exactly one candidate.
    pub fn single(lengths: [f64; 6]) -> Self {
        SearchSpace {
            ranges: lengths.map(ParamRange::point),
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidGeometry(format!("search step must be positive, got {}", self.step)));
        }
        for (link, r) in DESIGN_LINKS.iter().zip(&self.ranges) {
            if !(r.lo > 0.0 && r.hi >= r.lo && r.hi.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "range for {link} is empty or non-positive: {}..{}",
                    r.lo, r.hi
                )));
            }
        }
        Ok(())
    }

    pub fn counts(&self) -> [usize; 6] {
        self.ranges.map(|r| r.count(self.step))
    }

    pub fn cardinality(&self) -> usize {
        self.counts().iter().product()
    }

    /// Lengths of the candidate at a lexicographic index (last length varies fastest).
    pub fn lengths_at(&self, mut index: usize) -> [f64; 6] {
        let counts = self.counts();
        let mut out = [0.0; 6];
        for k in (0..6).rev() {
            let i = index % counts[k];
            index /= counts[k];
            out[k] = self.ranges[k].lo + i as f64 * self.step;
        }
        out
    }
}

/// Apply design lengths to a base geometry.
pub fn compose(base: &Geometry, lengths: &[f64; 6]) -> Geometry {
    let mut g = base.clone();
    for (link, v) in DESIGN_LINKS.iter().zip(lengths) {
        g.set_link(*link, *v);
    }
    g
}

/// Deterministic lexicographic enumeration of all candidates.
pub fn enumerate_grid<'a>(space: &'a SearchSpace, base: &'a Geometry) -> impl Iterator<Item = Geometry> + 'a {
    (0..space.cardinality()).map(move |i| compose(base, &space.lengths_at(i)))
}

/// Pose grid for the workspace sweep, in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceSweepSpec {
    pub mcp_max: f64,
    pub pip_max: f64,
    pub step: f64,
}

impl Default for WorkspaceSweepSpec {
    fn default() -> Self {
        WorkspaceSweepSpec {
            mcp_max: 80.0,
            pip_max: 90.0,
            step: 10.0,
        }
    }
}

fn axis(max: f64, step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut i = 0;
    loop {
        let x = i as f64 * step;
        if x >= max - 1e-9 {
            break;
        }
        v.push(x);
        i += 1;
    }
    v.push(max);
    v
}

impl WorkspaceSweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.mcp_max >= 0.0 && self.pip_max >= 0.0) {
            return Err(Error::InvalidPath(format!("invalid sweep spec {self:?}")));
        }
        Ok(())
    }

    /// MCP angles from 0 to `mcp_max`, endpoint always included.
    pub fn mcp(&self) -> Vec<f64> {
        axis(self.mcp_max, self.step)
    }

    pub fn pip(&self) -> Vec<f64> {
        axis(self.pip_max, self.step)
    }

    /// `(mcp, pip)` pairs in sweep order.
    pub fn poses(&self) -> Vec<(f64, f64)> {
        let pip = self.pip();
        self.mcp()
            .into_iter()
            .flat_map(|m| pip.iter().map(move |&p| (m, p)))
            .collect()
    }
}

/// Everything the filters need besides the candidate itself.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pub sweep: WorkspaceSweepSpec,
    pub anthro: Anthropometry,
    pub stroke_max: f64,
    pub f_ac: f64,
    pub settings: SolverSettings,
}

impl Default for EvalContext {
    fn default() -> Self {
        EvalContext {
            sweep: WorkspaceSweepSpec::default(),
            anthro: Anthropometry::default(),
            stroke_max: STROKE_MAX,
            f_ac: 1.0,
            settings: SolverSettings::default().analytic(),
        }
    }
}

/// Ranges of the per-pose quantities over the poses that were evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min_lx: f64,
    pub max_lx: f64,
    pub min_c1: f64,
    pub max_c1: f64,
    pub min_c2: f64,
    pub max_c2: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest `|τ₁|`, `|τ₂|` (N·mm at the context's force).
    pub max_tau1: f64,
    pub max_tau2: f64,
    /// Smallest per-pose torque norm at 1 N.
    pub min_norm: f64,
}

impl Default for Extrema {
    fn default() -> Self {
        Extrema {
            min_lx: f64::INFINITY,
            max_lx: f64::NEG_INFINITY,
            min_c1: f64::INFINITY,
            max_c1: f64::NEG_INFINITY,
            min_c2: f64::INFINITY,
            max_c2: f64::NEG_INFINITY,
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
            max_tau1: 0.0,
            max_tau2: 0.0,
            min_norm: f64::INFINITY,
        }
    }
}

impl Extrema {
    fn add_state(&mut self, s: &MechanismState) {
        self.min_lx = self.min_lx.min(s.l_x);
        self.max_lx = self.max_lx.max(s.l_x);
        self.min_c1 = self.min_c1.min(s.c1);
        self.max_c1 = self.max_c1.max(s.c1);
        self.min_c2 = self.min_c2.min(s.c2);
        self.max_c2 = self.max_c2.max(s.c2);
    }

    fn add_torques(&mut self, t: &JointTorques, ratio: f64, norm_unit: f64) {
        self.min_ratio = self.min_ratio.min(ratio);
        self.max_ratio = self.max_ratio.max(ratio);
        self.max_tau1 = self.max_tau1.max(t.tau1.abs());
        self.max_tau2 = self.max_tau2.max(t.tau2.abs());
        self.min_norm = self.min_norm.min(norm_unit);
    }
}

/// Why a candidate was eliminated.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    NoSeed(String),
    NoClosure { pose: (f64, f64), message: String },
    Limit { what: &'static str, pose: (f64, f64), value: f64 },
    Singular { pose: (f64, f64) },
    Unstable { pose: (f64, f64), tau1: f64, tau2: f64 },
    Ratio { pose: (f64, f64), ratio: f64 },
}

impl Failure {
    pub fn is_linear(&self) -> bool {
        matches!(self, Failure::NoSeed(_) | Failure::NoClosure { .. } | Failure::Limit { .. })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |pose: &(f64, f64)| format!("({},{})", pose.0, pose.1);
        match self {
            Failure::NoSeed(m) => write!(f, "no assembly at extension: {m}"),
            Failure::NoClosure { pose, message } => write!(f, "no closure at pose {}: {message}", p(pose)),
            Failure::Limit { what, pose, value } => write!(f, "{what} at pose {} ({value:.3} mm)", p(pose)),
            Failure::Singular { pose } => write!(f, "singular Jacobian at pose {}", p(pose)),
            Failure::Unstable { pose, tau1, tau2 } => {
                write!(f, "opposing torques at pose {} ({tau1:.4}, {tau2:.4})", p(pose))
            }
            Failure::Ratio { pose, ratio } => write!(f, "ratio {ratio:.4} outside [1, 7.5] at pose {}", p(pose)),
        }
    }
}

/// Outcome of evaluating one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub index: usize,
    pub lengths: [f64; 6],
    pub phase1: bool,
    /// `None` when the linear filter already failed.
    pub phase2: Option<bool>,
    pub extrema: Extrema,
    /// Mean torque norm at 1 N; present iff both filters passed.
    pub p: Option<f64>,
    pub failure: Option<Failure>,
}

impl CandidateReport {
    pub fn feasible(&self) -> bool {
        self.p.is_some()
    }
}

/// Extension-pose seed for a candidate: the closed-form assembly on the
/// reference branch whose angles are closest to `reference`.
pub fn candidate_seed(cand: &Geometry, reference: &MechanismState, settings: &SolverSettings) -> Result<MechanismState> {
    extension_states_near(cand, reference, settings.max_branch_jump)?
        .into_iter()
        .map(|s| (s.max_angle_jump(reference), s))
        .filter(|(jump, _)| *jump < settings.max_branch_jump)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, s)| s)
        .ok_or_else(|| Error::InvalidGeometry("no extension assembly near the reference branch".into()))
}

struct Sweep {
    poses: Vec<(f64, f64)>,
    states: Vec<MechanismState>,
    failure: Option<Failure>,
}

fn linear_limit(s: &MechanismState, ctx: &EvalContext) -> Option<(&'static str, f64)> {
    let r = check_limits(s, &ctx.anthro, ctx.stroke_max);
    if r.all_ok() {
        return None;
    }
    Some(if !r.lx_ok {
        if s.l_x < 0.0 {
            ("l_x below 0", s.l_x)
        } else {
            ("l_x_max exceeded", s.l_x)
        }
    } else if !r.c1_ok {
        if s.c1 < 0.0 {
            ("c1 below 0", s.c1)
        } else {
            ("c1_max exceeded", s.c1)
        }
    } else if s.c2 < 0.0 {
        ("c2 below 0", s.c2)
    } else {
        ("c2_max exceeded", s.c2)
    })
}

/// Solve the whole grid. With `check_limits` the walk stops at the first
/// stroke or slider violation.
fn sweep(cand: &Geometry, base_seed: &MechanismState, ctx: &EvalContext, check_limits: bool, extrema: &mut Extrema) -> Sweep {
    let poses = ctx.sweep.poses();
    let mut out = Sweep {
        poses,
        states: Vec::new(),
        failure: None,
    };
    let seed = match candidate_seed(cand, base_seed, &ctx.settings) {
        Ok(s) => s,
        Err(e) => {
            out.failure = Some(Failure::NoSeed(e.to_string()));
            return out;
        }
    };
    let mut g = cand.clone();
    g.seed = Some(seed);
    let closure = Closure::new(&g);
    let (mcp, pip) = (ctx.sweep.mcp(), ctx.sweep.pip());
    let mut states = Vec::with_capacity(out.poses.len());
    let mut failure = None;
    let walked = solve_grid_with(&closure, &g, &mcp, &pip, &ctx.settings, |i, s| {
        extrema.add_state(s);
        states.push(*s);
        if check_limits {
            if let Some((what, value)) = linear_limit(s, ctx) {
                failure = Some(Failure::Limit {
                    what,
                    pose: out.poses[i],
                    value,
                });
                return false;
            }
        }
        true
    });
    if let Err(Error::Sweep { index, source }) = walked {
        failure = Some(Failure::NoClosure {
            pose: out.poses[index],
            message: source.to_string(),
        });
    } else if let Err(e) = walked {
        failure = Some(Failure::NoSeed(e.to_string()));
    }
    out.states = states;
    out.failure = failure;
    out
}

/// Torque check over solved states. Returns the summed unit-force norms.
fn statics_pass(cand: &Geometry, sw: &Sweep, ctx: &EvalContext, extrema: &mut Extrema) -> std::result::Result<f64, Failure> {
    let closure = Closure::new(cand);
    let wrench = ActuatorWrench::new(ctx.f_ac);
    let mut total = 0.0;
    for (pose_deg, s) in sw.poses.iter().zip(&sw.states) {
        let pose = FingerPose::from_anatomical_deg(cand.q_o1_ref, pose_deg.0, pose_deg.1);
        let j = reduced_jacobian(&blocks_from(&closure, s, &pose)).map_err(|_| Failure::Singular { pose: *pose_deg })?;
        let t = joint_torques(&j, &wrench).map_err(|_| Failure::Singular { pose: *pose_deg })?;
        match grasp_stability(&t) {
            Ok(Stability::Stable) => {}
            _ => {
                return Err(Failure::Unstable {
                    pose: *pose_deg,
                    tau1: t.tau1,
                    tau2: t.tau2,
                })
            }
        }
        let ratio = t.tau1 / t.tau2;
        let norm_unit = t.norm() / ctx.f_ac.abs();
        extrema.add_torques(&t, ratio, norm_unit);
        if !ratio_feasible(ratio) {
            return Err(Failure::Ratio { pose: *pose_deg, ratio });
        }
        total += norm_unit;
    }
    Ok(total)
}

fn base_seed(cand: &Geometry) -> Result<MechanismState> {
    cand.seed
        .ok_or_else(|| Error::InvalidGeometry("candidate geometry carries no reference seed".into()))
}

/// Pass/fail of one filter with the reason for failure.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub pass: bool,
    pub failure: Option<Failure>,
    pub extrema: Extrema,
}

/// Stroke and slider ranges at every sweep pose. A pose that cannot be solved fails.
///
/// `cand.seed` must hold a seed of the reference branch; the candidate's own
/// extension assembly is found from it.
pub fn prefilter_linear(cand: &Geometry, ctx: &EvalContext) -> Result<FilterOutcome> {
    let mut extrema = Extrema::default();
    let sw = sweep(cand, &base_seed(cand)?, ctx, true, &mut extrema);
    Ok(FilterOutcome {
        pass: sw.failure.is_none(),
        failure: sw.failure,
        extrema,
    })
}

/// Torque ratio in `[1, 7.5]` with equal torque signs at every sweep pose.
pub fn prefilter_static(cand: &Geometry, ctx: &EvalContext) -> Result<FilterOutcome> {
    let mut extrema = Extrema::default();
    let sw = sweep(cand, &base_seed(cand)?, ctx, false, &mut extrema);
    if let Some(f) = sw.failure {
        return Ok(FilterOutcome {
            pass: false,
            failure: Some(f),
            extrema,
        });
    }
    let result = statics_pass(cand, &sw, ctx, &mut extrema);
    Ok(FilterOutcome {
        pass: result.is_ok(),
        failure: result.err(),
        extrema,
    })
}

/// Mean over the sweep of `√(τ₁² + τ₂²)` at the context's actuator force.
pub fn cost(cand: &Geometry, ctx: &EvalContext) -> Result<f64> {
    let mut extrema = Extrema::default();
    let sw = sweep(cand, &base_seed(cand)?, ctx, false, &mut extrema);
    if let Some(f) = sw.failure {
        return Err(Error::InvalidGeometry(f.to_string()));
    }
    let closure = Closure::new(cand);
    let wrench = ActuatorWrench::new(ctx.f_ac);
    let mut total = 0.0;
    for (pose_deg, s) in sw.poses.iter().zip(&sw.states) {
        let pose = FingerPose::from_anatomical_deg(cand.q_o1_ref, pose_deg.0, pose_deg.1);
        let j = reduced_jacobian(&blocks_from(&closure, s, &pose))?;
        total += joint_torques(&j, &wrench)?.norm();
    }
    Ok(total / sw.states.len() as f64)
}

/// Run both filters and the cost for one candidate of `space`.
pub fn evaluate_candidate(space: &SearchSpace, index: usize, base: &Geometry, ctx: &EvalContext) -> Result<CandidateReport> {
    let lengths = space.lengths_at(index);
    let cand = compose(base, &lengths);
    let mut extrema = Extrema::default();
    let mut report = CandidateReport {
        index,
        lengths,
        phase1: false,
        phase2: None,
        extrema,
        p: None,
        failure: None,
    };
    if let Err(e) = cand.validate() {
        report.failure = Some(Failure::NoSeed(e.to_string()));
        return Ok(report);
    }
    let sw = sweep(&cand, &base_seed(base)?, ctx, true, &mut extrema);
    if let Some(f) = sw.failure {
        report.extrema = extrema;
        report.failure = Some(f);
        return Ok(report);
    }
    report.phase1 = true;
    match statics_pass(&cand, &sw, ctx, &mut extrema) {
        Ok(total) => {
            report.phase2 = Some(true);
            report.p = Some(total / sw.states.len() as f64);
        }
        Err(f) => {
            report.phase2 = Some(false);
            report.failure = Some(f);
        }
    }
    report.extrema = extrema;
    Ok(report)
}

/// Summary of a full search.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimization {
    pub total: usize,
    pub phase1_passed: usize,
    pub phase2_passed: usize,
    /// Feasible candidates ranked by `p` descending, ties by candidate index.
    pub ranked: Vec<CandidateReport>,
}

impl Optimization {
    pub fn best(&self) -> &CandidateReport {
        &self.ranked[0]
    }

    /// Share of all candidates rejected by the linear filter.
    pub fn phase1_elimination(&self) -> f64 {
        1.0 - self.phase1_passed as f64 / self.total as f64
    }

    /// Share of linear-filter survivors rejected by the static filter.
    pub fn phase2_elimination(&self) -> f64 {
        if self.phase1_passed == 0 {
            return 0.0;
        }
        1.0 - self.phase2_passed as f64 / self.phase1_passed as f64
    }

    /// Feasible `p` values in ascending order.
    pub fn sorted_p(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self.ranked.iter().map(|r| (r.index, r.p.unwrap_or(0.0))).collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        v
    }

    /// Largest over smallest feasible `p`.
    pub fn p_spread(&self) -> f64 {
        let s = self.sorted_p();
        match (s.first(), s.last()) {
            (Some(lo), Some(hi)) if lo.1 > 0.0 => hi.1 / lo.1,
            _ => f64::NAN,
        }
    }
}

/// Worker count from `EXOSYNTH_THREADS`; `0` or unset means automatic.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("EXOSYNTH_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse::<usize>().map_err(|_| Error::Config {
            path: "EXOSYNTH_THREADS".into(),
            line: 0,
            message: format!("expected a non-negative integer, got `{v}`"),
        }),
    }
}

/// Evaluate every candidate of `space` and rank the feasible ones.
///
/// `threads = 0` uses all available cores. Results do not depend on the
/// thread count.
pub fn optimize(space: &SearchSpace, base: &Geometry, ctx: &EvalContext, threads: usize) -> Result<Optimization> {
    space.validate()?;
    ctx.sweep.validate()?;
    ctx.settings.check()?;
    base_seed(base)?;
    let total = space.cardinality();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidGeometry(format!("thread pool: {e}")))?;
    let reports: Vec<Result<CandidateReport>> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|i| evaluate_candidate(space, i, base, ctx))
            .filter(|r| r.as_ref().map_or(true, |r| r.phase1))
            .collect()
    });
    let mut phase1_passed = 0;
    let mut ranked = Vec::new();
    for r in reports {
        let r = r?;
        phase1_passed += 1;
        if r.feasible() {
            ranked.push(r);
        }
    }
    if ranked.is_empty() {
        return Err(Error::NoFeasibleCandidate { total });
    }
    let phase2_passed = ranked.len();
    ranked.sort_by(|a, b| b.p.unwrap().total_cmp(&a.p.unwrap()).then(a.index.cmp(&b.index)));
    Ok(Optimization {
        total,
        phase1_passed,
        phase2_passed,
        ranked,
    })
}

/// Row of the ranked feasible-candidate CSV.
pub struct RankedRow<'a>(pub &'a CandidateReport);

impl Record for RankedRow<'_> {
    fn header() -> &'static [&'static str] {
        &[
            "candidate_id",
            "L_EJ",
            "L_CI",
            "L_CD",
            "L_ED",
            "L_EF",
            "L_BC",
            "p",
            "min_ratio",
            "max_ratio",
            "max_lx",
            "max_c1",
            "max_c2",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let r = self.0;
        let e = &r.extrema;
        let mut v = vec![r.index.to_string()];
        v.extend(r.lengths.iter().map(|x| fmt_f64(*x)));
        v.extend(
            [r.p.unwrap_or(f64::NAN), e.min_ratio, e.max_ratio, e.max_lx, e.max_c1, e.max_c2]
                .iter()
                .map(|x| fmt_f64(*x)),
        );
        v
    }
}

/// Row of the sorted-`p` curve.
pub struct CurveRow {
    pub rank: usize,
    pub candidate_id: usize,
    pub p: f64,
}

impl Record for CurveRow {
    fn header() -> &'static [&'static str] {
        &["rank", "candidate_id", "p"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.rank.to_string(), self.candidate_id.to_string(), fmt_f64(self.p)]
    }
}

pub fn curve_rows(opt: &Optimization) -> Vec<CurveRow> {
    opt.sorted_p()
        .into_iter()
        .enumerate()
        .map(|(rank, (candidate_id, p))| CurveRow { rank, candidate_id, p })
        .collect()
}

/// `key,value` row of the elimination summary.
pub struct SummaryRow {
    pub key: &'static str,
    pub value: String,
}

impl Record for SummaryRow {
    fn header() -> &'static [&'static str] {
        &["key", "value"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.key.to_string(), self.value.clone()]
    }
}

pub fn summary_rows(opt: &Optimization) -> Vec<SummaryRow> {
    let best = opt.best();
    let row = |key, value: String| SummaryRow { key, value };
    let sorted = opt.sorted_p();
    vec![
        row("total", opt.total.to_string()),
        row("phase1_passed", opt.phase1_passed.to_string()),
        row("phase1_eliminated_fraction", fmt_f64(opt.phase1_elimination())),
        row("phase2_passed", opt.phase2_passed.to_string()),
        row("phase2_eliminated_fraction", fmt_f64(opt.phase2_elimination())),
        row("best_candidate_id", best.index.to_string()),
        row("best_p", fmt_f64(best.p.unwrap_or(f64::NAN))),
        row("min_p", fmt_f64(sorted.first().map_or(f64::NAN, |x| x.1))),
        row("p_spread", fmt_f64(opt.p_spread())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_space_cardinality() {
        let s = SearchSpace::default();
        assert_eq!(s.counts(), [11, 5, 11, 11, 16, 11]);
        assert_eq!(s.cardinality(), 1_171_280);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let s = SearchSpace::default();
        assert_eq!(s.lengths_at(0), [30.0, 16.0, 10.0, 30.0, 20.0, 36.0]);
        assert_eq!(s.lengths_at(1), [30.0, 16.0, 10.0, 30.0, 20.0, 37.0]);
        assert_eq!(s.lengths_at(11), [30.0, 16.0, 10.0, 30.0, 21.0, 36.0]);
        assert_eq!(s.lengths_at(s.cardinality() - 1), [40.0, 20.0, 20.0, 40.0, 35.0, 46.0]);
        let mut prev = s.lengths_at(0);
        for i in 1..2000 {
            let cur = s.lengths_at(i);
            assert!(cur.partial_cmp(&prev) == Some(std::cmp::Ordering::Greater));
            prev = cur;
        }
    }

    #[test]
    fn single_point_space() {
        let s = SearchSpace::single([37.0, 16.0, 10.0, 32.0, 30.0, 42.0]);
        assert_eq!(s.cardinality(), 1);
        assert_eq!(s.lengths_at(0), [37.0, 16.0, 10.0, 32.0, 30.0, 42.0]);
    }

    #[test]
    fn sweep_axes_include_endpoints() {
        let w = WorkspaceSweepSpec::default();
        assert_eq!(w.mcp().len(), 9);
        assert_eq!(w.pip().len(), 10);
        assert_eq!(w.poses().len(), 90);
        assert_eq!(w.poses()[89], (80.0, 90.0));
        let odd = WorkspaceSweepSpec { step: 25.0, ..w };
        assert_eq!(odd.mcp(), [0.0, 25.0, 50.0, 75.0, 80.0]);
        assert_eq!(odd.pip(), [0.0, 25.0, 50.0, 75.0, 90.0]);
    }

    #[test]
    fn failure_reasons_name_the_pose() {
        let f = Failure::Limit {
            what: "c2_max exceeded",
            pose: (80.0, 90.0),
            value: 41.2,
        };
        assert!(f.to_string().starts_with("c2_max exceeded at pose (80,90)"));
        assert!(f.is_linear());
        let f = Failure::Ratio {
            pose: (0.0, 0.0),
            ratio: 0.8,
        };
        assert!(f.to_string().contains("0.8000"));
        assert!(!f.is_linear());
    }
}
