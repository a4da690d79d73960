//! Quasi-static grasp simulation.
//!
//! The finger joints are torsional springs and the phalanges are line
//! segments that touch a rigid convex object through penalty contacts. For a
//! fixed actuator stroke the closure equations leave a one-dimensional curve
//! of configurations; the equilibrium is the local energy minimum reached by
//! walking downhill along it from the previous step.

use crate::diffkin::{blocks_from, reduced_jacobian};
use crate::error::{Error, Result};
use crate::geometry::{Anthropometry, FingerPose, Geometry, MechanismState};
use nalgebra::{SMatrix, SVector};

use crate::loops::{extended, var, Closure};
use crate::report::{fmt_f64, Record};
use crate::solver::SolverSettings;
use crate::statics::{grasp_stability, joint_torques, ActuatorWrench, Stability};

type P2 = (f64, f64);

fn sub(a: P2, b: P2) -> P2 {
    (a.0 - b.0, a.1 - b.1)
}

fn dot(a: P2, b: P2) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn cross(a: P2, b: P2) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let c = (a.0 + t * ab.0, a.1 + t * ab.1);
    let d = sub(p, c);
    d.0.hypot(d.1)
}

fn segments_intersect(a: P2, b: P2, c: P2, d: P2) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// A rigid convex object in the finger plane (MCP at the origin, mm).
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectShape {
    Disc { center: P2, radius: f64 },
    /// Vertices in counter-clockwise order.
    Polygon { vertices: Vec<P2> },
}

impl ObjectShape {
    pub fn disc(center: P2, radius: f64) -> Result<ObjectShape> {
        if !(radius > 0.0 && radius.is_finite() && center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::InvalidObject(format!("disc radius must be positive, got {radius}")));
        }
        Ok(ObjectShape::Disc { center, radius })
    }

    /// Convex polygon; clockwise input is reversed.
    pub fn polygon(mut vertices: Vec<P2>) -> Result<ObjectShape> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidObject("a polygon needs at least three vertices".into()));
        }
        let area2: f64 = (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum();
        if area2.abs() < 1e-9 {
            return Err(Error::InvalidObject("polygon has zero area".into()));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if cross(sub(b, a), sub(c, b)) < -1e-12 {
                return Err(Error::InvalidObject("polygon is not convex".into()));
            }
        }
        Ok(ObjectShape::Polygon { vertices })
    }

    /// Signed distance between the object and segment `a–b`: positive when
    /// separated, minus the penetration depth when overlapping.
    pub fn signed_gap(&self, a: P2, b: P2) -> f64 {
        match self {
            ObjectShape::Disc { center, radius } => point_segment_distance(*center, a, b) - radius,
            ObjectShape::Polygon { vertices } => polygon_gap(vertices, a, b),
        }
    }
}

fn polygon_gap(v: &[P2], a: P2, b: P2) -> f64 {
    let n = v.len();
    let inside = |p: P2| (0..n).all(|i| cross(sub(v[(i + 1) % n], v[i]), sub(p, v[i])) >= 0.0);
    let overlapping = inside(a) || inside(b) || (0..n).any(|i| segments_intersect(a, b, v[i], v[(i + 1) % n]));
    if !overlapping {
        let mut d = f64::INFINITY;
        for i in 0..n {
            let (c, e) = (v[i], v[(i + 1) % n]);
            d = d
                .min(point_segment_distance(a, c, e))
                .min(point_segment_distance(b, c, e))
                .min(point_segment_distance(c, a, b));
        }
        return d;
    }
    // Separating-axis penetration depth over the polygon normals and the segment normal.
    let mut axes: Vec<P2> = (0..n)
        .map(|i| {
            let e = sub(v[(i + 1) % n], v[i]);
            (e.1, -e.0)
        })
        .collect();
    let s = sub(b, a);
    axes.push((-s.1, s.0));
    let mut depth = f64::INFINITY;
    for ax in axes {
        let len = ax.0.hypot(ax.1);
        if len == 0.0 {
            continue;
        }
        let u = (ax.0 / len, ax.1 / len);
        let (pmin, pmax) = v
            .iter()
            .map(|p| dot(*p, u))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        let (sa, sb) = (dot(a, u), dot(b, u));
        let (smin, smax) = (sa.min(sb), sa.max(sb));
        depth = depth.min((pmax - smin).min(smax - pmin));
    }
    -depth
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phalanx {
    Proximal,
    Intermediate,
}

/// Contacts closer than this count as touching (mm).
pub const CONTACT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactGap {
    pub phalanx: Phalanx,
    pub gap: f64,
}

impl ContactGap {
    pub fn in_contact(&self) -> bool {
        self.gap <= CONTACT_TOL
    }
}

/// The proximal and intermediate phalanges as segments from the MCP joint.
pub fn phalanx_segments(pose: &FingerPose, anthro: &Anthropometry) -> [(P2, P2); 2] {
    let pip = (anthro.l_ml * pose.q_o1.cos(), anthro.l_ml * pose.q_o1.sin());
    let tip = (pip.0 + anthro.l_p2 * pose.q_o2.cos(), pip.1 + anthro.l_p2 * pose.q_o2.sin());
    [((0.0, 0.0), pip), (pip, tip)]
}

/// Signed gaps of both phalanges to the object.
pub fn detect_contact(pose: &FingerPose, anthro: &Anthropometry, object: &ObjectShape) -> [ContactGap; 2] {
    let [p, i] = phalanx_segments(pose, anthro);
    [
        ContactGap {
            phalanx: Phalanx::Proximal,
            gap: object.signed_gap(p.0, p.1),
        },
        ContactGap {
            phalanx: Phalanx::Intermediate,
            gap: object.signed_gap(i.0, i.1),
        },
    ]
}

/// Passive joint stiffness of the finger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerImpedance {
    /// MCP and PIP stiffness (N·mm/rad).
    pub k1: f64,
    pub k2: f64,
    /// Anatomical rest angles `(θ_MCP, θ_PIP)` (rad).
    pub rest: (f64, f64),
}

impl Default for FingerImpedance {
    fn default() -> Self {
        FingerImpedance {
            k1: 50.0,
            k2: 50.0,
            rest: (0.0, 0.0),
        }
    }
}

impl FingerImpedance {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::InvalidObject(format!(
                "joint stiffness must be positive, got {} and {}",
                self.k1, self.k2
            )));
        }
        Ok(())
    }
}

/// Contact model and minimiser settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    /// Penalty stiffness per contact (N/mm).
    pub k_contact: f64,
    /// Initial walking step, as finger-angle arc length (rad).
    pub bracket_step: f64,
    /// Largest walking step (rad).
    pub max_step: f64,
    /// Width of the final bracket (rad).
    pub tol: f64,
    pub solver: SolverSettings,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            k_contact: 100.0,
            bracket_step: 1e-3,
            max_step: 0.02,
            tol: 1e-10,
            solver: SolverSettings::default().analytic(),
        }
    }
}

/// Accepted configuration at one stroke value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub state: MechanismState,
    pub pose: FingerPose,
    /// Normal forces on the proximal and intermediate phalanges (N).
    pub forces: (f64, f64),
    /// Spring plus penalty energy (N·mm).
    pub energy: f64,
    /// Penetration depths (mm).
    pub penetration: (f64, f64),
}

type Vars = [f64; 10];

struct Problem<'a> {
    closure: Closure,
    geom: &'a Geometry,
    anthro: &'a Anthropometry,
    impedance: &'a FingerImpedance,
    object: Option<&'a ObjectShape>,
    sim: &'a SimSettings,
}

/// A point on the closure curve with the curve's finger-space direction there.
#[derive(Clone, Copy)]
struct CurvePoint {
    vars: Vars,
    dir: (f64, f64),
    eq: Equilibrium,
}

impl Problem<'_> {
    fn equilibrium(&self, vars: &Vars) -> Equilibrium {
        let mut s = [0.0; 8];
        s.copy_from_slice(&vars[..8]);
        let state = MechanismState::from_array(s);
        let pose = FingerPose {
            q_o1: vars[var::Q_O1],
            q_o2: vars[var::Q_O2],
        };
        let (t1, t2) = pose.to_anatomical(self.geom.q_o1_ref);
        let imp = self.impedance;
        let mut energy = 0.5 * imp.k1 * (t1 - imp.rest.0).powi(2) + 0.5 * imp.k2 * (t2 - imp.rest.1).powi(2);
        let mut pen = (0.0, 0.0);
        if let Some(obj) = self.object {
            let [p, i] = detect_contact(&pose, self.anthro, obj);
            pen = ((-p.gap).max(0.0), (-i.gap).max(0.0));
            energy += 0.5 * self.sim.k_contact * (pen.0 * pen.0 + pen.1 * pen.1);
        }
        Equilibrium {
            state,
            pose,
            forces: (self.sim.k_contact * pen.0, self.sim.k_contact * pen.1),
            energy,
            penetration: pen,
        }
    }

    /// Null direction of the closure Jacobian with `l_x` held, scaled so its
    /// finger part has unit length.
    fn tangent(&self, vars: &Vars) -> Option<SVector<f64, 9>> {
        let j = self.closure.jacobian(vars);
        let mut m = SMatrix::<f64, 9, 9>::zeros();
        m.fixed_view_mut::<8, 9>(0, 0).copy_from(&j.fixed_view::<8, 9>(0, 1));
        let svd = m.svd(false, true);
        let v_t = svd.v_t?;
        let k = svd.singular_values.imin();
        let t: SVector<f64, 9> = v_t.row(k).transpose();
        let f = t[7].hypot(t[8]);
        (f > 1e-9).then(|| t / f)
    }

    /// Newton solve for the curve point whose finger angles sit at signed
    /// distance `s` from `anchor` along `dir`, with `l_x` held.
    fn corrector(&self, anchor: &Vars, dir: (f64, f64), predictor: &Vars, s: f64) -> Option<Vars> {
        let settings = &self.sim.solver;
        let mut v = *predictor;
        let constraint = |v: &Vars| dir.0 * (v[var::Q_O1] - anchor[var::Q_O1]) + dir.1 * (v[var::Q_O2] - anchor[var::Q_O2]) - s;
        let residual = |v: &Vars| {
            let r = self.closure.residuals(v);
            let mut out = SVector::<f64, 9>::zeros();
            out.fixed_rows_mut::<8>(0).copy_from(&r);
            out[8] = constraint(v);
            out
        };
        let mut r = residual(&v);
        for _ in 0..settings.max_iter {
            if r.amax() < settings.tol_residual {
                let jump = v.iter().zip(predictor).skip(1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                return (jump < MAX_CORRECTION).then_some(v);
            }
            let j = self.closure.jacobian(&v);
            let mut m = SMatrix::<f64, 9, 9>::zeros();
            m.fixed_view_mut::<8, 9>(0, 0).copy_from(&j.fixed_view::<8, 9>(0, 1));
            m[(8, 7)] = dir.0;
            m[(8, 8)] = dir.1;
            let step = m.lu().solve(&(-r))?;
            let norm = r.norm();
            let mut lambda = 1.0;
            loop {
                let mut trial = v;
                for k in 0..9 {
                    trial[k + 1] += lambda * step[k];
                }
                let rt = residual(&trial);
                if rt.norm() < norm || lambda < 1e-6 {
                    v = trial;
                    r = rt;
                    break;
                }
                lambda *= 0.5;
            }
        }
        None
    }

    /// Point at finger-space distance `s` from `from` along its direction.
    fn advance(&self, from: &CurvePoint, s: f64) -> Option<CurvePoint> {
        let t = self.tangent(&from.vars)?;
        let sign = if t[7] * from.dir.0 + t[8] * from.dir.1 >= 0.0 { 1.0 } else { -1.0 };
        let mut predictor = from.vars;
        for k in 0..9 {
            predictor[k + 1] += sign * s * t[k];
        }
        let vars = self.corrector(&from.vars, from.dir, &predictor, s)?;
        self.point(&vars, from.dir)
    }

    /// Curve point at `vars`, with its direction oriented along `hint`.
    fn point(&self, vars: &Vars, hint: (f64, f64)) -> Option<CurvePoint> {
        let t = self.tangent(vars)?;
        let sign = if t[7] * hint.0 + t[8] * hint.1 >= 0.0 { 1.0 } else { -1.0 };
        Some(CurvePoint {
            vars: *vars,
            dir: (sign * t[7], sign * t[8]),
            eq: self.equilibrium(vars),
        })
    }

    /// Carry a point on the curve at `from[L_X]` over to stroke `l_x`.
    fn transfer(&self, from: &CurvePoint, l_x: f64, depth: usize) -> Option<CurvePoint> {
        let mut predictor = from.vars;
        predictor[var::L_X] = l_x;
        if let Some(vars) = self.corrector(&predictor, from.dir, &predictor, 0.0) {
            return self.point(&vars, from.dir);
        }
        if depth == 0 {
            return None;
        }
        let mid = 0.5 * (from.vars[var::L_X] + l_x);
        let half = self.transfer(from, mid, depth - 1)?;
        self.transfer(&half, l_x, depth - 1)
    }

    /// Local energy minimum along the curve, walking downhill from `start`.
    fn descend(&self, start: CurvePoint) -> Result<CurvePoint> {
        let sim = self.sim;
        let mut best = start;
        let lower = |p: &Option<CurvePoint>, than: f64| p.as_ref().is_some_and(|p| p.eq.energy < than);
        let fwd = self.advance(&best, sim.bracket_step);
        let back = self.advance(&best, -sim.bracket_step);
        let sign = if lower(&fwd, best.eq.energy) && !(lower(&back, fwd.as_ref().map_or(f64::INFINITY, |p| p.eq.energy))) {
            1.0
        } else if lower(&back, best.eq.energy) {
            -1.0
        } else {
            0.0
        };
        let mut step = sim.bracket_step;
        let mut arrival = step;
        if sign != 0.0 {
            let mut count = 0;
            loop {
                count += 1;
                if count > MAX_WALK {
                    return Err(Error::NoEquilibrium("energy keeps falling along the closure curve".into()));
                }
                match self.advance(&best, sign * step) {
                    Some(p) if p.eq.energy < best.eq.energy => {
                        best = p;
                        arrival = step;
                        step = (step * 2.0).min(sim.max_step);
                    }
                    _ if step > sim.bracket_step => step *= 0.25,
                    _ => break,
                }
            }
        }

        // Golden-section refinement in the local parameter around the best point.
        let anchor = best;
        let eval = |s: f64, best: &mut CurvePoint| -> f64 {
            match self.advance(&anchor, s) {
                Some(p) => {
                    let e = p.eq.energy;
                    if e < best.eq.energy {
                        *best = p;
                    }
                    e
                }
                None => f64::INFINITY,
            }
        };
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let width = step.max(arrival);
        let (mut lo, mut hi) = (-width, width);
        let mut x1 = hi - r * (hi - lo);
        let mut x2 = lo + r * (hi - lo);
        let mut f1 = eval(x1, &mut best);
        let mut f2 = eval(x2, &mut best);
        while hi - lo > sim.tol {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = eval(x1, &mut best);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = eval(x2, &mut best);
            }
        }
        Ok(best)
    }
}

const MAX_CORRECTION: f64 = 0.5;
const MAX_WALK: usize = 5000;
const TRANSFER_DEPTH: usize = 10;

/// Lowest-energy configuration on the closure curve at stroke `l_x`, found by
/// walking downhill from the warm start `warm` carried over to the new stroke.
pub fn equilibrium_step(
    l_x: f64,
    object: Option<&ObjectShape>,
    impedance: &FingerImpedance,
    geom: &Geometry,
    anthro: &Anthropometry,
    warm: &Equilibrium,
    sim: &SimSettings,
) -> Result<Equilibrium> {
    impedance.validate()?;
    sim.solver.check()?;
    let problem = Problem {
        closure: Closure::new(geom),
        geom,
        anthro,
        impedance,
        object,
        sim,
    };
    let vars = extended(&warm.state, &warm.pose);
    let here = problem
        .point(&vars, (1.0, 0.0))
        .ok_or_else(|| Error::NoEquilibrium("warm start is singular".into()))?;
    let start = problem
        .transfer(&here, l_x, TRANSFER_DEPTH)
        .ok_or_else(|| Error::NoEquilibrium(format!("no closure at l_x = {l_x:.4} mm near the previous pose")))?;
    Ok(problem.descend(start)?.eq)
}

/// Equilibrium at the geometry's seed (full extension) without contacts.
pub fn initial_equilibrium(geom: &Geometry, anthro: &Anthropometry, impedance: &FingerImpedance, object: Option<&ObjectShape>, sim: &SimSettings) -> Result<Equilibrium> {
    let seed = geom
        .seed
        .ok_or_else(|| Error::InvalidGeometry("simulation needs a seed state".into()))?;
    let pose = FingerPose {
        q_o1: geom.q_o1_ref,
        q_o2: geom.q_o1_ref,
    };
    let warm = Equilibrium {
        state: seed,
        pose,
        forces: (0.0, 0.0),
        energy: 0.0,
        penetration: (0.0, 0.0),
    };
    equilibrium_step(seed.l_x, object, impedance, geom, anthro, &warm, sim)
}

/// One row of a grasp trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub step: usize,
    pub l_x: f64,
    /// Anatomical angles (deg).
    pub theta_mcp: f64,
    pub theta_pip: f64,
    pub f_proximal: f64,
    pub f_intermediate: f64,
    pub energy: f64,
}

impl Record for TraceSample {
    fn header() -> &'static [&'static str] {
        &["step", "l_x", "theta_mcp", "theta_pip", "f_proximal", "f_intermediate", "energy"]
    }

    fn fields(&self) -> Vec<String> {
        let mut v = vec![self.step.to_string()];
        v.extend(
            [self.l_x, self.theta_mcp, self.theta_pip, self.f_proximal, self.f_intermediate, self.energy]
                .iter()
                .map(|x| fmt_f64(*x)),
        );
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspTrace {
    pub samples: Vec<TraceSample>,
    /// Torque-sign stability at the last pose under a unit actuator force;
    /// `None` for an empty trace or an indeterminate sign.
    pub final_stability: Option<Stability>,
}

impl GraspTrace {
    /// First step at which the phalanx force exceeds `threshold` (N).
    pub fn first_contact(&self, phalanx: Phalanx, threshold: f64) -> Option<usize> {
        self.samples.iter().position(|s| match phalanx {
            Phalanx::Proximal => s.f_proximal > threshold,
            Phalanx::Intermediate => s.f_intermediate > threshold,
        })
    }
}

/// Step the stroke schedule with warm starts from full extension.
pub fn simulate_grasp(
    geom: &Geometry,
    anthro: &Anthropometry,
    impedance: &FingerImpedance,
    object: Option<&ObjectShape>,
    schedule: &[f64],
    sim: &SimSettings,
) -> Result<GraspTrace> {
    impedance.validate()?;
    if schedule.is_empty() {
        return Ok(GraspTrace {
            samples: Vec::new(),
            final_stability: None,
        });
    }
    let mut current = initial_equilibrium(geom, anthro, impedance, object, sim).map_err(|e| Error::Simulation {
        step: 0,
        source: Box::new(e),
    })?;
    let mut samples = Vec::with_capacity(schedule.len());
    for (step, &l_x) in schedule.iter().enumerate() {
        current = equilibrium_step(l_x, object, impedance, geom, anthro, &current, sim).map_err(|e| Error::Simulation {
            step,
            source: Box::new(e),
        })?;
        let (m, p) = current.pose.to_anatomical_deg(geom.q_o1_ref);
        samples.push(TraceSample {
            step,
            l_x,
            theta_mcp: m,
            theta_pip: p,
            f_proximal: current.forces.0,
            f_intermediate: current.forces.1,
            energy: current.energy,
        });
    }
    let final_stability = reduced_jacobian(&blocks_from(&Closure::new(geom), &current.state, &current.pose))
        .and_then(|j| joint_torques(&j, &ActuatorWrench::new(1.0)))
        .and_then(|t| grasp_stability(&t))
        .ok();
    Ok(GraspTrace {
        samples,
        final_stability,
    })
}

/// Linear ramp from `from` to `to` and back, `steps` intervals each way.
pub fn there_and_back(from: f64, to: f64, steps: usize) -> Vec<f64> {
    let n = steps.max(1);
    let out: Vec<f64> = (0..=n).map(|i| from + (to - from) * i as f64 / n as f64).collect();
    let back: Vec<f64> = out.iter().rev().skip(1).copied().collect();
    out.into_iter().chain(back).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn extended() -> FingerPose {
        FingerPose {
            q_o1: std::f64::consts::PI,
            q_o2: std::f64::consts::PI,
        }
    }

    #[test]
    fn distant_disc_has_no_contact() {
        let disc = ObjectShape::disc((0.0, 100.0), 10.0).unwrap();
        let gaps = detect_contact(&extended(), &Anthropometry::MEDIUM, &disc);
        assert!(gaps.iter().all(|g| g.gap > 0.0 && !g.in_contact()));
    }

    #[test]
    fn tangent_disc_touches_proximal() {
        let disc = ObjectShape::disc((-25.0, 20.0), 20.0).unwrap();
        let [p, i] = detect_contact(&extended(), &Anthropometry::MEDIUM, &disc);
        assert!(p.gap.abs() <= 1e-6 && p.in_contact());
        assert!(!i.in_contact());
    }

    #[test]
    fn overlapping_disc_touches_both() {
        // Centre above the PIP joint, radius larger than the offset.
        let disc = ObjectShape::disc((-50.0, 5.0), 8.0).unwrap();
        let [p, i] = detect_contact(&extended(), &Anthropometry::MEDIUM, &disc);
        assert!((p.gap - (5.0 - 8.0)).abs() < 1e-12);
        assert!((i.gap - (5.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn polygon_gaps() {
        let square = ObjectShape::polygon(vec![(-30.0, 2.0), (-20.0, 2.0), (-20.0, 12.0), (-30.0, 12.0)]).unwrap();
        let [p, i] = detect_contact(&extended(), &Anthropometry::MEDIUM, &square);
        assert!((p.gap - 2.0).abs() < 1e-12);
        assert!(i.gap > 2.0);
        let sunk = ObjectShape::polygon(vec![(-30.0, -1.5), (-20.0, -1.5), (-20.0, 12.0), (-30.0, 12.0)]).unwrap();
        let [p, _] = detect_contact(&extended(), &Anthropometry::MEDIUM, &sunk);
        assert!((p.gap + 1.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_objects() {
        assert!(ObjectShape::disc((0.0, 0.0), 0.0).is_err());
        assert!(ObjectShape::polygon(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(ObjectShape::polygon(vec![(0.0, 0.0), (2.0, 0.0), (1.0, 0.2), (1.0, 2.0)]).is_err());
        assert!(ObjectShape::polygon(vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).is_ok());
    }

    #[test]
    fn ramp_goes_there_and_back() {
        assert_eq!(there_and_back(0.0, 2.0, 2), [0.0, 1.0, 2.0, 1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn disc_gap_matches_segment_distance(cx in -80.0..0.0f64, cy in -30.0..30.0f64, r in 1.0..30.0f64) {
            let disc = ObjectShape::disc((cx, cy), r).unwrap();
            let [p, _] = detect_contact(&extended(), &Anthropometry::MEDIUM, &disc);
            let dx = if cx < -50.0 { cx + 50.0 } else if cx > 0.0 { cx } else { 0.0 };
            let expected = dx.hypot(cy) - r;
            prop_assert!((p.gap - expected).abs() < 1e-9);
        }
    }
}
