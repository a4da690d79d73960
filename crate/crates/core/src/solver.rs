//! Newton solver for the closure equations and warm-started sweeps.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::geometry::{Anthropometry, FingerPose, Geometry, MechanismState};
use crate::loops::{extended, var, Closure};

/// How the solver obtains the loop Jacobian at each iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianSource {
    /// Central differences with step `fd_step`.
    Central,
    /// Closed-form derivatives of the loop terms.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Convergence threshold on the max-norm of the residual (mm).
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Initial step fraction; halved until the residual norm decreases.
    pub damping: f64,
    pub fd_step: f64,
    pub jacobian: JacobianSource,
    /// Largest accepted angle change relative to the initial guess (rad).
    pub max_branch_jump: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol_residual: 1e-10,
            max_iter: 50,
            damping: 1.0,
            fd_step: 1e-7,
            jacobian: JacobianSource::Central,
            max_branch_jump: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl SolverSettings {
    /// Same settings with analytic Jacobians, used by the search hot path.
    pub fn analytic(self) -> Self {
        SolverSettings {
            jacobian: JacobianSource::Analytic,
            ..self
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidGeometry(
                "solver settings need tol_residual > 0 and max_iter >= 1".into(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidGeometry("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Outcome of one Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct Convergence {
    pub iterations: usize,
    pub residual: f64,
}

/// Unknowns when the finger pose is given.
pub const POSE_GIVEN: [usize; 8] = [
    var::L_X,
    var::C1,
    var::C2,
    var::Q_B,
    var::Q_D,
    var::Q_G,
    var::Q_K,
    var::Q_N,
];

/// Unknowns when the measured coordinates `(l_x, q_B)` are held.
pub const MEASURED_GIVEN: [usize; 8] = [
    var::C1,
    var::C2,
    var::Q_D,
    var::Q_G,
    var::Q_K,
    var::Q_N,
    var::Q_O1,
    var::Q_O2,
];

const ANGLE_VARS: [usize; 7] = [
    var::Q_B,
    var::Q_D,
    var::Q_G,
    var::Q_K,
    var::Q_N,
    var::Q_O1,
    var::Q_O2,
];

/// Damped Newton iteration on the eight closure residuals, updating the
/// `free` entries of `vars` in place.
pub fn newton(
    closure: &Closure,
    vars: &mut [f64; 10],
    free: &[usize; 8],
    settings: &SolverSettings,
) -> Result<Convergence> {
    settings.check()?;
    let start = *vars;
    let mut r = closure.residuals(vars);
    let mut iterations = 0;
    loop {
        let norm = r.amax();
        if !norm.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                residual: norm,
            });
        }
        if norm < settings.tol_residual {
            break;
        }
        if iterations == settings.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: norm,
            });
        }
        let j = free_jacobian(closure, vars, free, settings);
        let lu = j.lu();
        let u = lu.u();
        let diag = u.diagonal().abs();
        if diag.min() <= 1e-14 * diag.max().max(1.0) {
            return Err(Error::SingularIteration { iteration: iterations });
        }
        let step = match lu.solve(&(-r)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => return Err(Error::SingularIteration { iteration: iterations }),
        };

        let r_norm = r.norm();
        let mut lambda = settings.damping;
        loop {
            let mut trial = *vars;
            for (k, &idx) in free.iter().enumerate() {
                trial[idx] += lambda * step[k];
            }
            let rt = closure.residuals(&trial);
            if rt.norm() < r_norm || lambda < 1e-6 {
                *vars = trial;
                r = rt;
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
    }

    let jump = ANGLE_VARS
        .iter()
        .map(|&i| crate::geometry::wrap_angle(vars[i] - start[i]).abs())
        .fold(0.0, f64::max);
    if jump > settings.max_branch_jump {
        return Err(Error::BranchEscape {
            jump_deg: jump.to_degrees(),
        });
    }
    Ok(Convergence {
        iterations,
        residual: r.amax(),
    })
}

fn free_jacobian(
    closure: &Closure,
    vars: &[f64; 10],
    free: &[usize; 8],
    settings: &SolverSettings,
) -> SMatrix<f64, 8, 8> {
    let mut j = SMatrix::<f64, 8, 8>::zeros();
    match settings.jacobian {
        JacobianSource::Analytic => {
            let full = closure.jacobian(vars);
            for (k, &idx) in free.iter().enumerate() {
                j.set_column(k, &full.column(idx));
            }
        }
        JacobianSource::Central => {
            let h = settings.fd_step;
            for (k, &idx) in free.iter().enumerate() {
                let mut vp = *vars;
                let mut vm = *vars;
                vp[idx] += h;
                vm[idx] -= h;
                let col: SVector<f64, 8> =
                    (closure.residuals(&vp) - closure.residuals(&vm)) / (2.0 * h);
                j.set_column(k, &col);
            }
        }
    }
    j
}

/// Solve the closure equations for the mechanism state at a given finger pose.
///
/// Without a guess the geometry's extension-pose seed is used.
pub fn solve_pose(
    pose: &FingerPose,
    geom: &Geometry,
    guess: Option<&MechanismState>,
    settings: &SolverSettings,
) -> Result<MechanismState> {
    solve_pose_detailed(pose, geom, guess, settings).map(|(s, _)| s)
}

/// [`solve_pose`] that also reports the iteration count and final residual.
pub fn solve_pose_detailed(
    pose: &FingerPose,
    geom: &Geometry,
    guess: Option<&MechanismState>,
    settings: &SolverSettings,
) -> Result<(MechanismState, Convergence)> {
    let start = match guess.or(geom.seed.as_ref()) {
        Some(s) => *s,
        None => {
            return Err(Error::InvalidGeometry(
                "no initial guess and the geometry has no seed state".into(),
            ))
        }
    };
    let closure = Closure::new(geom);
    let mut vars = extended(&start, pose);
    let conv = newton(&closure, &mut vars, &POSE_GIVEN, settings)?;
    let mut s = [0.0; 8];
    s.copy_from_slice(&vars[..8]);
    Ok((MechanismState::from_array(s), conv))
}

/// Solve for the finger pose and passive coordinates with the measured
/// coordinates `(l_x, q_B)` held at the values in `guess`.
pub fn solve_measured(
    l_x: f64,
    q_b: f64,
    geom: &Geometry,
    guess: (&MechanismState, &FingerPose),
    settings: &SolverSettings,
) -> Result<(MechanismState, FingerPose)> {
    let closure = Closure::new(geom);
    solve_measured_with(&closure, l_x, q_b, guess, settings)
}

pub(crate) fn solve_measured_with(
    closure: &Closure,
    l_x: f64,
    q_b: f64,
    guess: (&MechanismState, &FingerPose),
    settings: &SolverSettings,
) -> Result<(MechanismState, FingerPose)> {
    let mut vars = extended(guess.0, guess.1);
    vars[var::L_X] = l_x;
    vars[var::Q_B] = q_b;
    newton(closure, &mut vars, &MEASURED_GIVEN, settings)?;
    let mut s = [0.0; 8];
    s.copy_from_slice(&vars[..8]);
    Ok((
        MechanismState::from_array(s),
        FingerPose {
            q_o1: vars[var::Q_O1],
            q_o2: vars[var::Q_O2],
        },
    ))
}

/// Largest per-joint step allowed between consecutive sweep poses.
pub const MAX_SWEEP_STEP_DEG: f64 = 5.0;

/// Solve `pose` by walking from full extension in steps of at most
/// [`MAX_SWEEP_STEP_DEG`], starting from the geometry's seed.
pub fn solve_from_extension(geom: &Geometry, pose: &FingerPose, settings: &SolverSettings) -> Result<MechanismState> {
    let (mcp, pip) = pose.to_anatomical_deg(geom.q_o1_ref);
    let n = ((mcp.abs().max(pip.abs()) / MAX_SWEEP_STEP_DEG).ceil() as usize).max(1);
    let path: Vec<FingerPose> = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            FingerPose::from_anatomical_deg(geom.q_o1_ref, t * mcp, t * pip)
        })
        .collect();
    let states = sweep_workspace_from(&path, geom, None, settings)?;
    Ok(*states.last().expect("path is non-empty"))
}

/// Solve a path of poses, warm-starting each solve from the previous state.
pub fn sweep_workspace(
    path: &[FingerPose],
    geom: &Geometry,
    settings: &SolverSettings,
) -> Result<Vec<MechanismState>> {
    sweep_workspace_from(path, geom, None, settings)
}

/// [`sweep_workspace`] with an explicit guess for the first pose.
pub fn sweep_workspace_from(
    path: &[FingerPose],
    geom: &Geometry,
    initial: Option<&MechanismState>,
    settings: &SolverSettings,
) -> Result<Vec<MechanismState>> {
    if path.is_empty() {
        return Err(Error::InvalidPath("path is empty".into()));
    }
    let limit = MAX_SWEEP_STEP_DEG.to_radians() + 1e-12;
    for (i, w) in path.windows(2).enumerate() {
        let d1 = (w[1].q_o1 - w[0].q_o1).abs();
        let d2 = ((w[1].q_o2 - w[1].q_o1) - (w[0].q_o2 - w[0].q_o1)).abs();
        if d1 > limit || d2 > limit {
            return Err(Error::InvalidPath(format!(
                "step {i}->{} exceeds {MAX_SWEEP_STEP_DEG} deg per joint",
                i + 1
            )));
        }
    }
    let mut out = Vec::with_capacity(path.len());
    let mut prev = initial.copied();
    for (i, pose) in path.iter().enumerate() {
        let s = solve_pose(pose, geom, prev.as_ref(), settings).map_err(|e| e.at_index(i))?;
        out.push(s);
        prev = Some(s);
    }
    Ok(out)
}

/// Solve every pose of the grid `mcp_deg × pip_deg` (row-major, MCP outer).
///
/// Each row starts from the first state of the previous row and walks along
/// PIP, so consecutive solves stay on one assembly branch.
pub fn solve_grid(
    geom: &Geometry,
    mcp_deg: &[f64],
    pip_deg: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<MechanismState>> {
    let closure = Closure::new(geom);
    let mut out = Vec::with_capacity(mcp_deg.len() * pip_deg.len());
    solve_grid_with(&closure, geom, mcp_deg, pip_deg, settings, |_, s| {
        out.push(*s);
        true
    })?;
    Ok(out)
}

/// Grid walk shared with the optimizer. `visit` receives the flat pose index
/// and the solved state; returning `false` stops the walk early.
pub(crate) fn solve_grid_with(
    closure: &Closure,
    geom: &Geometry,
    mcp_deg: &[f64],
    pip_deg: &[f64],
    settings: &SolverSettings,
    mut visit: impl FnMut(usize, &MechanismState) -> bool,
) -> Result<bool> {
    let mut row_start = match geom.seed {
        Some(s) => s,
        None => {
            return Err(Error::InvalidGeometry(
                "no initial guess and the geometry has no seed state".into(),
            ))
        }
    };
    let mut index = 0;
    for &m in mcp_deg {
        let mut prev = row_start;
        for (j, &p) in pip_deg.iter().enumerate() {
            let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, m, p);
            let mut vars = extended(&prev, &pose);
            newton(closure, &mut vars, &POSE_GIVEN, settings).map_err(|e| e.at_index(index))?;
            let mut s = [0.0; 8];
            s.copy_from_slice(&vars[..8]);
            prev = MechanismState::from_array(s);
            if j == 0 {
                row_start = prev;
            }
            if !visit(index, &prev) {
                return Ok(false);
            }
            index += 1;
        }
    }
    Ok(true)
}

/// Stroke and slider limit check with closed bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitReport {
    pub lx_ok: bool,
    pub c1_ok: bool,
    pub c2_ok: bool,
    /// Distance to the nearest bound; negative when violated (mm).
    pub lx_margin: f64,
    pub c1_margin: f64,
    pub c2_margin: f64,
}

impl LimitReport {
    pub fn all_ok(&self) -> bool {
        self.lx_ok && self.c1_ok && self.c2_ok
    }
}

fn margin(v: f64, hi: f64) -> f64 {
    v.min(hi - v)
}

pub fn check_limits(state: &MechanismState, anthro: &Anthropometry, l_max: f64) -> LimitReport {
    let lx_margin = margin(state.l_x, l_max);
    let c1_margin = margin(state.c1, anthro.c1_max);
    let c2_margin = margin(state.c2, anthro.c2_max);
    LimitReport {
        lx_ok: lx_margin >= 0.0,
        c1_ok: c1_margin >= 0.0,
        c2_ok: c2_margin >= 0.0,
        lx_margin,
        c1_margin,
        c2_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(l_x: f64, c1: f64, c2: f64) -> MechanismState {
        MechanismState {
            l_x,
            c1,
            c2,
            ..Default::default()
        }
    }

    #[test]
    fn limits_are_closed_bounds() {
        let a = Anthropometry::MEDIUM;
        let r = check_limits(&state(10.0, 50.0, 5.0), &a, 50.0);
        assert!(r.c1_ok);
        assert_eq!(r.c1_margin, 0.0);
        assert!(r.all_ok());

        let r = check_limits(&state(10.0, 5.0, 40.1), &a, 50.0);
        assert!(!r.c2_ok);
        assert!(r.c2_margin < 0.0);

        let r = check_limits(&state(-0.5, 5.0, 5.0), &a, 50.0);
        assert!(!r.lx_ok);
        assert_eq!(r.lx_margin, -0.5);
        assert!(r.c1_ok && r.c2_ok);
    }

    #[test]
    fn settings_validation() {
        let bad = SolverSettings {
            max_iter: 0,
            ..Default::default()
        };
        assert!(bad.check().is_err());
        let bad = SolverSettings {
            damping: 1.5,
            ..Default::default()
        };
        assert!(bad.check().is_err());
        assert!(SolverSettings::default().check().is_ok());
    }
}
