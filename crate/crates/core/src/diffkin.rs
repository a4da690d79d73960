//! Differential kinematics: block partition of the differentiated closure
//! equations and reduction to the 2×2 measured-to-output Jacobian.
//!
//! Row order of the partition is fixed: the two output rows are `L2y, L4x`,
//! the six constraint rows are `L1x, L1y, L2x, L3x, L3y, L4y`. Column groups
//! are `q_fin = [q_o1, q_o2]`, `q_m = [l_x, q_B]` and
//! `q_p = [q_K, q_D, q_G, q_N, c_1, c_2]`. With that split none of the six
//! blocks is identically zero and `J_Cp` stays invertible across the working
//! branch (every passive coordinate appears in some constraint row with a
//! coefficient bounded away from zero).

use nalgebra::{Matrix2, SMatrix, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{FingerPose, Geometry, MechanismState};
use crate::loops::{extended, var, Closure};
use crate::solver::{solve_measured_with, solve_pose, SolverSettings};

/// Residual rows (in `Residual8` order) forming the output block.
pub const OUTPUT_ROWS: [usize; 2] = [3, 6];
/// Residual rows forming the constraint block.
pub const CONSTRAINT_ROWS: [usize; 6] = [0, 1, 2, 4, 5, 7];
/// Columns of the finger coordinates in the extended variable vector.
pub const FIN_COLS: [usize; 2] = [var::Q_O1, var::Q_O2];
/// Columns of the measured coordinates.
pub const MEASURED_COLS: [usize; 2] = [var::L_X, var::Q_B];
/// Columns of the passive coordinates.
pub const PASSIVE_COLS: [usize; 6] = [var::Q_K, var::Q_D, var::Q_G, var::Q_N, var::C1, var::C2];

/// Condition numbers above this mark a singular block.
pub const CONDITION_CAP: f64 = 1e12;

pub type Matrix6x2 = SMatrix<f64, 6, 2>;
pub type Matrix2x6 = SMatrix<f64, 2, 6>;
pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Coefficients of
/// `[J_Om; J_Op]·q̇_fin = [J_Tm J_Tp; J_Cm J_Cp]·[q̇_m; q̇_p]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianBlocks {
    pub j_om: Matrix2<f64>,
    pub j_op: Matrix6x2,
    pub j_tm: Matrix2<f64>,
    pub j_tp: Matrix2x6,
    pub j_cm: Matrix6x2,
    pub j_cp: Matrix6,
}

impl JacobianBlocks {
    /// Residual of the stacked identity for the given rates; zero when the
    /// rates are consistent with the closure constraints.
    pub fn identity_residual(
        &self,
        q_fin: &Vector2<f64>,
        q_m: &Vector2<f64>,
        q_p: &SMatrix<f64, 6, 1>,
    ) -> SMatrix<f64, 8, 1> {
        let top = self.j_om * q_fin - self.j_tm * q_m - self.j_tp * q_p;
        let bottom = self.j_op * q_fin - self.j_cm * q_m - self.j_cp * q_p;
        let mut out = SMatrix::<f64, 8, 1>::zeros();
        out.fixed_rows_mut::<2>(0).copy_from(&top);
        out.fixed_rows_mut::<6>(2).copy_from(&bottom);
        out
    }
}

/// Affine map `q̇_p = from_fin·q̇_fin + from_measured·q̇_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveMap {
    pub from_fin: Matrix6x2,
    pub from_measured: Matrix6x2,
}

impl PassiveMap {
    pub fn apply(&self, q_fin: &Vector2<f64>, q_m: &Vector2<f64>) -> SMatrix<f64, 6, 1> {
        self.from_fin * q_fin + self.from_measured * q_m
    }
}

/// The 2×2 map `[l̇_x, q̇_B] → [q̇_o1, q̇_o2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedJacobian {
    pub j_a: Matrix2<f64>,
    /// 2-norm condition number of `j_a`.
    pub condition: f64,
}

/// Rates of absolute orientations in terms of anatomical rates:
/// `[q̇_o1, q̇_o2] = A·[θ̇_MCP, θ̇_PIP]`.
pub fn anatomical_rate_map() -> Matrix2<f64> {
    Matrix2::new(-1.0, 0.0, -1.0, -1.0)
}

impl ReducedJacobian {
    /// Map from measured rates to anatomical joint rates `[θ̇_MCP, θ̇_PIP]`.
    pub fn joint_space(&self) -> Matrix2<f64> {
        // A⁻¹ = [[-1, 0], [1, -1]]
        Matrix2::new(-1.0, 0.0, 1.0, -1.0) * self.j_a
    }
}

fn ratio_of_extremes(max: f64, min: f64) -> f64 {
    if min == 0.0 || !min.is_finite() || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

fn cond2(m: &Matrix2<f64>) -> f64 {
    let sv = m.singular_values();
    ratio_of_extremes(sv.max(), sv.min())
}

fn cond6(m: &Matrix6) -> f64 {
    let sv = m.singular_values();
    ratio_of_extremes(sv.max(), sv.min())
}

/// Assemble the block partition from the analytic loop derivatives.
pub fn assemble_blocks(state: &MechanismState, pose: &FingerPose, geom: &Geometry) -> JacobianBlocks {
    blocks_from(&Closure::new(geom), state, pose)
}

pub(crate) fn blocks_from(closure: &Closure, state: &MechanismState, pose: &FingerPose) -> JacobianBlocks {
    let j = closure.jacobian(&extended(state, pose));
    let pick = |rows: &[usize], cols: &[usize], sign: f64, out: &mut dyn FnMut(usize, usize, f64)| {
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                out(ri, ci, sign * j[(r, c)]);
            }
        }
    };
    let mut b = JacobianBlocks {
        j_om: Matrix2::zeros(),
        j_op: Matrix6x2::zeros(),
        j_tm: Matrix2::zeros(),
        j_tp: Matrix2x6::zeros(),
        j_cm: Matrix6x2::zeros(),
        j_cp: Matrix6::zeros(),
    };
    // Moving the finger terms across the equals sign gives J_O = -∂r/∂q_fin.
    pick(&OUTPUT_ROWS, &FIN_COLS, -1.0, &mut |r, c, v| b.j_om[(r, c)] = v);
    pick(&CONSTRAINT_ROWS, &FIN_COLS, -1.0, &mut |r, c, v| b.j_op[(r, c)] = v);
    pick(&OUTPUT_ROWS, &MEASURED_COLS, 1.0, &mut |r, c, v| b.j_tm[(r, c)] = v);
    pick(&OUTPUT_ROWS, &PASSIVE_COLS, 1.0, &mut |r, c, v| b.j_tp[(r, c)] = v);
    pick(&CONSTRAINT_ROWS, &MEASURED_COLS, 1.0, &mut |r, c, v| b.j_cm[(r, c)] = v);
    pick(&CONSTRAINT_ROWS, &PASSIVE_COLS, 1.0, &mut |r, c, v| b.j_cp[(r, c)] = v);
    b
}

/// Express passive rates through finger and measured rates.
pub fn eliminate_passive(blocks: &JacobianBlocks) -> Result<PassiveMap> {
    let condition = cond6(&blocks.j_cp);
    if !(condition <= CONDITION_CAP) {
        return Err(Error::PassiveSingular { condition });
    }
    let lu = blocks.j_cp.lu();
    let from_fin = lu.solve(&blocks.j_op).ok_or(Error::PassiveSingular { condition })?;
    let from_measured = -lu.solve(&blocks.j_cm).ok_or(Error::PassiveSingular { condition })?;
    Ok(PassiveMap {
        from_fin,
        from_measured,
    })
}

/// Reduce the partition to `J_A = [J_Om − J_Tp·J_Cp⁻¹·J_Op]⁻¹·[J_Tm − J_Tp·J_Cp⁻¹·J_Cm]`.
pub fn reduced_jacobian(blocks: &JacobianBlocks) -> Result<ReducedJacobian> {
    let map = eliminate_passive(blocks)?;
    // J_Cp⁻¹·J_Op = from_fin, J_Cp⁻¹·J_Cm = -from_measured
    let output = blocks.j_om - blocks.j_tp * map.from_fin;
    let measured = blocks.j_tm + blocks.j_tp * map.from_measured;
    let out_cond = cond2(&output);
    if !(out_cond <= CONDITION_CAP) {
        return Err(Error::OutputSingular { condition: out_cond });
    }
    let inv = output
        .try_inverse()
        .ok_or(Error::OutputSingular { condition: out_cond })?;
    let j_a = inv * measured;
    let condition = cond2(&j_a);
    if !(condition <= CONDITION_CAP) {
        return Err(Error::OutputSingular { condition });
    }
    Ok(ReducedJacobian { j_a, condition })
}

/// Solve the pose and return its reduced Jacobian in one call.
pub fn jacobian_at(
    pose: &FingerPose,
    geom: &Geometry,
    guess: Option<&MechanismState>,
    settings: &SolverSettings,
) -> Result<(MechanismState, ReducedJacobian)> {
    let state = solve_pose(pose, geom, guess, settings)?;
    let j = reduced_jacobian(&assemble_blocks(&state, pose, geom))?;
    Ok((state, j))
}

/// Central-difference estimate of `∂(q_o1, q_o2)/∂(l_x, q_B)`.
///
/// Each measured coordinate is perturbed by `±h` and the closure is re-solved
/// with `(l_x, q_B)` held and the finger orientations free. Independent of
/// the block algebra in [`reduced_jacobian`].
pub fn fd_jacobian_oracle(
    pose: &FingerPose,
    geom: &Geometry,
    h: f64,
    guess: Option<&MechanismState>,
    settings: &SolverSettings,
) -> Result<Matrix2<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidGeometry(format!("oracle step must be positive, got {h}")));
    }
    let state = solve_pose(pose, geom, guess, settings)?;
    let closure = Closure::new(geom);
    let mut out = Matrix2::zeros();
    for k in 0..2 {
        let solve_at = |sign: f64| -> Result<FingerPose> {
            let (mut l_x, mut q_b) = (state.l_x, state.q_b);
            if k == 0 {
                l_x += sign * h;
            } else {
                q_b += sign * h;
            }
            solve_measured_with(&closure, l_x, q_b, (&state, pose), settings).map(|(_, p)| p)
        };
        let plus = solve_at(1.0)?;
        let minus = solve_at(-1.0)?;
        out[(0, k)] = (plus.q_o1 - minus.q_o1) / (2.0 * h);
        out[(1, k)] = (plus.q_o2 - minus.q_o2) / (2.0 * h);
    }
    Ok(out)
}

/// Max-entry relative disagreement between two 2×2 Jacobians, normalised by
/// the largest entry of `reference`.
pub fn max_entry_relative_error(a: &Matrix2<f64>, reference: &Matrix2<f64>) -> f64 {
    let scale = reference.amax();
    (a - reference).amax() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_covers_all_rows_and_columns() {
        let mut rows: Vec<usize> = OUTPUT_ROWS.iter().chain(CONSTRAINT_ROWS.iter()).copied().collect();
        rows.sort();
        assert_eq!(rows, (0..8).collect::<Vec<_>>());
        let mut cols: Vec<usize> = FIN_COLS
            .iter()
            .chain(MEASURED_COLS.iter())
            .chain(PASSIVE_COLS.iter())
            .copied()
            .collect();
        cols.sort();
        assert_eq!(cols, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn anatomical_map_inverse() {
        let a = anatomical_rate_map();
        let a_inv = Matrix2::new(-1.0, 0.0, 1.0, -1.0);
        assert_eq!(a * a_inv, Matrix2::identity());
    }

    #[test]
    fn singular_passive_block_is_reported() {
        let b = JacobianBlocks {
            j_om: Matrix2::identity(),
            j_op: Matrix6x2::zeros(),
            j_tm: Matrix2::identity(),
            j_tp: Matrix2x6::zeros(),
            j_cm: Matrix6x2::zeros(),
            j_cp: Matrix6::zeros(),
        };
        assert!(matches!(eliminate_passive(&b), Err(Error::PassiveSingular { .. })));
        let mut b = b;
        b.j_cp = Matrix6::identity();
        b.j_om = Matrix2::new(1.0, 2.0, 2.0, 4.0);
        assert!(matches!(reduced_jacobian(&b), Err(Error::OutputSingular { .. })));
    }
}
