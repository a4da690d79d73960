//! The four planar vector loops and their derivatives.
//!
//! Each loop is a sum of terms `l·e^{iq}` that vanishes at a consistent
//! configuration:
//!
//! ```text
//! L1: (l_x + l_act)·e^{iq_N} + L_AB·e^{iq_B} + l_BK·e^{iq_K} + l_KN·e^{iq_KN}
//! L2: l_BK·e^{iq_K} + (L_BC + L_CI)·e^{iq_B} + c_1·e^{iq_o1} + l_LK·e^{iq_LK}
//! L3: l_BK·e^{iq_K} + l_BD·e^{iq_B} + (L_ED + L_EJ)·e^{iq_D} + c_2·e^{iq_o2}
//!     + l_ML·e^{iq_o1} + l_LK·e^{iq_LK}
//! L4: (l_BH + l_HG)·e^{iq_K} + L_GF·e^{iq_G} + l_FD·e^{iq_D} + l_DB·e^{iq_*}
//! ```
//!
//! `l_DB = -l_BD` is the signed D→B segment and `q_*` is `q_K` or `q_B`
//! depending on [`DbAngle`].

use nalgebra::{SMatrix, SVector};

use crate::geometry::{DbAngle, FingerPose, Geometry, Link, MechanismState};

/// Loop residuals in the fixed order `L1x, L1y, L2x, L2y, L3x, L3y, L4x, L4y` (mm).
pub type Residual8 = SVector<f64, 8>;

/// Derivatives of the eight residuals with respect to the eight unknowns
/// (columns in [`MechanismState::NAMES`] order) followed by `q_o1`, `q_o2`.
pub type LoopJacobian = SMatrix<f64, 8, 10>;

/// Index of a variable in the extended vector `[state(8), q_o1, q_o2]`.
pub mod var {
    pub const L_X: usize = 0;
    pub const C1: usize = 1;
    pub const C2: usize = 2;
    pub const Q_B: usize = 3;
    pub const Q_D: usize = 4;
    pub const Q_G: usize = 5;
    pub const Q_K: usize = 6;
    pub const Q_N: usize = 7;
    pub const Q_O1: usize = 8;
    pub const Q_O2: usize = 9;
}

/// Constants of the loop equations, precomputed from a [`Geometry`].
#[derive(Debug, Clone, Copy)]
pub struct Closure {
    l_ab: f64,
    l_bk: f64,
    l_bi: f64,
    l_bd: f64,
    l_dj: f64,
    l_bg: f64,
    l_gf: f64,
    l_fd: f64,
    l_act: f64,
    kn: (f64, f64),
    lk: (f64, f64),
    l_ml: f64,
    db_on_qb: bool,
}

impl Closure {
    /// Composite segments are taken as signed values without validation;
    /// use [`Geometry::validate`] to reject non-positive composites.
    pub fn new(geom: &Geometry) -> Closure {
        let l_bd = geom.link(Link::BC) + geom.s_bd.value() * geom.link(Link::CD);
        let l_bh = geom.link(Link::KH) + geom.s_bh.value() * geom.link(Link::KB);
        let l_fd = geom.link(Link::ED) + geom.s_fd.value() * geom.link(Link::EF);
        Closure {
            l_ab: geom.link(Link::AB),
            l_bk: geom.link(Link::KB),
            l_bi: geom.link(Link::BC) + geom.link(Link::CI),
            l_bd,
            l_dj: geom.link(Link::ED) + geom.link(Link::EJ),
            l_bg: l_bh + geom.link(Link::GH),
            l_gf: geom.link(Link::GF),
            l_fd,
            l_act: geom.l_act,
            kn: (geom.l_kn * geom.q_kn.cos(), geom.l_kn * geom.q_kn.sin()),
            lk: (geom.l_lk * geom.q_lk.cos(), geom.l_lk * geom.q_lk.sin()),
            l_ml: geom.l_ml,
            db_on_qb: geom.db_angle == DbAngle::CorrectedQb,
        }
    }

    /// Residuals for the extended variable vector `[state(8), q_o1, q_o2]`.
    pub fn residuals(&self, v: &[f64; 10]) -> Residual8 {
        use var::*;
        let (sb, cb) = v[Q_B].sin_cos();
        let (sd, cd) = v[Q_D].sin_cos();
        let (sg, cg) = v[Q_G].sin_cos();
        let (sk, ck) = v[Q_K].sin_cos();
        let (sn, cn) = v[Q_N].sin_cos();
        let (s1, c1) = v[Q_O1].sin_cos();
        let (s2, c2) = v[Q_O2].sin_cos();
        let (sdb, cdb) = if self.db_on_qb { (sb, cb) } else { (sk, ck) };
        let stroke = v[L_X] + self.l_act;
        let l_db = -self.l_bd;

        Residual8::from([
            stroke * cn + self.l_ab * cb + self.l_bk * ck + self.kn.0,
            stroke * sn + self.l_ab * sb + self.l_bk * sk + self.kn.1,
            self.l_bk * ck + self.l_bi * cb + v[C1] * c1 + self.lk.0,
            self.l_bk * sk + self.l_bi * sb + v[C1] * s1 + self.lk.1,
            self.l_bk * ck + self.l_bd * cb + self.l_dj * cd + v[C2] * c2 + self.l_ml * c1 + self.lk.0,
            self.l_bk * sk + self.l_bd * sb + self.l_dj * sd + v[C2] * s2 + self.l_ml * s1 + self.lk.1,
            self.l_bg * ck + self.l_gf * cg + self.l_fd * cd + l_db * cdb,
            self.l_bg * sk + self.l_gf * sg + self.l_fd * sd + l_db * sdb,
        ])
    }

    /// Analytic derivatives of [`Closure::residuals`].
    pub fn jacobian(&self, v: &[f64; 10]) -> LoopJacobian {
        use var::*;
        let (sb, cb) = v[Q_B].sin_cos();
        let (sd, cd) = v[Q_D].sin_cos();
        let (sg, cg) = v[Q_G].sin_cos();
        let (sk, ck) = v[Q_K].sin_cos();
        let (sn, cn) = v[Q_N].sin_cos();
        let (s1, c1) = v[Q_O1].sin_cos();
        let (s2, c2) = v[Q_O2].sin_cos();
        let stroke = v[L_X] + self.l_act;
        let l_db = -self.l_bd;

        let mut j = LoopJacobian::zeros();
        // L1
        j[(0, L_X)] = cn;
        j[(1, L_X)] = sn;
        j[(0, Q_N)] = -stroke * sn;
        j[(1, Q_N)] = stroke * cn;
        j[(0, Q_B)] = -self.l_ab * sb;
        j[(1, Q_B)] = self.l_ab * cb;
        j[(0, Q_K)] = -self.l_bk * sk;
        j[(1, Q_K)] = self.l_bk * ck;
        // L2
        j[(2, Q_K)] = -self.l_bk * sk;
        j[(3, Q_K)] = self.l_bk * ck;
        j[(2, Q_B)] = -self.l_bi * sb;
        j[(3, Q_B)] = self.l_bi * cb;
        j[(2, C1)] = c1;
        j[(3, C1)] = s1;
        j[(2, Q_O1)] = -v[C1] * s1;
        j[(3, Q_O1)] = v[C1] * c1;
        // L3
        j[(4, Q_K)] = -self.l_bk * sk;
        j[(5, Q_K)] = self.l_bk * ck;
        j[(4, Q_B)] = -self.l_bd * sb;
        j[(5, Q_B)] = self.l_bd * cb;
        j[(4, Q_D)] = -self.l_dj * sd;
        j[(5, Q_D)] = self.l_dj * cd;
        j[(4, C2)] = c2;
        j[(5, C2)] = s2;
        j[(4, Q_O2)] = -v[C2] * s2;
        j[(5, Q_O2)] = v[C2] * c2;
        j[(4, Q_O1)] = -self.l_ml * s1;
        j[(5, Q_O1)] = self.l_ml * c1;
        // L4
        j[(6, Q_K)] = -self.l_bg * sk;
        j[(7, Q_K)] = self.l_bg * ck;
        j[(6, Q_G)] = -self.l_gf * sg;
        j[(7, Q_G)] = self.l_gf * cg;
        j[(6, Q_D)] = -self.l_fd * sd;
        j[(7, Q_D)] = self.l_fd * cd;
        let db_col = if self.db_on_qb { Q_B } else { Q_K };
        let q_db = v[db_col];
        j[(6, db_col)] += -l_db * q_db.sin();
        j[(7, db_col)] += l_db * q_db.cos();
        j
    }

    /// Length of the B→D segment used in the third loop.
    pub fn l_bd(&self) -> f64 {
        self.l_bd
    }
}

/// Pack a state and pose into the extended variable vector.
pub fn extended(state: &MechanismState, pose: &FingerPose) -> [f64; 10] {
    let s = state.to_array();
    [s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7], pose.q_o1, pose.q_o2]
}

/// Evaluate the eight closure residuals.
pub fn loop_residuals(state: &MechanismState, pose: &FingerPose, geom: &Geometry) -> Residual8 {
    Closure::new(geom).residuals(&extended(state, pose))
}

/// Analytic loop Jacobian with respect to the eight unknowns and the pose.
pub fn loop_jacobian(state: &MechanismState, pose: &FingerPose, geom: &Geometry) -> LoopJacobian {
    Closure::new(geom).jacobian(&extended(state, pose))
}
