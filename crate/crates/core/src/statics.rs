//! Actuator force to finger-joint torque transmission.
//!
//! Torques are reported on the anatomical joints, flexion positive, so that
//! they pair with `[θ̇_MCP, θ̇_PIP]` in the power balance.

use nalgebra::{Matrix2, Vector2};

use crate::diffkin::ReducedJacobian;
use crate::error::{Error, Result};

/// Below this magnitude a joint torque counts as zero.
pub const TORQUE_EPS: f64 = 1e-12;

/// MCP and PIP torques in N·mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointTorques {
    pub tau1: f64,
    pub tau2: f64,
}

impl JointTorques {
    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.tau1, self.tau2)
    }

    /// Euclidean norm, the optimizer's cost contribution at one pose.
    pub fn norm(&self) -> f64 {
        self.tau1.hypot(self.tau2)
    }
}

/// Force of the linear actuator. The torque at joint B is always zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorWrench {
    pub f_ac: f64,
}

impl ActuatorWrench {
    pub fn new(f_ac: f64) -> Self {
        ActuatorWrench { f_ac }
    }

    /// `[f_ac, τ_B]`
    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.f_ac, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

fn transposed_solve(j: &Matrix2<f64>, rhs: &Vector2<f64>) -> Result<Vector2<f64>> {
    let jt = j.transpose();
    let det = jt.determinant();
    let scale = jt.abs().max().powi(2);
    if det == 0.0 || !det.is_finite() || det.abs() <= 1e-14 * scale {
        return Err(Error::OutputSingular {
            condition: f64::INFINITY,
        });
    }
    jt.lu().solve(rhs).ok_or(Error::OutputSingular {
        condition: f64::INFINITY,
    })
}

/// `τ = J⁻ᵀ·[f_ac, 0]` with `J` the joint-space reduced Jacobian.
pub fn joint_torques(j_a: &ReducedJacobian, wrench: &ActuatorWrench) -> Result<JointTorques> {
    let tau = transposed_solve(&j_a.joint_space(), &wrench.as_vector())?;
    Ok(JointTorques {
        tau1: tau[0],
        tau2: tau[1],
    })
}

/// Virtual-work residual `τᵀ·θ̇ − τ_mᵀ·q̇_m` for measured rates `q_m_dot`.
pub fn power_balance(j_a: &ReducedJacobian, wrench: &ActuatorWrench, q_m_dot: &Vector2<f64>) -> Result<f64> {
    let tau = joint_torques(j_a, wrench)?;
    let theta_dot = j_a.joint_space() * q_m_dot;
    Ok(tau.as_vector().dot(&theta_dot) - wrench.as_vector().dot(q_m_dot))
}

/// Stable when both torques push the finger the same way.
pub fn grasp_stability(torques: &JointTorques) -> Result<Stability> {
    if torques.tau1.abs() < TORQUE_EPS || torques.tau2.abs() < TORQUE_EPS {
        return Err(Error::Indeterminate);
    }
    if torques.tau1.signum() == torques.tau2.signum() {
        Ok(Stability::Stable)
    } else {
        Ok(Stability::Unstable)
    }
}

/// `τ₁ / τ₂`
pub fn torque_ratio(torques: &JointTorques) -> Result<f64> {
    if torques.tau2 == 0.0 {
        return Err(Error::RatioUndefined);
    }
    Ok(torques.tau1 / torques.tau2)
}

pub const RATIO_MIN: f64 = 1.0;
pub const RATIO_MAX: f64 = 7.5;

/// Whether a ratio lies inside the admissible transmission band.
pub fn ratio_feasible(ratio: f64) -> bool {
    (RATIO_MIN..=RATIO_MAX).contains(&ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reduced(m: Matrix2<f64>) -> ReducedJacobian {
        ReducedJacobian {
            j_a: m,
            condition: 1.0,
        }
    }

    fn t(tau1: f64, tau2: f64) -> JointTorques {
        JointTorques { tau1, tau2 }
    }

    #[test]
    fn zero_force_gives_zero_torque() {
        let j = reduced(Matrix2::new(0.02, 0.1, -0.03, 0.4));
        let tau = joint_torques(&j, &ActuatorWrench::new(0.0)).unwrap();
        assert_eq!(tau.tau1, 0.0);
        assert_eq!(tau.tau2, 0.0);
    }

    #[test]
    fn stability_examples() {
        assert_eq!(grasp_stability(&t(10.0, 2.0)).unwrap(), Stability::Stable);
        assert_eq!(grasp_stability(&t(-10.0, -2.0)).unwrap(), Stability::Stable);
        assert_eq!(grasp_stability(&t(10.0, -2.0)).unwrap(), Stability::Unstable);
        assert!(matches!(grasp_stability(&t(0.0, 5.0)), Err(Error::Indeterminate)));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(torque_ratio(&t(7.5, 1.0)).unwrap(), 7.5);
        assert!(ratio_feasible(7.5));
        assert!(ratio_feasible(1.0));
        assert_eq!(torque_ratio(&t(0.9, 1.0)).unwrap(), 0.9);
        assert!(!ratio_feasible(0.9));
        assert!(matches!(torque_ratio(&t(1.0, 0.0)), Err(Error::RatioUndefined)));
    }

    #[test]
    fn singular_jacobian_is_rejected() {
        let j = reduced(Matrix2::new(1.0, 2.0, 2.0, 4.0));
        assert!(matches!(
            joint_torques(&j, &ActuatorWrench::new(1.0)),
            Err(Error::OutputSingular { .. })
        ));
    }

    fn jacobian() -> impl Strategy<Value = Matrix2<f64>> {
        prop::array::uniform4(-2.0..2.0f64)
            .prop_filter("well conditioned", |a| (a[0] * a[3] - a[1] * a[2]).abs() > 0.05)
            .prop_map(|a| Matrix2::new(a[0], a[1], a[2], a[3]))
    }

    proptest! {
        #[test]
        fn torques_are_linear_in_force(m in jacobian(), f in 0.1..100.0f64) {
            let j = reduced(m);
            let one = joint_torques(&j, &ActuatorWrench::new(f)).unwrap();
            let two = joint_torques(&j, &ActuatorWrench::new(2.0 * f)).unwrap();
            prop_assert!((two.tau1 - 2.0 * one.tau1).abs() <= 1e-12 * one.tau1.abs().max(1.0));
            prop_assert!((two.tau2 - 2.0 * one.tau2).abs() <= 1e-12 * one.tau2.abs().max(1.0));
        }

        #[test]
        fn power_is_balanced(m in jacobian(), f in -50.0..50.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
            let r = power_balance(&reduced(m), &ActuatorWrench::new(f), &Vector2::new(a, b)).unwrap();
            prop_assert!(r.abs() < 1e-9);
        }

        #[test]
        fn outcomes_are_force_invariant(m in jacobian(), f in 0.1..10.0f64, k in 0.1..10.0f64) {
            let j = reduced(m);
            let a = joint_torques(&j, &ActuatorWrench::new(f)).unwrap();
            let b = joint_torques(&j, &ActuatorWrench::new(k * f)).unwrap();
            if a.tau1.abs() > 1e-9 && a.tau2.abs() > 1e-9 {
                prop_assert_eq!(grasp_stability(&a).unwrap(), grasp_stability(&b).unwrap());
                let ra = torque_ratio(&a).unwrap();
                let rb = torque_ratio(&b).unwrap();
                prop_assert!((ra - rb).abs() <= 1e-10 * ra.abs().max(1.0));
            }
        }

        #[test]
        fn transposed_solve_matches_inverse(m in jacobian(), f in -50.0..50.0f64) {
            let j = reduced(m);
            let tau = joint_torques(&j, &ActuatorWrench::new(f)).unwrap();
            let inv = j.joint_space().try_inverse().unwrap().transpose();
            let direct = inv * Vector2::new(f, 0.0);
            prop_assert!((tau.tau1 - direct[0]).abs() < 1e-10 * direct.norm().max(1.0));
            prop_assert!((tau.tau2 - direct[1]).abs() < 1e-10 * direct.norm().max(1.0));
        }
    }
}
